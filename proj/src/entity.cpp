#include "w5h/entity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "w5h/json_io.hpp"
#include "w5h/text_index.hpp"

namespace w5h {

namespace {

// Lowercase, non-alphanumeric runs collapsed to '-'.
std::string slug(const std::string& s)
{
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : casefold(s)) {
        bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c >= 0x80;
        if (alnum) {
            if (pending_sep && !out.empty()) out.push_back('-');
            pending_sep = false;
            out.push_back(static_cast<char>(c));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

std::string token_signature(const std::set<std::string>& tokens)
{
    std::string sig;
    for (const auto& t : tokens) {
        if (!sig.empty()) sig.push_back(' ');
        sig += t;
    }
    return sig;
}

std::vector<std::string> name_signatures(const PersonEntity& e)
{
    std::vector<std::string> sigs;
    for (const auto& n : e.names) {
        auto toks = normalize_name_tokens(n);
        if (!toks.empty()) sigs.push_back(token_signature(toks));
    }
    std::sort(sigs.begin(), sigs.end());
    sigs.erase(std::unique(sigs.begin(), sigs.end()), sigs.end());
    return sigs;
}

}  // namespace

std::set<std::string> normalize_name_tokens(const std::string& name)
{
    std::set<std::string> out;
    for (auto& t : tokenize(name)) {
        if (t.size() > 1) out.insert(std::move(t));
    }
    return out;
}

PersonEntity PersonEntity::from_ref(const PersonRef& ref)
{
    if (ref.raw_name.empty() && ref.raw_emails.empty())
        throw Error("person reference with neither name nor email");
    PersonEntity e;
    if (!ref.raw_name.empty()) e.names.insert(ref.raw_name);
    for (const auto& em : ref.raw_emails) e.emails.insert(casefold(em));
    if (!e.emails.empty()) {
        e.entity_id = "p:" + *e.emails.begin();
    } else {
        auto toks = normalize_name_tokens(ref.raw_name);
        if (!toks.empty()) {
            std::string joined;
            for (const auto& t : toks) {
                if (!joined.empty()) joined.push_back('-');
                joined += t;
            }
            e.entity_id = "p:" + joined;
        } else {
            e.entity_id = "p:" + slug(ref.raw_name);
        }
    }
    return e;
}

bool match_person(const PersonEntity& a, const PersonEntity& b)
{
    for (const auto& em : a.emails) {
        if (b.emails.count(em)) return true;
    }
    auto sa = name_signatures(a);
    auto sb = name_signatures(b);
    for (const auto& s : sa) {
        if (std::binary_search(sb.begin(), sb.end(), s)) return true;
    }
    return false;
}

bool match_person(const PersonRef& a, const PersonRef& b)
{
    return match_person(PersonEntity::from_ref(a), PersonEntity::from_ref(b));
}

bool match_person(const PersonRef& a, const PersonEntity& b)
{
    return match_person(PersonEntity::from_ref(a), b);
}

PersonEntity merge_person(const PersonEntity& a, const PersonEntity& b)
{
    PersonEntity out;
    out.entity_id = std::min(a.entity_id, b.entity_id);
    out.names = a.names;
    out.names.insert(b.names.begin(), b.names.end());
    out.emails = a.emails;
    out.emails.insert(b.emails.begin(), b.emails.end());
    return out;
}

namespace {

// R-Swoosh over profiles. Live entities never share a match key (an email or
// a name token signature), so one key lookup finds every current match.
struct SwooshState {
    std::vector<PersonEntity> slots;
    std::vector<std::vector<size_t>> members;  // ref indexes per slot
    std::vector<bool> alive;
    std::unordered_map<std::string, size_t> by_email;
    std::unordered_map<std::string, size_t> by_sig;

    void register_keys(size_t slot)
    {
        for (const auto& em : slots[slot].emails) by_email[em] = slot;
        for (const auto& sig : name_signatures(slots[slot])) by_sig[sig] = slot;
    }

    void unregister_keys(size_t slot)
    {
        for (const auto& em : slots[slot].emails) by_email.erase(em);
        for (const auto& sig : name_signatures(slots[slot])) by_sig.erase(sig);
    }

    void add(PersonEntity e, std::vector<size_t> refs)
    {
        std::vector<size_t> matches;
        auto consider = [&matches](auto it, auto end) {
            if (it != end) matches.push_back(it->second);
        };
        for (const auto& em : e.emails)
            consider(by_email.find(em), by_email.end());
        for (const auto& sig : name_signatures(e))
            consider(by_sig.find(sig), by_sig.end());
        std::sort(matches.begin(), matches.end());
        matches.erase(std::unique(matches.begin(), matches.end()), matches.end());

        for (size_t slot : matches) {
            e = merge_person(e, slots[slot]);
            refs.insert(refs.end(), members[slot].begin(), members[slot].end());
            unregister_keys(slot);
            alive[slot] = false;
        }
        size_t slot = slots.size();
        slots.push_back(std::move(e));
        members.push_back(std::move(refs));
        alive.push_back(true);
        register_keys(slot);
    }
};

// Final entity ids must be unique; slug fallbacks can rarely collide.
void dedupe_entity_ids(std::vector<PersonEntity>& entities)
{
    std::sort(entities.begin(), entities.end(),
              [](const PersonEntity& a, const PersonEntity& b) {
                  if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
                  return a.names < b.names;
              });
    for (size_t i = 1, dup = 2; i < entities.size(); ++i) {
        if (entities[i].entity_id == entities[i - 1].entity_id) {
            entities[i].entity_id += "~" + std::to_string(dup++);
        } else {
            dup = 2;
        }
    }
}

SwooshState run_swoosh(const std::vector<PersonRef>& refs)
{
    SwooshState state;
    for (size_t i = 0; i < refs.size(); ++i) {
        state.add(PersonEntity::from_ref(refs[i]), {i});
    }
    return state;
}

}  // namespace

std::vector<PersonEntity> rswoosh(const std::vector<PersonRef>& refs)
{
    SwooshState state = run_swoosh(refs);
    std::vector<PersonEntity> out;
    for (size_t i = 0; i < state.slots.size(); ++i) {
        if (state.alive[i]) out.push_back(std::move(state.slots[i]));
    }
    dedupe_entity_ids(out);
    return out;
}

namespace {

std::unordered_map<std::string, double> corpus_term_frequencies(
    const std::vector<TraceObject>& corpus)
{
    std::unordered_map<std::string, double> tf;
    for (const auto& obj : corpus) {
        for (Dimension d : kAllDimensions) {
            for (const auto& t :
                 tokenize(TextIndex::object_field_text(obj, d))) {
                tf[t] += 1.0;
            }
        }
    }
    return tf;
}

struct LocationResolver {
    // location entities keyed by canonical_id
    std::map<std::string, LocationEntity> entities;
    // normalized raw text -> canonical_id
    std::unordered_map<std::string, std::string> by_norm;

    void place(const std::string& norm, const std::string& surface,
               const std::string& id, const GeocodeCandidate* cand)
    {
        LocationEntity& e = entities[id];
        if (e.canonical_id.empty()) e.canonical_id = id;
        e.surface_forms.insert(surface);
        if (cand) {
            if (e.address.empty()) e.address = cand->address;
            if (!e.lat && cand->lat) e.lat = cand->lat;
            if (!e.lon && cand->lon) e.lon = cand->lon;
        }
        by_norm[norm] = id;
    }
};

bool coords_close(const LocationEntity& a, const LocationEntity& b)
{
    if (!a.lat || !a.lon || !b.lat || !b.lon) return false;
    return std::fabs(*a.lat - *b.lat) <= 1e-4 && std::fabs(*a.lon - *b.lon) <= 1e-4;
}

}  // namespace

const std::vector<GeocodeCandidate>* GeocodeCache::lookup(
    const std::string& raw_text) const
{
    auto it = entries.find(casefold(raw_text));
    return it == entries.end() ? nullptr : &it->second;
}

GeocodeCache GeocodeCache::load_file(const std::string& path)
{
    GeocodeCache cache;
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
    if (!j.is_object()) throw Error(path + ": expected a JSON object");
    for (auto& [raw, arr] : j.items()) {
        if (!arr.is_array())
            throw Error(path + ": entry '" + raw + "' must be an array");
        std::vector<GeocodeCandidate> cands;
        for (const auto& c : arr) {
            GeocodeCandidate gc;
            gc.address = c.at("address").get<std::string>();
            if (c.contains("lat")) gc.lat = c.at("lat").get<double>();
            if (c.contains("lon")) gc.lon = c.at("lon").get<double>();
            cands.push_back(std::move(gc));
        }
        cache.entries[casefold(raw)] = std::move(cands);
    }
    return cache;
}

std::pair<std::vector<LocationEntity>, std::vector<LocationRef>> resolve_where(
    const std::vector<LocationRef>& refs, const GeocodeCache& cache,
    const std::vector<TraceObject>& corpus)
{
    auto tf = corpus_term_frequencies(corpus);

    // Distinct normalized raw texts, each keeping every surface spelling.
    std::map<std::string, std::set<std::string>> norm_to_surfaces;
    for (const auto& r : refs) norm_to_surfaces[casefold(r.raw_text)].insert(r.raw_text);

    LocationResolver res;
    for (const auto& [norm, surfaces] : norm_to_surfaces) {
        const auto* cands = cache.lookup(norm);
        const GeocodeCandidate* best = nullptr;
        if (cands && !cands->empty()) {
            double best_score = -1.0;
            for (const auto& c : *cands) {
                double score = 0.0;
                for (const auto& t : tokenize(c.address)) {
                    auto it = tf.find(t);
                    if (it != tf.end()) score += it->second;
                }
                if (score > best_score) {  // ties keep the earlier candidate
                    best_score = score;
                    best = &c;
                }
            }
        }
        std::string id = best ? "loc:" + slug(best->address) : "loc:" + slug(norm);
        for (const auto& s : surfaces) res.place(norm, s, id, best);
    }

    // Merge entities whose coordinates agree to 1e-4 degrees.
    std::vector<std::string> ids;
    for (const auto& [id, e] : res.entities) ids.push_back(id);
    std::vector<size_t> parent(ids.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < ids.size(); ++i) {
        for (size_t j = i + 1; j < ids.size(); ++j) {
            if (coords_close(res.entities[ids[i]], res.entities[ids[j]])) {
                parent[find(j)] = find(i);
            }
        }
    }
    std::map<std::string, LocationEntity> merged;
    std::unordered_map<std::string, std::string> id_rewrite;
    for (size_t i = 0; i < ids.size(); ++i) {
        size_t root = find(i);
        // Representative id: smallest id in the component.
        std::string rep = ids[root];
        for (size_t j = 0; j < ids.size(); ++j) {
            if (find(j) == root && ids[j] < rep) rep = ids[j];
        }
        id_rewrite[ids[i]] = rep;
    }
    for (const auto& [id, e] : res.entities) {
        const std::string& rep = id_rewrite[id];
        LocationEntity& m = merged[rep];
        m.canonical_id = rep;
        m.surface_forms.insert(e.surface_forms.begin(), e.surface_forms.end());
        if (m.address.empty()) m.address = e.address;
        if (!m.lat && e.lat) m.lat = e.lat;
        if (!m.lon && e.lon) m.lon = e.lon;
    }

    std::vector<LocationRef> rewritten = refs;
    for (auto& r : rewritten) {
        const std::string& id = id_rewrite[res.by_norm[casefold(r.raw_text)]];
        r.canonical_id = id;
        const LocationEntity& e = merged[id];
        if (!r.lat && e.lat) r.lat = e.lat;
        if (!r.lon && e.lon) r.lon = e.lon;
    }

    std::vector<LocationEntity> out;
    for (auto& [id, e] : merged) out.push_back(std::move(e));
    return {std::move(out), std::move(rewritten)};
}

namespace {

// Identity "resolution": one entity per distinct surface signature.
std::vector<PersonEntity> identity_entities(
    const std::vector<PersonRef>& refs,
    std::unordered_map<std::string, std::string>& sig_to_id)
{
    auto signature = [](const PersonRef& r) {
        std::string sig = casefold(r.raw_name);
        std::vector<std::string> ems;
        for (const auto& e : r.raw_emails) ems.push_back(casefold(e));
        std::sort(ems.begin(), ems.end());
        for (const auto& e : ems) sig += "\x1f" + e;
        return sig;
    };
    std::map<std::string, PersonEntity> by_sig;
    for (const auto& r : refs) by_sig.emplace(signature(r), PersonEntity::from_ref(r));
    std::vector<PersonEntity> entities;
    std::vector<std::string> sigs;
    for (auto& [sig, e] : by_sig) {
        sigs.push_back(sig);
        entities.push_back(e);
    }
    // from_ref ids may repeat across distinct signatures; disambiguate.
    std::map<std::string, int> seen;
    for (auto& e : entities) {
        int n = ++seen[e.entity_id];
        if (n > 1) e.entity_id += "~" + std::to_string(n);
    }
    for (size_t i = 0; i < entities.size(); ++i) sig_to_id[sigs[i]] = entities[i].entity_id;
    return entities;
}

std::string ref_signature(const PersonRef& r)
{
    std::string sig = casefold(r.raw_name);
    std::vector<std::string> ems;
    for (const auto& e : r.raw_emails) ems.push_back(casefold(e));
    std::sort(ems.begin(), ems.end());
    for (const auto& e : ems) sig += "\x1f" + e;
    return sig;
}

}  // namespace

ResolveResult resolve_corpus(const std::vector<TraceObject>& corpus,
                             const GeocodeCache& cache,
                             const ResolveOptions& options)
{
    ResolveResult result;
    result.corpus = corpus;

    std::vector<PersonRef> all_refs;
    std::vector<std::pair<size_t, size_t>> positions;  // (object, ref index)
    for (size_t i = 0; i < result.corpus.size(); ++i) {
        for (size_t j = 0; j < result.corpus[i].who.size(); ++j) {
            all_refs.push_back(result.corpus[i].who[j]);
            positions.emplace_back(i, j);
        }
    }

    std::vector<std::string> ref_entity(all_refs.size());
    if (options.entity_resolution) {
        SwooshState state = run_swoosh(all_refs);
        // Map each live slot to its final (deduped) id.
        std::vector<PersonEntity> live;
        std::vector<size_t> live_slots;
        for (size_t i = 0; i < state.slots.size(); ++i) {
            if (state.alive[i]) {
                live.push_back(state.slots[i]);
                live_slots.push_back(i);
            }
        }
        std::vector<PersonEntity> deduped = live;
        dedupe_entity_ids(deduped);
        // Match deduped ids back to slots by content.
        auto key = [](const PersonEntity& e) {
            return std::make_pair(e.names, e.emails);
        };
        std::map<std::pair<std::set<std::string>, std::set<std::string>>,
                 std::string>
            id_of;
        for (const auto& e : deduped) id_of[key(e)] = e.entity_id;
        for (size_t k = 0; k < live.size(); ++k) {
            const std::string& final_id = id_of.at(key(live[k]));
            for (size_t ref_idx : state.members[live_slots[k]])
                ref_entity[ref_idx] = final_id;
        }
        result.persons = std::move(deduped);
    } else {
        std::unordered_map<std::string, std::string> sig_to_id;
        result.persons = identity_entities(all_refs, sig_to_id);
        for (size_t i = 0; i < all_refs.size(); ++i)
            ref_entity[i] = sig_to_id.at(ref_signature(all_refs[i]));
    }
    for (size_t i = 0; i < all_refs.size(); ++i) {
        auto [obj_idx, ref_idx] = positions[i];
        result.corpus[obj_idx].who[ref_idx].entity_id = ref_entity[i];
    }

    std::vector<LocationRef> loc_refs;
    std::vector<std::pair<size_t, size_t>> loc_positions;
    for (size_t i = 0; i < result.corpus.size(); ++i) {
        for (size_t j = 0; j < result.corpus[i].where.size(); ++j) {
            loc_refs.push_back(result.corpus[i].where[j]);
            loc_positions.emplace_back(i, j);
        }
    }
    if (options.entity_resolution) {
        auto [entities, rewritten] = resolve_where(loc_refs, cache, corpus);
        result.locations = std::move(entities);
        for (size_t i = 0; i < rewritten.size(); ++i) {
            auto [obj_idx, ref_idx] = loc_positions[i];
            result.corpus[obj_idx].where[ref_idx] = rewritten[i];
        }
    } else {
        GeocodeCache empty;
        std::vector<TraceObject> no_corpus;
        auto [entities, rewritten] = resolve_where(loc_refs, empty, no_corpus);
        result.locations = std::move(entities);
        for (size_t i = 0; i < rewritten.size(); ++i) {
            auto [obj_idx, ref_idx] = loc_positions[i];
            result.corpus[obj_idx].where[ref_idx] = rewritten[i];
        }
    }
    return result;
}

void resolve_query(Query& query, const std::vector<PersonEntity>& persons,
                   const std::vector<LocationEntity>& locations)
{
    std::unordered_map<std::string, const PersonEntity*> by_email;
    std::unordered_map<std::string, const PersonEntity*> by_sig;
    for (const auto& e : persons) {
        for (const auto& em : e.emails) by_email.emplace(em, &e);
        for (const auto& sig : name_signatures(e)) by_sig.emplace(sig, &e);
    }
    for (auto& ref : query.who) {
        if (!ref.entity_id.empty()) continue;
        const PersonEntity* hit = nullptr;
        for (const auto& em : ref.raw_emails) {
            auto it = by_email.find(casefold(em));
            if (it != by_email.end()) {
                hit = it->second;
                break;
            }
        }
        if (!hit && !ref.raw_name.empty()) {
            auto toks = normalize_name_tokens(ref.raw_name);
            if (!toks.empty()) {
                auto it = by_sig.find(token_signature(toks));
                if (it != by_sig.end()) hit = it->second;
            }
        }
        if (hit) ref.entity_id = hit->entity_id;
    }

    std::unordered_map<std::string, const LocationEntity*> by_surface;
    for (const auto& e : locations) {
        for (const auto& s : e.surface_forms) by_surface.emplace(casefold(s), &e);
    }
    for (auto& ref : query.where) {
        if (!ref.canonical_id.empty()) continue;
        auto it = by_surface.find(casefold(ref.raw_text));
        if (it != by_surface.end()) ref.canonical_id = it->second->canonical_id;
    }
}

void save_entities(const std::string& path,
                   const std::vector<PersonEntity>& persons,
                   const std::vector<LocationEntity>& locations)
{
    ordered_json j;
    ordered_json parr = ordered_json::array();
    for (const auto& e : persons) {
        ordered_json pe;
        pe["entity_id"] = e.entity_id;
        pe["names"] = std::vector<std::string>(e.names.begin(), e.names.end());
        pe["emails"] = std::vector<std::string>(e.emails.begin(), e.emails.end());
        parr.push_back(std::move(pe));
    }
    j["persons"] = std::move(parr);
    ordered_json larr = ordered_json::array();
    for (const auto& e : locations) {
        ordered_json le;
        le["canonical_id"] = e.canonical_id;
        le["surface_forms"] = std::vector<std::string>(e.surface_forms.begin(),
                                                       e.surface_forms.end());
        if (!e.address.empty()) le["address"] = e.address;
        if (e.lat) le["lat"] = *e.lat;
        if (e.lon) le["lon"] = *e.lon;
        larr.push_back(std::move(le));
    }
    j["locations"] = std::move(larr);
    write_file(path, j.dump(2) + "\n");
}

std::pair<std::vector<PersonEntity>, std::vector<LocationEntity>> load_entities(
    const std::string& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
    std::vector<PersonEntity> persons;
    const ordered_json empty_array = ordered_json::array();
    const ordered_json& parr = j.contains("persons") ? j.at("persons") : empty_array;
    for (const auto& pe : parr) {
        PersonEntity e;
        e.entity_id = pe.at("entity_id").get<std::string>();
        for (const auto& n : pe.at("names")) e.names.insert(n.get<std::string>());
        for (const auto& em : pe.at("emails")) e.emails.insert(em.get<std::string>());
        persons.push_back(std::move(e));
    }
    std::vector<LocationEntity> locations;
    const ordered_json& larr =
        j.contains("locations") ? j.at("locations") : empty_array;
    for (const auto& le : larr) {
        LocationEntity e;
        e.canonical_id = le.at("canonical_id").get<std::string>();
        for (const auto& s : le.at("surface_forms"))
            e.surface_forms.insert(s.get<std::string>());
        if (le.contains("address")) e.address = le.at("address").get<std::string>();
        if (le.contains("lat")) e.lat = le.at("lat").get<double>();
        if (le.contains("lon")) e.lon = le.at("lon").get<double>();
        locations.push_back(std::move(e));
    }
    return {std::move(persons), std::move(locations)};
}

}  // namespace w5h
