#include "w5h/storage.hpp"

#include <cstdio>

#include "w5h/json_io.hpp"

namespace w5h {

std::string fnv1a64_hex(const std::string& data)
{
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string corpus_hash(const std::vector<TraceObject>& corpus)
{
    std::string all;
    for (const auto& obj : corpus) {
        all += to_jsonl_line(obj);
        all.push_back('\n');
    }
    return fnv1a64_hex(all);
}

namespace {

ordered_json weights_to_json(const FreqWeights& w)
{
    ordered_json j = ordered_json::object();
    for (const auto& [role, weight] : w.role_weights) j[role] = weight;
    return j;
}

ordered_json counts_to_json(const std::map<std::string, double>& m)
{
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

std::map<std::string, double> counts_from_json(const ordered_json& j)
{
    std::map<std::string, double> m;
    for (const auto& [k, v] : j.items()) m[k] = v.get<double>();
    return m;
}

ordered_json freq_to_json(const FreqIndex& ix)
{
    ordered_json j;
    j["f_user"] = counts_to_json(ix.f_user);
    ordered_json usrc = ordered_json::object();
    for (const auto& [s, m] : ix.f_user_src) usrc[s] = counts_to_json(m);
    j["f_user_src"] = std::move(usrc);
    ordered_json utime = ordered_json::object();
    for (const auto& [u, m] : ix.f_user_time) utime[u] = counts_to_json(m);
    j["f_user_time"] = std::move(utime);
    ordered_json utsrc = ordered_json::object();
    for (const auto& [s, um] : ix.f_user_time_src) {
        ordered_json inner = ordered_json::object();
        for (const auto& [u, m] : um) inner[u] = counts_to_json(m);
        utsrc[s] = std::move(inner);
    }
    j["f_user_time_src"] = std::move(utsrc);
    // Group families share one record per group key.
    ordered_json groups = ordered_json::array();
    for (const auto& [g, count] : ix.f_group) {
        ordered_json rec;
        rec["members"] = g;
        rec["count"] = count;
        ordered_json per_src = ordered_json::object();
        for (const auto& [s, m] : ix.f_group_src) {
            auto it = m.find(g);
            if (it != m.end()) per_src[s] = it->second;
        }
        rec["count_src"] = std::move(per_src);
        ordered_json times = ordered_json::object();
        auto tit = ix.f_group_time.find(g);
        if (tit != ix.f_group_time.end()) times = counts_to_json(tit->second);
        rec["times"] = std::move(times);
        groups.push_back(std::move(rec));
    }
    j["f_groups"] = std::move(groups);
    j["f_loc"] = counts_to_json(ix.f_loc);
    ordered_json lsrc = ordered_json::object();
    for (const auto& [s, m] : ix.f_loc_src) lsrc[s] = counts_to_json(m);
    j["f_loc_src"] = std::move(lsrc);
    return j;
}

FreqIndex freq_from_json(const ordered_json& j)
{
    FreqIndex ix;
    ix.f_user = counts_from_json(j.at("f_user"));
    for (const auto& [s, m] : j.at("f_user_src").items())
        ix.f_user_src[s] = counts_from_json(m);
    for (const auto& [u, m] : j.at("f_user_time").items())
        ix.f_user_time[u] = counts_from_json(m);
    for (const auto& [s, um] : j.at("f_user_time_src").items()) {
        for (const auto& [u, m] : um.items())
            ix.f_user_time_src[s][u] = counts_from_json(m);
    }
    for (const auto& rec : j.at("f_groups")) {
        GroupKey g = rec.at("members").get<GroupKey>();
        ix.f_group[g] = rec.at("count").get<double>();
        for (const auto& [s, v] : rec.at("count_src").items())
            ix.f_group_src[s][g] = v.get<double>();
        auto times = counts_from_json(rec.at("times"));
        if (!times.empty()) ix.f_group_time[g] = std::move(times);
    }
    ix.f_loc = counts_from_json(j.at("f_loc"));
    for (const auto& [s, m] : j.at("f_loc_src").items())
        ix.f_loc_src[s] = counts_from_json(m);
    return ix;
}

ordered_json text_to_json(const TextIndex& ix)
{
    ordered_json j;
    j["n_docs"] = ix.n_docs;
    ordered_json fields = ordered_json::object();
    for (const auto& [name, f] : ix.fields) {
        ordered_json fj;
        ordered_json postings = ordered_json::object();
        for (const auto& [term, docs] : f.postings) postings[term] = counts_to_json(docs);
        fj["postings"] = std::move(postings);
        fj["doc_len"] = counts_to_json(f.doc_len);
        fj["total_len"] = f.total_len;
        fields[name] = std::move(fj);
    }
    j["fields"] = std::move(fields);
    return j;
}

TextIndex text_from_json(const ordered_json& j)
{
    TextIndex ix;
    ix.n_docs = j.at("n_docs").get<size_t>();
    for (const auto& [name, fj] : j.at("fields").items()) {
        TextIndex::Field f;
        for (const auto& [term, docs] : fj.at("postings").items())
            f.postings[term] = counts_from_json(docs);
        f.doc_len = counts_from_json(fj.at("doc_len"));
        f.total_len = fj.at("total_len").get<double>();
        ix.fields[name] = std::move(f);
    }
    return ix;
}

ordered_json persons_to_json(const std::vector<PersonEntity>& persons)
{
    ordered_json arr = ordered_json::array();
    for (const auto& e : persons) {
        ordered_json pe;
        pe["entity_id"] = e.entity_id;
        pe["names"] = std::vector<std::string>(e.names.begin(), e.names.end());
        pe["emails"] = std::vector<std::string>(e.emails.begin(), e.emails.end());
        arr.push_back(std::move(pe));
    }
    return arr;
}

std::vector<PersonEntity> persons_from_json(const ordered_json& arr)
{
    std::vector<PersonEntity> out;
    for (const auto& pe : arr) {
        PersonEntity e;
        e.entity_id = pe.at("entity_id").get<std::string>();
        for (const auto& n : pe.at("names")) e.names.insert(n.get<std::string>());
        for (const auto& em : pe.at("emails")) e.emails.insert(em.get<std::string>());
        out.push_back(std::move(e));
    }
    return out;
}

ordered_json locations_to_json(const std::vector<LocationEntity>& locations)
{
    ordered_json arr = ordered_json::array();
    for (const auto& e : locations) {
        ordered_json le;
        le["canonical_id"] = e.canonical_id;
        le["surface_forms"] = std::vector<std::string>(e.surface_forms.begin(),
                                                       e.surface_forms.end());
        le["address"] = e.address;
        if (e.lat) le["lat"] = *e.lat;
        if (e.lon) le["lon"] = *e.lon;
        arr.push_back(std::move(le));
    }
    return arr;
}

std::vector<LocationEntity> locations_from_json(const ordered_json& arr)
{
    std::vector<LocationEntity> out;
    for (const auto& le : arr) {
        LocationEntity e;
        e.canonical_id = le.at("canonical_id").get<std::string>();
        for (const auto& s : le.at("surface_forms"))
            e.surface_forms.insert(s.get<std::string>());
        e.address = le.value("address", std::string());
        if (le.contains("lat")) e.lat = le.at("lat").get<double>();
        if (le.contains("lon")) e.lon = le.at("lon").get<double>();
        out.push_back(std::move(e));
    }
    return out;
}

void write_with_checksum(ordered_json j, const std::string& path)
{
    j["checksum"] = fnv1a64_hex(j.dump());
    write_file(path, j.dump() + "\n");
}

ordered_json read_with_checksum(const std::string& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": corrupt index file (" + std::string(e.what()) + ")");
    }
    if (!j.contains("format_version"))
        throw Error(path + ": not an index file (missing format_version)");
    int version = j.at("format_version").get<int>();
    if (version != kIndexFormatVersion)
        throw Error(path + ": unsupported index format version " +
                    std::to_string(version) + " (expected " +
                    std::to_string(kIndexFormatVersion) + ")");
    if (!j.contains("checksum")) throw Error(path + ": missing checksum");
    std::string stored = j.at("checksum").get<std::string>();
    j.erase("checksum");
    if (fnv1a64_hex(j.dump()) != stored)
        throw Error(path + ": checksum mismatch, file is corrupt");
    return j;
}

}  // namespace

std::string weights_hash(const FreqWeights& weights)
{
    return fnv1a64_hex(weights_to_json(weights).dump());
}

void save_index(const FreqIndex& index, const std::string& path,
                const std::string& corpus_hash, const std::string& weights_hash)
{
    ordered_json j;
    j["format_version"] = kIndexFormatVersion;
    j["corpus_hash"] = corpus_hash;
    j["weights_hash"] = weights_hash;
    j["freq"] = freq_to_json(index);
    write_with_checksum(std::move(j), path);
}

FreqIndex load_index(const std::string& path)
{
    ordered_json j = read_with_checksum(path);
    return freq_from_json(j.at("freq"));
}

void save_bundle(const IndexBundle& bundle, const std::string& path)
{
    ordered_json j;
    j["format_version"] = kIndexFormatVersion;
    j["corpus_hash"] = bundle.corpus_hash;
    j["weights_hash"] = bundle.weights_hash;
    j["freq"] = freq_to_json(bundle.freq);
    j["text"] = text_to_json(bundle.text);
    j["persons"] = persons_to_json(bundle.persons);
    j["locations"] = locations_to_json(bundle.locations);
    write_with_checksum(std::move(j), path);
}

IndexBundle load_bundle(const std::string& path)
{
    ordered_json j = read_with_checksum(path);
    IndexBundle b;
    b.corpus_hash = j.value("corpus_hash", std::string());
    b.weights_hash = j.value("weights_hash", std::string());
    b.freq = freq_from_json(j.at("freq"));
    if (j.contains("text")) b.text = text_from_json(j.at("text"));
    if (j.contains("persons")) b.persons = persons_from_json(j.at("persons"));
    if (j.contains("locations"))
        b.locations = locations_from_json(j.at("locations"));
    return b;
}

}  // namespace w5h
