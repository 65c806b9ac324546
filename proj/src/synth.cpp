#include "w5h/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "w5h/rng.hpp"
#include "w5h/text_index.hpp"

namespace w5h {

namespace {

// Small pools on purpose: shared first/last tokens across entities are the
// realistic confusion that text scorers have to cope with.
const std::vector<std::string> kFirstNames = {
    "alice", "ben",  "carla", "daniel", "emma", "felix",
    "grace", "henry", "irene", "jonas", "kate", "liam"};

const std::vector<std::string> kLastNames = {
    "smith", "brown", "castro", "duarte", "evans", "fischer", "garcia", "ito"};

std::string capitalize(const std::string& s)
{
    std::string out = s;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z')
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

struct EntityForms {
    std::string primary_name;
    std::string email;
    // Each form is (name, emails); index 0 is the primary.
    std::vector<std::pair<std::string, std::vector<std::string>>> forms;
};

EntityForms make_entity(size_t i)
{
    const std::string& first = kFirstNames[i % kFirstNames.size()];
    const std::string& last =
        kLastNames[(i + i / kFirstNames.size()) % kLastNames.size()];
    EntityForms e;
    e.primary_name = capitalize(first) + " " + capitalize(last);
    // Opaque address: the local part carries no name tokens, so linking an
    // email-only mention to a name takes entity resolution.
    e.email = "user" + std::to_string(i) + "@mail.example";
    e.forms.push_back({e.primary_name, {e.email}});
    e.forms.push_back({capitalize(last) + ", " + capitalize(first), {}});
    e.forms.push_back({std::string(1, static_cast<char>(first[0] - 'a' + 'A')) +
                           ". " + capitalize(last),
                       {e.email}});
    e.forms.push_back({"", {e.email}});
    return e;
}

std::vector<std::string> build_vocabulary(size_t size,
                                          const std::unordered_set<std::string>& reserved)
{
    static const std::vector<std::string> syllables = {
        "ba", "ce", "di", "fo", "gu", "ha", "ki", "lo", "mu", "ne",
        "pa", "re", "si", "to", "vu", "wa", "ze", "or", "an", "el",
        "ish", "un", "ar", "ent", "ol", "im", "ak", "os", "et", "ul"};
    std::vector<std::string> vocab;
    std::unordered_set<std::string> seen;
    uint64_t counter = 0;
    while (vocab.size() < size) {
        uint64_t h = splitmix64(counter++);
        size_t parts = 2 + static_cast<size_t>(h % 3);
        std::string word;
        for (size_t p = 0; p < parts; ++p) {
            h = splitmix64(h);
            word += syllables[h % syllables.size()];
        }
        if (reserved.count(word) || !seen.insert(word).second) continue;
        vocab.push_back(std::move(word));
    }
    return vocab;
}

struct SourceStyle {
    std::string primary_role;
    std::string other_role;
    std::string how_label;
};

SourceStyle style_for(const std::string& source)
{
    // The how label names the record type, source included, Figure-1 style.
    if (source == "facebook") return {"author", "tagged", "facebook post"};
    if (source == "gmail") return {"from", "to", "gmail message"};
    if (source == "twitter") return {"author", "mention", "twitter tweet"};
    if (source == "calendar") return {"organizer", "attendee", "calendar event"};
    if (source == "dropbox") return {"owner", "shared_with", "dropbox file"};
    return {"from", "to", source + " record"};
}

int days_in(int y, int m)
{
    static const int base[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return (m == 2 && leap) ? 29 : base[m - 1];
}

TimePoint random_day(Rng& rng, int y0, int y1)
{
    TimePoint tp;
    tp.year = rng.range(y0, y1);
    tp.month = rng.range(1, 12);
    tp.day = rng.range(1, days_in(*tp.year, *tp.month));
    return tp;
}

void check_spec(const SynthSpec& spec)
{
    double total = 0.0;
    for (const auto& [s, w] : spec.sources) {
        if (w < 0.0) throw Error("synth spec: negative source weight for " + s);
        total += w;
    }
    if (spec.sources.empty() || std::fabs(total - 1.0) > 1e-9)
        throw Error("synth spec: source mixture weights must sum to 1");
    if (spec.alias_rate < 0.0 || spec.alias_rate > 1.0)
        throw Error("synth spec: alias rate must lie in [0,1]");
    if (spec.entities == 0) throw Error("synth spec: entity pool is empty");
    double group_rate = 0.0;
    for (const auto& g : spec.frequent_groups) {
        if (g.members.empty() || g.members.size() > spec.entities)
            throw Error("synth spec: frequent group larger than the entity pool");
        for (size_t m : g.members) {
            if (m >= spec.entities)
                throw Error("synth spec: group member index out of range");
        }
        group_rate += g.rate;
    }
    if (group_rate > 1.0)
        throw Error("synth spec: frequent group rates exceed 1");
    if (spec.year_end < spec.year_start)
        throw Error("synth spec: empty year span");
    if (spec.text_min == 0 || spec.text_max < spec.text_min)
        throw Error("synth spec: bad text length range");
}

std::vector<SynthSpec::Group> default_groups(size_t entities)
{
    std::vector<SynthSpec::Group> groups;
    if (entities >= 3) groups.push_back({{0, 1, 2}, 0.06});
    if (entities >= 6) groups.push_back({{0, 3, 4, 5}, 0.05});
    if (entities >= 9) groups.push_back({{6, 7, 8}, 0.04});
    if (groups.empty()) groups.push_back({{0}, 0.05});
    return groups;
}

}  // namespace

SynthSpec SynthSpec::from_json(const ordered_json& j)
{
    SynthSpec spec;
    static const std::set<std::string> known = {
        "seed",        "objects",        "sources",      "entities",
        "frequent_groups", "events_per_group", "years",   "locations",
        "vocabulary",  "zipf_exponent",  "text_length",  "alias_rate",
        "name_noise_rate", "rates"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw Error("synth spec: unknown key '" + k + "'");
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
    if (j.contains("objects")) spec.objects = j.at("objects").get<size_t>();
    if (j.contains("sources")) {
        spec.sources.clear();
        for (const auto& [s, w] : j.at("sources").items())
            spec.sources[s] = w.get<double>();
    }
    if (j.contains("entities")) spec.entities = j.at("entities").get<size_t>();
    if (j.contains("frequent_groups")) {
        spec.frequent_groups.clear();
        for (const auto& g : j.at("frequent_groups")) {
            Group group;
            group.members = g.at("members").get<std::vector<size_t>>();
            group.rate = g.at("rate").get<double>();
            spec.frequent_groups.push_back(std::move(group));
        }
    }
    if (j.contains("events_per_group"))
        spec.events_per_group = j.at("events_per_group").get<size_t>();
    if (j.contains("years")) {
        spec.year_start = j.at("years").at(0).get<int>();
        spec.year_end = j.at("years").at(1).get<int>();
    }
    if (j.contains("locations"))
        spec.locations = j.at("locations").get<std::vector<std::string>>();
    if (j.contains("vocabulary")) spec.vocabulary = j.at("vocabulary").get<size_t>();
    if (j.contains("zipf_exponent"))
        spec.zipf_exponent = j.at("zipf_exponent").get<double>();
    if (j.contains("text_length")) {
        spec.text_min = j.at("text_length").at(0).get<size_t>();
        spec.text_max = j.at("text_length").at(1).get<size_t>();
    }
    if (j.contains("alias_rate")) spec.alias_rate = j.at("alias_rate").get<double>();
    if (j.contains("name_noise_rate"))
        spec.name_noise_rate = j.at("name_noise_rate").get<double>();
    if (j.contains("rates")) {
        const auto& r = j.at("rates");
        static const std::set<std::string> rate_keys = {"who", "who_multi", "when",
                                                        "what", "where"};
        for (const auto& [k, v] : r.items()) {
            if (!rate_keys.count(k))
                throw Error("synth spec: unknown rates key '" + k + "'");
        }
        if (r.contains("who")) spec.rates.who = r.at("who").get<double>();
        if (r.contains("who_multi"))
            spec.rates.who_multi = r.at("who_multi").get<double>();
        if (r.contains("when")) spec.rates.when = r.at("when").get<double>();
        if (r.contains("what")) spec.rates.what = r.at("what").get<double>();
        if (r.contains("where")) spec.rates.where = r.at("where").get<double>();
    }
    return spec;
}

ordered_json SynthSpec::to_json() const
{
    ordered_json j;
    j["seed"] = seed;
    j["objects"] = objects;
    ordered_json src = ordered_json::object();
    for (const auto& [s, w] : sources) src[s] = w;
    j["sources"] = std::move(src);
    j["entities"] = entities;
    ordered_json groups = ordered_json::array();
    for (const auto& g : frequent_groups) {
        ordered_json gj;
        gj["members"] = g.members;
        gj["rate"] = g.rate;
        groups.push_back(std::move(gj));
    }
    j["frequent_groups"] = std::move(groups);
    j["events_per_group"] = events_per_group;
    j["years"] = std::vector<int>{year_start, year_end};
    j["locations"] = locations;
    j["vocabulary"] = vocabulary;
    j["zipf_exponent"] = zipf_exponent;
    j["text_length"] = std::vector<size_t>{text_min, text_max};
    j["alias_rate"] = alias_rate;
    j["name_noise_rate"] = name_noise_rate;
    ordered_json r;
    r["who"] = rates.who;
    r["who_multi"] = rates.who_multi;
    r["when"] = rates.when;
    r["what"] = rates.what;
    r["where"] = rates.where;
    j["rates"] = std::move(r);
    return j;
}

SynthSpec SynthSpec::load_file(const std::string& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
    return from_json(j);
}

SynthOutput generate_corpus(const SynthSpec& spec_in)
{
    SynthSpec spec = spec_in;
    if (spec.frequent_groups.empty())
        spec.frequent_groups = default_groups(spec.entities);
    check_spec(spec);

    Rng rng(spec.seed);

    std::vector<EntityForms> entities;
    entities.reserve(spec.entities);
    for (size_t i = 0; i < spec.entities; ++i) entities.push_back(make_entity(i));

    std::unordered_set<std::string> name_tokens;
    for (const auto& n : kFirstNames) name_tokens.insert(n);
    for (const auto& n : kLastNames) name_tokens.insert(n);
    std::vector<std::string> name_token_list(name_tokens.begin(), name_tokens.end());
    std::sort(name_token_list.begin(), name_token_list.end());

    auto vocab = build_vocabulary(spec.vocabulary, name_tokens);
    // Zipf weights with cumulative sums for O(log V) draws.
    std::vector<double> cum(vocab.size());
    {
        double acc = 0.0;
        for (size_t r = 0; r < vocab.size(); ++r) {
            acc += 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
            cum[r] = acc;
        }
    }
    auto zipf_word = [&](Rng& r) -> const std::string& {
        double x = r.real() * cum.back();
        size_t lo = std::lower_bound(cum.begin(), cum.end(), x) - cum.begin();
        if (lo >= vocab.size()) lo = vocab.size() - 1;
        return vocab[lo];
    };

    std::vector<std::string> source_names;
    std::vector<double> source_weights;
    for (const auto& [s, w] : spec.sources) {
        source_names.push_back(s);
        source_weights.push_back(w);
    }

    // Burst days per frequent group.
    std::vector<std::vector<TimePoint>> group_events;
    for (const auto& g : spec.frequent_groups) {
        std::vector<TimePoint> events;
        for (size_t e = 0; e < spec.events_per_group; ++e)
            events.push_back(random_day(rng, spec.year_start, spec.year_end));
        group_events.push_back(std::move(events));
        (void)g;
    }

    // Entity popularity skew for non-group participant draws.
    std::vector<double> popularity(spec.entities);
    for (size_t i = 0; i < spec.entities; ++i)
        popularity[i] = 1.0 / std::pow(static_cast<double>(i + 1), 0.7);

    std::vector<size_t> group_object_counts(spec.frequent_groups.size(), 0);
    size_t n_what = 0, n_who = 0, n_who_multi = 0, n_when = 0, n_where = 0;

    SynthOutput out;
    out.corpus.reserve(spec.objects);
    for (size_t i = 0; i < spec.objects; ++i) {
        TraceObject obj;
        char idbuf[24];
        std::snprintf(idbuf, sizeof(idbuf), "syn-%06zu", i);
        obj.id = idbuf;
        obj.source = source_names[rng.weighted(source_weights)];
        SourceStyle style = style_for(obj.source);

        // Participants.
        int group_idx = -1;
        std::vector<size_t> members;
        if (rng.chance(spec.rates.who)) {
            double r = rng.real();
            double acc = 0.0;
            for (size_t g = 0; g < spec.frequent_groups.size(); ++g) {
                acc += spec.frequent_groups[g].rate;
                if (r < acc) {
                    group_idx = static_cast<int>(g);
                    break;
                }
            }
            if (group_idx >= 0) {
                members = spec.frequent_groups[group_idx].members;
                ++group_object_counts[group_idx];
            } else {
                size_t k = rng.chance(spec.rates.who_multi)
                               ? 3 + rng.index(3)
                               : 1 + rng.index(2);
                k = std::min(k, spec.entities);
                std::set<size_t> chosen;
                while (chosen.size() < k)
                    chosen.insert(rng.weighted(popularity));
                members.assign(chosen.begin(), chosen.end());
            }
        }
        if (!members.empty()) {
            ++n_who;
            if (members.size() >= 3) ++n_who_multi;
            for (size_t m = 0; m < members.size(); ++m) {
                const EntityForms& e = entities[members[m]];
                size_t form = 0;
                if (spec.alias_rate > 0.0 && rng.chance(spec.alias_rate))
                    form = 1 + rng.index(e.forms.size() - 1);
                PersonRef ref;
                ref.raw_name = e.forms[form].first;
                ref.raw_emails = e.forms[form].second;
                ref.role = m == 0 ? style.primary_role : style.other_role;
                obj.who.push_back(std::move(ref));
            }
        }

        // Times: burst days for group objects, uniform otherwise.
        if (rng.chance(spec.rates.when)) {
            ++n_when;
            TimePoint tp = group_idx >= 0
                               ? group_events[group_idx][rng.index(
                                     group_events[group_idx].size())]
                               : random_day(rng, spec.year_start, spec.year_end);
            obj.when.push_back(tp);
            if (rng.chance(0.1))
                obj.when.push_back(random_day(rng, spec.year_start, spec.year_end));
        }

        // Text.
        if (rng.chance(spec.rates.what)) {
            ++n_what;
            size_t len = spec.text_min + rng.index(spec.text_max - spec.text_min + 1);
            std::vector<std::string> words;
            words.reserve(len + 3);
            for (size_t w = 0; w < len; ++w) words.push_back(zipf_word(rng));
            if (rng.chance(spec.name_noise_rate)) {
                size_t extra = 1 + rng.index(3);
                for (size_t w = 0; w < extra; ++w)
                    words.push_back(rng.pick(name_token_list));
            }
            std::string text;
            for (const auto& w : words) {
                if (!text.empty()) text.push_back(' ');
                text += w;
            }
            if (words.size() > 8 && rng.chance(0.2)) {
                size_t cut = text.size() / 2;
                while (cut < text.size() && text[cut] != ' ') ++cut;
                obj.what.push_back(text.substr(0, cut));
                if (cut < text.size()) obj.what.push_back(text.substr(cut + 1));
            } else {
                obj.what.push_back(std::move(text));
            }
        }

        if (!spec.locations.empty() && rng.chance(spec.rates.where)) {
            ++n_where;
            obj.where.push_back({rng.pick(spec.locations), "", {}, {}});
        }

        obj.how.push_back(style.how_label);
        out.corpus.push_back(std::move(obj));
    }

    // Ground truth.
    ordered_json truth;
    truth["seed"] = spec.seed;
    truth["objects"] = spec.objects;
    ordered_json ents = ordered_json::array();
    for (size_t i = 0; i < entities.size(); ++i) {
        ordered_json ej;
        ej["index"] = i;
        ej["primary_name"] = entities[i].primary_name;
        ej["email"] = entities[i].email;
        ordered_json forms = ordered_json::array();
        for (const auto& [name, emails] : entities[i].forms) {
            ordered_json fj;
            fj["name"] = name;
            fj["emails"] = emails;
            forms.push_back(std::move(fj));
        }
        ej["forms"] = std::move(forms);
        ents.push_back(std::move(ej));
    }
    truth["entities"] = std::move(ents);
    ordered_json groups = ordered_json::array();
    for (size_t g = 0; g < spec.frequent_groups.size(); ++g) {
        ordered_json gj;
        gj["members"] = spec.frequent_groups[g].members;
        gj["rate"] = spec.frequent_groups[g].rate;
        gj["objects"] = group_object_counts[g];
        ordered_json days = ordered_json::array();
        for (const auto& d : group_events[g]) days.push_back(d.to_string());
        gj["event_days"] = std::move(days);
        groups.push_back(std::move(gj));
    }
    truth["groups"] = std::move(groups);
    double n = spec.objects > 0 ? static_cast<double>(spec.objects) : 1.0;
    ordered_json realized;
    realized["what"] = static_cast<double>(n_what) / n;
    realized["who"] = static_cast<double>(n_who) / n;
    realized["who_multi"] = static_cast<double>(n_who_multi) / n;
    realized["when"] = static_cast<double>(n_when) / n;
    realized["where"] = static_cast<double>(n_where) / n;
    truth["realized_rates"] = std::move(realized);
    truth["alias_rate"] = spec.alias_rate;
    out.truth = std::move(truth);
    return out;
}

void write_synth_output(const SynthOutput& out, const std::string& corpus_path,
                        const std::string& truth_path)
{
    write_corpus_file(corpus_path, out.corpus);
    write_file(truth_path, out.truth.dump(2) + "\n");
}

}  // namespace w5h
