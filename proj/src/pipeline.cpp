#include "w5h/pipeline.hpp"

#include <map>

namespace w5h {

std::pair<std::vector<PersonEntity>, std::vector<LocationEntity>>
entities_from_corpus(const std::vector<TraceObject>& corpus)
{
    std::map<std::string, PersonEntity> persons;
    std::map<std::string, LocationEntity> locations;
    for (const auto& obj : corpus) {
        for (const auto& p : obj.who) {
            if (p.entity_id.empty()) continue;
            PersonEntity& e = persons[p.entity_id];
            e.entity_id = p.entity_id;
            if (!p.raw_name.empty()) e.names.insert(p.raw_name);
            for (const auto& em : p.raw_emails) e.emails.insert(casefold(em));
        }
        for (const auto& l : obj.where) {
            if (l.canonical_id.empty()) continue;
            LocationEntity& e = locations[l.canonical_id];
            e.canonical_id = l.canonical_id;
            e.surface_forms.insert(l.raw_text);
            if (!e.lat && l.lat) e.lat = l.lat;
            if (!e.lon && l.lon) e.lon = l.lon;
        }
    }
    std::vector<PersonEntity> ps;
    for (auto& [id, e] : persons) ps.push_back(std::move(e));
    std::vector<LocationEntity> ls;
    for (auto& [id, e] : locations) ls.push_back(std::move(e));
    return {std::move(ps), std::move(ls)};
}

IndexBundle build_indexes(const std::vector<TraceObject>& corpus,
                          const FreqWeights& weights)
{
    IndexBundle bundle;
    bundle.freq = compute_frequency(corpus, weights);
    bundle.text = TextIndex::build(corpus);
    auto [persons, locations] = entities_from_corpus(corpus);
    bundle.persons = std::move(persons);
    bundle.locations = std::move(locations);
    bundle.corpus_hash = corpus_hash(corpus);
    bundle.weights_hash = weights_hash(weights);
    return bundle;
}

}  // namespace w5h
