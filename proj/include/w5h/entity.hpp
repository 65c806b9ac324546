#pragma once
// Entity resolution for the who and where dimensions. Person resolution is
// an R-Swoosh match/merge fixpoint; location resolution ranks geocode-cache
// candidates by corpus term frequency.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "w5h/model.hpp"

namespace w5h {

struct PersonEntity {
    std::string entity_id;
    std::set<std::string> names;   // surface forms as seen
    std::set<std::string> emails;  // casefolded

    static PersonEntity from_ref(const PersonRef& ref);
};

struct LocationEntity {
    std::string canonical_id;
    std::set<std::string> surface_forms;
    std::string address;  // empty when the surface form was never geocoded
    std::optional<double> lat;
    std::optional<double> lon;
};

struct GeocodeCandidate {
    std::string address;
    std::optional<double> lat;
    std::optional<double> lon;
};

// raw location text (casefolded) -> candidates in cache order.
// Read-only during resolution.
struct GeocodeCache {
    std::map<std::string, std::vector<GeocodeCandidate>> entries;

    static GeocodeCache load_file(const std::string& path);
    const std::vector<GeocodeCandidate>* lookup(const std::string& raw_text) const;
};

// Casefold, strip punctuation, drop single-letter tokens; sorted unique.
std::set<std::string> normalize_name_tokens(const std::string& name);

// Shared email (case-insensitive) or equal non-empty normalized name token
// sets. Entities match when any of their name pairs or emails do.
bool match_person(const PersonRef& a, const PersonRef& b);
bool match_person(const PersonRef& a, const PersonEntity& b);
bool match_person(const PersonEntity& a, const PersonEntity& b);

// Union of names and emails; keeps the lexicographically smallest id.
PersonEntity merge_person(const PersonEntity& a, const PersonEntity& b);

// Match/merge fixpoint; output sorted by entity_id and invariant (as a set)
// under input permutation.
std::vector<PersonEntity> rswoosh(const std::vector<PersonRef>& refs);

struct ResolveOptions {
    // When false, every distinct surface form becomes its own entity and no
    // match/merge runs (the "no entity resolution" baseline).
    bool entity_resolution = true;
};

struct ResolveResult {
    std::vector<TraceObject> corpus;  // refs rewritten with entity ids
    std::vector<PersonEntity> persons;
    std::vector<LocationEntity> locations;
};

// Resolves who and where across the corpus; never touches other dimensions.
ResolveResult resolve_corpus(const std::vector<TraceObject>& corpus,
                             const GeocodeCache& cache,
                             const ResolveOptions& options = {});

// Location resolution alone: returns entities plus the refs rewritten with
// canonical ids. `corpus` supplies the term frequencies used to rank
// ambiguous cache candidates.
std::pair<std::vector<LocationEntity>, std::vector<LocationRef>> resolve_where(
    const std::vector<LocationRef>& refs, const GeocodeCache& cache,
    const std::vector<TraceObject>& corpus);

// Fills entity ids on a query's who/where values by matching against
// resolved entities; unmatched refs are left unresolved.
void resolve_query(Query& query, const std::vector<PersonEntity>& persons,
                   const std::vector<LocationEntity>& locations);

// entities.json round trip.
void save_entities(const std::string& path,
                   const std::vector<PersonEntity>& persons,
                   const std::vector<LocationEntity>& locations);
std::pair<std::vector<PersonEntity>, std::vector<LocationEntity>> load_entities(
    const std::string& path);

}  // namespace w5h
