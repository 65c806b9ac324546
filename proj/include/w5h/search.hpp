#pragma once
// Candidate retrieval per dimension and scoring. Four scorers: the
// frequency-based w5hf plus the tfidf/bm25/fieldbm25 text baselines.

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "w5h/freq_index.hpp"
#include "w5h/model.hpp"
#include "w5h/text_index.hpp"

namespace w5h {

enum class Scorer { W5hf, Tfidf, Bm25, FieldBm25 };

std::optional<Scorer> scorer_from_name(const std::string& name);
const char* scorer_name(Scorer s);

struct ScoringConfig {
    Bm25Params bm25;
    std::map<std::string, double> field_weights;  // dimension name -> weight
    std::map<std::string, double> term_weights;   // score family -> weight
};

struct ScoreTerm {
    std::string family;  // e.g. f_user, score_when
    std::string key;     // e.g. f[u=p:anna@x.com][dt=2017]
    double value = 0.0;
};

struct ScoredResult {
    std::string object_id;
    double total_score = 0.0;
    std::vector<ScoreTerm> breakdown;  // total equals the sum of values
};

// True iff the object matches the query on that single dimension.
bool dimension_matches(const Query& query, const TraceObject& obj, Dimension tag);

// Union over the query's non-empty dimensions; ids in corpus order.
std::vector<std::string> candidate_set(const Query& query,
                                       const std::vector<TraceObject>& corpus);

// Definition-style frequency score of one candidate. Throws when the object
// is not a candidate for the query.
ScoredResult f_score(const Query& query, const TraceObject& obj,
                     const FreqIndex& freq, const TextIndex& text,
                     const ScoringConfig& cfg = {});

// Prebuilt per-dimension posting lists so queries avoid full corpus scans.
struct SearchContext {
    const std::vector<TraceObject>* corpus = nullptr;
    const FreqIndex* freq = nullptr;
    const TextIndex* text = nullptr;
    ScoringConfig cfg;

    std::unordered_map<std::string, size_t> index_by_id;
    std::unordered_map<std::string, std::vector<size_t>> who_docs;
    std::unordered_map<std::string, std::vector<size_t>> when_docs;
    std::unordered_map<std::string, std::vector<size_t>> where_docs;
    std::unordered_map<std::string, std::vector<size_t>> how_docs;

    static SearchContext build(const std::vector<TraceObject>& corpus,
                               const FreqIndex& freq, const TextIndex& text,
                               ScoringConfig cfg = {});

    // Same result as candidate_set, via postings.
    std::vector<size_t> candidates(const Query& query) const;
};

// Every candidate scored and sorted (score descending, id ascending).
std::vector<ScoredResult> rank_all(const SearchContext& ctx, const Query& query,
                                   Scorer scorer);

// Top-k slice of rank_all.
std::vector<ScoredResult> search(const SearchContext& ctx, const Query& query,
                                 Scorer scorer, size_t k);

// Query terms as fed to the keyword scorers: every dimension's text,
// flattened and tokenized.
std::vector<std::string> flatten_query_terms(const Query& query);

}  // namespace w5h
