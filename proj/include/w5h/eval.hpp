#pragma once
// Known-item evaluation: query generation per group, rank metrics with tie
// handling, Wilcoxon significance, report emission.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "w5h/model.hpp"
#include "w5h/search.hpp"

namespace w5h {

struct QueryGroupSpec {
    int group_id = 1;
    std::vector<Dimension> dims;
    std::map<Dimension, int> values_per_dim;
    size_t scenarios = 250;
    size_t queries_per_scenario = 6;

    // The five preset groups: G1={what}, G2={what,who}, G3={what,who,when},
    // G4..G5 add how; G5 uses two values for who and what.
    static QueryGroupSpec preset(int group_id);
};

struct Scenario {
    std::string target_id;
    std::vector<Query> queries;
    uint64_t seed = 0;
};

// Deterministic for a fixed seed. Every query value is drawn from the
// target object's own dimensions, so the target is always a candidate.
std::vector<Scenario> generate_scenarios(const std::vector<TraceObject>& corpus,
                                         const QueryGroupSpec& spec,
                                         uint64_t rng_seed);

// Stopword list used by the what-term sampler.
const std::unordered_set<std::string>& default_stopwords();

struct RankOutcome {
    double rank = 0.0;  // tie-block median rank
    bool found = false;
};

// Median rank of the target's tie block; corpus_size + 1 when absent.
RankOutcome target_rank(const std::vector<ScoredResult>& ranked,
                        const std::string& target_id, size_t corpus_size);

double mean_reciprocal_rank(const std::vector<double>& ranks);

// Known-item NDCG: 1/log2(1+rank) when rank <= k, else 0.
double ndcg_at_k(double rank, int k);

struct WilcoxonResult {
    double statistic = 0.0;  // min of the signed rank sums
    double p_value = 1.0;    // two-sided
    size_t n_nonzero = 0;
};

// Zero differences are dropped. Exact distribution for n <= 25, normal
// approximation with tie correction beyond.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

struct QueryOutcome {
    std::string query_id;
    size_t scenario_index = 0;
    double rank = 0.0;
    bool found = false;
    double rr = 0.0;
    double ndcg10 = 0.0;
    double ndcg20 = 0.0;
};

struct ScorerReport {
    Scorer scorer = Scorer::W5hf;
    std::vector<QueryOutcome> outcomes;  // fixed query order across scorers
    double mrr = 0.0;
    double ndcg10 = 0.0;
    double ndcg20 = 0.0;
};

struct SignificanceRow {
    std::string scorer_a;
    std::string scorer_b;
    double statistic = 0.0;
    double p_value = 1.0;
};

struct GroupReport {
    int group_id = 0;
    std::vector<ScorerReport> scorers;
    std::vector<SignificanceRow> significance;  // pairwise over per-query RR
};

struct EvalOptions {
    std::vector<int> groups = {1, 2, 3, 4, 5};
    std::vector<Scorer> scorers = {Scorer::W5hf, Scorer::FieldBm25, Scorer::Bm25,
                                   Scorer::Tfidf};
    uint64_t seed = 42;
    size_t scenarios = 250;
    size_t queries_per_scenario = 6;
    int threads = 0;  // 0 = hardware concurrency
};

std::vector<GroupReport> run_eval(const SearchContext& ctx,
                                  const EvalOptions& options);

// group<k>.csv, summary.md and significance.csv under out_dir.
void write_eval_reports(const std::vector<GroupReport>& reports,
                        const std::string& out_dir);

}  // namespace w5h
