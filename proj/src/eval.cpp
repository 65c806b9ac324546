#include "w5h/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include "w5h/rng.hpp"

namespace w5h {

QueryGroupSpec QueryGroupSpec::preset(int group_id)
{
    QueryGroupSpec spec;
    spec.group_id = group_id;
    switch (group_id) {
    case 1:
        spec.dims = {Dimension::What};
        break;
    case 2:
        spec.dims = {Dimension::What, Dimension::Who};
        break;
    case 3:
        spec.dims = {Dimension::What, Dimension::Who, Dimension::When};
        break;
    case 4:
    case 5:
        spec.dims = {Dimension::What, Dimension::Who, Dimension::When,
                     Dimension::How};
        break;
    default:
        throw Error("unknown query group " + std::to_string(group_id));
    }
    for (Dimension d : spec.dims) spec.values_per_dim[d] = 1;
    if (group_id == 5) {
        spec.values_per_dim[Dimension::What] = 2;
        spec.values_per_dim[Dimension::Who] = 2;
    }
    return spec;
}

const std::unordered_set<std::string>& default_stopwords()
{
    static const std::unordered_set<std::string> words = {
        "a",    "an",   "and", "are", "as",   "at",   "be",  "but", "by",
        "for",  "from", "has", "had", "have", "he",   "her", "his", "i",
        "in",   "is",   "it",  "its", "me",   "my",   "no",  "not", "of",
        "on",   "or",   "our", "she", "so",   "that", "the", "their", "them",
        "they", "this", "to",  "was", "we",   "were", "will", "with", "you",
        "your"};
    return words;
}

namespace {

std::vector<std::string> distinct_what_terms(const TraceObject& obj)
{
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& item : obj.what) {
        for (auto& t : tokenize(item, default_stopwords())) {
            if (seen.insert(t).second) out.push_back(std::move(t));
        }
    }
    return out;
}

std::vector<std::string> distinct_entities(const TraceObject& obj)
{
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& p : obj.who) {
        if (!p.entity_id.empty() && seen.insert(p.entity_id).second)
            out.push_back(p.entity_id);
    }
    return out;
}

std::vector<TimePoint> distinct_times(const TraceObject& obj)
{
    std::vector<TimePoint> out;
    for (const auto& t : obj.when) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    return out;
}

bool eligible_target(const TraceObject& obj, const QueryGroupSpec& spec)
{
    for (Dimension d : spec.dims) {
        int v = spec.values_per_dim.at(d);
        switch (d) {
        case Dimension::What:
            if (distinct_what_terms(obj).size() < static_cast<size_t>(v))
                return false;
            break;
        case Dimension::Who:
            if (distinct_entities(obj).size() < static_cast<size_t>(v))
                return false;
            break;
        case Dimension::When:
            if (distinct_times(obj).size() < static_cast<size_t>(v)) return false;
            break;
        case Dimension::How:
            if (obj.source.empty()) return false;
            break;
        default:
            return false;  // where/why targets are not generated
        }
    }
    return true;
}

const PersonRef* ref_for_entity(const TraceObject& obj, const std::string& id)
{
    for (const auto& p : obj.who) {
        if (p.entity_id == id) return &p;
    }
    return nullptr;
}

}  // namespace

std::vector<Scenario> generate_scenarios(const std::vector<TraceObject>& corpus,
                                         const QueryGroupSpec& spec,
                                         uint64_t rng_seed)
{
    std::vector<size_t> eligible;
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (eligible_target(corpus[i], spec)) eligible.push_back(i);
    }
    if (eligible.empty())
        throw Error("no object qualifies as a target for group " +
                    std::to_string(spec.group_id));
    if (eligible.size() < spec.scenarios)
        throw Error("corpus too small: " + std::to_string(eligible.size()) +
                    " eligible targets for " + std::to_string(spec.scenarios) +
                    " scenarios (group " + std::to_string(spec.group_id) + ")");

    Rng master(splitmix64(rng_seed) ^ static_cast<uint64_t>(spec.group_id));
    master.shuffle(eligible);

    std::vector<Scenario> scenarios;
    scenarios.reserve(spec.scenarios);
    for (size_t s = 0; s < spec.scenarios; ++s) {
        const TraceObject& target = corpus[eligible[s]];
        Scenario scen;
        scen.target_id = target.id;
        scen.seed = splitmix64(rng_seed ^ splitmix64(
                                   (static_cast<uint64_t>(spec.group_id) << 32) | s));
        Rng rng(scen.seed);

        auto what_terms = distinct_what_terms(target);
        auto who_ids = distinct_entities(target);
        auto times = distinct_times(target);

        for (size_t q = 0; q < spec.queries_per_scenario; ++q) {
            Query query;
            for (Dimension d : spec.dims) {
                size_t v = static_cast<size_t>(spec.values_per_dim.at(d));
                switch (d) {
                case Dimension::What:
                    for (auto& t : rng.sample(what_terms, v))
                        query.what.push_back(std::move(t));
                    break;
                case Dimension::Who:
                    for (auto& id : rng.sample(who_ids, v)) {
                        const PersonRef* ref = ref_for_entity(target, id);
                        PersonRef qref;
                        if (ref) qref = *ref;
                        qref.entity_id = id;
                        query.who.push_back(std::move(qref));
                    }
                    break;
                case Dimension::When:
                    for (auto& t : rng.sample(times, v))
                        query.when.push_back(std::move(t));
                    break;
                case Dimension::How:
                    query.how.push_back(target.source);
                    break;
                default:
                    break;
                }
            }
            scen.queries.push_back(std::move(query));
        }
        scenarios.push_back(std::move(scen));
    }
    return scenarios;
}

RankOutcome target_rank(const std::vector<ScoredResult>& ranked,
                        const std::string& target_id, size_t corpus_size)
{
    size_t pos = ranked.size();
    for (size_t i = 0; i < ranked.size(); ++i) {
        if (ranked[i].object_id == target_id) {
            pos = i;
            break;
        }
    }
    if (pos == ranked.size())
        return {static_cast<double>(corpus_size) + 1.0, false};

    double score = ranked[pos].total_score;
    size_t first = pos;
    while (first > 0 && ranked[first - 1].total_score == score) --first;
    size_t last = pos;
    while (last + 1 < ranked.size() && ranked[last + 1].total_score == score)
        ++last;
    // Median of the tied rank range [first+1, last+1].
    double rank = (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2.0;
    return {rank, true};
}

double mean_reciprocal_rank(const std::vector<double>& ranks)
{
    if (ranks.empty()) throw Error("mean_reciprocal_rank of an empty list");
    double sum = 0.0;
    for (double r : ranks) {
        if (r < 1.0) throw Error("rank below 1");
        sum += 1.0 / r;
    }
    return sum / static_cast<double>(ranks.size());
}

double ndcg_at_k(double rank, int k)
{
    if (rank < 1.0) throw Error("rank below 1");
    if (rank > static_cast<double>(k)) return 0.0;
    return 1.0 / std::log2(1.0 + rank);
}

namespace {

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("wilcoxon: paired lists differ in length");
    if (a.size() < 10)
        throw std::invalid_argument("wilcoxon: need at least 10 pairs");

    std::vector<double> diffs;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult result;
    result.n_nonzero = diffs.size();
    if (diffs.empty()) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        return result;
    }

    // Rank |d| with average ranks for ties.
    size_t n = diffs.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&diffs](size_t x, size_t y) {
        return std::fabs(diffs[x]) < std::fabs(diffs[y]);
    });
    std::vector<double> rank(n);
    std::vector<size_t> tie_sizes;
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j + 1 < n &&
               std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]]))
            ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        if (j > i) tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }

    double w_plus = 0.0, w_minus = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0)
            w_plus += rank[i];
        else
            w_minus += rank[i];
    }
    double w_min = std::min(w_plus, w_minus);
    result.statistic = w_min;

    if (n <= 25) {
        // Exact conditional distribution over sign assignments; doubled
        // ranks keep the sums integral under ties.
        std::vector<long long> dranks(n);
        long long total = 0;
        for (size_t i = 0; i < n; ++i) {
            dranks[i] = llround(rank[i] * 2.0);
            total += dranks[i];
        }
        std::vector<double> count(static_cast<size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        long long reach = 0;
        for (size_t i = 0; i < n; ++i) {
            reach += dranks[i];
            for (long long s = reach; s >= dranks[i]; --s)
                count[s] += count[s - dranks[i]];
        }
        long long w_obs = llround(w_min * 2.0);
        double below = 0.0, all = 0.0;
        for (long long s = 0; s <= total; ++s) {
            all += count[s];
            if (s <= w_obs) below += count[s];
        }
        result.p_value = std::min(1.0, 2.0 * below / all);
    } else {
        double nn = static_cast<double>(n);
        double mean = nn * (nn + 1.0) / 4.0;
        double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        for (size_t t : tie_sizes) {
            double td = static_cast<double>(t);
            var -= (td * td * td - td) / 48.0;
        }
        if (var <= 0.0) {
            result.p_value = 1.0;
        } else {
            double z = (w_min - mean) / std::sqrt(var);
            result.p_value = std::min(1.0, 2.0 * normal_cdf(z));
        }
    }
    return result;
}

namespace {

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn)
{
    unsigned hw = std::thread::hardware_concurrency();
    size_t n_threads = threads > 0 ? static_cast<size_t>(threads)
                                   : (hw > 0 ? hw : 1);
    if (n_threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t t = 0; t < std::min(n_threads, count); ++t) {
        pool.emplace_back([&]() {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string format_query_id(int group, size_t scenario, size_t query)
{
    char buf[48];
    std::snprintf(buf, sizeof(buf), "g%d-s%03zu-q%zu", group, scenario, query);
    return buf;
}

}  // namespace

std::vector<GroupReport> run_eval(const SearchContext& ctx,
                                  const EvalOptions& options)
{
    const auto& corpus = *ctx.corpus;
    std::vector<GroupReport> reports;

    for (int group_id : options.groups) {
        QueryGroupSpec spec = QueryGroupSpec::preset(group_id);
        spec.scenarios = options.scenarios;
        spec.queries_per_scenario = options.queries_per_scenario;
        auto scenarios = generate_scenarios(corpus, spec, options.seed);

        GroupReport report;
        report.group_id = group_id;
        size_t total_queries = 0;
        for (const auto& s : scenarios) total_queries += s.queries.size();

        for (Scorer scorer : options.scorers) {
            ScorerReport sr;
            sr.scorer = scorer;
            sr.outcomes.resize(total_queries);
            std::vector<size_t> offsets(scenarios.size(), 0);
            {
                size_t off = 0;
                for (size_t s = 0; s < scenarios.size(); ++s) {
                    offsets[s] = off;
                    off += scenarios[s].queries.size();
                }
            }
            parallel_for(scenarios.size(), options.threads, [&](size_t s) {
                const Scenario& scen = scenarios[s];
                for (size_t q = 0; q < scen.queries.size(); ++q) {
                    auto ranked = rank_all(ctx, scen.queries[q], scorer);
                    auto [rank, found] =
                        target_rank(ranked, scen.target_id, corpus.size());
                    QueryOutcome& out = sr.outcomes[offsets[s] + q];
                    out.query_id = format_query_id(group_id, s, q);
                    out.scenario_index = s;
                    out.rank = rank;
                    out.found = found;
                    out.rr = 1.0 / rank;
                    out.ndcg10 = ndcg_at_k(rank, 10);
                    out.ndcg20 = ndcg_at_k(rank, 20);
                }
            });
            std::vector<double> ranks;
            ranks.reserve(total_queries);
            double n10 = 0.0, n20 = 0.0;
            for (const auto& o : sr.outcomes) {
                ranks.push_back(o.rank);
                n10 += o.ndcg10;
                n20 += o.ndcg20;
            }
            sr.mrr = mean_reciprocal_rank(ranks);
            sr.ndcg10 = n10 / static_cast<double>(total_queries);
            sr.ndcg20 = n20 / static_cast<double>(total_queries);
            report.scorers.push_back(std::move(sr));
        }

        for (size_t i = 0; i < report.scorers.size(); ++i) {
            for (size_t j = i + 1; j < report.scorers.size(); ++j) {
                std::vector<double> rr_a, rr_b;
                for (const auto& o : report.scorers[i].outcomes)
                    rr_a.push_back(o.rr);
                for (const auto& o : report.scorers[j].outcomes)
                    rr_b.push_back(o.rr);
                auto w = wilcoxon_signed_rank(rr_a, rr_b);
                report.significance.push_back(
                    {scorer_name(report.scorers[i].scorer),
                     scorer_name(report.scorers[j].scorer), w.statistic,
                     w.p_value});
            }
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

void write_eval_reports(const std::vector<GroupReport>& reports,
                        const std::string& out_dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    char buf[128];
    for (const auto& report : reports) {
        std::ofstream csv(fs::path(out_dir) /
                          ("group" + std::to_string(report.group_id) + ".csv"));
        csv << "query_id,scenario,scorer,rank,rr,ndcg10,ndcg20\n";
        for (const auto& sr : report.scorers) {
            for (const auto& o : sr.outcomes) {
                std::snprintf(buf, sizeof(buf), "%.1f,%.6f,%.6f,%.6f", o.rank,
                              o.rr, o.ndcg10, o.ndcg20);
                csv << o.query_id << ',' << o.scenario_index << ','
                    << scorer_name(sr.scorer) << ',' << buf << '\n';
            }
        }
    }

    std::ofstream sig(fs::path(out_dir) / "significance.csv");
    sig << "group,scorer_a,scorer_b,statistic,p_value\n";
    for (const auto& report : reports) {
        for (const auto& row : report.significance) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.6g", row.statistic,
                          row.p_value);
            sig << report.group_id << ',' << row.scorer_a << ',' << row.scorer_b
                << ',' << buf << '\n';
        }
    }

    std::ofstream md(fs::path(out_dir) / "summary.md");
    md << "# Evaluation summary\n";
    for (const auto& report : reports) {
        md << "\n## Group " << report.group_id << "\n\n";
        md << "| Method | MRR | NDCG@10 | NDCG@20 |\n";
        md << "|--------|-----|---------|---------|\n";
        for (const auto& sr : report.scorers) {
            std::snprintf(buf, sizeof(buf), "| %s | %.4f | %.4f | %.4f |",
                          scorer_name(sr.scorer), sr.mrr, sr.ndcg10, sr.ndcg20);
            md << buf << '\n';
        }
        if (!report.significance.empty()) {
            md << "\nWilcoxon signed-rank over per-query reciprocal ranks:\n\n";
            md << "| A | B | statistic | p |\n|---|---|-----------|---|\n";
            for (const auto& row : report.significance) {
                std::snprintf(buf, sizeof(buf), "| %s | %s | %.1f | %.6g |",
                              row.scorer_a.c_str(), row.scorer_b.c_str(),
                              row.statistic, row.p_value);
                md << buf << '\n';
            }
        }
    }
}

}  // namespace w5h
