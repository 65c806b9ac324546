// Acceptance suite. Runs each criterion end to end and prints one line per
// criterion; exits non-zero if any fails.

#include <chrono>
#include <memory>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "w5h/entity.hpp"
#include "w5h/eval.hpp"
#include "w5h/json_io.hpp"
#include "w5h/pipeline.hpp"
#include "w5h/search.hpp"
#include "w5h/storage.hpp"
#include "w5h/synth.hpp"

using namespace w5h;

namespace {

struct Checker {
    int failures = 0;
    std::string first_failure;

    void expect(bool ok, const std::string& what)
    {
        if (ok) return;
        ++failures;
        if (first_failure.empty()) first_failure = what;
    }
};

double elapsed_s(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string fixture(const std::string& name)
{
    return std::string(W5H_FIXTURES_DIR) + "/" + name;
}

// SearchContext points into the owning state, so the state lives on the
// heap and never moves.
struct PipelineState {
    std::vector<TraceObject> corpus;
    std::vector<PersonEntity> persons;
    std::vector<LocationEntity> locations;
    FreqIndex freq;
    TextIndex text;
    SearchContext ctx;

    PipelineState() = default;
    PipelineState(const PipelineState&) = delete;
    PipelineState& operator=(const PipelineState&) = delete;
};

std::unique_ptr<PipelineState> run_pipeline(const std::vector<TraceObject>& raw,
                                            bool er = true)
{
    auto p = std::make_unique<PipelineState>();
    ResolveOptions options;
    options.entity_resolution = er;
    auto resolved = resolve_corpus(raw, {}, options);
    p->corpus = std::move(resolved.corpus);
    p->persons = std::move(resolved.persons);
    p->locations = std::move(resolved.locations);
    p->freq = compute_frequency(p->corpus);
    p->text = TextIndex::build(p->corpus);
    p->ctx = SearchContext::build(p->corpus, p->freq, p->text);
    return p;
}

// ---------------------------------------------------------------------
// 1. Frequency oracle equivalence on 100 random synthetic corpora.

void criterion_1(Checker& c, std::string& detail)
{
    auto start = std::chrono::steady_clock::now();
    for (int round = 0; round < 100; ++round) {
        size_t n = 50 + static_cast<size_t>(splitmix64(round) % 451);  // <= 500
        std::vector<TraceObject> corpus;
        if (round % 2 == 0) {
            SynthSpec spec;
            spec.seed = 1000 + round;
            spec.objects = n;
            spec.entities = 12;
            spec.alias_rate = 0.2;
            auto out = generate_corpus(spec);
            corpus = resolve_corpus(out.corpus, {}).corpus;
        } else {
            corpus = testing::random_resolved_corpus(2000 + round, n);
        }
        FreqIndex built = compute_frequency(corpus);
        FreqIndex oracle = testing::naive_frequency_recount(corpus);
        c.expect(built == oracle,
                 "frequency mismatch on corpus round " + std::to_string(round));
        if (c.failures > 0) break;
    }
    double secs = elapsed_s(start);
    c.expect(secs < 10.0, "runtime " + std::to_string(secs) + "s exceeds 10s");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "100 corpora, %.2fs", secs);
    detail = buf;
}

// ---------------------------------------------------------------------
// 2. Worked-example fidelity on the embedded fixture post.

void criterion_2(Checker& c, std::string& detail)
{
    auto pp = run_pipeline(read_corpus_file(fixture("worked_example.jsonl")));
    auto& p = *pp;

    Query q;
    q.what = {"March for Science"};
    q.who = {PersonRef{"John Smith", {}, "", "", 1.0},
             PersonRef{"Anna Smith", {}, "", "", 1.0}};
    q.when = {TimePoint{2017, {}, {}, {}, {}}};
    resolve_query(q, p.persons, p.locations);

    const TraceObject& post = p.corpus[p.ctx.index_by_id.at("fb-post-1")];
    ScoredResult r = f_score(q, post, p.freq, p.text);

    std::map<std::string, int> fam;
    for (const auto& t : r.breakdown) fam[t.family]++;
    c.expect(fam["f_group"] == 1, "expected one f[g] term");
    c.expect(fam["f_user"] == 2, "expected two f[u] terms");
    c.expect(fam["f_user_src"] == 2, "expected two f_s[u] terms");
    c.expect(fam["f_user_time"] == 2, "expected two f[u][dt] terms");
    c.expect(fam["f_user_time_src"] == 2, "expected two f_s[u][dt] terms");
    c.expect(fam["f_group_time"] == 1, "expected one f[g][dt] term");
    c.expect(fam["score_when"] == 1, "expected a score_when term");
    c.expect(fam["score_what"] == 1, "expected a score_what term");
    c.expect(fam.count("f_loc") == 0, "unexpected location term");
    c.expect(fam.count("score_how") == 0, "unexpected source term");
    c.expect(r.breakdown.size() == 12, "expected exactly 12 breakdown terms");

    double score_when = 0.0, sum = 0.0;
    for (const auto& t : r.breakdown) {
        sum += t.value;
        if (t.family == "score_when") score_when = t.value;
    }
    c.expect(score_when == 1.0, "score_when should be 1");
    c.expect(std::fabs(r.total_score - sum) <= 1e-9, "total != sum of terms");
    c.expect(r.total_score > 0.0, "total should be positive");
    detail = "12 terms, total matches sum";
}

// ---------------------------------------------------------------------
// 3. Text-scorer oracles on a five-document toy corpus.

void criterion_3(Checker& c, std::string& detail)
{
    auto doc = [](const std::string& id, const std::string& what,
                  const std::string& who = "") {
        TraceObject o;
        o.id = id;
        o.source = "s";
        o.what = {what};
        if (!who.empty()) o.who.push_back(PersonRef{who, {}, "", "", 1.0});
        return o;
    };
    std::vector<TraceObject> corpus = {
        doc("d1", "march for science downtown", "John Smith"),
        doc("d2", "science fair photos", "Anna Smith"),
        doc("d3", "picnic at the lake lake lake", "Katie Jones"),
        doc("d4", "march madness games"),
        doc("d5", "quarterly science budget report for the march meeting",
            "John Smith"),
    };
    auto ix = TextIndex::build(corpus);

    // Independent statistics per field.
    auto stats = [&corpus](Dimension dim) {
        std::map<std::string, std::map<std::string, double>> tf;
        std::map<std::string, double> len;
        for (const auto& o : corpus) {
            auto toks = tokenize(TextIndex::object_field_text(o, dim));
            for (const auto& t : toks) tf[t][o.id] += 1.0;
            len[o.id] = static_cast<double>(toks.size());
        }
        return std::make_pair(tf, len);
    };
    auto unified_stats = [&corpus]() {
        std::map<std::string, std::map<std::string, double>> tf;
        std::map<std::string, double> len;
        for (const auto& o : corpus) {
            std::string text;
            for (Dimension d : kAllDimensions) {
                std::string part = TextIndex::object_field_text(o, d);
                if (!part.empty()) {
                    if (!text.empty()) text.push_back(' ');
                    text += part;
                }
            }
            auto toks = tokenize(text);
            for (const auto& t : toks) tf[t][o.id] += 1.0;
            len[o.id] = static_cast<double>(toks.size());
        }
        return std::make_pair(tf, len);
    };

    auto brute = [&corpus](const auto& tf, const auto& len,
                           const std::vector<std::string>& q,
                           const std::string& id, bool bm25) {
        double n = static_cast<double>(corpus.size());
        double avg = 0.0;
        for (const auto& [d, l] : len) avg += l;
        avg /= n;
        double s = 0.0;
        for (const auto& t : q) {
            auto it = tf.find(t);
            if (it == tf.end()) continue;
            auto dit = it->second.find(id);
            if (dit == it->second.end()) continue;
            double tfv = dit->second;
            double df = static_cast<double>(it->second.size());
            if (bm25) {
                double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
                s += idf * tfv * 2.2 / (tfv + 1.2 * (0.25 + 0.75 * len.at(id) / avg));
            } else {
                s += tfv * std::log(n / df);
            }
        }
        return s;
    };

    auto [all_tf, all_len] = unified_stats();
    auto [what_tf, what_len] = stats(Dimension::What);
    auto [who_tf, who_len] = stats(Dimension::Who);

    std::vector<std::string> q = {"march", "science", "smith"};
    for (const auto& o : corpus) {
        c.expect(std::fabs(ix.tfidf_score(q, o.id) -
                           brute(all_tf, all_len, q, o.id, false)) <= 1e-9,
                 "tfidf mismatch on " + o.id);
        c.expect(std::fabs(ix.bm25_score(q, o.id) -
                           brute(all_tf, all_len, q, o.id, true)) <= 1e-9,
                 "bm25 mismatch on " + o.id);
        Query query;
        query.what = {"march science"};
        query.who = {PersonRef{"John Smith", {}, "", "", 1.0}};
        double expected = brute(what_tf, what_len, {"march", "science"}, o.id, true) +
                          brute(who_tf, who_len, {"john", "smith"}, o.id, true);
        c.expect(std::fabs(ix.field_bm25_score(query, o.id) - expected) <= 1e-9,
                 "field bm25 mismatch on " + o.id);
    }

    // Reduction: single-populated field makes field bm25 equal plain bm25.
    std::vector<TraceObject> flat;
    for (const auto& o : corpus) {
        TraceObject stripped;
        stripped.id = o.id;
        stripped.source = "s";
        stripped.what = o.what;
        flat.push_back(stripped);
    }
    auto flat_ix = TextIndex::build(flat);
    for (const auto& o : flat) {
        Query query;
        query.what = {"march science lake"};
        double a = flat_ix.field_bm25_score(query, o.id);
        double b = flat_ix.bm25_score({"march", "science", "lake"}, o.id);
        c.expect(std::fabs(a - b) <= 1e-9, "field reduction mismatch on " + o.id);
    }
    detail = "tfidf/bm25/fieldbm25 vs brute force, plus reduction";
}

// ---------------------------------------------------------------------
// 4. Metric oracles.

void criterion_4(Checker& c, std::string& detail)
{
    c.expect(std::fabs(1.0 / 1.0 - mean_reciprocal_rank({1.0})) <= 1e-12, "rr(1)");
    c.expect(ndcg_at_k(1.0, 10) == 1.0, "ndcg@10 of rank 1");
    c.expect(std::fabs(ndcg_at_k(3.0, 10) - 0.5) <= 1e-12, "ndcg@10 of rank 3");
    c.expect(ndcg_at_k(15.0, 10) == 0.0, "ndcg@10 of rank 15");
    c.expect(std::fabs(ndcg_at_k(15.0, 20) - 0.25) <= 1e-12, "ndcg@20 of rank 15");

    Rng rng(1234);
    for (int round = 0; round < 1000; ++round) {
        size_t n = 1 + rng.index(40);
        std::vector<double> scores;
        for (size_t i = 0; i < n; ++i)
            scores.push_back(static_cast<double>(rng.index(7)));
        size_t target = rng.index(n);

        std::vector<ScoredResult> ranked;
        for (size_t i = 0; i < n; ++i)
            ranked.push_back({"d" + std::to_string(i), scores[i], {}});
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.total_score != b.total_score) return a.total_score > b.total_score;
            return a.object_id < b.object_id;
        });

        // Sort-and-scan oracle.
        double mine = scores[target];
        size_t higher = 0, equal = 0;
        for (double s : scores) {
            if (s > mine) ++higher;
            if (s == mine) ++equal;
        }
        double expected =
            (static_cast<double>(higher + 1) + static_cast<double>(higher + equal)) /
            2.0;
        auto out = target_rank(ranked, "d" + std::to_string(target), n);
        c.expect(out.found, "target not found");
        c.expect(std::fabs(out.rank - expected) <= 1e-12,
                 "median rank mismatch in round " + std::to_string(round));
        if (c.failures) break;
    }
    detail = "closed forms plus 1000 tie-median vectors";
}

// ---------------------------------------------------------------------
// 5. Entity resolution properties.

void criterion_5(Checker& c, std::string& detail)
{
    Rng rng(555);
    static const std::vector<std::string> firsts = {"john", "anna", "maria",
                                                    "pete", "lena", "omar"};
    static const std::vector<std::string> lasts = {"smith", "santos", "novak"};
    auto random_ref = [&rng]() {
        std::string f = rng.pick(firsts);
        std::string l = rng.pick(lasts);
        PersonRef r;
        switch (rng.index(4)) {
        case 0: r.raw_name = f + " " + l; break;
        case 1: r.raw_name = l + ", " + f; break;
        case 2: r.raw_name = std::string(1, f[0]) + ". " + l; break;
        default: r.raw_name = f + " " + l; break;
        }
        if (rng.chance(0.55)) r.raw_emails.push_back(f + "." + l + "@x.org");
        return r;
    };

    size_t checked = 0;
    while (checked < 10000) {
        auto a = PersonEntity::from_ref(random_ref());
        auto b = PersonEntity::from_ref(random_ref());
        auto cc = PersonEntity::from_ref(random_ref());
        if (!match_person(a, b)) continue;
        ++checked;
        auto ab = merge_person(a, b);
        auto ba = merge_person(b, a);
        c.expect(ab.names == ba.names && ab.emails == ba.emails &&
                     ab.entity_id == ba.entity_id,
                 "merge not commutative");
        auto aa = merge_person(a, a);
        c.expect(aa.names == a.names && aa.emails == a.emails, "merge not idempotent");
        if (match_person(b, cc)) {
            auto left = merge_person(merge_person(a, b), cc);
            auto right = merge_person(a, merge_person(b, cc));
            c.expect(left.names == right.names && left.emails == right.emails &&
                         left.entity_id == right.entity_id,
                     "merge not associative");
        }
        if (c.failures) break;
    }

    // rswoosh vs the naive transitive-closure oracle on 100-ref fixtures.
    auto contents = [](const std::vector<PersonEntity>& es) {
        std::set<std::pair<std::set<std::string>, std::set<std::string>>> out;
        for (const auto& e : es) out.insert({e.names, e.emails});
        return out;
    };
    for (int round = 0; round < 5 && !c.failures; ++round) {
        std::vector<PersonRef> refs;
        for (int i = 0; i < 100; ++i) refs.push_back(random_ref());

        std::vector<PersonEntity> entities;
        for (const auto& r : refs) entities.push_back(PersonEntity::from_ref(r));
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < entities.size() && !changed; ++i) {
                for (size_t j = i + 1; j < entities.size() && !changed; ++j) {
                    if (match_person(entities[i], entities[j])) {
                        auto merged = merge_person(entities[i], entities[j]);
                        entities.erase(entities.begin() + j);
                        entities.erase(entities.begin() + i);
                        entities.push_back(std::move(merged));
                        changed = true;
                    }
                }
            }
        }
        auto fast = rswoosh(refs);
        c.expect(contents(fast) == contents(entities),
                 "rswoosh differs from naive closure");

        for (int shuffle = 0; shuffle < 20; ++shuffle) {
            auto copy = refs;
            rng.shuffle(copy);
            c.expect(contents(rswoosh(copy)) == contents(fast),
                     "rswoosh not permutation invariant");
            if (c.failures) break;
        }
    }
    detail = "10^4 merge cases, closure oracle, 20 shuffles";
}

// ---------------------------------------------------------------------
// Shared state for criteria 6 and 8: the default synthetic corpus.

struct DefaultRun {
    SynthOutput synth;
    std::unique_ptr<PipelineState> p;
    std::vector<GroupReport> reports;  // group 3, four scorers

    static DefaultRun& instance()
    {
        static DefaultRun run;
        if (!run.p) {
            SynthSpec spec;  // 5000 objects, planted groups, aliases
            run.synth = generate_corpus(spec);
            run.p = run_pipeline(run.synth.corpus);
        }
        return run;
    }
};

void criterion_6(Checker& c, std::string& detail)
{
    auto start = std::chrono::steady_clock::now();
    DefaultRun& run = DefaultRun::instance();

    EvalOptions options;
    options.groups = {3};
    options.scorers = {Scorer::W5hf, Scorer::FieldBm25, Scorer::Bm25, Scorer::Tfidf};
    options.scenarios = 250;
    options.queries_per_scenario = 6;
    options.seed = 42;
    auto reports = run_eval(run.p->ctx, options);
    run.reports = reports;

    const auto& g3 = reports[0];
    double mrr[4];
    for (size_t i = 0; i < 4; ++i) mrr[i] = g3.scorers[i].mrr;
    c.expect(mrr[0] > mrr[1], "MRR(w5hf) <= MRR(fieldbm25)");
    c.expect(mrr[1] > mrr[2], "MRR(fieldbm25) <= MRR(bm25)");
    c.expect(mrr[2] > mrr[3], "MRR(bm25) <= MRR(tfidf)");

    double p_value = 1.0;
    for (const auto& row : g3.significance) {
        if (row.scorer_a == "w5hf" && row.scorer_b == "fieldbm25")
            p_value = row.p_value;
    }
    c.expect(p_value < 0.05, "w5hf vs fieldbm25 not significant (p=" +
                                 std::to_string(p_value) + ")");

    double secs = elapsed_s(start);
    c.expect(secs < 300.0, "runtime " + std::to_string(secs) + "s exceeds 5min");
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "MRR %.4f > %.4f > %.4f > %.4f, p=%.2g, %.1fs", mrr[0], mrr[1],
                  mrr[2], mrr[3], p_value, secs);
    detail = buf;
}

// ---------------------------------------------------------------------
// 7. Entity resolution benefit at alias rate 0.3.

void criterion_7(Checker& c, std::string& detail)
{
    SynthSpec spec;
    spec.alias_rate = 0.3;
    spec.seed = 77;
    auto synth = generate_corpus(spec);

    auto with_er_p = run_pipeline(synth.corpus, true);
    auto no_er_p = run_pipeline(synth.corpus, false);
    PipelineState& with_er = *with_er_p;
    PipelineState& no_er = *no_er_p;

    QueryGroupSpec g2 = QueryGroupSpec::preset(2);
    g2.scenarios = 250;
    g2.queries_per_scenario = 6;
    auto scenarios = generate_scenarios(with_er.corpus, g2, 42);

    std::vector<double> rr_er, rr_noer;
    for (const auto& scen : scenarios) {
        for (const auto& query : scen.queries) {
            auto ranked = rank_all(with_er.ctx, query, Scorer::W5hf);
            auto rank = target_rank(ranked, scen.target_id, with_er.corpus.size());
            rr_er.push_back(1.0 / rank.rank);

            // Same query surfaces, re-linked against the fragmented entities.
            Query fragmented = query;
            for (auto& ref : fragmented.who) ref.entity_id.clear();
            resolve_query(fragmented, no_er.persons, no_er.locations);
            auto ranked2 = rank_all(no_er.ctx, fragmented, Scorer::W5hf);
            auto rank2 = target_rank(ranked2, scen.target_id, no_er.corpus.size());
            rr_noer.push_back(1.0 / rank2.rank);
        }
    }
    double mrr_er = mean_reciprocal_rank([&] {
        std::vector<double> ranks;
        for (double rr : rr_er) ranks.push_back(1.0 / rr);
        return ranks;
    }());
    double mrr_noer = mean_reciprocal_rank([&] {
        std::vector<double> ranks;
        for (double rr : rr_noer) ranks.push_back(1.0 / rr);
        return ranks;
    }());
    auto w = wilcoxon_signed_rank(rr_er, rr_noer);
    c.expect(mrr_er > mrr_noer, "MRR with ER not higher (with=" +
                                    std::to_string(mrr_er) + " without=" +
                                    std::to_string(mrr_noer) + ")");
    c.expect(w.p_value < 0.05,
             "ER benefit not significant (p=" + std::to_string(w.p_value) + ")");
    char buf[120];
    std::snprintf(buf, sizeof(buf), "MRR %.4f with ER vs %.4f without, p=%.2g",
                  mrr_er, mrr_noer, w.p_value);
    detail = buf;
}

// ---------------------------------------------------------------------
// 8. Known-item guarantee across all five groups.

void criterion_8(Checker& c, std::string& detail)
{
    DefaultRun& run = DefaultRun::instance();
    size_t total = 0;
    for (int group = 1; group <= 5; ++group) {
        QueryGroupSpec spec = QueryGroupSpec::preset(group);
        spec.scenarios = 250;
        spec.queries_per_scenario = 6;
        auto scenarios = generate_scenarios(run.p->corpus, spec, 42);
        for (const auto& scen : scenarios) {
            for (const auto& query : scen.queries) {
                ++total;
                auto cand = run.p->ctx.candidates(query);
                bool found = false;
                for (size_t i : cand) {
                    if (run.p->corpus[i].id == scen.target_id) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    c.expect(false, "target " + scen.target_id +
                                        " missing from candidates (group " +
                                        std::to_string(group) + ")");
                    return;
                }
            }
        }
    }
    c.expect(total == 7500, "expected 7500 queries, got " + std::to_string(total));
    detail = "7500/7500 targets retrieved";
}

// ---------------------------------------------------------------------
// 9. Determinism of the full pipeline.

void criterion_9(Checker& c, std::string& detail)
{
    auto run_once = [](const std::string& tag) {
        SynthSpec spec;
        spec.objects = 800;
        spec.seed = 99;
        auto synth = generate_corpus(spec);

        std::ostringstream corpus_text;
        write_corpus(corpus_text, synth.corpus);

        auto p = run_pipeline(synth.corpus);
        IndexBundle bundle = build_indexes(p->corpus);
        std::string index_path = "/tmp/w5h_accept_index_" + tag + ".json";
        save_bundle(bundle, index_path);

        EvalOptions options;
        options.groups = {2};
        options.scorers = {Scorer::W5hf, Scorer::Bm25};
        options.scenarios = 40;
        options.queries_per_scenario = 3;
        options.seed = 5;
        options.threads = tag == "a" ? 4 : 1;  // thread count must not matter
        auto reports = run_eval(p->ctx, options);
        std::string report_dir = "/tmp/w5h_accept_report_" + tag;
        write_eval_reports(reports, report_dir);

        std::ostringstream all;
        all << corpus_text.str() << '\n'
            << synth.truth.dump() << '\n'
            << slurp_file(index_path) << '\n'
            << slurp_file(report_dir + "/group2.csv") << '\n'
            << slurp_file(report_dir + "/significance.csv");
        return all.str();
    };
    std::string a = run_once("a");
    std::string b = run_once("b");
    c.expect(a == b, "pipeline output differs between identical runs");
    detail = "corpus, truth, index and CSVs byte-identical";
}

}  // namespace

int main()
{
    struct Entry {
        int id;
        const char* label;
        std::function<void(Checker&, std::string&)> fn;
    };
    std::vector<Entry> criteria = {
        {1, "frequency oracle equivalence", criterion_1},
        {2, "worked-example fidelity", criterion_2},
        {3, "text-scorer oracles", criterion_3},
        {4, "metric oracles", criterion_4},
        {5, "entity resolution properties", criterion_5},
        {6, "ordering reproduction", criterion_6},
        {7, "entity resolution benefit", criterion_7},
        {8, "known-item guarantee", criterion_8},
        {9, "determinism", criterion_9},
    };

    int failed = 0;
    for (auto& entry : criteria) {
        Checker checker;
        std::string note;
        try {
            entry.fn(checker, note);
        } catch (const std::exception& e) {
            checker.expect(false, std::string("exception: ") + e.what());
        }
        if (checker.failures == 0) {
            std::printf("criterion %d: PASS — %s (%s)\n", entry.id, entry.label,
                        note.c_str());
        } else {
            ++failed;
            std::printf("criterion %d: FAIL — %s: %s\n", entry.id, entry.label,
                        checker.first_failure.c_str());
        }
        std::fflush(stdout);
    }
    return failed;
}
