// Command line front end: ingest, resolve, index, search, eval, synth.

#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "w5h/config.hpp"
#include "w5h/entity.hpp"
#include "w5h/eval.hpp"
#include "w5h/ingest.hpp"
#include "w5h/json_io.hpp"
#include "w5h/pipeline.hpp"
#include "w5h/search.hpp"
#include "w5h/storage.hpp"
#include "w5h/synth.hpp"

namespace {

using namespace w5h;

struct GlobalOpts {
    std::string config_path;
    std::string format = "text";
    int threads = 0;

    Config config;

    void load()
    {
        if (!config_path.empty()) config = Config::load_file(config_path);
    }
};

int cmd_ingest(const GlobalOpts& g, const std::string& input,
               const std::string& dict_path, const std::string& output)
{
    std::string dpath = !dict_path.empty() ? dict_path : g.config.paths.dictionary;
    LoadResult loaded;
    if (!dpath.empty()) {
        LabelDictionary dict = LabelDictionary::load_file(dpath);
        loaded = load_corpus(input, &dict);
    } else {
        loaded = load_corpus(input);
    }
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    if (!loaded.unmapped_labels.empty()) {
        std::set<std::string> distinct(loaded.unmapped_labels.begin(),
                                       loaded.unmapped_labels.end());
        for (const auto& u : distinct)
            std::cerr << "warning: unmapped label " << u << "\n";
    }
    write_corpus_file(output, loaded.corpus);
    std::cerr << "wrote " << loaded.corpus.size() << " objects to " << output
              << "\n";
    return 0;
}

int cmd_resolve(const GlobalOpts& g, const std::string& corpus_path,
                const std::string& geocache_path, const std::string& output,
                const std::string& entities_path, bool no_er)
{
    auto loaded = read_corpus_file(corpus_path);
    GeocodeCache cache;
    std::string gpath = !geocache_path.empty() ? geocache_path : g.config.paths.geocache;
    if (!gpath.empty()) cache = GeocodeCache::load_file(gpath);
    ResolveOptions options;
    options.entity_resolution = !no_er;
    auto result = resolve_corpus(loaded, cache, options);
    write_corpus_file(output, result.corpus);
    if (!entities_path.empty())
        save_entities(entities_path, result.persons, result.locations);
    std::cerr << "resolved " << result.corpus.size() << " objects into "
              << result.persons.size() << " person entities, "
              << result.locations.size() << " locations\n";
    return 0;
}

int cmd_index(const GlobalOpts& g, const std::string& corpus_path,
              const std::string& output, const std::string& entities_path)
{
    auto corpus = read_corpus_file(corpus_path);
    IndexBundle bundle = build_indexes(corpus, g.config.freq_weights);
    if (!entities_path.empty()) {
        auto [persons, locations] = load_entities(entities_path);
        bundle.persons = std::move(persons);
        bundle.locations = std::move(locations);
    }
    save_bundle(bundle, output);
    std::cerr << "indexed " << corpus.size() << " objects to " << output << "\n";
    return 0;
}

ordered_json result_to_json(size_t rank, const ScoredResult& r)
{
    ordered_json j;
    j["rank"] = rank;
    j["id"] = r.object_id;
    j["score"] = r.total_score;
    ordered_json terms = ordered_json::object();
    for (const auto& t : r.breakdown) terms[t.key] = t.value;
    j["breakdown"] = std::move(terms);
    return j;
}

int cmd_search(const GlobalOpts& g, const std::string& query_path,
               const std::string& corpus_path, const std::string& index_path,
               const std::string& scorer_name_arg, size_t top,
               const std::string& entities_path)
{
    auto scorer = scorer_from_name(scorer_name_arg);
    if (!scorer) throw Error("unknown scorer '" + scorer_name_arg + "'");

    auto corpus = read_corpus_file(corpus_path);
    IndexBundle bundle = load_bundle(index_path);
    if (!entities_path.empty()) {
        auto [persons, locations] = load_entities(entities_path);
        bundle.persons = std::move(persons);
        bundle.locations = std::move(locations);
    }

    Query query = read_query_file(query_path);
    resolve_query(query, bundle.persons, bundle.locations);

    SearchContext ctx =
        SearchContext::build(corpus, bundle.freq, bundle.text, g.config.scoring);
    auto results = search(ctx, query, *scorer, top);

    if (g.format == "json") {
        ordered_json arr = ordered_json::array();
        for (size_t i = 0; i < results.size(); ++i)
            arr.push_back(result_to_json(i + 1, results[i]));
        std::cout << arr.dump(2) << "\n";
    } else {
        std::printf("%-5s %-20s %-12s breakdown\n", "rank", "id", "score");
        for (size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            std::string terms;
            for (const auto& t : r.breakdown) {
                if (!terms.empty()) terms += "  ";
                char tb[160];
                std::snprintf(tb, sizeof(tb), "%s=%.4g", t.key.c_str(), t.value);
                terms += tb;
            }
            std::printf("%-5zu %-20s %-12.6g %s\n", i + 1, r.object_id.c_str(),
                        r.total_score, terms.c_str());
        }
    }
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& corpus_path,
             const std::string& index_path, const std::string& groups_arg,
             const std::string& scorers_arg, uint64_t seed,
             const std::string& out_dir, size_t scenarios,
             size_t queries_per_scenario)
{
    auto corpus = read_corpus_file(corpus_path);
    IndexBundle bundle = load_bundle(index_path);
    SearchContext ctx =
        SearchContext::build(corpus, bundle.freq, bundle.text, g.config.scoring);

    EvalOptions options;
    options.seed = seed;
    options.threads = g.threads;
    options.scenarios = scenarios;
    options.queries_per_scenario = queries_per_scenario;
    options.groups.clear();
    {
        std::stringstream ss(groups_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) options.groups.push_back(std::stoi(item));
        }
    }
    options.scorers.clear();
    {
        std::stringstream ss(scorers_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            auto s = scorer_from_name(item);
            if (!s) throw Error("unknown scorer '" + item + "'");
            options.scorers.push_back(*s);
        }
    }
    if (options.groups.empty() || options.scorers.empty())
        throw Error("eval needs at least one group and one scorer");

    auto reports = run_eval(ctx, options);
    write_eval_reports(reports, out_dir);

    for (const auto& report : reports) {
        std::printf("group %d (%zu queries per scorer)\n", report.group_id,
                    report.scorers.empty() ? 0 : report.scorers[0].outcomes.size());
        for (const auto& sr : report.scorers) {
            std::printf("  %-10s MRR %.4f  NDCG@10 %.4f  NDCG@20 %.4f\n",
                        scorer_name(sr.scorer), sr.mrr, sr.ndcg10, sr.ndcg20);
        }
        for (const auto& row : report.significance) {
            std::printf("  %s vs %s: W=%.1f p=%.6g\n", row.scorer_a.c_str(),
                        row.scorer_b.c_str(), row.statistic, row.p_value);
        }
    }
    std::cerr << "reports written to " << out_dir << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path,
              const std::string& truth_path)
{
    SynthSpec spec;
    if (!spec_path.empty()) spec = SynthSpec::load_file(spec_path);
    auto out = generate_corpus(spec);
    write_synth_output(out, out_path, truth_path);
    std::cerr << "generated " << out.corpus.size() << " objects\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"w5h: six-dimension search over personal digital traces"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

    auto* ingest = app.add_subcommand("ingest", "Parse raw or canonical records");
    std::string in_input, in_dict, in_output;
    ingest->add_option("--input", in_input, "Input JSONL")->required();
    ingest->add_option("--dict", in_dict, "Label dictionary JSON");
    ingest->add_option("--output", in_output, "Canonical corpus output")->required();

    auto* resolve = app.add_subcommand("resolve", "Entity-resolve who and where");
    std::string rs_corpus, rs_cache, rs_output, rs_entities;
    bool rs_no_er = false;
    resolve->add_option("--corpus", rs_corpus, "Canonical corpus")->required();
    resolve->add_option("--geocache", rs_cache, "Geocode cache JSON");
    resolve->add_option("--output", rs_output, "Resolved corpus output")->required();
    resolve->add_option("--entities", rs_entities, "Entity table output");
    resolve->add_flag("--no-entity-resolution", rs_no_er,
                      "One entity per surface form (baseline mode)");

    auto* index = app.add_subcommand("index", "Build frequency and text indexes");
    std::string ix_corpus, ix_output, ix_entities;
    index->add_option("--corpus", ix_corpus, "Resolved corpus")->required();
    index->add_option("--output", ix_output, "Index file output")->required();
    index->add_option("--entities", ix_entities, "Entity table to embed");

    auto* search_cmd = app.add_subcommand("search", "Rank objects for a query");
    std::string se_query, se_corpus, se_index, se_scorer = "w5hf", se_entities;
    size_t se_top = 20;
    search_cmd->add_option("--query", se_query, "Query JSON file")->required();
    search_cmd->add_option("--corpus", se_corpus, "Resolved corpus")->required();
    search_cmd->add_option("--index", se_index, "Index file")->required();
    search_cmd->add_option("--scorer", se_scorer, "w5hf|tfidf|bm25|fieldbm25");
    search_cmd->add_option("--top", se_top, "Results to print");
    search_cmd->add_option("--entities", se_entities, "Entity table override");

    auto* eval_cmd = app.add_subcommand("eval", "Known-item evaluation");
    std::string ev_corpus, ev_index, ev_groups = "1,2,3,4,5",
                ev_scorers = "w5hf,fieldbm25,bm25,tfidf", ev_out = "report";
    uint64_t ev_seed = 42;
    size_t ev_scenarios = 250, ev_queries = 6;
    eval_cmd->add_option("--corpus", ev_corpus, "Resolved corpus")->required();
    eval_cmd->add_option("--index", ev_index, "Index file")->required();
    eval_cmd->add_option("--groups", ev_groups, "Comma-separated group ids");
    eval_cmd->add_option("--scorers", ev_scorers, "Comma-separated scorers");
    eval_cmd->add_option("--seed", ev_seed, "RNG seed");
    eval_cmd->add_option("--out", ev_out, "Report directory");
    eval_cmd->add_option("--scenarios", ev_scenarios, "Scenarios per group");
    eval_cmd->add_option("--queries-per-scenario", ev_queries,
                         "Queries per scenario");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    std::string sy_spec, sy_out, sy_truth;
    synth->add_option("--spec", sy_spec, "Synth spec JSON");
    synth->add_option("--out", sy_out, "Corpus output")->required();
    synth->add_option("--truth", sy_truth, "Ground truth output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        g.load();
        if (ingest->parsed()) return cmd_ingest(g, in_input, in_dict, in_output);
        if (resolve->parsed())
            return cmd_resolve(g, rs_corpus, rs_cache, rs_output, rs_entities,
                               rs_no_er);
        if (index->parsed()) return cmd_index(g, ix_corpus, ix_output, ix_entities);
        if (search_cmd->parsed())
            return cmd_search(g, se_query, se_corpus, se_index, se_scorer, se_top,
                              se_entities);
        if (eval_cmd->parsed())
            return cmd_eval(g, ev_corpus, ev_index, ev_groups, ev_scorers, ev_seed,
                            ev_out, ev_scenarios, ev_queries);
        if (synth->parsed()) return cmd_synth(sy_spec, sy_out, sy_truth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
