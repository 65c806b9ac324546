#include "w5h/config.hpp"

#include <set>

namespace w5h {

namespace {

void reject_unknown(const ordered_json& j, const std::set<std::string>& known,
                    const std::string& where)
{
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k))
            throw Error("config: unknown key '" + k + "' under " + where);
    }
}

}  // namespace

Config Config::from_json(const ordered_json& j)
{
    Config cfg;
    reject_unknown(j, {"paths", "scoring", "eval"}, "top level");

    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        reject_unknown(p, {"corpus", "index", "geocache", "dictionary", "entities"},
                       "paths");
        cfg.paths.corpus = p.value("corpus", "");
        cfg.paths.index = p.value("index", "");
        cfg.paths.geocache = p.value("geocache", "");
        cfg.paths.dictionary = p.value("dictionary", "");
        cfg.paths.entities = p.value("entities", "");
    }
    if (j.contains("scoring")) {
        const auto& s = j.at("scoring");
        reject_unknown(
            s, {"k1", "b", "field_weights", "term_weights", "role_weights"},
            "scoring");
        cfg.scoring.bm25.k1 = s.value("k1", cfg.scoring.bm25.k1);
        cfg.scoring.bm25.b = s.value("b", cfg.scoring.bm25.b);
        if (s.contains("field_weights")) {
            for (const auto& [k, v] : s.at("field_weights").items()) {
                if (!dimension_from_name(k))
                    throw Error("config: unknown field weight '" + k + "'");
                cfg.scoring.field_weights[k] = v.get<double>();
            }
        }
        if (s.contains("term_weights")) {
            static const std::set<std::string> families = {
                "f_group",     "f_user",          "f_user_src", "f_user_time",
                "f_user_time_src", "f_group_time", "f_loc",     "score_when",
                "score_how",   "score_what"};
            for (const auto& [k, v] : s.at("term_weights").items()) {
                if (!families.count(k))
                    throw Error("config: unknown term weight '" + k + "'");
                cfg.scoring.term_weights[k] = v.get<double>();
            }
        }
        if (s.contains("role_weights")) {
            for (const auto& [k, v] : s.at("role_weights").items())
                cfg.freq_weights.role_weights[k] = v.get<double>();
        }
    }
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        reject_unknown(
            e, {"groups", "scorers", "seed", "scenarios", "queries_per_scenario"},
            "eval");
        if (e.contains("groups"))
            cfg.eval.groups = e.at("groups").get<std::vector<int>>();
        if (e.contains("scorers"))
            cfg.eval.scorers = e.at("scorers").get<std::vector<std::string>>();
        cfg.eval.seed = e.value("seed", cfg.eval.seed);
        cfg.eval.scenarios = e.value("scenarios", cfg.eval.scenarios);
        cfg.eval.queries_per_scenario =
            e.value("queries_per_scenario", cfg.eval.queries_per_scenario);
    }
    return cfg;
}

Config Config::load_file(const std::string& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
    return from_json(j);
}

}  // namespace w5h
