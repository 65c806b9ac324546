#pragma once
// Shared configuration file. Unknown keys are rejected so typos fail loudly;
// command-line flags override file values.

#include <string>
#include <vector>

#include "w5h/freq_index.hpp"
#include "w5h/json_io.hpp"
#include "w5h/search.hpp"

namespace w5h {

struct Config {
    struct Paths {
        std::string corpus;
        std::string index;
        std::string geocache;
        std::string dictionary;
        std::string entities;
    } paths;

    ScoringConfig scoring;     // k1, b, field weights, score term weights
    FreqWeights freq_weights;  // interaction role weights

    struct EvalSettings {
        std::vector<int> groups = {1, 2, 3, 4, 5};
        std::vector<std::string> scorers = {"w5hf", "fieldbm25", "bm25", "tfidf"};
        uint64_t seed = 42;
        size_t scenarios = 250;
        size_t queries_per_scenario = 6;
    } eval;

    static Config from_json(const ordered_json& j);
    static Config load_file(const std::string& path);
};

}  // namespace w5h
