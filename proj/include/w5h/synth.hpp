#pragma once
// Reproducible synthetic trace corpora with planted structure: frequent
// groups with bursty activity, aliased identities, and name tokens leaking
// into message text.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "w5h/json_io.hpp"
#include "w5h/model.hpp"

namespace w5h {

struct SynthSpec {
    uint64_t seed = 42;
    size_t objects = 5000;
    std::map<std::string, double> sources = {
        {"facebook", 0.40}, {"gmail", 0.30}, {"twitter", 0.20}, {"calendar", 0.10}};
    size_t entities = 40;

    struct Group {
        std::vector<size_t> members;  // entity indexes
        double rate = 0.0;            // fraction of all objects
    };
    // Empty means: derive three default groups from the pool.
    std::vector<Group> frequent_groups;
    size_t events_per_group = 12;  // distinct burst days per group

    int year_start = 2015;
    int year_end = 2018;

    std::vector<std::string> locations = {"Washington", "Campos", "Student Center",
                                          "Athens", "Lisbon"};

    size_t vocabulary = 800;
    double zipf_exponent = 1.05;
    size_t text_min = 6;
    size_t text_max = 40;

    double alias_rate = 0.2;       // probability a mention uses a non-primary form
    double name_noise_rate = 0.15; // probability a text picks up name tokens

    struct Rates {
        double who = 0.98;        // P(who non-empty)
        double who_multi = 0.949; // P(3+ participants | who non-empty, non-group)
        double when = 0.957;
        double what = 0.999;
        double where = 0.015;
    } rates;

    static SynthSpec from_json(const ordered_json& j);
    ordered_json to_json() const;
    static SynthSpec load_file(const std::string& path);
};

struct SynthOutput {
    std::vector<TraceObject> corpus;
    ordered_json truth;
};

// Deterministic per seed, byte-identical output.
SynthOutput generate_corpus(const SynthSpec& spec);

void write_synth_output(const SynthOutput& out, const std::string& corpus_path,
                        const std::string& truth_path);

}  // namespace w5h
