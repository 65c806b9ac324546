#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>

#include "w5h/json_io.hpp"

using namespace w5h;
namespace fs = std::filesystem;

namespace {

std::string cli()
{
    return W5H_CLI_PATH;
}

int run(const std::string& args)
{
    std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("help exits zero, usage errors exit two, data errors exit one")
{
    CHECK(run("--help") == 0);
    CHECK(run("search --help") == 0);
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("") == 2);
    CHECK(run("ingest --input /nonexistent.jsonl --output /tmp/w5h_cli_out.jsonl") == 1);
    CHECK(run("search --query /none.json --corpus /none --index /none --scorer pagerank") == 1);
}

TEST_CASE("full pipeline: synth, resolve, index, search, eval")
{
    fs::path dir = "/tmp/w5h_cli_pipeline";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&dir](const std::string& name) { return (dir / name).string(); };

    write_file(p("spec.json"), R"({"objects": 300, "seed": 7, "alias_rate": 0.2,
        "entities": 12, "sources": {"facebook": 0.5, "gmail": 0.5}})");

    REQUIRE(run("synth --spec " + p("spec.json") + " --out " + p("corpus.jsonl") +
                " --truth " + p("truth.json")) == 0);
    REQUIRE(run("resolve --corpus " + p("corpus.jsonl") + " --output " +
                p("resolved.jsonl") + " --entities " + p("entities.json")) == 0);
    REQUIRE(run("index --corpus " + p("resolved.jsonl") + " --output " +
                p("index.json")) == 0);

    // A structured query against a known synthetic entity.
    write_file(p("query.json"),
               R"({"what": ["science"], "who": [{"name": "Alice Smith"}]})");
    CHECK(run("--format json search --query " + p("query.json") + " --corpus " +
              p("resolved.jsonl") + " --index " + p("index.json") +
              " --scorer w5hf --top 5") == 0);

    REQUIRE(run("eval --corpus " + p("resolved.jsonl") + " --index " +
                p("index.json") +
                " --groups 2 --scorers w5hf,bm25 --seed 3 --scenarios 10 "
                "--queries-per-scenario 2 --out " +
                p("report")) == 0);
    CHECK(fs::exists(p("report") + "/group2.csv"));
    CHECK(fs::exists(p("report") + "/summary.md"));
    CHECK(fs::exists(p("report") + "/significance.csv"));

    // Idempotence: identical inputs and seeds give identical bytes.
    REQUIRE(run("synth --spec " + p("spec.json") + " --out " + p("corpus2.jsonl") +
                " --truth " + p("truth2.json")) == 0);
    CHECK(slurp_file(p("corpus.jsonl")) == slurp_file(p("corpus2.jsonl")));
    CHECK(slurp_file(p("truth.json")) == slurp_file(p("truth2.json")));

    REQUIRE(run("resolve --corpus " + p("corpus.jsonl") + " --output " +
                p("resolved2.jsonl") + " --entities " + p("entities2.json")) == 0);
    CHECK(slurp_file(p("resolved.jsonl")) == slurp_file(p("resolved2.jsonl")));

    REQUIRE(run("index --corpus " + p("resolved.jsonl") + " --output " +
                p("index2.json")) == 0);
    CHECK(slurp_file(p("index.json")) == slurp_file(p("index2.json")));
}

TEST_CASE("config file flows into the pipeline and rejects unknown keys")
{
    fs::path dir = "/tmp/w5h_cli_config";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&dir](const std::string& name) { return (dir / name).string(); };

    write_file(p("ok.json"), R"({"scoring": {"k1": 1.5, "b": 0.6}})");
    write_file(p("bad.json"), R"({"scorring": {}})");
    write_file(p("spec.json"), R"({"objects": 50, "entities": 6})");

    REQUIRE(run("synth --spec " + p("spec.json") + " --out " + p("c.jsonl") +
                " --truth " + p("t.json")) == 0);
    REQUIRE(run("resolve --corpus " + p("c.jsonl") + " --output " + p("r.jsonl")) == 0);
    CHECK(run("--config " + p("ok.json") + " index --corpus " + p("r.jsonl") +
              " --output " + p("i.json")) == 0);
    CHECK(run("--config " + p("bad.json") + " index --corpus " + p("r.jsonl") +
              " --output " + p("i2.json")) == 1);
}
