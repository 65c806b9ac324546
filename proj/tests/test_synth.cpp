#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "w5h/entity.hpp"
#include "w5h/json_io.hpp"
#include "w5h/freq_index.hpp"
#include "w5h/synth.hpp"

using namespace w5h;

TEST_CASE("zero objects give an empty corpus")
{
    SynthSpec spec;
    spec.objects = 0;
    auto out = generate_corpus(spec);
    CHECK(out.corpus.empty());
    CHECK(out.truth.at("entities").size() == spec.entities);
}

TEST_CASE("same seed regenerates byte-identical output")
{
    SynthSpec spec;
    spec.objects = 400;
    spec.alias_rate = 0.25;
    auto a = generate_corpus(spec);
    auto b = generate_corpus(spec);

    std::ostringstream sa, sb;
    write_corpus(sa, a.corpus);
    write_corpus(sb, b.corpus);
    CHECK(sa.str() == sb.str());
    CHECK(a.truth.dump() == b.truth.dump());

    SynthSpec other = spec;
    other.seed = 43;
    auto c = generate_corpus(other);
    std::ostringstream sc;
    write_corpus(sc, c.corpus);
    CHECK(sa.str() != sc.str());
}

TEST_CASE("population rates land within two points of the targets")
{
    SynthSpec spec;
    spec.objects = 5000;
    auto out = generate_corpus(spec);

    double n = static_cast<double>(out.corpus.size());
    double what = 0, who = 0, when = 0, where = 0;
    for (const auto& obj : out.corpus) {
        if (!obj.what.empty()) ++what;
        if (!obj.who.empty()) ++who;
        if (!obj.when.empty()) ++when;
        if (!obj.where.empty()) ++where;
    }
    CHECK(std::fabs(what / n - spec.rates.what) <= 0.02);
    CHECK(std::fabs(who / n - spec.rates.who) <= 0.02);
    CHECK(std::fabs(when / n - spec.rates.when) <= 0.02);
    CHECK(std::fabs(where / n - spec.rates.where) <= 0.02);
}

TEST_CASE("alias rate zero keeps every mention on the primary form")
{
    SynthSpec spec;
    spec.objects = 300;
    spec.alias_rate = 0.0;
    auto out = generate_corpus(spec);

    std::set<std::string> primaries;
    for (const auto& e : out.truth.at("entities"))
        primaries.insert(e.at("primary_name").get<std::string>());
    for (const auto& obj : out.corpus) {
        for (const auto& p : obj.who) CHECK(primaries.count(p.raw_name) == 1);
    }
}

TEST_CASE("every ground-truth alias form matches its primary")
{
    SynthSpec spec;
    spec.objects = 10;
    spec.alias_rate = 0.5;
    auto out = generate_corpus(spec);
    for (const auto& e : out.truth.at("entities")) {
        PersonRef primary;
        primary.raw_name = e.at("forms").at(0).at("name").get<std::string>();
        for (const auto& em : e.at("forms").at(0).at("emails"))
            primary.raw_emails.push_back(em.get<std::string>());
        for (size_t f = 1; f < e.at("forms").size(); ++f) {
            PersonRef alias;
            alias.raw_name = e.at("forms").at(f).at("name").get<std::string>();
            for (const auto& em : e.at("forms").at(f).at("emails"))
                alias.raw_emails.push_back(em.get<std::string>());
            CHECK(match_person(alias, primary));
        }
    }
}

TEST_CASE("aliased corpora resolve back to the entity pool")
{
    SynthSpec spec;
    spec.objects = 600;
    spec.alias_rate = 0.3;
    auto out = generate_corpus(spec);
    auto resolved = resolve_corpus(out.corpus, {});
    // Every participating entity collapses to one id despite aliases; the
    // entity count cannot exceed the pool.
    CHECK(resolved.persons.size() <= spec.entities);

    ResolveOptions off;
    off.entity_resolution = false;
    auto frag = resolve_corpus(out.corpus, {}, off);
    CHECK(frag.persons.size() > resolved.persons.size());
}

TEST_CASE("frequent groups appear at roughly their configured rates")
{
    SynthSpec spec;
    spec.objects = 4000;
    auto out = generate_corpus(spec);
    auto resolved = resolve_corpus(out.corpus, {});
    FreqIndex ix = compute_frequency(resolved.corpus);

    // Per-entity-index ids from the resolved corpus, via the truth table.
    auto truth_groups = out.truth.at("groups");
    REQUIRE(truth_groups.size() >= 3);
    for (const auto& g : truth_groups) {
        double expected = g.at("rate").get<double>() * spec.objects;
        double seen = g.at("objects").get<double>();
        CHECK(seen > expected * 0.7);
        CHECK(seen < expected * 1.3);
    }
}

TEST_CASE("spec validation rejects infeasible inputs")
{
    SynthSpec spec;
    spec.sources = {{"a", 0.6}, {"b", 0.6}};
    CHECK_THROWS_AS(generate_corpus(spec), Error);

    SynthSpec big_group;
    big_group.entities = 2;
    big_group.frequent_groups = {{{0, 1, 5}, 0.1}};
    CHECK_THROWS_AS(generate_corpus(big_group), Error);

    SynthSpec bad_alias;
    bad_alias.alias_rate = 1.5;
    CHECK_THROWS_AS(generate_corpus(bad_alias), Error);
}

TEST_CASE("spec json round trip and unknown key rejection")
{
    SynthSpec spec;
    spec.objects = 123;
    spec.alias_rate = 0.25;
    auto j = spec.to_json();
    SynthSpec back = SynthSpec::from_json(j);
    CHECK(back.objects == 123);
    CHECK(back.alias_rate == 0.25);
    CHECK(back.to_json().dump() == j.dump());

    auto bad = j;
    bad["objets"] = 5;
    CHECK_THROWS_WITH_AS(SynthSpec::from_json(bad), doctest::Contains("objets"),
                         Error);
}
