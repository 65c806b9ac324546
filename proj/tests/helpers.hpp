#pragma once
// Shared test utilities: random corpus generation and independent oracles.
// The oracles here re-derive expected values from the definitions and must
// stay independent of the library code paths they check.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "w5h/freq_index.hpp"
#include "w5h/model.hpp"
#include "w5h/rng.hpp"
#include "w5h/text_index.hpp"

namespace w5h::testing {

// Random already-resolved object: entity ids e0..e{n-1}, sources s0..s{k-1}.
inline TraceObject random_resolved_object(Rng& rng, size_t idx,
                                          size_t n_entities, size_t n_sources)
{
    TraceObject obj;
    obj.id = "t" + std::to_string(idx);
    obj.source = "s" + std::to_string(rng.index(n_sources));

    size_t n_who = rng.index(5);
    for (size_t i = 0; i < n_who; ++i) {
        size_t e = rng.index(n_entities);
        PersonRef ref;
        ref.entity_id = "e" + std::to_string(e);
        ref.raw_name = "Entity " + std::to_string(e);
        if (rng.chance(0.3)) ref.raw_emails.push_back("e" + std::to_string(e) + "@x");
        ref.role = rng.chance(0.5) ? "from" : "to";
        obj.who.push_back(std::move(ref));
    }

    size_t n_when = rng.index(3);
    for (size_t i = 0; i < n_when; ++i) {
        TimePoint tp;
        switch (rng.index(5)) {
        case 0:
            tp.year = 2015 + rng.range(0, 3);
            break;
        case 1:
            tp.year = 2015 + rng.range(0, 3);
            tp.month = rng.range(1, 12);
            break;
        case 2:
        case 3:
            tp.year = 2015 + rng.range(0, 3);
            tp.month = rng.range(1, 12);
            tp.day = rng.range(1, 28);
            break;
        default:
            tp.month = rng.range(1, 12);
            break;
        }
        if (tp.day && rng.chance(0.2)) {
            tp.hour = rng.range(0, 23);
            tp.minute = rng.range(0, 59);
        }
        obj.when.push_back(tp);
        if (rng.chance(0.15)) obj.when.push_back(tp);  // duplicate on purpose
    }

    size_t n_where = rng.index(3);
    for (size_t i = 0; i < n_where; ++i) {
        LocationRef loc;
        loc.raw_text = "Place " + std::to_string(rng.index(6));
        if (rng.chance(0.7)) loc.canonical_id = "loc:place-" + std::to_string(rng.index(6));
        obj.where.push_back(std::move(loc));
    }

    size_t n_what = rng.index(3);
    static const std::vector<std::string> words = {"march",  "science", "photo",
                                                   "picnic", "meeting", "trip"};
    for (size_t i = 0; i < n_what; ++i) obj.what.push_back(rng.pick(words));
    obj.how.push_back(rng.chance(0.5) ? "post" : "email");
    return obj;
}

inline std::vector<TraceObject> random_resolved_corpus(uint64_t seed, size_t n,
                                                       size_t n_entities = 8,
                                                       size_t n_sources = 3)
{
    Rng rng(seed);
    std::vector<TraceObject> corpus;
    corpus.reserve(n);
    for (size_t i = 0; i < n; ++i)
        corpus.push_back(random_resolved_object(rng, i, n_entities, n_sources));
    return corpus;
}

// ---- Independent frequency recount -------------------------------------
// Re-derives every counter family with its own key construction and
// separate passes, for weight-1 corpora.

inline std::vector<std::string> oracle_time_keys(const TimePoint& tp)
{
    std::vector<std::string> keys;
    auto pad = [](int v, int width) {
        std::string s = std::to_string(v);
        while (s.size() < static_cast<size_t>(width)) s.insert(s.begin(), '0');
        return s;
    };
    if (tp.year) {
        keys.push_back(pad(*tp.year, 4));
        if (tp.month) {
            keys.push_back(pad(*tp.year, 4) + "-" + pad(*tp.month, 2));
            if (tp.day)
                keys.push_back(pad(*tp.year, 4) + "-" + pad(*tp.month, 2) + "-" +
                               pad(*tp.day, 2));
        }
    }
    if (tp.month) keys.push_back("--" + pad(*tp.month, 2));
    return keys;
}

inline FreqIndex naive_frequency_recount(const std::vector<TraceObject>& corpus)
{
    FreqIndex ix;

    auto users_of = [](const TraceObject& o) {
        std::set<std::string> ids;
        for (const auto& p : o.who) ids.insert(p.entity_id);
        return ids;
    };
    auto times_of = [](const TraceObject& o) {
        std::set<std::string> keys;
        for (const auto& t : o.when) {
            for (const auto& k : oracle_time_keys(t)) keys.insert(k);
        }
        return keys;
    };
    auto locs_of = [](const TraceObject& o) {
        std::set<std::string> keys;
        for (const auto& l : o.where) {
            keys.insert(l.canonical_id.empty() ? "raw:" + casefold(l.raw_text)
                                               : l.canonical_id);
        }
        return keys;
    };

    // f[u] and f_s[u]: objects mentioning the user.
    for (const auto& o : corpus) {
        for (const auto& u : users_of(o)) {
            ix.f_user[u] += 1.0;
            ix.f_user_src[o.source][u] += 1.0;
        }
    }
    // f[g] and f_s[g]: exact participant sets only.
    for (const auto& o : corpus) {
        auto users = users_of(o);
        if (users.empty()) continue;
        GroupKey g(users.begin(), users.end());
        ix.f_group[g] += 1.0;
        ix.f_group_src[o.source][g] += 1.0;
    }
    // Time-scoped counters: one credit per (object, key).
    for (const auto& o : corpus) {
        auto users = users_of(o);
        auto keys = times_of(o);
        for (const auto& k : keys) {
            for (const auto& u : users) {
                ix.f_user_time[u][k] += 1.0;
                ix.f_user_time_src[o.source][u][k] += 1.0;
            }
            if (!users.empty()) {
                GroupKey g(users.begin(), users.end());
                ix.f_group_time[g][k] += 1.0;
            }
        }
    }
    // Locations: one credit per distinct location per object.
    for (const auto& o : corpus) {
        for (const auto& k : locs_of(o)) {
            ix.f_loc[k] += 1.0;
            ix.f_loc_src[o.source][k] += 1.0;
        }
    }
    return ix;
}

}  // namespace w5h::testing
