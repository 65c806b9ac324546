#pragma once
// Frequency counters over users, groups, times and locations, per source
// and in total. Built in one pass; immutable afterwards.

#include <map>
#include <string>
#include <vector>

#include "w5h/model.hpp"

namespace w5h {

// Canonical text of a time generalization: Y, Y-M, Y-M-D or bare month.
using TimeKey = std::string;

// The generalizations a stored time contributes: (Y), (Y,M), (Y,M,D), (M).
// Hour-level keys are not kept.
std::vector<TimeKey> time_keys_of(const TimePoint& tp);

// The key a query time is looked up under (its finest kept generalization).
TimeKey time_key_of(const TimePoint& tp);

// Exact sorted set of entity ids in one object's who dimension. Subsets are
// never credited.
using GroupKey = std::vector<std::string>;

GroupKey group_key_of(const TraceObject& obj);

// Counter key for a location reference.
std::string location_key(const LocationRef& ref);

struct FreqWeights {
    // Role name -> weight; refs with unlisted roles use their own weight.
    std::map<std::string, double> role_weights;

    double effective(const PersonRef& ref) const;
};

struct FreqIndex {
    std::map<std::string, double> f_user;
    std::map<std::string, std::map<std::string, double>> f_user_src;
    std::map<GroupKey, double> f_group;
    std::map<std::string, std::map<GroupKey, double>> f_group_src;
    std::map<std::string, std::map<TimeKey, double>> f_user_time;
    std::map<std::string, std::map<std::string, std::map<TimeKey, double>>>
        f_user_time_src;
    std::map<GroupKey, std::map<TimeKey, double>> f_group_time;
    std::map<std::string, double> f_loc;
    std::map<std::string, std::map<std::string, double>> f_loc_src;

    double user(const std::string& id) const;
    double user_src(const std::string& source, const std::string& id) const;
    double group(const GroupKey& g) const;
    double group_src(const std::string& source, const GroupKey& g) const;
    double user_time(const std::string& id, const TimeKey& tk) const;
    double user_time_src(const std::string& source, const std::string& id,
                         const TimeKey& tk) const;
    double group_time(const GroupKey& g, const TimeKey& tk) const;
    double loc(const std::string& id) const;
    double loc_src(const std::string& source, const std::string& id) const;

    // Adds another index's counters; sharded builds merge to the same
    // result as a sequential pass.
    void merge_add(const FreqIndex& other);

    // Counters contributed by a single object.
    static FreqIndex of_object(const TraceObject& obj, const FreqWeights& weights);

    bool operator==(const FreqIndex&) const = default;
};

// One pass over the corpus; every who reference must carry an entity id.
FreqIndex compute_frequency(const std::vector<TraceObject>& corpus,
                            const FreqWeights& weights = {});

}  // namespace w5h
