#include "w5h/freq_index.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <type_traits>

#include "w5h/text_index.hpp"

namespace w5h {

std::vector<TimeKey> time_keys_of(const TimePoint& tp)
{
    std::vector<TimeKey> keys;
    char buf[16];
    if (tp.year) {
        std::snprintf(buf, sizeof(buf), "%04d", *tp.year);
        keys.emplace_back(buf);
        if (tp.month) {
            std::snprintf(buf, sizeof(buf), "%04d-%02d", *tp.year, *tp.month);
            keys.emplace_back(buf);
            if (tp.day) {
                std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", *tp.year,
                              *tp.month, *tp.day);
                keys.emplace_back(buf);
            }
        }
    }
    if (tp.month) {
        std::snprintf(buf, sizeof(buf), "--%02d", *tp.month);
        keys.emplace_back(buf);
    }
    return keys;
}

TimeKey time_key_of(const TimePoint& tp)
{
    char buf[16];
    if (!tp.year) {
        std::snprintf(buf, sizeof(buf), "--%02d", tp.month.value_or(0));
        return buf;
    }
    if (!tp.month) {
        std::snprintf(buf, sizeof(buf), "%04d", *tp.year);
        return buf;
    }
    if (!tp.day) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d", *tp.year, *tp.month);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", *tp.year, *tp.month,
                  *tp.day);
    return buf;
}

GroupKey group_key_of(const TraceObject& obj)
{
    std::set<std::string> ids;
    for (const auto& p : obj.who) {
        if (!p.entity_id.empty()) ids.insert(p.entity_id);
    }
    return GroupKey(ids.begin(), ids.end());
}

std::string location_key(const LocationRef& ref)
{
    if (!ref.canonical_id.empty()) return ref.canonical_id;
    return "raw:" + casefold(ref.raw_text);
}

double FreqWeights::effective(const PersonRef& ref) const
{
    auto it = role_weights.find(ref.role);
    return it == role_weights.end() ? ref.role_weight : it->second;
}

namespace {

template <typename Map, typename Key>
double lookup(const Map& m, const Key& k)
{
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
}

template <typename Map, typename K1, typename K2>
double lookup2(const Map& m, const K1& k1, const K2& k2)
{
    auto it = m.find(k1);
    return it == m.end() ? 0.0 : lookup(it->second, k2);
}

}  // namespace

double FreqIndex::user(const std::string& id) const { return lookup(f_user, id); }

double FreqIndex::user_src(const std::string& source, const std::string& id) const
{
    return lookup2(f_user_src, source, id);
}

double FreqIndex::group(const GroupKey& g) const { return lookup(f_group, g); }

double FreqIndex::group_src(const std::string& source, const GroupKey& g) const
{
    return lookup2(f_group_src, source, g);
}

double FreqIndex::user_time(const std::string& id, const TimeKey& tk) const
{
    return lookup2(f_user_time, id, tk);
}

double FreqIndex::user_time_src(const std::string& source, const std::string& id,
                                const TimeKey& tk) const
{
    auto it = f_user_time_src.find(source);
    if (it == f_user_time_src.end()) return 0.0;
    return lookup2(it->second, id, tk);
}

double FreqIndex::group_time(const GroupKey& g, const TimeKey& tk) const
{
    return lookup2(f_group_time, g, tk);
}

double FreqIndex::loc(const std::string& id) const { return lookup(f_loc, id); }

double FreqIndex::loc_src(const std::string& source, const std::string& id) const
{
    return lookup2(f_loc_src, source, id);
}

namespace {

template <typename Map>
void add_map(Map& into, const Map& from)
{
    for (const auto& [k, v] : from) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
            into[k] += v;
        } else {
            add_map(into[k], v);
        }
    }
}

}  // namespace

void FreqIndex::merge_add(const FreqIndex& other)
{
    add_map(f_user, other.f_user);
    add_map(f_user_src, other.f_user_src);
    add_map(f_group, other.f_group);
    add_map(f_group_src, other.f_group_src);
    add_map(f_user_time, other.f_user_time);
    add_map(f_user_time_src, other.f_user_time_src);
    add_map(f_group_time, other.f_group_time);
    add_map(f_loc, other.f_loc);
    add_map(f_loc_src, other.f_loc_src);
}

FreqIndex FreqIndex::of_object(const TraceObject& obj, const FreqWeights& weights)
{
    FreqIndex ix;
    const std::string& src = obj.source;

    // Users deduplicated; a person referenced twice is one participant whose
    // weight is the product of their reference weights.
    std::map<std::string, double> user_weight;
    double group_weight = 1.0;
    for (const auto& p : obj.who) {
        if (p.entity_id.empty())
            throw Error("object '" + obj.id +
                        "': who reference without entity id (run resolve first)");
        double w = weights.effective(p);
        auto [it, inserted] = user_weight.emplace(p.entity_id, w);
        if (!inserted) it->second *= w;
        group_weight *= w;
    }
    GroupKey group;
    for (const auto& [id, w] : user_weight) group.push_back(id);

    // Time keys contributed by this object: the union of each stored time's
    // generalizations, each counted once per object.
    std::set<TimeKey> tkeys;
    for (const auto& dt : obj.when) {
        for (auto& k : time_keys_of(dt)) tkeys.insert(std::move(k));
    }

    std::set<std::string> lkeys;
    for (const auto& l : obj.where) lkeys.insert(location_key(l));

    for (const auto& tk : tkeys) {
        if (!group.empty()) ix.f_group_time[group][tk] += group_weight;
        for (const auto& [id, w] : user_weight) {
            ix.f_user_time[id][tk] += w;
            ix.f_user_time_src[src][id][tk] += w;
        }
    }
    for (const auto& [id, w] : user_weight) {
        ix.f_user[id] += w;
        ix.f_user_src[src][id] += w;
    }
    if (!group.empty()) {
        ix.f_group[group] += group_weight;
        ix.f_group_src[src][group] += group_weight;
    }
    for (const auto& lk : lkeys) {
        ix.f_loc[lk] += 1.0;
        ix.f_loc_src[src][lk] += 1.0;
    }
    return ix;
}

FreqIndex compute_frequency(const std::vector<TraceObject>& corpus,
                            const FreqWeights& weights)
{
    FreqIndex index;
    for (const auto& obj : corpus) index.merge_add(FreqIndex::of_object(obj, weights));
    return index;
}

}  // namespace w5h
