#include "w5h/search.hpp"

#include <algorithm>
#include <set>

namespace w5h {

std::optional<Scorer> scorer_from_name(const std::string& name)
{
    if (name == "w5hf") return Scorer::W5hf;
    if (name == "tfidf") return Scorer::Tfidf;
    if (name == "bm25") return Scorer::Bm25;
    if (name == "fieldbm25") return Scorer::FieldBm25;
    return std::nullopt;
}

const char* scorer_name(Scorer s)
{
    switch (s) {
    case Scorer::W5hf: return "w5hf";
    case Scorer::Tfidf: return "tfidf";
    case Scorer::Bm25: return "bm25";
    case Scorer::FieldBm25: return "fieldbm25";
    }
    return "?";
}

namespace {

std::vector<std::string> query_entity_ids(const Query& query)
{
    std::set<std::string> ids;
    for (const auto& p : query.who) {
        if (!p.entity_id.empty()) ids.insert(p.entity_id);
    }
    return {ids.begin(), ids.end()};
}

std::set<std::string> object_entity_ids(const TraceObject& obj)
{
    std::set<std::string> ids;
    for (const auto& p : obj.who) {
        if (!p.entity_id.empty()) ids.insert(p.entity_id);
    }
    return ids;
}

std::set<std::string> query_location_ids(const Query& query)
{
    std::set<std::string> ids;
    for (const auto& l : query.where) {
        if (!l.canonical_id.empty()) ids.insert(l.canonical_id);
    }
    return ids;
}

bool any_time_match(const TimePoint& query_dt, const TraceObject& obj)
{
    for (const auto& dt : obj.when) {
        if (time_matches(query_dt, dt)) return true;
    }
    return false;
}

bool how_value_matches(const std::string& value, const TraceObject& obj)
{
    std::string v = casefold(value);
    if (v == casefold(obj.source)) return true;
    for (const auto& h : obj.how) {
        if (v == casefold(h)) return true;
    }
    return false;
}

}  // namespace

bool dimension_matches(const Query& query, const TraceObject& obj, Dimension tag)
{
    switch (tag) {
    case Dimension::What: {
        auto q_terms = TextIndex::query_field_terms(query, Dimension::What);
        if (q_terms.empty()) return false;
        auto d_terms =
            tokenize(TextIndex::object_field_text(obj, Dimension::What));
        std::set<std::string> doc_terms(d_terms.begin(), d_terms.end());
        for (const auto& t : q_terms) {
            if (doc_terms.count(t)) return true;
        }
        return false;
    }
    case Dimension::Who: {
        auto obj_ids = object_entity_ids(obj);
        for (const auto& p : query.who) {
            if (!p.entity_id.empty() && obj_ids.count(p.entity_id)) return true;
        }
        return false;
    }
    case Dimension::When: {
        for (const auto& q_dt : query.when) {
            if (any_time_match(q_dt, obj)) return true;
        }
        return false;
    }
    case Dimension::Where: {
        auto q_ids = query_location_ids(query);
        if (q_ids.empty()) return false;
        for (const auto& l : obj.where) {
            if (!l.canonical_id.empty() && q_ids.count(l.canonical_id))
                return true;
        }
        return false;
    }
    case Dimension::How: {
        for (const auto& h : query.how) {
            if (how_value_matches(h, obj)) return true;
        }
        return false;
    }
    case Dimension::Why:
        return false;
    }
    return false;
}

std::vector<std::string> candidate_set(const Query& query,
                                       const std::vector<TraceObject>& corpus)
{
    std::vector<std::string> out;
    for (const auto& obj : corpus) {
        for (Dimension d : kAllDimensions) {
            if (dimension_matches(query, obj, d)) {
                out.push_back(obj.id);
                break;
            }
        }
    }
    return out;
}

ScoredResult f_score(const Query& query, const TraceObject& obj,
                     const FreqIndex& freq, const TextIndex& text,
                     const ScoringConfig& cfg)
{
    {
        bool is_candidate = false;
        for (Dimension d : kAllDimensions) {
            if (dimension_matches(query, obj, d)) {
                is_candidate = true;
                break;
            }
        }
        if (!is_candidate)
            throw Error("object '" + obj.id + "' is not a candidate for the query");
    }

    ScoredResult result;
    result.object_id = obj.id;
    auto term_weight = [&cfg](const std::string& family) {
        auto it = cfg.term_weights.find(family);
        return it == cfg.term_weights.end() ? 1.0 : it->second;
    };
    auto add = [&](const std::string& family, std::string key, double value) {
        double v = value * term_weight(family);
        result.breakdown.push_back({family, std::move(key), v});
        result.total_score += v;
    };

    const std::string& src = obj.source;
    auto obj_ids = object_entity_ids(obj);

    // Query users present in the object, and the full query group.
    GroupKey group = query_entity_ids(query);
    std::vector<std::string> matched_users;
    for (const auto& u : group) {
        if (obj_ids.count(u)) matched_users.push_back(u);
    }
    bool group_in_obj = !group.empty() && matched_users.size() == group.size();

    // Query times that match the object, deduplicated by lookup key.
    std::vector<TimeKey> matched_keys;
    bool when_matched = false;
    {
        std::set<TimeKey> seen;
        for (const auto& q_dt : query.when) {
            if (!any_time_match(q_dt, obj)) continue;
            when_matched = true;
            TimeKey tk = time_key_of(q_dt);
            if (seen.insert(tk).second) matched_keys.push_back(tk);
        }
    }

    if (group_in_obj) add("f_group", "f[g]", freq.group(group));
    for (const auto& u : matched_users)
        add("f_user", "f[u=" + u + "]", freq.user(u));
    for (const auto& u : matched_users)
        add("f_user_src", "f_s[u=" + u + "]", freq.user_src(src, u));
    for (const auto& u : matched_users) {
        for (const auto& tk : matched_keys)
            add("f_user_time", "f[u=" + u + "][dt=" + tk + "]",
                freq.user_time(u, tk));
    }
    for (const auto& u : matched_users) {
        for (const auto& tk : matched_keys)
            add("f_user_time_src", "f_s[u=" + u + "][dt=" + tk + "]",
                freq.user_time_src(src, u, tk));
    }
    if (group_in_obj) {
        for (const auto& tk : matched_keys)
            add("f_group_time", "f[g][dt=" + tk + "]", freq.group_time(group, tk));
    }

    // Query locations present in the object.
    {
        auto q_ids = query_location_ids(query);
        std::set<std::string> matched;
        for (const auto& l : obj.where) {
            if (!l.canonical_id.empty() && q_ids.count(l.canonical_id))
                matched.insert(l.canonical_id);
        }
        for (const auto& id : matched)
            add("f_loc", "f[addr=" + id + "]", freq.loc(id));
    }

    if (!query.when.empty()) add("score_when", "score_when", when_matched ? 1.0 : 0.0);
    if (!query.how.empty()) {
        bool how_matched = false;
        for (const auto& h : query.how) {
            if (casefold(h) == casefold(obj.source)) {
                how_matched = true;
                break;
            }
        }
        add("score_how", "score_how", how_matched ? 1.0 : 0.0);
    }
    if (!query.what.empty()) {
        auto terms = TextIndex::query_field_terms(query, Dimension::What);
        double w = 1.0;
        auto it = cfg.field_weights.find("what");
        if (it != cfg.field_weights.end()) w = it->second;
        add("score_what", "score_what",
            w * text.bm25_field_score("what", terms, obj.id, cfg.bm25));
    }
    return result;
}

SearchContext SearchContext::build(const std::vector<TraceObject>& corpus,
                                   const FreqIndex& freq, const TextIndex& text,
                                   ScoringConfig cfg)
{
    SearchContext ctx;
    ctx.corpus = &corpus;
    ctx.freq = &freq;
    ctx.text = &text;
    ctx.cfg = std::move(cfg);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const TraceObject& obj = corpus[i];
        ctx.index_by_id.emplace(obj.id, i);
        for (const auto& id : object_entity_ids(obj)) ctx.who_docs[id].push_back(i);
        std::set<TimeKey> tkeys;
        for (const auto& dt : obj.when) {
            for (auto& k : time_keys_of(dt)) tkeys.insert(std::move(k));
        }
        for (const auto& tk : tkeys) ctx.when_docs[tk].push_back(i);
        std::set<std::string> lkeys;
        for (const auto& l : obj.where) {
            if (!l.canonical_id.empty()) lkeys.insert(l.canonical_id);
        }
        for (const auto& lk : lkeys) ctx.where_docs[lk].push_back(i);
        std::set<std::string> hkeys;
        hkeys.insert(casefold(obj.source));
        for (const auto& h : obj.how) hkeys.insert(casefold(h));
        for (const auto& hk : hkeys) ctx.how_docs[hk].push_back(i);
    }
    return ctx;
}

std::vector<size_t> SearchContext::candidates(const Query& query) const
{
    std::set<size_t> hits;
    auto take = [&hits](const std::unordered_map<std::string, std::vector<size_t>>& m,
                        const std::string& key) {
        auto it = m.find(key);
        if (it == m.end()) return;
        hits.insert(it->second.begin(), it->second.end());
    };

    for (const auto& p : query.who) {
        if (!p.entity_id.empty()) take(who_docs, p.entity_id);
    }
    for (const auto& q_dt : query.when) {
        auto it = when_docs.find(time_key_of(q_dt));
        if (it == when_docs.end()) continue;
        if (q_dt.hour) {
            // Keys stop at day granularity; confirm the finer fields.
            for (size_t i : it->second) {
                if (any_time_match(q_dt, (*corpus)[i])) hits.insert(i);
            }
        } else {
            hits.insert(it->second.begin(), it->second.end());
        }
    }
    for (const auto& l : query.where) {
        if (!l.canonical_id.empty()) take(where_docs, l.canonical_id);
    }
    for (const auto& h : query.how) take(how_docs, casefold(h));
    if (!query.what.empty() && text) {
        const TextIndex::Field* f = text->field("what");
        if (f) {
            for (const auto& term :
                 TextIndex::query_field_terms(query, Dimension::What)) {
                auto it = f->postings.find(term);
                if (it == f->postings.end()) continue;
                for (const auto& [doc_id, tf] : it->second) {
                    auto dit = index_by_id.find(doc_id);
                    if (dit != index_by_id.end()) hits.insert(dit->second);
                }
            }
        }
    }
    return {hits.begin(), hits.end()};
}

std::vector<std::string> flatten_query_terms(const Query& query)
{
    std::vector<std::string> terms;
    for (Dimension d : kAllDimensions) {
        for (auto& t : TextIndex::query_field_terms(query, d))
            terms.push_back(std::move(t));
    }
    return terms;
}

std::vector<ScoredResult> rank_all(const SearchContext& ctx, const Query& query,
                                   Scorer scorer)
{
    auto cand = ctx.candidates(query);
    std::vector<ScoredResult> results;
    results.reserve(cand.size());

    std::vector<std::string> flat_terms;
    if (scorer == Scorer::Tfidf || scorer == Scorer::Bm25)
        flat_terms = flatten_query_terms(query);

    for (size_t i : cand) {
        const TraceObject& obj = (*ctx.corpus)[i];
        switch (scorer) {
        case Scorer::W5hf:
            results.push_back(f_score(query, obj, *ctx.freq, *ctx.text, ctx.cfg));
            break;
        case Scorer::Tfidf: {
            double v = ctx.text->tfidf_score(flat_terms, obj.id);
            results.push_back({obj.id, v, {{"score_text", "tfidf", v}}});
            break;
        }
        case Scorer::Bm25: {
            double v = ctx.text->bm25_score(flat_terms, obj.id, ctx.cfg.bm25);
            results.push_back({obj.id, v, {{"score_text", "bm25", v}}});
            break;
        }
        case Scorer::FieldBm25: {
            double v = ctx.text->field_bm25_score(query, obj.id, ctx.cfg.bm25,
                                                  ctx.cfg.field_weights);
            results.push_back({obj.id, v, {{"score_text", "fieldbm25", v}}});
            break;
        }
        }
    }
    std::sort(results.begin(), results.end(),
              [](const ScoredResult& a, const ScoredResult& b) {
                  if (a.total_score != b.total_score)
                      return a.total_score > b.total_score;
                  return a.object_id < b.object_id;
              });
    return results;
}

std::vector<ScoredResult> search(const SearchContext& ctx, const Query& query,
                                 Scorer scorer, size_t k)
{
    auto results = rank_all(ctx, query, scorer);
    if (results.size() > k) results.resize(k);
    return results;
}

}  // namespace w5h
