#pragma once
// Inverted index over the corpus with one posting field per dimension plus
// a unified field for keyword scoring. Build is single-writer; after build
// the index is immutable and safe for concurrent readers.

#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "w5h/model.hpp"

namespace w5h {

// Casefold, split on non-alphanumeric runs, drop empty tokens. No stemming.
std::vector<std::string> tokenize(const std::string& text);
std::vector<std::string> tokenize(
    const std::string& text, const std::unordered_set<std::string>& stopwords);

// ASCII lowercase.
std::string casefold(const std::string& s);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

// Field names: the six dimensions plus "all" (every dimension's text and
// the source, concatenated).
inline constexpr const char* kUnifiedField = "all";

struct TextIndex {
    struct Field {
        // term -> doc id -> raw term frequency
        std::map<std::string, std::map<std::string, double>> postings;
        std::map<std::string, double> doc_len;
        double total_len = 0.0;

        double df(const std::string& term) const;
        double tf(const std::string& term, const std::string& doc_id) const;
        double avgdl(size_t n_docs) const;
    };

    size_t n_docs = 0;
    std::map<std::string, Field> fields;

    static TextIndex build(const std::vector<TraceObject>& corpus);

    const Field* field(const std::string& name) const;

    // Sum over query terms of tf * ln(N/df) on the unified field.
    double tfidf_score(const std::vector<std::string>& q_terms,
                       const std::string& doc_id) const;

    // Okapi BM25 with Robertson +1 idf on the unified field.
    double bm25_score(const std::vector<std::string>& q_terms,
                      const std::string& doc_id,
                      const Bm25Params& params = {}) const;

    // BM25 within one dimension's field.
    double bm25_field_score(const std::string& field_name,
                            const std::vector<std::string>& q_terms,
                            const std::string& doc_id,
                            const Bm25Params& params = {}) const;

    // Sum over the query's non-empty dimensions of BM25 in that dimension's
    // field, each scaled by its field weight (default 1).
    double field_bm25_score(
        const Query& query, const std::string& doc_id,
        const Bm25Params& params = {},
        const std::map<std::string, double>& field_weights = {}) const;

    // Tokenized query text for one dimension, as searched in that field.
    static std::vector<std::string> query_field_terms(const Query& query,
                                                      Dimension tag);

    // Text indexed for one dimension of one object.
    static std::string object_field_text(const TraceObject& obj, Dimension tag);
};

}  // namespace w5h
