#include "w5h/text_index.hpp"

#include <cmath>

namespace w5h {

std::string casefold(const std::string& s)
{
    std::string out = s;
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

static bool is_alnum(unsigned char c)
{
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z') || c >= 0x80;  // keep non-ASCII bytes
}

std::vector<std::string> tokenize(const std::string& text)
{
    static const std::unordered_set<std::string> none;
    return tokenize(text, none);
}

std::vector<std::string> tokenize(const std::string& text,
                                  const std::unordered_set<std::string>& stopwords)
{
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (is_alnum(c)) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                               : static_cast<char>(c));
        } else if (!cur.empty()) {
            if (!stopwords.count(cur)) out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty() && !stopwords.count(cur)) out.push_back(cur);
    return out;
}

double TextIndex::Field::df(const std::string& term) const
{
    auto it = postings.find(term);
    return it == postings.end() ? 0.0 : static_cast<double>(it->second.size());
}

double TextIndex::Field::tf(const std::string& term,
                            const std::string& doc_id) const
{
    auto it = postings.find(term);
    if (it == postings.end()) return 0.0;
    auto dit = it->second.find(doc_id);
    return dit == it->second.end() ? 0.0 : dit->second;
}

double TextIndex::Field::avgdl(size_t n_docs) const
{
    return n_docs == 0 ? 0.0 : total_len / static_cast<double>(n_docs);
}

std::string TextIndex::object_field_text(const TraceObject& obj, Dimension tag)
{
    std::string text;
    auto append = [&text](const std::string& piece) {
        if (piece.empty()) return;
        if (!text.empty()) text.push_back(' ');
        text += piece;
    };
    switch (tag) {
    case Dimension::Who:
        for (const auto& p : obj.who) {
            append(p.raw_name);
            for (const auto& e : p.raw_emails) append(e);
        }
        break;
    default:
        for (const auto& item : get_dimension(obj, tag)) append(item);
        break;
    }
    return text;
}

TextIndex TextIndex::build(const std::vector<TraceObject>& corpus)
{
    TextIndex index;
    index.n_docs = corpus.size();
    for (Dimension d : kAllDimensions) index.fields[dimension_name(d)];
    index.fields[kUnifiedField];

    for (const auto& obj : corpus) {
        std::string unified;
        for (Dimension d : kAllDimensions) {
            std::string text = object_field_text(obj, d);
            Field& field = index.fields[dimension_name(d)];
            auto tokens = tokenize(text);
            field.doc_len[obj.id] = static_cast<double>(tokens.size());
            field.total_len += static_cast<double>(tokens.size());
            for (const auto& t : tokens) field.postings[t][obj.id] += 1.0;
            if (!text.empty()) {
                if (!unified.empty()) unified.push_back(' ');
                unified += text;
            }
        }
        Field& all = index.fields[kUnifiedField];
        auto tokens = tokenize(unified);
        all.doc_len[obj.id] = static_cast<double>(tokens.size());
        all.total_len += static_cast<double>(tokens.size());
        for (const auto& t : tokens) all.postings[t][obj.id] += 1.0;
    }
    return index;
}

const TextIndex::Field* TextIndex::field(const std::string& name) const
{
    auto it = fields.find(name);
    return it == fields.end() ? nullptr : &it->second;
}

double TextIndex::tfidf_score(const std::vector<std::string>& q_terms,
                              const std::string& doc_id) const
{
    const Field* f = field(kUnifiedField);
    if (!f || n_docs == 0) return 0.0;
    double score = 0.0;
    for (const auto& term : q_terms) {
        double tf = f->tf(term, doc_id);
        if (tf <= 0.0) continue;
        double df = f->df(term);
        score += tf * std::log(static_cast<double>(n_docs) / df);
    }
    return score;
}

static double bm25_term(double tf, double df, double n_docs, double dl,
                        double avgdl, const Bm25Params& p)
{
    if (tf <= 0.0) return 0.0;
    double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
    double norm = avgdl > 0.0 ? p.k1 * (1.0 - p.b + p.b * dl / avgdl) : p.k1;
    return idf * tf * (p.k1 + 1.0) / (tf + norm);
}

double TextIndex::bm25_field_score(const std::string& field_name,
                                   const std::vector<std::string>& q_terms,
                                   const std::string& doc_id,
                                   const Bm25Params& params) const
{
    const Field* f = field(field_name);
    if (!f || n_docs == 0) return 0.0;
    auto dl_it = f->doc_len.find(doc_id);
    double dl = dl_it == f->doc_len.end() ? 0.0 : dl_it->second;
    double avgdl = f->avgdl(n_docs);
    double score = 0.0;
    for (const auto& term : q_terms) {
        score += bm25_term(f->tf(term, doc_id), f->df(term),
                           static_cast<double>(n_docs), dl, avgdl, params);
    }
    return score;
}

double TextIndex::bm25_score(const std::vector<std::string>& q_terms,
                             const std::string& doc_id,
                             const Bm25Params& params) const
{
    return bm25_field_score(kUnifiedField, q_terms, doc_id, params);
}

std::vector<std::string> TextIndex::query_field_terms(const Query& query,
                                                      Dimension tag)
{
    std::vector<std::string> terms;
    auto add = [&terms](const std::string& text) {
        for (auto& t : tokenize(text)) terms.push_back(std::move(t));
    };
    if (tag == Dimension::Who) {
        for (const auto& p : query.who) {
            add(p.raw_name);
            for (const auto& e : p.raw_emails) add(e);
        }
    } else {
        for (const auto& item : get_dimension(query, tag)) add(item);
    }
    return terms;
}

double TextIndex::field_bm25_score(
    const Query& query, const std::string& doc_id, const Bm25Params& params,
    const std::map<std::string, double>& field_weights) const
{
    double score = 0.0;
    for (Dimension d : kAllDimensions) {
        auto terms = query_field_terms(query, d);
        if (terms.empty()) continue;
        double w = 1.0;
        auto wit = field_weights.find(dimension_name(d));
        if (wit != field_weights.end()) w = wit->second;
        score += w * bm25_field_score(dimension_name(d), terms, doc_id, params);
    }
    return score;
}

}  // namespace w5h
