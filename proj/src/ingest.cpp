#include "w5h/ingest.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "w5h/json_io.hpp"
#include "w5h/text_index.hpp"

namespace w5h {

LabelDictionary LabelDictionary::load_file(const std::string& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
    LabelDictionary dict;
    auto to_dim = [&path](const ordered_json& v, const std::string& label) {
        auto d = dimension_from_name(v.get<std::string>());
        if (!d)
            throw Error(path + ": label '" + label + "' maps to unknown dimension '" +
                        v.get<std::string>() + "'");
        return *d;
    };
    if (j.contains("sources")) {
        for (const auto& [source, labels] : j.at("sources").items()) {
            std::string src = casefold(source);
            for (const auto& [label, v] : labels.items()) {
                if (label == "_dates") {
                    for (const auto& fmt : v)
                        dict.date_formats[src].push_back(fmt.get<std::string>());
                    continue;
                }
                dict.by_source[{src, casefold(label)}] = to_dim(v, label);
            }
        }
    }
    if (j.contains("fallback")) {
        for (const auto& [label, v] : j.at("fallback").items())
            dict.fallback[casefold(label)] = to_dim(v, label);
    }
    return dict;
}

bool LabelDictionary::knows_source(const std::string& source) const
{
    std::string src = casefold(source);
    auto it = by_source.lower_bound({src, ""});
    return it != by_source.end() && it->first.first == src;
}

std::optional<Dimension> classify_label(const LabelDictionary& dict,
                                        const std::string& source,
                                        const std::string& label)
{
    auto it = dict.by_source.find({casefold(source), casefold(label)});
    if (it != dict.by_source.end()) return it->second;
    auto fit = dict.fallback.find(casefold(label));
    if (fit != dict.fallback.end()) return fit->second;
    return std::nullopt;
}

PersonRef parse_person_text(const std::string& text)
{
    PersonRef ref;
    std::string name;
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '<') {
            size_t close = text.find('>', i);
            if (close == std::string::npos) {
                name += text.substr(i);
                break;
            }
            std::string email = text.substr(i + 1, close - i - 1);
            if (!email.empty()) ref.raw_emails.push_back(email);
            i = close + 1;
        } else {
            name.push_back(text[i]);
            ++i;
        }
    }
    // Trim and detect a bare address.
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t,");
        size_t e = s.find_last_not_of(" \t,");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    name = trim(name);
    if (ref.raw_emails.empty() && name.find('@') != std::string::npos &&
        name.find(' ') == std::string::npos) {
        ref.raw_emails.push_back(name);
        name.clear();
    }
    ref.raw_name = name;
    return ref;
}

std::optional<TimePoint> parse_time_with_format(const std::string& value,
                                                const std::string& format)
{
    TimePoint tp;
    size_t vi = 0;
    auto read_digits = [&](size_t max_digits, size_t min_digits) -> std::optional<int> {
        size_t n = 0;
        int out = 0;
        while (n < max_digits && vi + n < value.size() &&
               value[vi + n] >= '0' && value[vi + n] <= '9') {
            out = out * 10 + (value[vi + n] - '0');
            ++n;
        }
        if (n < min_digits) return std::nullopt;
        vi += n;
        return out;
    };
    for (size_t fi = 0; fi < format.size(); ++fi) {
        if (format[fi] == '%' && fi + 1 < format.size()) {
            char spec = format[++fi];
            std::optional<int> v;
            switch (spec) {
            case 'Y': v = read_digits(4, 4); if (v) tp.year = *v; break;
            case 'm': v = read_digits(2, 1); if (v) tp.month = *v; break;
            case 'd': v = read_digits(2, 1); if (v) tp.day = *v; break;
            case 'H': v = read_digits(2, 1); if (v) tp.hour = *v; break;
            case 'M': v = read_digits(2, 1); if (v) tp.minute = *v; break;
            default: return std::nullopt;
            }
            if (!v) return std::nullopt;
        } else {
            if (vi >= value.size() || value[vi] != format[fi]) return std::nullopt;
            ++vi;
        }
    }
    if (vi != value.size()) return std::nullopt;
    if (tp.hour && !tp.minute) tp.minute = 0;
    if (!is_valid_time_point(tp)) return std::nullopt;
    return tp;
}

ParseOutcome parse_record(const LabelDictionary& dict, const RawRecord& rec)
{
    if (rec.source.empty()) throw Error("raw record without a source");
    if (rec.fields.empty())
        throw Error("empty raw record (source '" + rec.source + "')");

    ParseOutcome out;
    TraceObject& obj = out.object;
    obj.id = rec.id;
    obj.source = rec.source;

    const std::vector<std::string>* formats = nullptr;
    auto fit = dict.date_formats.find(casefold(rec.source));
    if (fit != dict.date_formats.end()) formats = &fit->second;

    for (const auto& [label, values] : rec.fields) {
        auto tag = classify_label(dict, rec.source, label);
        if (!tag) {
            out.unmapped_labels.push_back(label);
            continue;
        }
        for (const auto& value : values) {
            switch (*tag) {
            case Dimension::What: obj.what.push_back(value); break;
            case Dimension::Why: obj.why.push_back(value); break;
            case Dimension::How: obj.how.push_back(value); break;
            case Dimension::Where: obj.where.push_back({value, "", {}, {}}); break;
            case Dimension::Who: {
                PersonRef ref = parse_person_text(value);
                if (ref.raw_name.empty() && ref.raw_emails.empty()) {
                    out.warnings.push_back("record '" + obj.id +
                                           "': empty who value under '" + label +
                                           "' dropped");
                    break;
                }
                ref.role = casefold(label);
                obj.who.push_back(std::move(ref));
                break;
            }
            case Dimension::When: {
                std::optional<TimePoint> tp = parse_time_point(value);
                if (!tp && formats) {
                    for (const auto& fmt : *formats) {
                        tp = parse_time_with_format(value, fmt);
                        if (tp) break;
                    }
                }
                if (tp) {
                    obj.when.push_back(*tp);
                } else {
                    out.warnings.push_back("record '" + obj.id +
                                           "': malformed date '" + value +
                                           "' under '" + label + "' dropped");
                }
                break;
            }
            }
        }
    }
    if (obj.how.empty()) obj.how.push_back(rec.source);
    return out;
}

namespace {

RawRecord raw_record_from_json(const ordered_json& j, const std::string& ctx)
{
    RawRecord rec;
    if (!j.contains("source") || !j.at("source").is_string())
        throw Error(ctx + ": raw record missing string field 'source'");
    rec.source = j.at("source").get<std::string>();
    if (j.contains("id")) rec.id = j.at("id").get<std::string>();
    const auto& fields = j.at("fields");
    if (!fields.is_array()) throw Error(ctx + ": 'fields' must be an array");
    for (const auto& f : fields) {
        if (!f.is_array() || f.size() != 2 || !f.at(0).is_string())
            throw Error(ctx + ": each field must be a [label, value] pair");
        std::vector<std::string> values;
        const auto& v = f.at(1);
        if (v.is_string()) {
            values.push_back(v.get<std::string>());
        } else if (v.is_array()) {
            for (const auto& item : v) {
                if (!item.is_string())
                    throw Error(ctx + ": list-valued fields must hold strings");
                values.push_back(item.get<std::string>());
            }
        } else {
            throw Error(ctx + ": field values must be strings or string lists");
        }
        rec.fields.emplace_back(f.at(0).get<std::string>(), std::move(values));
    }
    return rec;
}

}  // namespace

LoadResult load_corpus(const std::string& path, const LabelDictionary* dict)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path);

    LoadResult result;
    std::unordered_set<std::string> seen;
    std::unordered_map<std::string, size_t> per_source_seq;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path + ":" + std::to_string(line_no);
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ctx + ": malformed JSON line (" + e.what() + ")");
        }
        TraceObject obj;
        if (j.is_object() && j.contains("fields")) {
            if (!dict)
                throw Error(ctx + ": raw record but no dictionary supplied");
            RawRecord rec = raw_record_from_json(j, ctx);
            if (rec.id.empty())
                rec.id = rec.source + "-" +
                         std::to_string(++per_source_seq[rec.source]);
            ParseOutcome outcome = parse_record(*dict, rec);
            for (auto& w : outcome.warnings)
                result.warnings.push_back(std::move(w));
            for (auto& u : outcome.unmapped_labels)
                result.unmapped_labels.push_back(rec.source + ":" + u);
            obj = std::move(outcome.object);
        } else {
            obj = trace_object_from_json(j, ctx);
        }
        if (!seen.insert(obj.id).second)
            throw Error(ctx + ": duplicate object id '" + obj.id + "'");
        result.corpus.push_back(std::move(obj));
    }
    return result;
}

}  // namespace w5h
