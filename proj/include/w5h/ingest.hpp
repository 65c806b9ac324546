#pragma once
// Raw-record parsing into trace objects via a per-source label dictionary.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "w5h/model.hpp"

namespace w5h {

// Maps (source, field label) to a dimension, with a source-agnostic
// fallback. Lookups are case-insensitive on source and label. Each source
// may carry extra date formats under the reserved "_dates" key.
struct LabelDictionary {
    std::map<std::pair<std::string, std::string>, Dimension> by_source;
    std::map<std::string, Dimension> fallback;
    std::map<std::string, std::vector<std::string>> date_formats;

    static LabelDictionary load_file(const std::string& path);
    bool knows_source(const std::string& source) const;
};

// Source-specific mapping wins over fallback; unmapped is a value, not an
// error.
std::optional<Dimension> classify_label(const LabelDictionary& dict,
                                        const std::string& source,
                                        const std::string& label);

struct RawRecord {
    std::string source;
    std::string id;  // optional; parse_record mints one when empty
    std::vector<std::pair<std::string, std::vector<std::string>>> fields;
};

struct ParseOutcome {
    TraceObject object;
    std::vector<std::string> unmapped_labels;
    std::vector<std::string> warnings;
};

// Deterministic for identical input. Malformed date values are dropped with
// a warning; an empty record is an error.
ParseOutcome parse_record(const LabelDictionary& dict, const RawRecord& rec);

// "John Smith <js@x.com>" style splitting into name and email parts.
PersonRef parse_person_text(const std::string& text);

// Date format mini-language: %Y %m %d %H %M plus literals.
std::optional<TimePoint> parse_time_with_format(const std::string& value,
                                                const std::string& format);

struct LoadResult {
    std::vector<TraceObject> corpus;
    std::vector<std::string> warnings;
    std::vector<std::string> unmapped_labels;
};

// Canonical JSONL, or raw-record JSONL when a dictionary is supplied (lines
// holding a "fields" key are raw records). Duplicate ids are an error.
LoadResult load_corpus(const std::string& path,
                       const LabelDictionary* dict = nullptr);

}  // namespace w5h
