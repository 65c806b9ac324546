#pragma once
// Canonical corpus format: JSON Lines, one object per line, UTF-8.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "w5h/model.hpp"

namespace w5h {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const TraceObject& obj);
ordered_json to_json(const Query& q);

// Throws Error on structural problems; `context` prefixes the message
// (typically "file:line").
TraceObject trace_object_from_json(const ordered_json& j,
                                   const std::string& context = "");
Query query_from_json(const ordered_json& j, const std::string& context = "");

std::string to_jsonl_line(const TraceObject& obj);

void write_corpus(std::ostream& out, const std::vector<TraceObject>& corpus);
void write_corpus_file(const std::string& path,
                       const std::vector<TraceObject>& corpus);

// Reads canonical JSONL. Duplicate ids and malformed lines are errors; the
// error message names the offending id or line number.
std::vector<TraceObject> read_corpus(std::istream& in,
                                     const std::string& name = "<stream>");
std::vector<TraceObject> read_corpus_file(const std::string& path);

Query read_query_file(const std::string& path);

// Shared file helpers.
std::string slurp_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace w5h
