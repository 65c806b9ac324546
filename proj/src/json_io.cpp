#include "w5h/json_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace w5h {

static ordered_json person_to_json(const PersonRef& p)
{
    ordered_json j;
    j["name"] = p.raw_name;
    j["emails"] = p.raw_emails;
    j["role"] = p.role;
    j["weight"] = p.role_weight;
    if (!p.entity_id.empty()) j["entity_id"] = p.entity_id;
    return j;
}

static ordered_json location_to_json(const LocationRef& l)
{
    ordered_json j;
    j["text"] = l.raw_text;
    if (!l.canonical_id.empty()) j["canonical_id"] = l.canonical_id;
    if (l.lat) j["lat"] = *l.lat;
    if (l.lon) j["lon"] = *l.lon;
    return j;
}

template <typename T>
static ordered_json dims_to_json(const T& o)
{
    ordered_json j;
    j["what"] = o.what;
    ordered_json who = ordered_json::array();
    for (const auto& p : o.who) who.push_back(person_to_json(p));
    j["who"] = std::move(who);
    ordered_json when = ordered_json::array();
    for (const auto& t : o.when) when.push_back(t.to_string());
    j["when"] = std::move(when);
    ordered_json where = ordered_json::array();
    for (const auto& l : o.where) where.push_back(location_to_json(l));
    j["where"] = std::move(where);
    j["why"] = o.why;
    j["how"] = o.how;
    return j;
}

ordered_json to_json(const TraceObject& obj)
{
    ordered_json j;
    j["id"] = obj.id;
    j["source"] = obj.source;
    ordered_json dims = dims_to_json(obj);
    for (auto& [k, v] : dims.items()) j[k] = std::move(v);
    return j;
}

ordered_json to_json(const Query& q)
{
    return dims_to_json(q);
}

static std::vector<std::string> string_list(const ordered_json& j,
                                            const std::string& ctx,
                                            const char* field)
{
    std::vector<std::string> out;
    if (!j.is_array())
        throw Error(ctx + ": field '" + field + "' must be an array");
    for (const auto& v : j) {
        if (!v.is_string())
            throw Error(ctx + ": field '" + field + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

static PersonRef person_from_json(const ordered_json& j, const std::string& ctx)
{
    PersonRef p;
    if (j.is_string()) {
        p.raw_name = j.get<std::string>();
    } else if (j.is_object()) {
        if (j.contains("name")) p.raw_name = j.at("name").get<std::string>();
        if (j.contains("emails"))
            p.raw_emails = string_list(j.at("emails"), ctx, "emails");
        if (j.contains("role")) p.role = j.at("role").get<std::string>();
        if (j.contains("weight")) p.role_weight = j.at("weight").get<double>();
        if (j.contains("entity_id"))
            p.entity_id = j.at("entity_id").get<std::string>();
    } else {
        throw Error(ctx + ": who entries must be objects or strings");
    }
    if (p.raw_name.empty() && p.raw_emails.empty())
        throw Error(ctx + ": who entry needs a name or an email");
    if (p.role_weight < 0)
        throw Error(ctx + ": who entry weight must be non-negative");
    return p;
}

static LocationRef location_from_json(const ordered_json& j,
                                      const std::string& ctx)
{
    LocationRef l;
    if (j.is_string()) {
        l.raw_text = j.get<std::string>();
    } else if (j.is_object()) {
        if (j.contains("text")) l.raw_text = j.at("text").get<std::string>();
        if (j.contains("canonical_id"))
            l.canonical_id = j.at("canonical_id").get<std::string>();
        if (j.contains("lat")) l.lat = j.at("lat").get<double>();
        if (j.contains("lon")) l.lon = j.at("lon").get<double>();
    } else {
        throw Error(ctx + ": where entries must be objects or strings");
    }
    if (l.raw_text.empty()) throw Error(ctx + ": where entry needs text");
    if (l.lat && (*l.lat < -90.0 || *l.lat > 90.0))
        throw Error(ctx + ": latitude out of range");
    if (l.lon && (*l.lon < -180.0 || *l.lon > 180.0))
        throw Error(ctx + ": longitude out of range");
    return l;
}

static TimePoint when_from_json(const ordered_json& j, const std::string& ctx)
{
    if (!j.is_string())
        throw Error(ctx + ": when entries must be strings");
    auto tp = parse_time_point(j.get<std::string>());
    if (!tp)
        throw Error(ctx + ": malformed time point '" + j.get<std::string>() +
                    "'");
    return *tp;
}

template <typename T>
static void dims_from_json(T& o, const ordered_json& j, const std::string& ctx)
{
    if (j.contains("what")) o.what = string_list(j.at("what"), ctx, "what");
    if (j.contains("why")) o.why = string_list(j.at("why"), ctx, "why");
    if (j.contains("how")) o.how = string_list(j.at("how"), ctx, "how");
    if (j.contains("who")) {
        for (const auto& p : j.at("who")) o.who.push_back(person_from_json(p, ctx));
    }
    if (j.contains("when")) {
        for (const auto& t : j.at("when")) o.when.push_back(when_from_json(t, ctx));
    }
    if (j.contains("where")) {
        for (const auto& l : j.at("where"))
            o.where.push_back(location_from_json(l, ctx));
    }
}

TraceObject trace_object_from_json(const ordered_json& j,
                                   const std::string& context)
{
    const std::string ctx = context.empty() ? "object" : context;
    if (!j.is_object()) throw Error(ctx + ": expected a JSON object");
    TraceObject obj;
    if (!j.contains("id") || !j.at("id").is_string())
        throw Error(ctx + ": missing string field 'id'");
    obj.id = j.at("id").get<std::string>();
    if (obj.id.empty()) throw Error(ctx + ": empty id");
    if (!j.contains("source") || !j.at("source").is_string())
        throw Error(ctx + ": missing string field 'source'");
    obj.source = j.at("source").get<std::string>();
    if (obj.source.empty()) throw Error(ctx + ": empty source");
    dims_from_json(obj, j, ctx);
    return obj;
}

Query query_from_json(const ordered_json& j, const std::string& context)
{
    const std::string ctx = context.empty() ? "query" : context;
    if (!j.is_object()) throw Error(ctx + ": expected a JSON object");
    Query q;
    dims_from_json(q, j, ctx);
    if (q.empty()) throw Error(ctx + ": query has no dimension values");
    return q;
}

std::string to_jsonl_line(const TraceObject& obj)
{
    return to_json(obj).dump();
}

void write_corpus(std::ostream& out, const std::vector<TraceObject>& corpus)
{
    for (const auto& obj : corpus) out << to_jsonl_line(obj) << '\n';
}

void write_corpus_file(const std::string& path,
                       const std::vector<TraceObject>& corpus)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    write_corpus(out, corpus);
}

std::vector<TraceObject> read_corpus(std::istream& in, const std::string& name)
{
    std::vector<TraceObject> corpus;
    std::string line;
    size_t line_no = 0;
    std::unordered_map<std::string, size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = name + ":" + std::to_string(line_no);
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ctx + ": malformed JSON line (" + e.what() + ")");
        }
        TraceObject obj = trace_object_from_json(j, ctx);
        if (!seen.emplace(obj.id, line_no).second)
            throw Error(ctx + ": duplicate object id '" + obj.id + "'");
        corpus.push_back(std::move(obj));
    }
    return corpus;
}

std::vector<TraceObject> read_corpus_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path);
    return read_corpus(in, path);
}

Query read_query_file(const std::string& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(slurp_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": malformed JSON (" + std::string(e.what()) + ")");
    }
    return query_from_json(j, path);
}

std::string slurp_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

}  // namespace w5h
