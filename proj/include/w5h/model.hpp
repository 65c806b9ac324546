#pragma once
// Core value types: the six-dimension trace object and query shapes.
// Everything here is immutable after construction and safe to share
// across threads.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace w5h {

// Data or usage error surfaced to callers; carries a human-readable message.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Dimension { What, Who, When, Where, Why, How };

inline constexpr std::array<Dimension, 6> kAllDimensions = {
    Dimension::What, Dimension::Who,   Dimension::When,
    Dimension::Where, Dimension::Why,  Dimension::How};

const char* dimension_name(Dimension d);
std::optional<Dimension> dimension_from_name(const std::string& name);

// A possibly partial calendar time. Granularity is implied by which fields
// are set. Valid shapes are year-rooted prefixes (Y, Y-M, Y-M-D, Y-M-D hh:mm)
// or a bare month.
struct TimePoint {
    std::optional<int> year;
    std::optional<int> month;
    std::optional<int> day;
    std::optional<int> hour;
    std::optional<int> minute;

    bool operator==(const TimePoint&) const = default;

    // Canonical text: YYYY[-MM[-DD[THH:MM]]] or --MM.
    std::string to_string() const;
};

// Throws Error when the shape or calendar is invalid.
void validate_time_point(const TimePoint& tp);
bool is_valid_time_point(const TimePoint& tp);

// Parses the canonical forms accepted by the corpus format. Trailing
// seconds after THH:MM are accepted and dropped.
std::optional<TimePoint> parse_time_point(const std::string& text);

// True iff every field present in the query time equals the object's.
bool time_matches(const TimePoint& query_dt, const TimePoint& obj_dt);

// One person mention inside an object's who dimension.
struct PersonRef {
    std::string raw_name;
    std::vector<std::string> raw_emails;
    std::string entity_id;  // empty until entity resolution ran
    std::string role;       // e.g. from, to, tagged; empty when unknown
    double role_weight = 1.0;

    bool operator==(const PersonRef&) const = default;

    // Name when present, first email otherwise.
    std::string display() const;
};

struct LocationRef {
    std::string raw_text;
    std::string canonical_id;  // empty until entity resolution ran
    std::optional<double> lat;
    std::optional<double> lon;

    bool operator==(const LocationRef&) const = default;
};

// A single digital trace. why is kept for format stability but carries no
// matching or scoring semantics and stays empty.
struct TraceObject {
    std::string id;
    std::string source;
    std::vector<std::string> what;
    std::vector<PersonRef> who;
    std::vector<TimePoint> when;
    std::vector<LocationRef> where;
    std::vector<std::string> why;
    std::vector<std::string> how;

    bool operator==(const TraceObject&) const = default;
};

// Queries have the object shape minus the id; they are transient values and
// are never indexed.
struct Query {
    std::vector<std::string> what;
    std::vector<PersonRef> who;
    std::vector<TimePoint> when;
    std::vector<LocationRef> where;
    std::vector<std::string> why;
    std::vector<std::string> how;

    bool operator==(const Query&) const = default;

    bool empty() const
    {
        return what.empty() && who.empty() && when.empty() && where.empty() &&
               why.empty() && how.empty();
    }
};

// One display string per stored item; the six tags together cover every
// item exactly once.
std::vector<std::string> get_dimension(const TraceObject& obj, Dimension tag);
std::vector<std::string> get_dimension(const Query& q, Dimension tag);

}  // namespace w5h
