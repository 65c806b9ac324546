#include "w5h/model.hpp"

#include <charconv>
#include <cstdio>

namespace w5h {

const char* dimension_name(Dimension d)
{
    switch (d) {
    case Dimension::What: return "what";
    case Dimension::Who: return "who";
    case Dimension::When: return "when";
    case Dimension::Where: return "where";
    case Dimension::Why: return "why";
    case Dimension::How: return "how";
    }
    return "?";
}

std::optional<Dimension> dimension_from_name(const std::string& name)
{
    for (Dimension d : kAllDimensions) {
        if (name == dimension_name(d)) return d;
    }
    return std::nullopt;
}

static bool leap_year(int y)
{
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

static int days_in_month(int y, int m)
{
    static const int base[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap_year(y)) return 29;
    return base[m - 1];
}

void validate_time_point(const TimePoint& tp)
{
    if (!tp.year && !tp.month) throw Error("time point has no year or month");
    if (tp.day && !tp.month) throw Error("time point has a day but no month");
    if (tp.day && !tp.year) throw Error("time point has a day but no year");
    if (tp.hour && !tp.day) throw Error("time point has an hour but no day");
    if (tp.hour.has_value() != tp.minute.has_value())
        throw Error("time point hour and minute must come together");
    if (!tp.year && (tp.day || tp.hour))
        throw Error("bare-month time point cannot carry finer fields");
    if (tp.year && (*tp.year < 1 || *tp.year > 9999))
        throw Error("time point year out of range");
    if (tp.month && (*tp.month < 1 || *tp.month > 12))
        throw Error("time point month out of range");
    if (tp.day) {
        int y = *tp.year;
        if (*tp.day < 1 || *tp.day > days_in_month(y, *tp.month))
            throw Error("time point day not calendar-valid");
    }
    if (tp.hour && (*tp.hour < 0 || *tp.hour > 23))
        throw Error("time point hour out of range");
    if (tp.minute && (*tp.minute < 0 || *tp.minute > 59))
        throw Error("time point minute out of range");
}

bool is_valid_time_point(const TimePoint& tp)
{
    try {
        validate_time_point(tp);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::string TimePoint::to_string() const
{
    char buf[24];
    if (!year) {
        std::snprintf(buf, sizeof(buf), "--%02d", month.value_or(0));
        return buf;
    }
    if (!month) {
        std::snprintf(buf, sizeof(buf), "%04d", *year);
        return buf;
    }
    if (!day) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d", *year, *month);
        return buf;
    }
    if (!hour) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", *year, *month, *day);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", *year, *month,
                  *day, *hour, minute.value_or(0));
    return buf;
}

static bool parse_digits(const std::string& s, size_t pos, size_t n, int& out)
{
    if (pos + n > s.size()) return false;
    int value = 0;
    for (size_t i = pos; i < pos + n; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

std::optional<TimePoint> parse_time_point(const std::string& text)
{
    TimePoint tp;
    int v = 0;
    if (text.size() == 4 && parse_digits(text, 0, 4, v)) {
        tp.year = v;
    } else if (text.size() == 4 && text[0] == '-' && text[1] == '-') {
        if (!parse_digits(text, 2, 2, v)) return std::nullopt;
        tp.month = v;
    } else if (text.size() >= 7 && parse_digits(text, 0, 4, v) && text[4] == '-') {
        tp.year = v;
        if (!parse_digits(text, 5, 2, v)) return std::nullopt;
        tp.month = v;
        if (text.size() == 7) {
            // Y-M only.
        } else if (text.size() >= 10 && text[7] == '-') {
            if (!parse_digits(text, 8, 2, v)) return std::nullopt;
            tp.day = v;
            if (text.size() > 10) {
                if (text[10] != 'T' || text.size() < 16) return std::nullopt;
                if (!parse_digits(text, 11, 2, v) || text[13] != ':')
                    return std::nullopt;
                tp.hour = v;
                if (!parse_digits(text, 14, 2, v)) return std::nullopt;
                tp.minute = v;
                // Trailing seconds are accepted and dropped.
                if (text.size() > 16) {
                    int sec = 0;
                    if (text[16] != ':' || !parse_digits(text, 17, 2, sec) ||
                        text.size() != 19)
                        return std::nullopt;
                }
            }
        } else {
            return std::nullopt;
        }
    } else {
        return std::nullopt;
    }
    if (!is_valid_time_point(tp)) return std::nullopt;
    return tp;
}

bool time_matches(const TimePoint& query_dt, const TimePoint& obj_dt)
{
    auto field_ok = [](const std::optional<int>& q, const std::optional<int>& o) {
        return !q || (o && *q == *o);
    };
    return field_ok(query_dt.year, obj_dt.year) &&
           field_ok(query_dt.month, obj_dt.month) &&
           field_ok(query_dt.day, obj_dt.day) &&
           field_ok(query_dt.hour, obj_dt.hour) &&
           field_ok(query_dt.minute, obj_dt.minute);
}

std::string PersonRef::display() const
{
    if (!raw_name.empty()) return raw_name;
    if (!raw_emails.empty()) return raw_emails.front();
    return "";
}

template <typename T>
static std::vector<std::string> dimension_text(const T& obj, Dimension tag)
{
    std::vector<std::string> out;
    switch (tag) {
    case Dimension::What: return obj.what;
    case Dimension::Why: return obj.why;
    case Dimension::How: return obj.how;
    case Dimension::Who:
        out.reserve(obj.who.size());
        for (const auto& p : obj.who) out.push_back(p.display());
        return out;
    case Dimension::When:
        out.reserve(obj.when.size());
        for (const auto& t : obj.when) out.push_back(t.to_string());
        return out;
    case Dimension::Where:
        out.reserve(obj.where.size());
        for (const auto& l : obj.where) out.push_back(l.raw_text);
        return out;
    }
    return out;
}

std::vector<std::string> get_dimension(const TraceObject& obj, Dimension tag)
{
    return dimension_text(obj, tag);
}

std::vector<std::string> get_dimension(const Query& q, Dimension tag)
{
    return dimension_text(q, tag);
}

}  // namespace w5h
