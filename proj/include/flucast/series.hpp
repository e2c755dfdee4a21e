#pragma once

#include "flucast/holidays.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace flucast
{

struct IsoWeek {
    int year = 0;
    int week = 0;

    auto operator<=>(const IsoWeek&) const = default;
};

int iso_weeks_in_year(int year);
IsoWeek next_week(IsoWeek w);

/// Parses `2015-W08` (also accepts `2015-8`). Throws std::invalid_argument.
IsoWeek parse_iso_week(const std::string& text);
std::string format_iso_week(IsoWeek w);

/// Surveillance window: ISO week 40 of the first year through week 20 of the next.
inline constexpr int season_first_week = 40;
inline constexpr int season_last_week  = 20;

struct WeekRecord {
    IsoWeek week;
    std::optional<std::int64_t> count;

    bool operator==(const WeekRecord&) const = default;
};

/// Raised for malformed surveillance files; carries the offending line number.
class DataError : public std::runtime_error
{
public:
    DataError(const std::string& message, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message)
        , m_line(line)
    {
    }
    int line() const { return m_line; }

private:
    int m_line;
};

/// Weekly admission counts for one season. Week 0 starts on day 0 of the transmission model.
struct SurveillanceSeries {
    std::string label;
    std::vector<WeekRecord> records;
    HolidayCalendar calendar;

    std::size_t size() const { return records.size(); }
    std::vector<std::optional<std::int64_t>> observed() const;
    std::optional<std::size_t> index_of(IsoWeek w) const;

    /// Copy with every week after `last_index` marked missing.
    SurveillanceSeries truncated_after(std::size_t last_index) const;

    bool operator==(const SurveillanceSeries&) const = default;
};

/// Consecutive weeks starting at `first`, all missing.
std::vector<WeekRecord> consecutive_weeks(IsoWeek first, std::size_t n_weeks);

/// Reads `iso_year,iso_week,count`; absent weeks become missing, as do empty count fields.
SurveillanceSeries parse_series(std::istream& in, const std::string& label = {});
SurveillanceSeries load_series(const std::string& path);
void write_series(std::ostream& out, const SurveillanceSeries& series);

} // namespace flucast
