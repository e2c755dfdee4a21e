#pragma once

#include <istream>
#include <string>
#include <vector>

namespace flucast
{

/// Closed day interval [start_day, end_day] counted from the first day of the season.
/// Day d covers continuous time [d, d+1), so the interval is active on [start_day, end_day + 1).
struct DayInterval {
    int start_day = 0;
    int end_day   = 0;

    bool operator==(const DayInterval&) const = default;
};

/**
 * School closure periods. Intervals are kept sorted and pairwise disjoint;
 * construction rejects anything else.
 */
class HolidayCalendar
{
public:
    HolidayCalendar() = default;
    explicit HolidayCalendar(std::vector<DayInterval> intervals);

    bool contains(double t) const;
    bool empty() const { return m_intervals.empty(); }

    const std::vector<DayInterval>& intervals() const { return m_intervals; }

    /// Days at which the transmission rate may switch (interval starts and ends + 1).
    std::vector<int> breakpoints() const;

    /// Checks that every interval lies inside [0, season_days).
    void check_within(int season_days) const;

    bool operator==(const HolidayCalendar&) const = default;

private:
    std::vector<DayInterval> m_intervals;
};

/// Parses `start_day,end_day` lines; `#` starts a comment. Throws std::runtime_error naming the line.
HolidayCalendar parse_calendar(std::istream& in);
HolidayCalendar load_calendar(const std::string& path);

} // namespace flucast
