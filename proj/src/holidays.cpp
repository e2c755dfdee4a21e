#include "flucast/holidays.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flucast
{

namespace
{

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_int(const std::string& s, int& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec]  = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

HolidayCalendar::HolidayCalendar(std::vector<DayInterval> intervals)
    : m_intervals(std::move(intervals))
{
    for (std::size_t k = 0; k < m_intervals.size(); ++k) {
        const auto& iv = m_intervals[k];
        if (iv.start_day < 0 || iv.end_day < iv.start_day) {
            throw std::invalid_argument("holiday interval [" + std::to_string(iv.start_day) + ", " +
                                        std::to_string(iv.end_day) + "] is malformed");
        }
        if (k > 0 && iv.start_day <= m_intervals[k - 1].end_day) {
            throw std::invalid_argument("holiday intervals must be sorted and disjoint");
        }
    }
}

bool HolidayCalendar::contains(double t) const
{
    // intervals are few (4-6 per season), linear scan is fine
    for (const auto& iv : m_intervals) {
        if (t < iv.start_day) {
            return false;
        }
        if (t < iv.end_day + 1.0) {
            return true;
        }
    }
    return false;
}

std::vector<int> HolidayCalendar::breakpoints() const
{
    std::vector<int> out;
    out.reserve(2 * m_intervals.size());
    for (const auto& iv : m_intervals) {
        out.push_back(iv.start_day);
        out.push_back(iv.end_day + 1);
    }
    return out;
}

void HolidayCalendar::check_within(int season_days) const
{
    for (const auto& iv : m_intervals) {
        if (iv.end_day >= season_days) {
            throw std::invalid_argument("holiday interval ending on day " + std::to_string(iv.end_day) +
                                        " lies outside a season of " + std::to_string(season_days) + " days");
        }
    }
}

HolidayCalendar parse_calendar(std::istream& in)
{
    std::vector<DayInterval> intervals;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto comma = content.find(',');
        DayInterval iv;
        if (comma == std::string::npos || !parse_int(trim(content.substr(0, comma)), iv.start_day) ||
            !parse_int(trim(content.substr(comma + 1)), iv.end_day)) {
            throw std::runtime_error("calendar line " + std::to_string(line_no) + ": expected 'start_day,end_day'");
        }
        intervals.push_back(iv);
    }
    try {
        return HolidayCalendar(std::move(intervals));
    }
    catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("calendar: ") + e.what());
    }
}

HolidayCalendar load_calendar(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open calendar file '" + path + "'");
    }
    return parse_calendar(in);
}

} // namespace flucast
