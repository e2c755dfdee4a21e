#include "flucast/series.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace flucast
{

namespace
{

// Day of week for Jan 1 (0 = Monday) via days-from-civil.
int jan1_weekday(int year)
{
    const int y          = year - 1; // March-based year containing Jan 1
    const int era        = (y >= 0 ? y : y - 399) / 400;
    const int yoe        = y - era * 400;
    const int doy        = 306; // Jan 1 is day 306 of the March-based year
    const int doe        = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const long long days = static_cast<long long>(era) * 146097 + doe - 719468;
    // 1970-01-01 was a Thursday (index 3)
    return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

bool is_leap(int year)
{
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

template <class T>
bool parse_number(const std::string& s, T& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec]  = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        out.push_back(trim(std::string_view(line).substr(pos, next - pos)));
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

bool in_window(IsoWeek w, int first_year)
{
    return (w.year == first_year && w.week >= season_first_week) ||
           (w.year == first_year + 1 && w.week <= season_last_week);
}

} // namespace

int iso_weeks_in_year(int year)
{
    const int wd = jan1_weekday(year);
    return (wd == 3 || (wd == 2 && is_leap(year))) ? 53 : 52;
}

IsoWeek next_week(IsoWeek w)
{
    if (w.week >= iso_weeks_in_year(w.year)) {
        return {w.year + 1, 1};
    }
    return {w.year, w.week + 1};
}

IsoWeek parse_iso_week(const std::string& text)
{
    const auto dash = text.find('-');
    if (dash == std::string::npos) {
        throw std::invalid_argument("expected an ISO week like 2015-W08, got '" + text + "'");
    }
    std::string week_part = text.substr(dash + 1);
    if (!week_part.empty() && (week_part[0] == 'W' || week_part[0] == 'w')) {
        week_part.erase(0, 1);
    }
    IsoWeek w;
    if (!parse_number(text.substr(0, dash), w.year) || !parse_number(week_part, w.week) || w.week < 1 ||
        w.week > iso_weeks_in_year(w.year)) {
        throw std::invalid_argument("expected an ISO week like 2015-W08, got '" + text + "'");
    }
    return w;
}

std::string format_iso_week(IsoWeek w)
{
    std::string week = std::to_string(w.week);
    if (week.size() < 2) {
        week.insert(0, "0");
    }
    return std::to_string(w.year) + "-W" + week;
}

std::vector<std::optional<std::int64_t>> SurveillanceSeries::observed() const
{
    std::vector<std::optional<std::int64_t>> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        out.push_back(rec.count);
    }
    return out;
}

std::optional<std::size_t> SurveillanceSeries::index_of(IsoWeek w) const
{
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].week == w) {
            return k;
        }
    }
    return std::nullopt;
}

SurveillanceSeries SurveillanceSeries::truncated_after(std::size_t last_index) const
{
    SurveillanceSeries out = *this;
    for (std::size_t k = last_index + 1; k < out.records.size(); ++k) {
        out.records[k].count.reset();
    }
    return out;
}

std::vector<WeekRecord> consecutive_weeks(IsoWeek first, std::size_t n_weeks)
{
    std::vector<WeekRecord> out;
    out.reserve(n_weeks);
    IsoWeek w = first;
    for (std::size_t k = 0; k < n_weeks; ++k) {
        out.push_back({w, std::nullopt});
        w = next_week(w);
    }
    return out;
}

SurveillanceSeries parse_series(std::istream& in, const std::string& label)
{
    SurveillanceSeries series;
    series.label = label;
    std::string line;
    int line_no = 0;
    bool header = false;
    int first_year = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        if (!header) {
            if (content.rfind("\xEF\xBB\xBF", 0) == 0 ? content.substr(3) != "iso_year,iso_week,count"
                                                      : content != "iso_year,iso_week,count") {
                throw DataError("expected header 'iso_year,iso_week,count'", line_no);
            }
            header = true;
            continue;
        }
        const auto fields = split(content, ',');
        if (fields.size() != 3) {
            throw DataError("expected 3 fields, found " + std::to_string(fields.size()), line_no);
        }
        IsoWeek w;
        if (!parse_number(fields[0], w.year) || !parse_number(fields[1], w.week) || w.week < 1 ||
            w.week > iso_weeks_in_year(w.year)) {
            throw DataError("invalid ISO year/week '" + fields[0] + "," + fields[1] + "'", line_no);
        }
        std::optional<std::int64_t> count;
        if (!fields[2].empty()) {
            std::int64_t c = 0;
            if (!parse_number(fields[2], c)) {
                throw DataError("count '" + fields[2] + "' is not an integer", line_no);
            }
            if (c < 0) {
                throw DataError("negative count " + fields[2], line_no);
            }
            count = c;
        }

        if (series.records.empty()) {
            first_year = w.week >= season_first_week ? w.year : w.year - 1;
        }
        if (!in_window(w, first_year)) {
            throw DataError("week " + format_iso_week(w) + " lies outside the surveillance window", line_no);
        }
        if (!series.records.empty()) {
            const IsoWeek last = series.records.back().week;
            if (w <= last) {
                throw DataError("week " + format_iso_week(w) + " is duplicated or out of order", line_no);
            }
            for (IsoWeek gap = next_week(last); gap < w; gap = next_week(gap)) {
                series.records.push_back({gap, std::nullopt});
            }
        }
        series.records.push_back({w, count});
    }
    if (!header) {
        throw DataError("empty surveillance file", 0);
    }
    return series;
}

SurveillanceSeries load_series(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open data file '" + path + "'");
    }
    return parse_series(in, std::filesystem::path(path).stem().string());
}

void write_series(std::ostream& out, const SurveillanceSeries& series)
{
    out << "iso_year,iso_week,count\n";
    for (const auto& rec : series.records) {
        out << rec.week.year << ',' << rec.week.week << ',';
        if (rec.count) {
            out << *rec.count;
        }
        out << '\n';
    }
}

} // namespace flucast
