#include "doctest.h"

#include "flucast/series.hpp"

#include <sstream>

using namespace flucast;

namespace
{

std::string season_csv(int n_weeks, int skip = -1)
{
    std::ostringstream os;
    os << "iso_year,iso_week,count\n";
    IsoWeek w{2014, 40};
    for (int k = 0; k < n_weeks; ++k, w = next_week(w)) {
        if (k != skip) {
            os << w.year << "," << w.week << "," << 3 * k << "\n";
        }
    }
    return os.str();
}

int error_line(const std::string& text)
{
    std::istringstream in(text);
    try {
        parse_series(in);
    }
    catch (const DataError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_SUITE("series")
{

TEST_CASE("iso week arithmetic")
{
    CHECK(iso_weeks_in_year(2015) == 53);
    CHECK(iso_weeks_in_year(2014) == 52);
    CHECK(iso_weeks_in_year(2020) == 53);
    CHECK(next_week({2014, 52}) == IsoWeek{2015, 1});
    CHECK(next_week({2015, 52}) == IsoWeek{2015, 53});
    CHECK(next_week({2015, 53}) == IsoWeek{2016, 1});
    CHECK(parse_iso_week("2015-W08") == IsoWeek{2015, 8});
    CHECK(parse_iso_week("2015-8") == IsoWeek{2015, 8});
    CHECK(format_iso_week({2015, 8}) == "2015-W08");
    CHECK_THROWS_AS(parse_iso_week("2014-W53"), std::invalid_argument);
    CHECK_THROWS_AS(parse_iso_week("week 8"), std::invalid_argument);
    CHECK(IsoWeek{2014, 52} < IsoWeek{2015, 1});
}

TEST_CASE("well-formed 33-week season")
{
    std::istringstream in(season_csv(33));
    const auto s = parse_series(in, "demo");
    REQUIRE(s.size() == 33);
    CHECK(s.records.front().week == IsoWeek{2014, 40});
    CHECK(s.records.back().week == IsoWeek{2015, 20});
    CHECK(s.records[5].count == 15);
    CHECK(s.index_of({2015, 3}) == 15u);
    CHECK_FALSE(s.index_of({2016, 3}).has_value());
}

TEST_CASE("absent and empty weeks become missing")
{
    std::istringstream in(season_csv(33, 10));
    const auto s = parse_series(in);
    REQUIRE(s.size() == 33);
    CHECK_FALSE(s.records[10].count.has_value());
    CHECK(s.records[11].count == 33);

    std::istringstream blank("iso_year,iso_week,count\n2014,40,5\n2014,41,\n2014,42,7\n");
    const auto b = parse_series(blank);
    REQUIRE(b.size() == 3);
    CHECK_FALSE(b.records[1].count.has_value());
    CHECK(b.observed() == std::vector<std::optional<std::int64_t>>{5, std::nullopt, 7});
}

TEST_CASE("malformed files report the offending line")
{
    const std::string head = "iso_year,iso_week,count\n";
    CHECK(error_line(head + "2014,40,5\n2014,41,-2\n") == 3);
    CHECK(error_line(head + "2014,40,5\n2014,40,6\n") == 3);
    CHECK(error_line(head + "2014,41,5\n2014,40,6\n") == 3);
    CHECK(error_line(head + "2014,40,2.5\n") == 2);
    CHECK(error_line(head + "2014,40\n") == 2);
    CHECK(error_line(head + "2015,30,1\n") == 2);
    CHECK(error_line("year,week,n\n2014,40,1\n") == 1);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_series(empty), DataError);
}

TEST_CASE("byte order mark and CRLF are tolerated")
{
    std::istringstream in("\xEF\xBB\xBFiso_year,iso_week,count\r\n2014,40,5\r\n2014,41,6\r\n");
    const auto s = parse_series(in);
    REQUIRE(s.size() == 2);
    CHECK(s.records[1].count == 6);
}

TEST_CASE("write and read back")
{
    std::istringstream in(season_csv(20, 4));
    const auto s = parse_series(in);
    std::ostringstream out;
    write_series(out, s);
    std::istringstream again(out.str());
    CHECK(parse_series(again).records == s.records);
}

TEST_CASE("truncation marks later weeks missing")
{
    std::istringstream in(season_csv(10));
    const auto s = parse_series(in);
    const auto t = s.truncated_after(3);
    REQUIRE(t.size() == 10);
    CHECK(t.records[3].count == 9);
    for (std::size_t k = 4; k < 10; ++k) {
        CHECK_FALSE(t.records[k].count.has_value());
    }
}

} // TEST_SUITE
