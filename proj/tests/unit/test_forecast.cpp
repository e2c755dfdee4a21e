#include "doctest.h"

#include "flucast/forecast.hpp"
#include "flucast/synth.hpp"

#include <cmath>

using namespace flucast;

namespace
{

std::vector<IsoWeek> labels(const SurveillanceSeries& s)
{
    std::vector<IsoWeek> out;
    for (const auto& r : s.records) {
        out.push_back(r.week);
    }
    return out;
}

SamplerSettings quick_settings()
{
    SamplerSettings s;
    s.n_iter               = 1200;
    s.burn_in              = 400;
    s.thin                 = 4;
    s.n_chains             = 2;
    s.seed                 = 9;
    s.init_candidates      = 10;
    s.optimize_evaluations = 300;
    s.threads              = 1;
    return s;
}

} // namespace

TEST_SUITE("forecast")
{

TEST_CASE("near-Poisson predictive collapses onto the mean curve")
{
    Scenario sc                = Scenario::seasonal();
    sc.truth[Param::p_icu]     = 0.01;
    sc.truth[Param::eta]       = 1.01;
    const auto season          = simulate_series(sc);
    const std::vector<ParamVector> draws(1001, sc.truth);
    const auto weeks           = labels(season.series);
    const auto summary         = posterior_predictive(draws, sc.model, weeks, weeks.size(), 4);
    REQUIRE(summary.weeks.size() == weeks.size());
    CHECK(summary.used_draws == 1001);
    int checked = 0;
    for (std::size_t w = 0; w < weeks.size(); ++w) {
        if (season.expected[w] >= 50.0) {
            CHECK(std::abs(summary.weeks[w].median() - season.expected[w]) <= 0.05 * season.expected[w]);
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("no infection means no admissions")
{
    auto theta                  = Scenario::seasonal().truth;
    theta[Param::i_tot0]        = 0.0;
    const std::vector<ParamVector> draws(50, theta);
    const auto weeks            = consecutive_weeks({2014, 40}, 12);
    std::vector<IsoWeek> w;
    for (const auto& r : weeks) {
        w.push_back(r.week);
    }
    const auto summary = posterior_predictive(draws, Scenario::seasonal().model, w, 6, 1);
    for (const auto& wq : summary.weeks) {
        for (double q : wq.q) {
            CHECK(q == 0.0);
        }
    }
    CHECK(summary.weeks[5].phase == Phase::fitted);
    CHECK(summary.weeks[6].phase == Phase::forecast);
}

TEST_CASE("quantiles are ordered, seeded and thread independent")
{
    const auto sc = Scenario::seasonal();
    Rng rng(31);
    std::vector<ParamVector> draws;
    for (int k = 0; k < 200; ++k) {
        auto theta = sample_prior(PriorSpec::informative(), rng);
        theta[Param::beta] = 0.6 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
        draws.push_back(theta);
    }
    std::vector<IsoWeek> weeks;
    for (const auto& r : consecutive_weeks({2014, 40}, 33)) {
        weeks.push_back(r.week);
    }
    const auto a = posterior_predictive(draws, sc.model, weeks, 20, 77, 1);
    for (const auto& wq : a.weeks) {
        for (std::size_t k = 1; k < wq.q.size(); ++k) {
            CHECK(wq.q[k - 1] <= wq.q[k]);
        }
    }
    CHECK(a == posterior_predictive(draws, sc.model, weeks, 20, 77, 3));
    CHECK_FALSE(a == posterior_predictive(draws, sc.model, weeks, 20, 78, 1));
    CHECK_THROWS_AS(posterior_predictive({}, sc.model, weeks, 20, 77), std::domain_error);
}

TEST_CASE("bands widen with horizon while incidence grows")
{
    Scenario sc                = Scenario::seasonal();
    sc.model.calendar          = {};
    sc.truth                   = make_params(0.9, 2000, 0.45, 3.0, 0.001, 1.0);
    Rng rng(5);
    std::normal_distribution<double> jitter(0.0, 0.01);
    std::vector<ParamVector> draws;
    for (int k = 0; k < 4000; ++k) {
        auto theta = sc.truth;
        theta[Param::beta] *= 1.0 + jitter(rng);
        draws.push_back(theta);
    }
    std::vector<IsoWeek> weeks;
    for (const auto& r : consecutive_weeks({2014, 40}, 6)) {
        weeks.push_back(r.week);
    }
    const auto inc = model_incidence(sc.truth, sc.model, weeks.size());
    for (std::size_t v = 1; v < inc.size(); ++v) {
        REQUIRE(inc[v] > inc[v - 1]);
    }
    const auto s = posterior_predictive(draws, sc.model, weeks, 1, 12);
    for (std::size_t w = 2; w < weeks.size(); ++w) {
        CHECK(s.weeks[w].width95() >= s.weeks[w - 1].width95());
    }
}

TEST_CASE("fitted bands cover data drawn from the same model")
{
    Scenario sc = Scenario::seasonal();
    const std::vector<ParamVector> draws(2000, sc.truth);
    std::size_t inside = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        sc.seed            = seed;
        const auto season  = simulate_series(sc);
        const auto weeks   = labels(season.series);
        const auto summary = posterior_predictive(draws, sc.model, weeks, weeks.size(), 100 + seed);
        for (std::size_t w = 0; w < weeks.size(); ++w) {
            const double x = static_cast<double>(*season.series.records[w].count);
            inside += (x >= summary.weeks[w].q[0] && x <= summary.weeks[w].q[4]) ? 1 : 0;
            ++total;
        }
    }
    const double rate = static_cast<double>(inside) / total;
    CHECK(rate >= 0.92);
    CHECK(rate <= 0.99);
}

TEST_CASE("score_forecast")
{
    PredictiveSummary s;
    for (int w = 0; w < 4; ++w) {
        WeekQuantiles wq;
        wq.week  = {2015, 1 + w};
        wq.q     = {10.0 * w, 10.0 * w + 2, 10.0 * w + 4, 10.0 * w + 6, 10.0 * w + 8};
        wq.phase = w < 2 ? Phase::fitted : Phase::forecast;
        s.weeks.push_back(wq);
    }
    const std::vector<std::optional<std::int64_t>> at_median{999, 999, 24, 34};
    const auto exact = score_forecast(s, at_median);
    CHECK(exact.n_weeks == 2);
    CHECK(exact.mean_abs_error == 0.0);
    CHECK(exact.coverage95 == 1.0);
    CHECK(exact.coverage50 == 1.0);

    const std::vector<std::optional<std::int64_t>> far{0, 0, 500, 900};
    const auto miss = score_forecast(s, far);
    CHECK(miss.coverage95 == 0.0);
    CHECK(miss.mean_abs_error == doctest::Approx((476.0 + 866.0) / 2));
    CHECK(miss.median_abs_error == doctest::Approx((476.0 + 866.0) / 2));

    const std::vector<std::optional<std::int64_t>> partial{0, 0, std::nullopt, 40};
    CHECK(score_forecast(s, partial).n_weeks == 1);
    CHECK_THROWS_AS(score_forecast(s, std::vector<std::optional<std::int64_t>>{1, 2}), std::domain_error);
}

TEST_CASE("cut points map to ISO weeks of the new year")
{
    const auto season = simulate_series(Scenario::seasonal());
    CHECK(new_year_cut(season.series, 3) == IsoWeek{2015, 3});
    CHECK(season.series.index_of(new_year_cut(season.series, 3)) == 15u);
    CHECK(season.series.index_of(new_year_cut(season.series, 18)) == 30u);
}

TEST_CASE("prospective runs ignore held-out data and reduce to the full fit at the last week")
{
    auto sc          = Scenario::seasonal();
    sc.n_weeks       = 16;
    sc.model.calendar = HolidayCalendar({{26, 34}, {82, 97}});
    const auto data  = simulate_series(sc).series;
    const auto spec  = PriorSpec::informative();
    const auto s     = quick_settings();

    const auto full = fit_season(data, spec, sc.model, s);
    const auto last = prospective_run(data, data.size() - 1, spec, sc.model, s);
    CHECK(full.draws == last.draws);
    CHECK(full.summary == last.summary);
    for (const auto& wq : full.summary.weeks) {
        CHECK(wq.phase == Phase::fitted);
    }

    const std::size_t cut = 9;
    auto altered          = data;
    for (std::size_t w = cut + 1; w < altered.size(); ++w) {
        altered.records[w].count = 5 * w;
    }
    const auto a = prospective_run(data, cut, spec, sc.model, s);
    const auto b = prospective_run(altered, cut, spec, sc.model, s);
    CHECK(a.draws == b.draws);
    CHECK(a.summary == b.summary);
    for (std::size_t w = 0; w < a.summary.weeks.size(); ++w) {
        CHECK((a.summary.weeks[w].phase == Phase::forecast) == (w > cut));
    }

    auto late = data;
    for (std::size_t w = 0; w < 5; ++w) {
        late.records[w].count.reset();
    }
    CHECK_THROWS_AS(prospective_run(late, 3, spec, sc.model, s), std::domain_error);
    CHECK_THROWS_AS(prospective_run(data, data.size(), spec, sc.model, s), std::domain_error);
}

} // TEST_SUITE
