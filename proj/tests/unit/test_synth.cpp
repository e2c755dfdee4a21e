#include "doctest.h"

#include "flucast/synth.hpp"

#include <cmath>

using namespace flucast;

TEST_SUITE("synth")
{

TEST_CASE("scenario defaults are valid")
{
    const auto sc = Scenario::seasonal();
    CHECK_NOTHROW(sc.validate());
    CHECK(sc.n_weeks == 33);
    CHECK(sc.model.n_pop == 54'551'450.0);
    const auto pd = Scenario::pandemic();
    CHECK(pd.mode == ScenarioMode::pandemic_hospital);
    CHECK(pd.truth.p_icu() > sc.truth.p_icu());
    CHECK(pandemic_prior()[Param::p_icu].median() == doctest::Approx(10 * PriorSpec::informative()[Param::p_icu].median()));
    CHECK(mode_from_name("pandemic-hospital") == ScenarioMode::pandemic_hospital);
    CHECK(mode_name(ScenarioMode::seasonal_icu) == "seasonal-icu");
    CHECK_THROWS(mode_from_name("pandemic"));

    auto bad               = sc;
    bad.truth[Param::beta] = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad         = sc;
    bad.n_weeks = 3; // holidays run past the season
    CHECK_THROWS(bad.validate());
}

TEST_CASE("zero admission probability gives an all-zero series")
{
    for (auto sc : {Scenario::seasonal(), Scenario::pandemic()}) {
        sc.truth[Param::p_icu] = 0.0;
        const auto s           = simulate_series(sc);
        for (const auto& r : s.series.records) {
            CHECK(r.count == 0);
        }
    }
}

TEST_CASE("near-Poisson counts concentrate around the mean")
{
    Scenario sc            = Scenario::seasonal();
    sc.model.n_pop         = 5e9;
    sc.truth[Param::i_tot0] = 9000;
    sc.truth[Param::p_icu] = 0.01;
    sc.truth[Param::eta]   = 1.0001;
    std::size_t close = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        sc.seed      = seed;
        const auto s = simulate_series(sc);
        for (std::size_t w = 0; w < s.expected.size(); ++w) {
            const double x = static_cast<double>(*s.series.records[w].count);
            close += std::abs(x - s.expected[w]) <= 3.0 * std::sqrt(s.expected[w]) ? 1 : 0;
            ++total;
        }
    }
    CHECK(static_cast<double>(close) / total >= 0.99);
}

TEST_CASE("simulation is seeded and recomposes exactly")
{
    const auto sc = Scenario::seasonal();
    const auto a  = simulate_series(sc);
    const auto b  = simulate_series(sc);
    CHECK(a.series == b.series);
    auto other = sc;
    other.seed = 2;
    CHECK_FALSE(simulate_series(other).series == a.series);

    CHECK(a.incidence == weekly_incidence(a.trajectory));
    CHECK(a.expected == expected_admissions(weekly_incidence(a.trajectory), sc.model.kernel, sc.truth.p_icu()));
    REQUIRE(a.series.size() == 33);
    CHECK(a.series.records.front().week == IsoWeek{2014, 40});
    CHECK(a.series.records.back().week == IsoWeek{2015, 20});
}

TEST_CASE("pandemic mode is relabelling only")
{
    auto seasonal = Scenario::seasonal();
    auto pandemic = Scenario::pandemic();
    pandemic.truth = seasonal.truth;
    pandemic.model = seasonal.model;
    const auto a   = simulate_series(seasonal);
    const auto b   = simulate_series(pandemic);
    CHECK(a.series.records == b.series.records);
    CHECK(a.expected == b.expected);
    CHECK(a.series.label != b.series.label);
}

TEST_CASE("without data the posterior is the prior")
{
    auto sc      = Scenario::seasonal();
    sc.n_weeks   = 33;
    SamplerSettings s;
    s.n_iter   = 20'000;
    s.burn_in  = 4'000;
    s.thin     = 4;
    s.n_chains = 2;
    s.threads  = 1;
    const auto spec = PriorSpec::informative();
    const auto draws = mh_sample(Observed(sc.n_weeks), spec, sc.model, s);
    for (std::size_t k = 0; k < n_params; ++k) {
        const auto m = draws.marginal(static_cast<Param>(k));
        const Prior& p = spec.priors[k];
        INFO(param_names[k]);
        CHECK(quantile(m, 0.5) == doctest::Approx(p.median()).epsilon(0.1));
    }
}

} // TEST_SUITE
