#include "doctest.h"

#include "flucast/observation.hpp"
#include "oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

using namespace flucast;

TEST_SUITE("observation")
{

TEST_CASE("delay kernel invariants")
{
    CHECK_NOTHROW(DelayKernel({0.25, 0.75}));
    CHECK_THROWS_AS(DelayKernel({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(DelayKernel({1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DelayKernel({}), std::invalid_argument);
    CHECK_THROWS_AS(DelayKernel(std::vector<double>(10, 0.1)), std::invalid_argument);
    CHECK_NOTHROW(DelayKernel(std::vector<double>(9, 1.0 / 9.0)));
}

TEST_CASE("default delay kernel")
{
    const auto sharp = default_delay_kernel(0.5, 50.0, 4);
    CHECK(sharp[0] > 0.999);

    for (double mean : {0.5, 3.0, 9.0, 20.0}) {
        for (std::size_t w_max : {0u, 2u, 4u, 8u}) {
            const auto k    = default_delay_kernel(mean, 4.0, w_max);
            const auto& pr = k.probabilities();
            CHECK(k.size() == w_max + 1);
            CHECK(std::abs(std::accumulate(pr.begin(), pr.end(), 0.0) - 1.0) <= 1e-12);
        }
    }

    const auto k   = default_delay_kernel(10.0, 4.0, 4);
    const auto ref = oracle::binned_gamma(10.0, 4.0, 4);
    for (std::size_t w = 0; w < ref.size(); ++w) {
        CHECK(std::abs(k[w] - ref[w]) <= 1e-8);
    }
    CHECK_THROWS_AS(default_delay_kernel(9.0, 4.0, 9), std::invalid_argument);
    CHECK_THROWS_AS(default_delay_kernel(-1.0, 4.0, 4), std::invalid_argument);
}

TEST_CASE("kernel override file")
{
    std::istringstream in("# weekly delay\n0.5\n0.3\n\n0.2\n");
    CHECK(parse_kernel(in) == DelayKernel({0.5, 0.3, 0.2}));
    std::istringstream bad("0.5\n0.3\n");
    CHECK_THROWS(parse_kernel(bad));
}

TEST_CASE("expected admissions")
{
    const std::vector<double> inc{3.0, 7.5, 11.0, 2.0};
    const auto id = expected_admissions(inc, DelayKernel({1.0}), 1.0);
    CHECK(id == inc);

    const std::vector<double> impulse{100, 0, 0, 0};
    const auto mu = expected_admissions(impulse, DelayKernel({0.5, 0.5}), 0.01);
    CHECK(mu == std::vector<double>{0.5, 0.5, 0.0, 0.0});

    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(33);
        for (auto& v : x) {
            v = 1e5 * u(rng);
        }
        std::vector<double> f(1 + rep % 9);
        for (auto& v : f) {
            v = u(rng);
        }
        const double tot = std::accumulate(f.begin(), f.end(), 0.0);
        for (auto& v : f) {
            v /= tot;
        }
        DelayKernel kernel(f);
        const double p  = u(rng);
        const auto got  = expected_admissions(x, kernel, p);
        const auto want = oracle::convolve(x, kernel.probabilities(), p);
        for (std::size_t w = 0; w < x.size(); ++w) {
            CHECK(got[w] == doctest::Approx(want[w]).epsilon(1e-14));
        }
        // linearity in incidence and in p
        std::vector<double> x2(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            x2[k] = 2.5 * x[k];
        }
        const auto scaled = expected_admissions(x2, kernel, p);
        const auto half_p = expected_admissions(x, kernel, 0.5 * p);
        for (std::size_t w = 0; w < x.size(); ++w) {
            CHECK(scaled[w] == doctest::Approx(2.5 * got[w]).epsilon(1e-14));
            CHECK(half_p[w] == doctest::Approx(0.5 * got[w]).epsilon(1e-14));
        }
    }
}

TEST_CASE("negbin log-pmf closed forms and limits")
{
    CHECK(negbin_logpmf(0, 2.0, 2.0) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
    CHECK(std::abs(negbin_logpmf(3, 3.0, 1.0001) - oracle::log_poisson(3, 3.0)) < 1e-3);
    CHECK(negbin_logpmf(0, 0.0, 3.0) == 0.0);
    CHECK(negbin_logpmf(4, 0.0, 3.0) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(negbin_logpmf(1, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(negbin_logpmf(1, -1.0, 2.0), std::domain_error);
    CHECK(negbin_logpmf(-1, 1.0, 2.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("negbin pmf sums to one on the grid")
{
    for (double mu : {0.1, 1.0, 10.0, 100.0}) {
        for (double eta : {1.01, 2.0, 17.9, 99.0}) {
            long double total = 0.0L;
            for (std::int64_t x = 0; x <= 10'000; ++x) {
                total += std::exp(static_cast<long double>(negbin_logpmf(x, mu, eta)));
            }
            INFO("mu=" << mu << " eta=" << eta);
            CHECK(std::abs(static_cast<double>(total) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("series log-likelihood")
{
    const std::vector<std::optional<std::int64_t>> none(3);
    const std::vector<double> mu{1.0, 2.0, 3.0};
    CHECK(series_loglik(none, mu, 2.0) == 0.0);

    const std::vector<std::optional<std::int64_t>> two{4, std::nullopt, 1};
    CHECK(series_loglik(two, mu, 2.0) == doctest::Approx(negbin_logpmf(4, 1.0, 2.0) + negbin_logpmf(1, 3.0, 2.0)));
    CHECK_THROWS_AS(series_loglik(two, std::vector<double>{1.0}, 2.0), std::domain_error);
}

TEST_CASE("negbin sampler moments, determinism and goodness of fit")
{
    Rng zero(1);
    for (int k = 0; k < 100; ++k) {
        CHECK(negbin_sample(0.0, 3.0, zero) == 0);
    }

    Rng a(99), b(99);
    for (int k = 0; k < 1000; ++k) {
        REQUIRE(negbin_sample(7.0, 2.5, a) == negbin_sample(7.0, 2.5, b));
    }

    constexpr int n = 1'000'000;
    Rng rng(2024);
    std::vector<double> xs(n);
    double mean = 0.0;
    for (auto& x : xs) {
        x = static_cast<double>(negbin_sample(5.0, 4.0, rng));
        mean += x;
    }
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    const double var = m2 * n / (n - 1.0);
    CHECK(std::abs(mean - 5.0) <= 3.0 * std::sqrt(20.0 / n));
    CHECK(std::abs(var - 20.0) <= 3.0 * std::sqrt((m4 - m2 * m2) / n));

    // chi-square against the pmf, bins merged until every expectation is >= 5
    constexpr int m = 100'000;
    std::map<std::int64_t, int> counts;
    for (int k = 0; k < m; ++k) {
        ++counts[negbin_sample(12.0, 3.0, rng)];
    }
    double chi2   = 0.0;
    int bins      = 0;
    double e_acc  = 0.0;
    double o_acc  = 0.0;
    double mass   = 0.0;
    for (std::int64_t x = 0; x <= 400; ++x) {
        const double px = std::exp(negbin_logpmf(x, 12.0, 3.0));
        mass += px;
        e_acc += m * px;
        o_acc += counts.count(x) ? counts[x] : 0;
        if (e_acc >= 5.0 && m * (1.0 - mass) >= 5.0) {
            chi2 += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
            ++bins;
            e_acc = o_acc = 0.0;
        }
    }
    double tail_obs = 0.0;
    for (const auto& [x, c] : counts) {
        tail_obs += c;
    }
    double used_obs = 0.0;
    for (std::int64_t x = 0; x <= 400; ++x) {
        used_obs += counts.count(x) ? counts[x] : 0;
    }
    // everything not yet binned forms the last bin
    const double rest_e = m - (m * mass - e_acc);
    const double rest_o = o_acc + (tail_obs - used_obs);
    chi2 += (rest_o - rest_e) * (rest_o - rest_e) / rest_e;
    ++bins;
    const boost::math::chi_squared dist(bins - 1);
    CHECK(chi2 < boost::math::quantile(dist, 0.999));
}

TEST_CASE("log_gamma")
{
    CHECK(log_gamma(1.0) == 0.0);
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)));
}

} // TEST_SUITE
