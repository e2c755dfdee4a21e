#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace flucast
{

/// Weekly infection-to-admission delay distribution, entry w = P(w weeks elapse).
class DelayKernel
{
public:
    static constexpr std::size_t max_lag = 8;

    /// Validates non-negativity, length <= max_lag + 1 and unit mass (1e-12). Throws std::invalid_argument.
    explicit DelayKernel(std::vector<double> probabilities);

    const std::vector<double>& probabilities() const { return m_probs; }
    std::size_t size() const { return m_probs.size(); }
    double operator[](std::size_t w) const { return m_probs[w]; }

    bool operator==(const DelayKernel&) const = default;

private:
    std::vector<double> m_probs;
};

/**
 * Gamma(shape, mean) infection-to-admission delay binned into weeks [7w, 7w + 7),
 * truncated after week w_max and renormalised.
 */
DelayKernel default_delay_kernel(double mean_days = 9.0, double shape = 4.0, std::size_t w_max = 4);

/// One probability per line (blank lines and `#` comments ignored).
DelayKernel parse_kernel(std::istream& in);
DelayKernel load_kernel(const std::string& path);

struct ObsParams {
    double p_icu = 0.0; // probability of admission given infection
    double eta   = 2.0; // variance-to-mean ratio, > 1
};

/// mu_w = p * sum_{v <= w} f(w - v) * incidence_v
std::vector<double> expected_admissions(std::span<const double> incidence, const DelayKernel& kernel, double p_icu);

/**
 * Negative binomial log-pmf with mean mu and variance eta * mu, i.e. size
 * r = mu / (eta - 1) and success probability 1 / eta. Throws std::domain_error
 * unless mu >= 0 and eta > 1; negative x has probability zero.
 */
double negbin_logpmf(std::int64_t x, double mu, double eta);

/// Sum of negbin_logpmf over observed weeks; missing weeks are skipped.
/// Throws std::domain_error on a length mismatch.
double series_loglik(std::span<const std::optional<std::int64_t>> observed, std::span<const double> mu, double eta);

using Rng = std::mt19937_64;

/// Gamma-Poisson mixture draw with mean mu and variance eta * mu.
std::int64_t negbin_sample(double mu, double eta, Rng& rng);

/// Reentrant log-gamma.
double log_gamma(double x);

} // namespace flucast
