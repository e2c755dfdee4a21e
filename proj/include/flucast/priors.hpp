#pragma once

#include "flucast/observation.hpp"

#include <array>
#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace flucast
{

enum class Param : std::size_t { pi = 0, i_tot0, beta, eta, p_icu, kappa };

inline constexpr std::size_t n_params = 6;

inline constexpr std::array<std::string_view, n_params> param_names = {"pi", "i_tot0", "beta", "eta", "p_icu",
                                                                       "kappa"};

/// Throws std::invalid_argument for unknown names.
Param param_from_name(std::string_view name);

/// theta = (pi, i_tot0, beta, eta, p_icu, kappa) on the natural scale.
struct ParamVector {
    std::array<double, n_params> values{};

    double& operator[](Param p) { return values[static_cast<std::size_t>(p)]; }
    double operator[](Param p) const { return values[static_cast<std::size_t>(p)]; }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    double pi() const { return (*this)[Param::pi]; }
    double i_tot0() const { return (*this)[Param::i_tot0]; }
    double beta() const { return (*this)[Param::beta]; }
    double eta() const { return (*this)[Param::eta]; }
    double p_icu() const { return (*this)[Param::p_icu]; }
    double kappa() const { return (*this)[Param::kappa]; }

    bool operator==(const ParamVector&) const = default;
};

ParamVector make_params(double pi, double i_tot0, double beta, double eta, double p_icu, double kappa);

/**
 * Marginal prior of one parameter. Support is the half-open interval
 * (lower, upper]; a uniform prior spans its whole support, a log-normal one is
 * restricted to it without renormalisation (the excluded tail is negligible for
 * the configured priors).
 */
struct Prior {
    enum class Kind { uniform, lognormal };

    Kind kind    = Kind::uniform;
    double lower = 0.0;
    double upper = 1.0;
    double meanlog = 0.0; // lognormal only
    double sdlog   = 1.0; // lognormal only

    static Prior uniform(double lower, double upper);
    static Prior lognormal(double meanlog, double sdlog, double lower = 0.0,
                           double upper = std::numeric_limits<double>::infinity());

    bool in_support(double x) const { return x > lower && x <= upper; }
    double log_density(double x) const;
    double median() const;
    double sd() const;
    double sample(Rng& rng) const;

    // Unconstrained working scale: logit on bounded supports, log otherwise.
    double to_unconstrained(double x) const;
    double from_unconstrained(double u) const;
    double log_jacobian(double u) const;

    std::string describe() const;

    bool operator==(const Prior&) const = default;
};

enum class PriorScenario { uninformative, informative };

struct PriorSpec {
    std::array<Prior, n_params> priors;

    const Prior& operator[](Param p) const { return priors[static_cast<std::size_t>(p)]; }
    Prior& operator[](Param p) { return priors[static_cast<std::size_t>(p)]; }

    /// Uniform priors on (0,1], (0,10000], (0,1.12], (1,100], (0,1], (0,2].
    static PriorSpec uninformative();
    /// As uninformative, with log-normal priors on pi (median 0.401, sdlog 0.2)
    /// and p_icu (median 0.000239, sdlog 1).
    static PriorSpec informative();
    static PriorSpec for_scenario(PriorScenario s);

    bool operator==(const PriorSpec&) const = default;
};

PriorScenario scenario_from_name(std::string_view name);
std::string_view scenario_name(PriorScenario s);

bool in_support(const ParamVector& theta, const PriorSpec& spec);

/// Sum of marginal log densities; -inf outside the support.
double log_prior(const ParamVector& theta, const PriorSpec& spec);

using Unconstrained = std::array<double, n_params>;

Unconstrained to_unconstrained(const ParamVector& theta, const PriorSpec& spec);
ParamVector from_unconstrained(std::span<const double> u, const PriorSpec& spec);

/// log_prior(from_unconstrained(u)) plus the log Jacobian of the inverse transform.
double log_prior_unconstrained(std::span<const double> u, const PriorSpec& spec);
double log_jacobian(std::span<const double> u, const PriorSpec& spec);

ParamVector sample_prior(const PriorSpec& spec, Rng& rng);

} // namespace flucast
