#include "flucast/priors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace flucast
{

namespace
{

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_sigmoid(double u)
{
    return u >= 0.0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u));
}

double sigmoid(double u)
{
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

} // namespace

Param param_from_name(std::string_view name)
{
    for (std::size_t k = 0; k < n_params; ++k) {
        if (param_names[k] == name) {
            return static_cast<Param>(k);
        }
    }
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

ParamVector make_params(double pi, double i_tot0, double beta, double eta, double p_icu, double kappa)
{
    return ParamVector{{pi, i_tot0, beta, eta, p_icu, kappa}};
}

Prior Prior::uniform(double lower, double upper)
{
    if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw std::invalid_argument("uniform prior needs finite bounds with lower < upper");
    }
    Prior p;
    p.kind  = Kind::uniform;
    p.lower = lower;
    p.upper = upper;
    return p;
}

Prior Prior::lognormal(double meanlog, double sdlog, double lower, double upper)
{
    if (!(sdlog > 0.0) || !std::isfinite(meanlog)) {
        throw std::invalid_argument("lognormal prior needs finite meanlog and sdlog > 0");
    }
    if (!(lower >= 0.0) || !(upper > lower)) {
        throw std::invalid_argument("lognormal prior support must satisfy 0 <= lower < upper");
    }
    Prior p;
    p.kind    = Kind::lognormal;
    p.meanlog = meanlog;
    p.sdlog   = sdlog;
    p.lower   = lower;
    p.upper   = upper;
    return p;
}

double Prior::log_density(double x) const
{
    if (!in_support(x)) {
        return neg_inf;
    }
    if (kind == Kind::uniform) {
        return -std::log(upper - lower);
    }
    const double z = (std::log(x) - meanlog) / sdlog;
    return -0.5 * z * z - std::log(x) - std::log(sdlog) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double Prior::median() const
{
    return kind == Kind::uniform ? 0.5 * (lower + upper) : std::exp(meanlog);
}

double Prior::sd() const
{
    if (kind == Kind::uniform) {
        return (upper - lower) / std::sqrt(12.0);
    }
    const double s2 = sdlog * sdlog;
    return std::sqrt(std::expm1(s2) * std::exp(2.0 * meanlog + s2));
}

double Prior::sample(Rng& rng) const
{
    if (kind == Kind::uniform) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        // (lower, upper]
        return upper - (upper - lower) * unif(rng);
    }
    std::lognormal_distribution<double> dist(meanlog, sdlog);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double x = dist(rng);
        if (in_support(x)) {
            return x;
        }
    }
    throw std::runtime_error("could not draw from truncated lognormal prior");
}

double Prior::to_unconstrained(double x) const
{
    if (std::isfinite(upper)) {
        const double s = (x - lower) / (upper - lower);
        return std::log(s) - std::log1p(-s);
    }
    return std::log(x - lower);
}

double Prior::from_unconstrained(double u) const
{
    if (std::isfinite(upper)) {
        return lower + (upper - lower) * sigmoid(u);
    }
    return lower + std::exp(u);
}

double Prior::log_jacobian(double u) const
{
    if (std::isfinite(upper)) {
        return std::log(upper - lower) + log_sigmoid(u) + log_sigmoid(-u);
    }
    return u;
}

std::string Prior::describe() const
{
    std::ostringstream os;
    os.precision(17);
    if (kind == Kind::uniform) {
        os << "uniform(" << lower << "," << upper << ")";
    }
    else {
        os << "lognormal(" << meanlog << "," << sdlog << ") on (" << lower << "," << upper << "]";
    }
    return os.str();
}

PriorSpec PriorSpec::uninformative()
{
    PriorSpec spec;
    spec[Param::pi]     = Prior::uniform(0.0, 1.0);
    spec[Param::i_tot0] = Prior::uniform(0.0, 10000.0);
    spec[Param::beta]   = Prior::uniform(0.0, 1.12);
    spec[Param::eta]    = Prior::uniform(1.0, 100.0);
    spec[Param::p_icu]  = Prior::uniform(0.0, 1.0);
    spec[Param::kappa]  = Prior::uniform(0.0, 2.0);
    return spec;
}

PriorSpec PriorSpec::informative()
{
    PriorSpec spec     = uninformative();
    spec[Param::pi]    = Prior::lognormal(std::log(0.401), 0.2, 0.0, 1.0);
    spec[Param::p_icu] = Prior::lognormal(std::log(0.000239), 1.0, 0.0, 1.0);
    return spec;
}

PriorSpec PriorSpec::for_scenario(PriorScenario s)
{
    return s == PriorScenario::informative ? informative() : uninformative();
}

PriorScenario scenario_from_name(std::string_view name)
{
    if (name == "uninformative") {
        return PriorScenario::uninformative;
    }
    if (name == "informative") {
        return PriorScenario::informative;
    }
    throw std::invalid_argument("prior scenario must be 'uninformative' or 'informative', got '" +
                                std::string(name) + "'");
}

std::string_view scenario_name(PriorScenario s)
{
    return s == PriorScenario::informative ? "informative" : "uninformative";
}

bool in_support(const ParamVector& theta, const PriorSpec& spec)
{
    for (std::size_t k = 0; k < n_params; ++k) {
        if (!spec.priors[k].in_support(theta[k])) {
            return false;
        }
    }
    return true;
}

double log_prior(const ParamVector& theta, const PriorSpec& spec)
{
    double total = 0.0;
    for (std::size_t k = 0; k < n_params; ++k) {
        const double lp = spec.priors[k].log_density(theta[k]);
        if (lp == neg_inf) {
            return neg_inf;
        }
        total += lp;
    }
    return total;
}

Unconstrained to_unconstrained(const ParamVector& theta, const PriorSpec& spec)
{
    Unconstrained u{};
    for (std::size_t k = 0; k < n_params; ++k) {
        u[k] = spec.priors[k].to_unconstrained(theta[k]);
    }
    return u;
}

ParamVector from_unconstrained(std::span<const double> u, const PriorSpec& spec)
{
    ParamVector theta;
    for (std::size_t k = 0; k < n_params; ++k) {
        theta[k] = spec.priors[k].from_unconstrained(u[k]);
    }
    return theta;
}

double log_jacobian(std::span<const double> u, const PriorSpec& spec)
{
    double total = 0.0;
    for (std::size_t k = 0; k < n_params; ++k) {
        total += spec.priors[k].log_jacobian(u[k]);
    }
    return total;
}

double log_prior_unconstrained(std::span<const double> u, const PriorSpec& spec)
{
    const double lp = log_prior(from_unconstrained(u, spec), spec);
    if (lp == neg_inf) {
        return neg_inf;
    }
    return lp + log_jacobian(u, spec);
}

ParamVector sample_prior(const PriorSpec& spec, Rng& rng)
{
    ParamVector theta;
    for (std::size_t k = 0; k < n_params; ++k) {
        theta[k] = spec.priors[k].sample(rng);
    }
    return theta;
}

} // namespace flucast
