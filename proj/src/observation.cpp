#include "flucast/observation.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flucast
{

double log_gamma(double x)
{
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

DelayKernel::DelayKernel(std::vector<double> probabilities)
    : m_probs(std::move(probabilities))
{
    if (m_probs.empty() || m_probs.size() > max_lag + 1) {
        throw std::invalid_argument("delay kernel must have between 1 and " + std::to_string(max_lag + 1) +
                                    " entries");
    }
    double total = 0.0;
    for (double p : m_probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("delay kernel entries must be finite and non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("delay kernel must sum to one (got " + std::to_string(total) + ")");
    }
}

DelayKernel default_delay_kernel(double mean_days, double shape, std::size_t w_max)
{
    if (!(mean_days > 0.0) || !(shape > 0.0)) {
        throw std::invalid_argument("delay mean and shape must be positive");
    }
    if (w_max > DelayKernel::max_lag) {
        throw std::invalid_argument("delay kernel truncation exceeds the maximum lag");
    }
    const double scale = mean_days / shape;
    std::vector<double> probs(w_max + 1);
    double prev = 0.0;
    for (std::size_t w = 0; w <= w_max; ++w) {
        const double cdf = boost::math::gamma_p(shape, 7.0 * static_cast<double>(w + 1) / scale);
        probs[w]         = cdf - prev;
        prev             = cdf;
    }
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (auto& p : probs) {
        p /= total;
    }
    return DelayKernel(std::move(probs));
}

DelayKernel parse_kernel(std::istream& in)
{
    std::vector<double> probs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            std::size_t used = 0;
            probs.push_back(std::stod(line, &used));
            if (line.find_first_not_of(" \t\r", used) != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
        }
        catch (const std::exception&) {
            throw std::runtime_error("kernel line " + std::to_string(line_no) + ": expected a probability");
        }
    }
    try {
        return DelayKernel(std::move(probs));
    }
    catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("kernel: ") + e.what());
    }
}

DelayKernel load_kernel(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open kernel file '" + path + "'");
    }
    return parse_kernel(in);
}

std::vector<double> expected_admissions(std::span<const double> incidence, const DelayKernel& kernel, double p_icu)
{
    const auto& f = kernel.probabilities();
    std::vector<double> mu(incidence.size(), 0.0);
    for (std::size_t w = 0; w < incidence.size(); ++w) {
        const std::size_t lags = std::min(f.size(), w + 1);
        double acc             = 0.0;
        for (std::size_t lag = 0; lag < lags; ++lag) {
            acc += f[lag] * incidence[w - lag];
        }
        mu[w] = acc * p_icu;
    }
    return mu;
}

double negbin_logpmf(std::int64_t x, double mu, double eta)
{
    if (!(eta > 1.0) || !(mu >= 0.0) || !std::isfinite(mu)) {
        throw std::domain_error("negative binomial needs mu >= 0 and eta > 1");
    }
    if (x < 0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (mu == 0.0) {
        return x == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double r  = mu / (eta - 1.0);
    const double xd = static_cast<double>(x);
    // log(1/eta) = -log1p(eta - 1);  log(1 - 1/eta) = log(eta - 1) - log(eta)
    const double log_p   = -std::log1p(eta - 1.0);
    const double log_1mp = std::log(eta - 1.0) + log_p;
    double out           = r * log_p;
    if (x > 0) {
        out += log_gamma(xd + r) - log_gamma(r) - log_gamma(xd + 1.0) + xd * log_1mp;
    }
    return out;
}

double series_loglik(std::span<const std::optional<std::int64_t>> observed, std::span<const double> mu, double eta)
{
    if (observed.size() != mu.size()) {
        throw std::domain_error("observed and expected series differ in length (" + std::to_string(observed.size()) +
                                " vs " + std::to_string(mu.size()) + ")");
    }
    double total = 0.0;
    for (std::size_t w = 0; w < observed.size(); ++w) {
        if (observed[w]) {
            total += negbin_logpmf(*observed[w], mu[w], eta);
        }
    }
    return total;
}

std::int64_t negbin_sample(double mu, double eta, Rng& rng)
{
    if (!(mu > 0.0)) {
        return 0;
    }
    const double shape = mu / (eta - 1.0);
    std::gamma_distribution<double> gamma(shape, eta - 1.0);
    const double rate = gamma(rng);
    if (!(rate > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> poisson(rate);
    return poisson(rng);
}

} // namespace flucast
