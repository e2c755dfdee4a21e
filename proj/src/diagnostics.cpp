#include "flucast/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace flucast
{

namespace
{

std::vector<std::vector<double>> split_chains(const std::vector<std::vector<double>>& chains)
{
    std::vector<std::vector<double>> out;
    for (const auto& c : chains) {
        const std::size_t half = c.size() / 2;
        // odd length: drop the middle draw
        out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
        out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
    }
    return out;
}

double mean_of(const std::vector<double>& x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

void check_shape(const std::vector<std::vector<double>>& chains)
{
    if (chains.size() < 2) {
        throw std::domain_error("convergence diagnostics need at least two chains");
    }
    const std::size_t n = chains.front().size();
    for (const auto& c : chains) {
        if (c.size() != n) {
            throw std::domain_error("chains must have equal length");
        }
    }
    if (n < 100) {
        throw std::domain_error("convergence diagnostics need at least 100 draws per chain");
    }
}

struct Variances {
    double within  = 0.0;
    double between = 0.0; // B / n
    double var_plus = 0.0;
};

Variances variances(const std::vector<std::vector<double>>& chains)
{
    const std::size_t m = chains.size();
    const double n      = static_cast<double>(chains.front().size());
    std::vector<double> means(m);
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        means[j]  = mean_of(chains[j]);
        double ss = 0.0;
        for (double x : chains[j]) {
            ss += (x - means[j]) * (x - means[j]);
        }
        w += ss / (n - 1.0);
    }
    w /= static_cast<double>(m);
    const double grand = mean_of(means);
    double b_over_n    = 0.0;
    for (double mu : means) {
        b_over_n += (mu - grand) * (mu - grand);
    }
    b_over_n /= static_cast<double>(m - 1);
    return {w, b_over_n, (n - 1.0) / n * w + b_over_n};
}

} // namespace

double split_rhat(const std::vector<std::vector<double>>& chains)
{
    check_shape(chains);
    const auto v = variances(split_chains(chains));
    if (v.within <= 0.0) {
        return v.between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    return std::sqrt(v.var_plus / v.within);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains)
{
    check_shape(chains);
    const auto split    = split_chains(chains);
    const std::size_t m = split.size();
    const std::size_t n = split.front().size();
    const auto v        = variances(split);
    const double total  = static_cast<double>(m * n);
    if (v.within <= 0.0) {
        return v.between > 0.0 ? 1.0 : total;
    }

    std::vector<double> means(m);
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = mean_of(split[j]);
    }
    // autocovariance averaged over chains, biased (divide by n) estimator
    auto mean_autocov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t + lag < n; ++t) {
                s += (split[j][t] - means[j]) * (split[j][t + lag] - means[j]);
            }
            acc += s / static_cast<double>(n);
        }
        return acc / static_cast<double>(m);
    };
    const double w_biased = mean_autocov(0);
    auto rho = [&](std::size_t lag) { return 1.0 - (w_biased - mean_autocov(lag)) / v.var_plus; };

    double tau       = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double pair = rho(2 * k) + rho(2 * k + 1);
        if (pair < 0.0) {
            break;
        }
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        tau += 2.0 * pair;
    }
    tau = std::max(tau, 1.0 / std::log10(total));
    return total / tau;
}

bool DiagnosticsReport::converged() const
{
    return std::none_of(params.begin(), params.end(), [](const auto& p) { return p.flagged; });
}

DiagnosticsReport diagnostics(const PosteriorDraws& draws, double psrf_threshold)
{
    DiagnosticsReport report;
    report.threshold = psrf_threshold;
    for (std::size_t k = 0; k < n_params; ++k) {
        std::vector<std::vector<double>> chains;
        for (const auto& c : draws.chains) {
            std::vector<double> x;
            x.reserve(c.draws.size());
            for (const auto& d : c.draws) {
                x.push_back(d[k]);
            }
            chains.push_back(std::move(x));
        }
        ParamDiagnostics p;
        p.name    = std::string(param_names[k]);
        p.psrf    = split_rhat(chains);
        p.ess     = effective_sample_size(chains);
        p.flagged = !(p.psrf <= psrf_threshold);
        report.params.push_back(p);
    }
    return report;
}

DerivedQuantities derived_quantities(const std::vector<ParamVector>& draws, double gamma)
{
    DerivedQuantities out;
    out.per_draw.reserve(draws.size());
    std::size_t above = 0;
    for (const auto& theta : draws) {
        EpiParams p;
        p.beta  = theta.beta();
        p.pi    = theta.pi();
        p.gamma = gamma;
        out.per_draw.push_back(reproduction_numbers(p));
        above += theta.kappa() > 1.0 ? 1 : 0;
    }
    if (!draws.empty()) {
        out.pr_kappa_above_one = static_cast<double>(above) / static_cast<double>(draws.size());
    }
    return out;
}

DerivedQuantities derived_quantities(const PosteriorDraws& draws, double gamma)
{
    return derived_quantities(draws.pooled(), gamma);
}

double quantile(std::vector<double> values, double prob)
{
    if (values.empty()) {
        throw std::domain_error("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = prob * static_cast<double>(values.size() - 1);
    const auto lo    = static_cast<std::size_t>(std::floor(pos));
    const auto hi    = std::min(lo + 1, values.size() - 1);
    const double w   = pos - static_cast<double>(lo);
    return values[lo] + w * (values[hi] - values[lo]);
}

} // namespace flucast
