#pragma once

#include "flucast/epi_model.hpp"
#include "flucast/sampler.hpp"

#include <string>
#include <vector>

namespace flucast
{

/// Split-chain potential scale reduction factor (Gelman-Rubin on half chains).
double split_rhat(const std::vector<std::vector<double>>& chains);

/// Multi-chain effective sample size from split chains, Geyer initial monotone sequence.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

struct ParamDiagnostics {
    std::string name;
    double psrf   = 1.0;
    double ess    = 0.0;
    bool flagged  = false;
};

struct DiagnosticsReport {
    double threshold = 1.05;
    std::vector<ParamDiagnostics> params;

    bool converged() const;
    const ParamDiagnostics& operator[](Param p) const { return params[static_cast<std::size_t>(p)]; }
};

/// Needs at least two chains with 100 draws each, otherwise std::domain_error.
DiagnosticsReport diagnostics(const PosteriorDraws& draws, double psrf_threshold = 1.05);

struct DerivedQuantities {
    std::vector<ReproductionNumbers> per_draw;
    double pr_kappa_above_one = 0.0;
};

/// R0 and Rn per pooled draw, and the posterior probability that kappa > 1.
DerivedQuantities derived_quantities(const PosteriorDraws& draws, double gamma);
DerivedQuantities derived_quantities(const std::vector<ParamVector>& draws, double gamma);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob);

} // namespace flucast
