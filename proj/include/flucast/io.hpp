#pragma once

#include "flucast/diagnostics.hpp"
#include "flucast/forecast.hpp"
#include "flucast/sampler.hpp"
#include "flucast/synth.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace flucast
{

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Columns: chain,iteration,pi,i_tot0,beta,eta,p_icu,kappa,log_posterior.
void write_draws_csv(std::ostream& out, const PosteriorDraws& draws);
/// Chains must appear in ascending order; throws std::runtime_error on malformed input.
PosteriorDraws read_draws_csv(std::istream& in);

/// Columns: week,q2.5,q25,q50,q75,q97.5,phase.
void write_summary_csv(std::ostream& out, const PredictiveSummary& summary);

/// Columns: week,s_end,incidence,expected,count.
void write_latent_csv(std::ostream& out, const SyntheticSeason& season);

std::string diagnostics_json(const DiagnosticsReport& report);

/// Posterior medians and 95% intervals, R0/Rn and Pr(kappa > 1).
std::string posterior_summary_json(const PosteriorDraws& draws, double gamma);

} // namespace flucast
