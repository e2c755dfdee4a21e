#pragma once

#include "flucast/epi_model.hpp"
#include "flucast/observation.hpp"
#include "flucast/priors.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace flucast
{

/// Everything the likelihood needs besides theta and the data: fixed rates, population, calendar, kernel.
struct ModelSetup {
    double sigma = 1.0;
    double gamma = 0.5797;
    double n_pop = 54'551'450.0;
    HolidayCalendar calendar;
    DelayKernel kernel = default_delay_kernel();
    double step        = 0.1;

    bool operator==(const ModelSetup&) const = default;
};

EpiParams to_epi_params(const ParamVector& theta, const ModelSetup& model);

/// Weekly new infections over n_weeks weeks for the transmission part of theta.
std::vector<double> model_incidence(const ParamVector& theta, const ModelSetup& model, std::size_t n_weeks);

/// Expected admissions mu_w over n_weeks weeks.
std::vector<double> model_expected(const ParamVector& theta, const ModelSetup& model, std::size_t n_weeks);

using Observed = std::vector<std::optional<std::int64_t>>;

/**
 * log prior + negative binomial log-likelihood of the observed weeks.
 * Returns -inf outside the prior support (without solving the ODE) and when
 * integration fails. With no observed weeks the ODE is not solved either.
 */
double log_posterior(const ParamVector& theta, std::span<const std::optional<std::int64_t>> observed,
                     const PriorSpec& spec, const ModelSetup& model);

/**
 * Stateful log-posterior for one chain. Keeps the weekly incidence of the last
 * two transmission parameter sets so that updates touching only eta and p_icu
 * skip the ODE solve. Not shareable between threads.
 */
class PosteriorEvaluator
{
public:
    PosteriorEvaluator(Observed observed, PriorSpec spec, ModelSetup model);

    double operator()(const ParamVector& theta);

    std::size_t ode_solves() const { return m_solves; }
    std::size_t integration_failures() const { return m_failures; }
    const Observed& observed() const { return m_observed; }
    const PriorSpec& spec() const { return m_spec; }
    const ModelSetup& model() const { return m_model; }

private:
    struct CacheEntry {
        std::array<double, 4> key{};
        std::vector<double> incidence;
        bool valid = false;
    };

    const std::vector<double>* incidence_for(const ParamVector& theta);

    Observed m_observed;
    PriorSpec m_spec;
    ModelSetup m_model;
    bool m_any_observed = false;
    std::array<CacheEntry, 2> m_cache;
    std::size_t m_next_slot = 0;
    std::size_t m_solves    = 0;
    std::size_t m_failures  = 0;
};

} // namespace flucast
