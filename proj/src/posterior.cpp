#include "flucast/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace flucast
{

namespace
{

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

bool any_observed(std::span<const std::optional<std::int64_t>> observed)
{
    return std::any_of(observed.begin(), observed.end(), [](const auto& x) { return x.has_value(); });
}

} // namespace

EpiParams to_epi_params(const ParamVector& theta, const ModelSetup& model)
{
    EpiParams p;
    p.pi     = theta.pi();
    p.i_tot0 = theta.i_tot0();
    p.beta   = theta.beta();
    p.kappa  = theta.kappa();
    p.sigma  = model.sigma;
    p.gamma  = model.gamma;
    p.n_pop  = model.n_pop;
    return p;
}

std::vector<double> model_incidence(const ParamVector& theta, const ModelSetup& model, std::size_t n_weeks)
{
    const auto traj = integrate(to_epi_params(theta, model), model.calendar, static_cast<int>(7 * n_weeks), model.step);
    return weekly_incidence(traj);
}

std::vector<double> model_expected(const ParamVector& theta, const ModelSetup& model, std::size_t n_weeks)
{
    return expected_admissions(model_incidence(theta, model, n_weeks), model.kernel, theta.p_icu());
}

double log_posterior(const ParamVector& theta, std::span<const std::optional<std::int64_t>> observed,
                     const PriorSpec& spec, const ModelSetup& model)
{
    const double lp = log_prior(theta, spec);
    if (lp == neg_inf || !any_observed(observed)) {
        return lp;
    }
    try {
        const auto mu = model_expected(theta, model, observed.size());
        return lp + series_loglik(observed, mu, theta.eta());
    }
    catch (const IntegrationError& e) {
        std::cerr << "warning: " << e.what() << "; proposal rejected\n";
        return neg_inf;
    }
    catch (const std::domain_error&) {
        return neg_inf;
    }
}

PosteriorEvaluator::PosteriorEvaluator(Observed observed, PriorSpec spec, ModelSetup model)
    : m_observed(std::move(observed))
    , m_spec(std::move(spec))
    , m_model(std::move(model))
    , m_any_observed(any_observed(m_observed))
{
}

const std::vector<double>* PosteriorEvaluator::incidence_for(const ParamVector& theta)
{
    const std::array<double, 4> key = {theta.pi(), theta.i_tot0(), theta.beta(), theta.kappa()};
    for (const auto& entry : m_cache) {
        if (entry.valid && entry.key == key) {
            return &entry.incidence;
        }
    }
    auto& slot = m_cache[m_next_slot];
    m_next_slot = (m_next_slot + 1) % m_cache.size();
    slot.valid  = false;
    ++m_solves;
    try {
        slot.incidence = model_incidence(theta, m_model, m_observed.size());
    }
    catch (const std::exception&) {
        ++m_failures;
        return nullptr;
    }
    slot.key   = key;
    slot.valid = true;
    return &slot.incidence;
}

double PosteriorEvaluator::operator()(const ParamVector& theta)
{
    const double lp = log_prior(theta, m_spec);
    if (lp == neg_inf || !m_any_observed) {
        return lp;
    }
    const auto* incidence = incidence_for(theta);
    if (incidence == nullptr) {
        return neg_inf;
    }
    const auto mu = expected_admissions(*incidence, m_model.kernel, theta.p_icu());
    return lp + series_loglik(m_observed, mu, theta.eta());
}

} // namespace flucast
