#pragma once

#include "flucast/holidays.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace flucast
{

/// Population in each SEEIIR compartment at day t.
struct CompartmentState {
    double t  = 0.0;
    double s  = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double r  = 0.0;

    double total() const { return s + e1 + e2 + i1 + i2 + r; }
    double infectious() const { return i1 + i2; }
};

/// Time derivatives ordered as (S, E1, E2, I1, I2, R).
using Derivatives = std::array<double, 6>;

struct EpiParams {
    double pi     = 1.0;    // initial susceptible proportion
    double i_tot0 = 0.0;    // I1(0) + I2(0)
    double beta   = 0.0;    // base transmission rate, per day
    double kappa  = 1.0;    // multiplier on beta during school holidays
    double sigma  = 1.0;    // latent stage rate, 2 / mean latent period
    double gamma  = 0.5797; // infectious stage rate, 2 / mean infectious period
    double n_pop  = 0.0;
};

struct ReproductionNumbers {
    double r0 = 0.0;
    double rn = 0.0;
};

/// Thrown when the integrated state stops being finite.
class IntegrationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using Trajectory = std::vector<CompartmentState>;

double beta_star(double beta, double kappa, double t, const HolidayCalendar& cal);

/// lambda = beta_t (I1 + I2) / N. Throws std::domain_error for N <= 0.
double force_of_infection(const CompartmentState& state, double beta_t, double n_pop);

Derivatives ode_rhs(const CompartmentState& state, const EpiParams& params, const HolidayCalendar& cal);

/// Seeds I1 = I2 = E1 = E2 = i_tot0 / 2 and R = (1 - pi) N; S takes the remainder.
/// Throws std::domain_error when that leaves S negative.
CompartmentState initial_state(const EpiParams& params);

/**
 * Classical fixed-step RK4 from initial_state(params) over [0, horizon_days].
 *
 * Integration proceeds one day at a time, restarting at every integer day so
 * that the piecewise constant transmission rate never changes inside a step.
 * The returned trajectory holds the state at days 0, 1, ..., horizon_days.
 */
Trajectory integrate(const EpiParams& params, const HolidayCalendar& cal, int horizon_days, double step = 0.1);

/// New infections per week: S(7v - 7) - S(7v) for v = 1..floor(days / 7).
std::vector<double> weekly_incidence(std::span<const CompartmentState> trajectory);

ReproductionNumbers reproduction_numbers(const EpiParams& params);

} // namespace flucast
