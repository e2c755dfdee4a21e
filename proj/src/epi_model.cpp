#include "flucast/epi_model.hpp"

#include <cmath>
#include <string>

namespace flucast
{

namespace
{

using State = std::array<double, 6>;

State to_array(const CompartmentState& x)
{
    return {x.s, x.e1, x.e2, x.i1, x.i2, x.r};
}

CompartmentState from_array(const State& y, double t)
{
    return {t, y[0], y[1], y[2], y[3], y[4], y[5]};
}

// Right-hand side with the transmission rate already resolved for the current day.
inline State seeiir(const State& y, double beta_t, double sigma, double gamma, double n_pop)
{
    const double lambda = beta_t * (y[3] + y[4]) / n_pop;
    const double inf    = lambda * y[0];
    return {-inf,
            inf - sigma * y[1],
            sigma * y[1] - sigma * y[2],
            sigma * y[2] - gamma * y[3],
            gamma * y[3] - gamma * y[4],
            gamma * y[4]};
}

inline State axpy(const State& y, double h, const State& k)
{
    State out;
    for (std::size_t j = 0; j < 6; ++j) {
        out[j] = y[j] + h * k[j];
    }
    return out;
}

int steps_per_day(double step)
{
    if (!(step > 0.0) || step > 1.0) {
        throw std::invalid_argument("integration step must lie in (0, 1] days");
    }
    const double n = std::round(1.0 / step);
    if (std::abs(n * step - 1.0) > 1e-9) {
        throw std::invalid_argument("integration step must divide one day");
    }
    return static_cast<int>(n);
}

} // namespace

double beta_star(double beta, double kappa, double t, const HolidayCalendar& cal)
{
    return cal.contains(t) ? kappa * beta : beta;
}

double force_of_infection(const CompartmentState& state, double beta_t, double n_pop)
{
    if (!(n_pop > 0.0)) {
        throw std::domain_error("population size must be positive");
    }
    const double infectious = state.infectious();
    if (infectious == 0.0) {
        return 0.0;
    }
    return beta_t * infectious / n_pop;
}

Derivatives ode_rhs(const CompartmentState& state, const EpiParams& params, const HolidayCalendar& cal)
{
    const double beta_t = beta_star(params.beta, params.kappa, state.t, cal);
    const double lambda = force_of_infection(state, beta_t, params.n_pop);
    const double inf    = lambda * state.s;
    const double sigma  = params.sigma;
    const double gamma  = params.gamma;
    return {-inf,
            inf - sigma * state.e1,
            sigma * state.e1 - sigma * state.e2,
            sigma * state.e2 - gamma * state.i1,
            gamma * state.i1 - gamma * state.i2,
            gamma * state.i2};
}

CompartmentState initial_state(const EpiParams& params)
{
    const double half = 0.5 * params.i_tot0;
    CompartmentState x;
    x.t  = 0.0;
    x.e1 = half;
    x.e2 = half;
    x.i1 = half;
    x.i2 = half;
    x.r  = (1.0 - params.pi) * params.n_pop;
    x.s  = params.n_pop - x.e1 - x.e2 - x.i1 - x.i2 - x.r;
    if (x.s < 0.0 || x.r < 0.0 || params.i_tot0 < 0.0) {
        throw std::domain_error("initial state has negative compartments (pi = " + std::to_string(params.pi) +
                                ", i_tot0 = " + std::to_string(params.i_tot0) + ")");
    }
    return x;
}

Trajectory integrate(const EpiParams& params, const HolidayCalendar& cal, int horizon_days, double step)
{
    if (horizon_days < 0) {
        throw std::invalid_argument("horizon must be non-negative");
    }
    if (!(params.n_pop > 0.0)) {
        throw std::domain_error("population size must be positive");
    }
    const int n     = steps_per_day(step);
    const double h  = 1.0 / n;
    const double sg = params.sigma;
    const double gm = params.gamma;
    const double np = params.n_pop;

    Trajectory out;
    out.reserve(static_cast<std::size_t>(horizon_days) + 1);
    out.push_back(initial_state(params));
    State y = to_array(out.front());

    for (int day = 0; day < horizon_days; ++day) {
        const double bt = beta_star(params.beta, params.kappa, day, cal);
        for (int k = 0; k < n; ++k) {
            const State k1 = seeiir(y, bt, sg, gm, np);
            const State k2 = seeiir(axpy(y, 0.5 * h, k1), bt, sg, gm, np);
            const State k3 = seeiir(axpy(y, 0.5 * h, k2), bt, sg, gm, np);
            const State k4 = seeiir(axpy(y, h, k3), bt, sg, gm, np);
            for (std::size_t j = 0; j < 6; ++j) {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        for (double v : y) {
            if (!std::isfinite(v)) {
                throw IntegrationError("non-finite state on day " + std::to_string(day + 1));
            }
        }
        out.push_back(from_array(y, day + 1.0));
    }
    return out;
}

std::vector<double> weekly_incidence(std::span<const CompartmentState> trajectory)
{
    if (trajectory.size() < 8) {
        throw std::domain_error("trajectory must cover at least one week");
    }
    const std::size_t weeks = (trajectory.size() - 1) / 7;
    std::vector<double> out(weeks);
    for (std::size_t v = 0; v < weeks; ++v) {
        out[v] = trajectory[7 * v].s - trajectory[7 * v + 7].s;
    }
    return out;
}

ReproductionNumbers reproduction_numbers(const EpiParams& params)
{
    // two infectious stages of mean 1/gamma each: d_I = 2/gamma
    const double r0 = params.beta * 2.0 / params.gamma;
    return {r0, r0 * params.pi};
}

} // namespace flucast
