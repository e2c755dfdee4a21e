#include "flucast/diagnostics.hpp"
#include "flucast/epi_model.hpp"
#include "flucast/forecast.hpp"
#include "flucast/observation.hpp"
#include "flucast/synth.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace flucast;

namespace
{

PriorSpec prior_named(const std::string& name)
{
    return PriorSpec::for_scenario(scenario_from_name(name));
}

py::dict params_dict(const ParamVector& theta)
{
    py::dict d;
    for (std::size_t k = 0; k < n_params; ++k) {
        d[py::str(std::string(param_names[k]))] = theta[k];
    }
    return d;
}

ParamVector params_from(const py::dict& d, ParamVector base)
{
    for (auto [key, value] : d) {
        base[param_from_name(key.cast<std::string>())] = value.cast<double>();
    }
    return base;
}

py::dict simulate(std::uint64_t seed, std::size_t n_weeks, const std::string& mode, const py::dict& truth)
{
    Scenario sc = mode_from_name(mode) == ScenarioMode::pandemic_hospital ? Scenario::pandemic() : Scenario::seasonal();
    sc.seed     = seed;
    sc.n_weeks  = n_weeks;
    sc.truth    = params_from(truth, sc.truth);
    SyntheticSeason s;
    {
        py::gil_scoped_release release;
        s = simulate_series(sc);
    }
    std::vector<std::string> weeks;
    std::vector<std::int64_t> counts;
    for (const auto& r : s.series.records) {
        weeks.push_back(format_iso_week(r.week));
        counts.push_back(r.count.value_or(0));
    }
    py::dict out;
    out["weeks"]     = weeks;
    out["counts"]    = counts;
    out["expected"]  = s.expected;
    out["incidence"] = s.incidence;
    out["truth"]     = params_dict(sc.truth);
    return out;
}

py::dict fit(const std::vector<std::optional<std::int64_t>>& counts, const std::string& prior, std::size_t chains,
             std::size_t iterations, std::size_t burn_in, std::size_t thin, std::uint64_t seed, std::size_t threads)
{
    SamplerSettings s;
    s.n_chains = chains;
    s.n_iter   = iterations;
    s.burn_in  = burn_in;
    s.thin     = thin;
    s.seed     = seed;
    s.threads  = threads;
    s.validate(n_params);
    const auto spec = prior_named(prior);
    ModelSetup model;
    model.calendar = default_holidays();
    model.calendar.check_within(static_cast<int>(7 * counts.size()));

    PosteriorDraws draws;
    {
        py::gil_scoped_release release;
        draws = mh_sample(counts, spec, model, s);
    }
    py::dict marginals;
    py::dict psrf;
    const bool can_diagnose = chains >= 2 && draws.chains.front().draws.size() >= 100;
    std::optional<DiagnosticsReport> report;
    if (can_diagnose) {
        report = diagnostics(draws);
    }
    for (std::size_t k = 0; k < n_params; ++k) {
        const py::str name(std::string(param_names[k]));
        marginals[name] = draws.marginal(static_cast<Param>(k));
        if (report) {
            psrf[name] = report->params[k].psrf;
        }
    }
    py::dict out;
    out["draws"] = marginals;
    out["psrf"]  = psrf;
    out["converged"] = report ? py::cast(report->converged()) : py::none();
    std::vector<double> lp;
    for (const auto& c : draws.chains) {
        lp.insert(lp.end(), c.log_posterior.begin(), c.log_posterior.end());
    }
    out["log_posterior"] = lp;
    return out;
}

} // namespace

PYBIND11_MODULE(_flucast, m)
{
    m.doc() = "SEEIIR influenza model with negative binomial admissions and adaptive MCMC";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<SamplerError>(m, "SamplerError", PyExc_RuntimeError);

    m.attr("__version__") = FLUCAST_VERSION;
    m.attr("param_names") = std::vector<std::string>(param_names.begin(), param_names.end());

    m.def(
        "reproduction_numbers",
        [](double beta, double pi, double gamma) {
            EpiParams p;
            p.beta   = beta;
            p.pi     = pi;
            p.gamma  = gamma;
            const auto r = reproduction_numbers(p);
            return py::make_tuple(r.r0, r.rn);
        },
        py::arg("beta"), py::arg("pi"), py::arg("gamma") = 0.5797, "Returns (R0, Rn).");

    m.def(
        "weekly_incidence",
        [](const py::dict& theta, std::size_t n_weeks, bool holidays, double n_pop) {
            const auto t = params_from(theta, Scenario::seasonal().truth);
            EpiParams p;
            p.pi     = t.pi();
            p.i_tot0 = t.i_tot0();
            p.beta   = t.beta();
            p.kappa  = t.kappa();
            p.n_pop  = n_pop;
            const auto cal = holidays ? default_holidays() : HolidayCalendar{};
            return weekly_incidence(integrate(p, cal, static_cast<int>(7 * n_weeks)));
        },
        py::arg("theta"), py::arg("n_weeks") = 33, py::arg("holidays") = true, py::arg("n_pop") = 54'551'450.0,
        "New infections per week; missing parameters default to the seasonal truth.");

    m.def(
        "delay_kernel",
        [](double mean_days, double shape, std::size_t w_max) {
            return default_delay_kernel(mean_days, shape, w_max).probabilities();
        },
        py::arg("mean_days") = 9.0, py::arg("shape") = 4.0, py::arg("w_max") = 4);

    m.def("negbin_logpmf", &negbin_logpmf, py::arg("x"), py::arg("mu"), py::arg("eta"));

    m.def(
        "log_prior",
        [](const py::dict& theta, const std::string& prior) {
            return log_prior(params_from(theta, ParamVector{}), prior_named(prior));
        },
        py::arg("theta"), py::arg("prior") = "informative");

    m.def("simulate", &simulate, py::arg("seed") = 1, py::arg("n_weeks") = 33, py::arg("mode") = "seasonal-icu",
          py::arg("truth") = py::dict(), "Synthetic season of weekly admissions.");

    m.def("fit", &fit, py::arg("counts"), py::arg("prior") = "informative", py::arg("chains") = 4,
          py::arg("iterations") = 100'000, py::arg("burn_in") = 20'000, py::arg("thin") = 10, py::arg("seed") = 1,
          py::arg("threads") = 0,
          "Posterior draws for weekly counts starting 2014-W40 (None marks a missing week).");
}
