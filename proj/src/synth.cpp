#include "flucast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flucast
{

ScenarioMode mode_from_name(std::string_view name)
{
    if (name == "seasonal-icu") {
        return ScenarioMode::seasonal_icu;
    }
    if (name == "pandemic-hospital") {
        return ScenarioMode::pandemic_hospital;
    }
    throw std::invalid_argument("mode must be 'seasonal-icu' or 'pandemic-hospital', got '" + std::string(name) +
                                "'");
}

std::string_view mode_name(ScenarioMode mode)
{
    return mode == ScenarioMode::pandemic_hospital ? "pandemic-hospital" : "seasonal-icu";
}

HolidayCalendar default_holidays()
{
    // October half term, Christmas, February half term, Easter (weekends included)
    return HolidayCalendar({{26, 34}, {82, 97}, {138, 146}, {180, 195}});
}

void Scenario::validate() const
{
    // p = 0 is accepted as a degenerate no-admission scenario
    ParamVector check = truth;
    if (check[Param::p_icu] == 0.0) {
        check[Param::p_icu] = 1.0;
    }
    if (!in_support(check, PriorSpec::uninformative())) {
        throw std::invalid_argument("scenario truth lies outside the prior support");
    }
    if (n_weeks < 1) {
        throw std::invalid_argument("scenario needs at least one week");
    }
    model.calendar.check_within(static_cast<int>(7 * n_weeks));
}

Scenario Scenario::seasonal()
{
    Scenario sc;
    sc.mode           = ScenarioMode::seasonal_icu;
    sc.truth          = make_params(0.401, 5000.0, 0.9, 3.0, 0.000239, 1.0);
    sc.model.n_pop    = 54'551'450.0;
    sc.model.calendar = default_holidays();
    sc.model.kernel   = default_delay_kernel(9.0, 4.0, 4);
    return sc;
}

Scenario Scenario::pandemic()
{
    Scenario sc                = seasonal();
    sc.mode                    = ScenarioMode::pandemic_hospital;
    sc.truth[Param::p_icu]     = 0.00239;
    sc.model.kernel            = default_delay_kernel(5.0, 4.0, 4);
    return sc;
}

PriorSpec pandemic_prior()
{
    PriorSpec spec     = PriorSpec::informative();
    spec[Param::p_icu] = Prior::lognormal(std::log(0.00239), 1.0, 0.0, 1.0);
    return spec;
}

SyntheticSeason simulate_series(const Scenario& sc)
{
    sc.validate();
    SyntheticSeason out;
    out.trajectory = integrate(to_epi_params(sc.truth, sc.model), sc.model.calendar, static_cast<int>(7 * sc.n_weeks),
                               sc.model.step);
    out.incidence  = weekly_incidence(out.trajectory);
    out.expected   = expected_admissions(out.incidence, sc.model.kernel, sc.truth.p_icu());

    out.series.label    = std::string(mode_name(sc.mode)) + "-synthetic";
    out.series.calendar = sc.model.calendar;
    out.series.records  = consecutive_weeks(sc.first_week, sc.n_weeks);
    Rng rng(sc.seed);
    for (std::size_t w = 0; w < sc.n_weeks; ++w) {
        out.series.records[w].count = negbin_sample(out.expected[w], sc.truth.eta(), rng);
    }
    return out;
}

RecoveryReport recovery_experiment(const Scenario& sc, const PriorSpec& spec, const SamplerSettings& settings,
                                   std::span<const Param> identified)
{
    RecoveryReport report;
    report.season      = simulate_series(sc);
    report.draws       = mh_sample(report.season.series.observed(), spec, sc.model, settings);
    report.diagnostics = diagnostics(report.draws);

    for (std::size_t k = 0; k < n_params; ++k) {
        const auto p       = static_cast<Param>(k);
        const auto samples = report.draws.marginal(p);
        RecoveryEntry e;
        e.param       = p;
        e.truth       = sc.truth[k];
        e.median      = quantile(samples, 0.5);
        e.lower       = quantile(samples, 0.025);
        e.upper       = quantile(samples, 0.975);
        e.in_interval = e.truth >= e.lower && e.truth <= e.upper;
        double mean   = 0.0;
        for (double x : samples) {
            mean += x;
        }
        mean /= static_cast<double>(samples.size());
        double var = 0.0;
        for (double x : samples) {
            var += (x - mean) * (x - mean);
        }
        var /= static_cast<double>(samples.size() - 1);
        e.contraction = std::sqrt(var) / spec[p].sd();
        e.psrf        = report.diagnostics.params[k].psrf;
        report.entries.push_back(e);
    }
    for (Param p : identified) {
        if (report.diagnostics[p].flagged) {
            report.valid = false;
        }
    }
    return report;
}

} // namespace flucast
