#pragma once

#include "flucast/diagnostics.hpp"
#include "flucast/epi_model.hpp"
#include "flucast/posterior.hpp"
#include "flucast/sampler.hpp"
#include "flucast/series.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace flucast
{

/// Pandemic mode only relabels the admission probability (hospital rather than ICU) and changes defaults.
enum class ScenarioMode { seasonal_icu, pandemic_hospital };

ScenarioMode mode_from_name(std::string_view name);
std::string_view mode_name(ScenarioMode mode);

/// England school holidays for the season starting 2014-W40 (Monday 29 September 2014).
HolidayCalendar default_holidays();

struct Scenario {
    ScenarioMode mode = ScenarioMode::seasonal_icu;
    /// p_icu holds the hospitalisation probability in pandemic mode.
    ParamVector truth;
    ModelSetup model;
    std::size_t n_weeks = 33;
    IsoWeek first_week{2014, 40};
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument when the truth lies outside the uninformative prior support
    /// (p_icu = 0 excepted).
    void validate() const;

    static Scenario seasonal();
    static Scenario pandemic();
};

/// Informative priors with the admission-probability prior moved one order of magnitude up.
PriorSpec pandemic_prior();

struct SyntheticSeason {
    SurveillanceSeries series;
    Trajectory trajectory;
    std::vector<double> incidence;
    std::vector<double> expected;
};

SyntheticSeason simulate_series(const Scenario& sc);

struct RecoveryEntry {
    Param param      = Param::pi;
    double truth     = 0.0;
    double median    = 0.0;
    double lower     = 0.0; // 2.5%
    double upper     = 0.0; // 97.5%
    bool in_interval = false;
    double contraction = 0.0; // posterior sd / prior sd
    double psrf        = 1.0;
};

struct RecoveryReport {
    std::vector<RecoveryEntry> entries;
    DiagnosticsReport diagnostics;
    bool valid = true; // false when an identified parameter has PSRF above threshold
    PosteriorDraws draws;
    SyntheticSeason season;

    const RecoveryEntry& operator[](Param p) const { return entries[static_cast<std::size_t>(p)]; }
};

inline constexpr std::array<Param, 4> default_identified = {Param::beta, Param::eta, Param::p_icu, Param::kappa};

/// Simulates `sc`, fits it, and checks every true value against its 95% credible interval.
RecoveryReport recovery_experiment(const Scenario& sc, const PriorSpec& spec, const SamplerSettings& settings,
                                   std::span<const Param> identified = default_identified);

} // namespace flucast
