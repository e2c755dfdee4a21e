#pragma once

#include "flucast/diagnostics.hpp"
#include "flucast/posterior.hpp"
#include "flucast/sampler.hpp"
#include "flucast/series.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace flucast
{

inline constexpr std::array<double, 5> predictive_probs = {0.025, 0.25, 0.5, 0.75, 0.975};

enum class Phase { fitted, forecast };

struct WeekQuantiles {
    IsoWeek week;
    std::array<double, 5> q{}; // at predictive_probs
    Phase phase = Phase::fitted;

    double median() const { return q[2]; }
    double width95() const { return q[4] - q[0]; }

    bool operator==(const WeekQuantiles&) const = default;
};

struct PredictiveSummary {
    std::vector<WeekQuantiles> weeks;
    std::size_t used_draws    = 0;
    std::size_t dropped_draws = 0; // integration failures

    bool operator==(const PredictiveSummary&) const = default;
};

/**
 * Posterior predictive admissions: one negative binomial realisation per week
 * for every draw, summarised by empirical quantiles. The first `fitted_weeks`
 * weeks are labelled fitted, the rest forecast. Each draw uses its own random
 * stream keyed by (seed, draw index).
 */
PredictiveSummary posterior_predictive(std::span<const ParamVector> draws, const ModelSetup& model,
                                       std::span<const IsoWeek> weeks, std::size_t fitted_weeks,
                                       std::uint64_t seed, std::size_t threads = 1);

struct FitResult {
    PosteriorDraws draws;
    PredictiveSummary summary;
};

/// Retrospective fit of the whole series plus its posterior predictive bands.
FitResult fit_season(const SurveillanceSeries& data, const PriorSpec& spec, const ModelSetup& model,
                     const SamplerSettings& settings);

/**
 * Fits weeks 0..cut_index only and forecasts the remaining weeks of the series.
 * Throws std::domain_error when the cut precedes the first observed week.
 */
FitResult prospective_run(const SurveillanceSeries& data, std::size_t cut_index, const PriorSpec& spec,
                          const ModelSetup& model, const SamplerSettings& settings);

/// Week `week_of_new_year` of the calendar year following the season's start.
IsoWeek new_year_cut(const SurveillanceSeries& data, int week_of_new_year);

inline constexpr std::array<int, 4> prospective_cut_points = {3, 8, 13, 18};

struct ForecastScore {
    std::size_t n_weeks     = 0;
    double coverage95       = 0.0;
    double coverage50       = 0.0;
    double mean_abs_error   = 0.0; // of the predictive median
    double median_abs_error = 0.0;
};

/// Scores forecast-phase weeks against held-out counts aligned by week index.
ForecastScore score_forecast(const PredictiveSummary& summary, std::span<const std::optional<std::int64_t>> held_out);

} // namespace flucast
