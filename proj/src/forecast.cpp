#include "flucast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace flucast
{

PredictiveSummary posterior_predictive(std::span<const ParamVector> draws, const ModelSetup& model,
                                       std::span<const IsoWeek> weeks, std::size_t fitted_weeks,
                                       std::uint64_t seed, std::size_t threads)
{
    if (draws.empty()) {
        throw std::domain_error("posterior predictive needs at least one draw");
    }
    const std::size_t n_weeks = weeks.size();
    // row d holds the simulated counts of draw d; empty row = dropped
    std::vector<std::vector<double>> sims(draws.size());

    auto simulate = [&](std::size_t d) {
        std::vector<double> mu;
        try {
            mu = model_expected(draws[d], model, n_weeks);
        }
        catch (const std::exception&) {
            return;
        }
        Rng rng(chain_seed(seed ^ 0x9e3779b97f4a7c15ull, d));
        auto& row = sims[d];
        row.resize(n_weeks);
        for (std::size_t w = 0; w < n_weeks; ++w) {
            row[w] = static_cast<double>(negbin_sample(mu[w], draws[d].eta(), rng));
        }
    };

    threads = std::clamp<std::size_t>(threads, 1, draws.size());
    if (threads == 1) {
        for (std::size_t d = 0; d < draws.size(); ++d) {
            simulate(d);
        }
    }
    else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t d = t; d < draws.size(); d += threads) {
                    simulate(d);
                }
            });
        }
    }

    PredictiveSummary out;
    for (const auto& row : sims) {
        if (row.empty()) {
            ++out.dropped_draws;
        }
        else {
            ++out.used_draws;
        }
    }
    if (out.dropped_draws > 0) {
        std::cerr << "warning: " << out.dropped_draws << " posterior draws dropped after integration failure\n";
    }
    if (out.used_draws == 0) {
        throw std::runtime_error("every posterior draw failed to integrate");
    }

    std::vector<double> column;
    column.reserve(out.used_draws);
    for (std::size_t w = 0; w < n_weeks; ++w) {
        column.clear();
        for (const auto& row : sims) {
            if (!row.empty()) {
                column.push_back(row[w]);
            }
        }
        std::sort(column.begin(), column.end());
        WeekQuantiles wq;
        wq.week  = weeks[w];
        wq.phase = w < fitted_weeks ? Phase::fitted : Phase::forecast;
        for (std::size_t k = 0; k < predictive_probs.size(); ++k) {
            const double pos = predictive_probs[k] * static_cast<double>(column.size() - 1);
            const auto lo    = static_cast<std::size_t>(std::floor(pos));
            const auto hi    = std::min(lo + 1, column.size() - 1);
            wq.q[k]          = column[lo] + (pos - static_cast<double>(lo)) * (column[hi] - column[lo]);
        }
        out.weeks.push_back(wq);
    }
    return out;
}

namespace
{

std::vector<IsoWeek> week_labels(const SurveillanceSeries& data)
{
    std::vector<IsoWeek> out;
    out.reserve(data.size());
    for (const auto& rec : data.records) {
        out.push_back(rec.week);
    }
    return out;
}

FitResult fit_and_predict(const SurveillanceSeries& training, std::size_t fitted_weeks, const PriorSpec& spec,
                          const ModelSetup& model, const SamplerSettings& settings)
{
    FitResult result;
    result.draws       = mh_sample(training.observed(), spec, model, settings);
    const auto pooled  = result.draws.pooled();
    const auto labels  = week_labels(training);
    result.summary     = posterior_predictive(pooled, model, labels, fitted_weeks, settings.seed,
                                              settings.threads == 0 ? std::thread::hardware_concurrency()
                                                                    : settings.threads);
    return result;
}

} // namespace

FitResult fit_season(const SurveillanceSeries& data, const PriorSpec& spec, const ModelSetup& model,
                     const SamplerSettings& settings)
{
    return fit_and_predict(data, data.size(), spec, model, settings);
}

FitResult prospective_run(const SurveillanceSeries& data, std::size_t cut_index, const PriorSpec& spec,
                          const ModelSetup& model, const SamplerSettings& settings)
{
    if (cut_index >= data.size()) {
        throw std::domain_error("cut week lies beyond the end of the series");
    }
    const auto first = std::find_if(data.records.begin(), data.records.end(),
                                    [](const WeekRecord& r) { return r.count.has_value(); });
    if (first == data.records.end() || static_cast<std::size_t>(first - data.records.begin()) > cut_index) {
        throw std::domain_error("cut week precedes the first observation");
    }
    if (cut_index + 1 == data.size()) {
        return fit_season(data, spec, model, settings);
    }
    return fit_and_predict(data.truncated_after(cut_index), cut_index + 1, spec, model, settings);
}

IsoWeek new_year_cut(const SurveillanceSeries& data, int week_of_new_year)
{
    if (data.records.empty()) {
        throw std::domain_error("empty series");
    }
    const IsoWeek first = data.records.front().week;
    const int start_year = first.week >= season_first_week ? first.year : first.year - 1;
    return {start_year + 1, week_of_new_year};
}

ForecastScore score_forecast(const PredictiveSummary& summary, std::span<const std::optional<std::int64_t>> held_out)
{
    if (held_out.size() != summary.weeks.size()) {
        throw std::domain_error("held-out series must align with the predictive summary");
    }
    ForecastScore score;
    std::vector<double> errors;
    std::size_t in95 = 0;
    std::size_t in50 = 0;
    for (std::size_t w = 0; w < held_out.size(); ++w) {
        const auto& wq = summary.weeks[w];
        if (wq.phase != Phase::forecast || !held_out[w]) {
            continue;
        }
        const double x = static_cast<double>(*held_out[w]);
        in95 += (x >= wq.q[0] && x <= wq.q[4]) ? 1 : 0;
        in50 += (x >= wq.q[1] && x <= wq.q[3]) ? 1 : 0;
        errors.push_back(std::abs(x - wq.median()));
    }
    if (errors.empty()) {
        throw std::domain_error("no held-out week overlaps the forecast period");
    }
    score.n_weeks    = errors.size();
    const double n   = static_cast<double>(errors.size());
    score.coverage95 = static_cast<double>(in95) / n;
    score.coverage50 = static_cast<double>(in50) / n;
    double total     = 0.0;
    for (double e : errors) {
        total += e;
    }
    score.mean_abs_error   = total / n;
    score.median_abs_error = quantile(errors, 0.5);
    return score;
}

} // namespace flucast
