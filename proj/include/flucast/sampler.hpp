#pragma once

#include "flucast/posterior.hpp"
#include "flucast/priors.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace flucast
{

/// Indices of parameters updated jointly.
using Block = std::vector<std::size_t>;

/// {pi, i_tot0, beta, kappa} and {p_icu, eta}.
std::vector<Block> default_blocks();

/// Throws std::invalid_argument unless the blocks partition 0..dim-1.
void validate_blocks(const std::vector<Block>& blocks, std::size_t dim);

struct SamplerSettings {
    std::size_t n_iter   = 100'000; // total iterations per chain, burn-in included
    std::size_t burn_in  = 20'000;
    std::size_t thin     = 10;
    std::size_t n_chains = 4;
    std::uint64_t seed   = 1;
    std::vector<Block> blocks = default_blocks();
    std::size_t init_candidates = 50; // prior draws scored to pick each chain's start
    double initial_sd           = 0.1; // proposal sd on the unconstrained scale before adaptation
    std::size_t optimize_evaluations = 5000; // Nelder-Mead budget for polishing each chain's start; 0 disables
    /// Adds a scaling move along the curve (pi, i_tot0, beta, p_icu) -> (c pi, c i_tot0, beta / c, p_icu / c),
    /// on which the likelihood is constant.
    bool ridge_move = true;
    double rescue_gap = 20.0; // chains starting this many log units below the best start restart from it
    std::size_t threads         = 0;   // 0: one per chain up to hardware concurrency

    void validate(std::size_t dim) const;
};

class SamplerError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Retained states of one chain on the sampler's working scale.
struct ChainTrace {
    std::vector<std::vector<double>> states;
    std::vector<double> log_density;
    std::vector<std::size_t> iterations;
    std::vector<std::size_t> accepted; // per block, after burn-in
    std::vector<std::size_t> proposed; // per block, after burn-in
    std::vector<double> log_scales;    // per block, frozen value
};

using LogDensity = std::function<double(std::span<const double>)>;

/**
 * One-dimensional move family x -> x'(eps) with eps ~ N(0, s^2). `propose` fills
 * `to` from `from` and returns the log Hastings correction, -inf to reject.
 * The family must be symmetric in the sense that eps and -eps are inverse moves.
 */
struct ScalarMove {
    std::function<double(const std::vector<double>& from, double eps, std::vector<double>& to)> propose;
};

/**
 * Block-wise Gaussian random-walk Metropolis-Hastings on R^d.
 *
 * During burn-in each block's proposal covariance tracks the empirical
 * covariance of the chain and a Robbins-Monro log-scale steers its acceptance
 * rate toward 0.234 (0.44 for single-parameter blocks). Both are frozen after
 * burn-in. Each iteration ends with one update per entry of `moves`, its scale
 * tuned toward acceptance 0.44 the same way. Per-block and per-move counts are
 * reported in that order. Throws SamplerError when a block accepts nothing
 * after burn-in.
 */
ChainTrace run_block_mh(const LogDensity& target, std::vector<double> start, const SamplerSettings& settings,
                        Rng& rng, std::span<const ScalarMove> moves = {});

/// Log-scale direction of the likelihood-preserving curve, indexed by Param.
std::array<double, n_params> ridge_direction();

/// Nelder-Mead ascent from `start`, restarting the simplex while restarts still improve the
/// optimum, within `max_evaluations` target calls. Returns `start` if nothing better is found.
std::vector<double> maximize_log_density(const LogDensity& target, std::vector<double> start,
                                         std::size_t max_evaluations, double initial_step = 1.0);

/// 64-bit seed for chain `chain` derived from the run seed.
std::uint64_t chain_seed(std::uint64_t seed, std::size_t chain);

struct ChainDraws {
    std::uint64_t seed = 0;
    std::vector<std::size_t> iterations;
    std::vector<ParamVector> draws;
    std::vector<double> log_posterior;
    std::vector<std::size_t> accepted;
    std::vector<std::size_t> proposed;

    bool operator==(const ChainDraws&) const = default;
};

struct PosteriorDraws {
    std::size_t n_iter  = 0;
    std::size_t burn_in = 0;
    std::size_t thin    = 1;
    std::vector<ChainDraws> chains;

    std::size_t total_draws() const;
    std::vector<ParamVector> pooled() const;
    /// Pooled draws of one parameter.
    std::vector<double> marginal(Param p) const;

    bool operator==(const PosteriorDraws&) const = default;
};

/// Natural-scale log target; one instance per chain.
using NaturalTarget        = std::function<double(const ParamVector&)>;
using NaturalTargetFactory = std::function<NaturalTarget()>;

/**
 * Runs settings.n_chains independent chains of run_block_mh on the
 * unconstrained scale of `spec`. Each chain starts from the best of
 * settings.init_candidates prior draws, polished by maximize_log_density;
 * starts more than settings.rescue_gap below the best one are moved to it.
 */
PosteriorDraws sample_posterior(const NaturalTargetFactory& make_target, const PriorSpec& spec,
                                const SamplerSettings& settings);

/// Posterior sampling for observed weekly admissions.
PosteriorDraws mh_sample(const Observed& observed, const PriorSpec& spec, const ModelSetup& model,
                         const SamplerSettings& settings);

} // namespace flucast
