#include "flucast/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <thread>

namespace flucast
{

namespace
{

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Running mean and covariance of the full state.
class Moments
{
public:
    explicit Moments(std::size_t dim)
        : m_mean(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)))
        , m_m2(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)))
    {
    }

    void reset()
    {
        m_n = 0;
        m_mean.setZero();
        m_m2.setZero();
    }

    void add(const std::vector<double>& x)
    {
        const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
        ++m_n;
        const Eigen::VectorXd delta = v - m_mean;
        m_mean += delta / static_cast<double>(m_n);
        m_m2 += delta * (v - m_mean).transpose();
    }

    std::size_t count() const { return m_n; }

    Eigen::MatrixXd covariance(const Block& block) const
    {
        const auto d = static_cast<Eigen::Index>(block.size());
        Eigen::MatrixXd c(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index b = 0; b < d; ++b) {
                c(a, b) = m_m2(static_cast<Eigen::Index>(block[a]), static_cast<Eigen::Index>(block[b])) /
                          static_cast<double>(m_n - 1);
            }
        }
        return c;
    }

private:
    std::size_t m_n = 0;
    Eigen::VectorXd m_mean;
    Eigen::MatrixXd m_m2;
};

struct BlockState {
    Block indices;
    Eigen::MatrixXd chol; // lower Cholesky factor of the base covariance
    double log_scale = 0.0;
    double target_rate = 0.234;
    std::size_t accepted = 0;
    std::size_t proposed = 0;
};

Eigen::MatrixXd stable_cholesky(Eigen::MatrixXd cov)
{
    const auto d = cov.rows();
    double jitter = 1e-10 * std::max(1e-300, cov.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 20; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success) {
            return llt.matrixL();
        }
        cov += jitter * Eigen::MatrixXd::Identity(d, d);
        jitter *= 10.0;
    }
    return Eigen::MatrixXd::Identity(d, d) * std::sqrt(std::max(1e-12, cov.diagonal().maxCoeff()));
}

} // namespace

std::vector<Block> default_blocks()
{
    const auto idx = [](Param p) { return static_cast<std::size_t>(p); };
    return {{idx(Param::pi), idx(Param::i_tot0), idx(Param::beta), idx(Param::kappa)},
            {idx(Param::p_icu), idx(Param::eta)}};
}

std::array<double, n_params> ridge_direction()
{
    std::array<double, n_params> d{};
    d[static_cast<std::size_t>(Param::pi)]     = 1.0;
    d[static_cast<std::size_t>(Param::i_tot0)] = 1.0;
    d[static_cast<std::size_t>(Param::beta)]   = -1.0;
    d[static_cast<std::size_t>(Param::p_icu)]  = -1.0;
    return d;
}

void validate_blocks(const std::vector<Block>& blocks, std::size_t dim)
{
    std::vector<int> seen(dim, 0);
    for (const auto& block : blocks) {
        if (block.empty()) {
            throw std::invalid_argument("sampler blocks must not be empty");
        }
        for (std::size_t k : block) {
            if (k >= dim) {
                throw std::invalid_argument("sampler block index " + std::to_string(k) + " out of range");
            }
            ++seen[k];
        }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
        throw std::invalid_argument("sampler blocks must partition the parameters");
    }
}

void SamplerSettings::validate(std::size_t dim) const
{
    if (n_iter < 1) {
        throw std::invalid_argument("need at least one iteration");
    }
    if (burn_in >= n_iter) {
        throw std::invalid_argument("burn-in must be shorter than the chain");
    }
    if (thin < 1 || n_chains < 1) {
        throw std::invalid_argument("thinning and chain count must be positive");
    }
    if (!(initial_sd > 0.0)) {
        throw std::invalid_argument("initial proposal sd must be positive");
    }
    if (!(rescue_gap > 0.0)) {
        throw std::invalid_argument("rescue gap must be positive");
    }
    validate_blocks(blocks, dim);
}

ChainTrace run_block_mh(const LogDensity& target, std::vector<double> start, const SamplerSettings& settings,
                        Rng& rng, std::span<const ScalarMove> moves)
{
    const std::size_t dim = start.size();
    settings.validate(dim);

    std::vector<BlockState> blocks;
    for (const auto& idx : settings.blocks) {
        BlockState b;
        b.indices     = idx;
        const auto d  = static_cast<Eigen::Index>(idx.size());
        b.chol        = Eigen::MatrixXd::Identity(d, d) * settings.initial_sd;
        b.target_rate = idx.size() == 1 ? 0.44 : 0.234;
        blocks.push_back(std::move(b));
    }
    struct MoveState {
        double log_scale     = 0.0;
        std::size_t accepted = 0;
        std::size_t proposed = 0;
    };
    std::vector<MoveState> move_state(moves.size(), MoveState{std::log(settings.initial_sd)});

    std::vector<double> current = std::move(start);
    double current_lp           = target(current);
    if (!std::isfinite(current_lp)) {
        throw SamplerError("chain start has non-finite log density");
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Moments moments(dim);
    // covariance estimation restarts at these iterations to forget the transient
    const std::size_t restart_a = settings.burn_in / 8;
    const std::size_t restart_b = settings.burn_in / 4;
    const std::size_t min_window = std::max<std::size_t>(100, 10 * dim);
    // keeps a chain that sat still early in burn-in from freezing its proposal
    constexpr double proposal_floor = 1e-4;

    ChainTrace trace;
    const std::size_t kept = (settings.n_iter - settings.burn_in) / settings.thin;
    trace.states.reserve(kept);
    trace.log_density.reserve(kept);
    trace.iterations.reserve(kept);

    std::vector<double> proposal(dim);
    Eigen::VectorXd z;
    for (std::size_t t = 1; t <= settings.n_iter; ++t) {
        const bool adapting = t <= settings.burn_in;
        for (auto& b : blocks) {
            const auto d = static_cast<Eigen::Index>(b.indices.size());
            z.resize(d);
            for (Eigen::Index k = 0; k < d; ++k) {
                z(k) = normal(rng);
            }
            const Eigen::VectorXd step = std::exp(b.log_scale) * (b.chol * z);
            proposal                   = current;
            for (Eigen::Index k = 0; k < d; ++k) {
                proposal[b.indices[static_cast<std::size_t>(k)]] += step(k);
            }
            const double prop_lp = target(proposal);
            const double log_ratio = prop_lp - current_lp;
            double accept_prob     = 0.0;
            if (prop_lp != neg_inf && !std::isnan(prop_lp)) {
                accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
            }
            const bool accept = accept_prob >= 1.0 || unif(rng) < accept_prob;
            if (accept) {
                current.swap(proposal);
                current_lp = prop_lp;
            }
            if (adapting) {
                const double gain = std::pow(static_cast<double>(t), -0.6);
                b.log_scale       = std::clamp(b.log_scale + gain * (accept_prob - b.target_rate), -30.0, 10.0);
            }
            else {
                ++b.proposed;
                b.accepted += accept ? 1 : 0;
            }
        }

        for (std::size_t m = 0; m < moves.size(); ++m) {
            auto& ms         = move_state[m];
            const double eps = std::exp(ms.log_scale) * normal(rng);
            proposal         = current;
            const double correction = moves[m].propose(current, eps, proposal);
            double accept_prob      = 0.0;
            double prop_lp          = neg_inf;
            if (correction != neg_inf && !std::isnan(correction)) {
                prop_lp = target(proposal);
                if (prop_lp != neg_inf && !std::isnan(prop_lp)) {
                    const double log_ratio = prop_lp - current_lp + correction;
                    accept_prob            = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
                }
            }
            const bool accept = accept_prob >= 1.0 || unif(rng) < accept_prob;
            if (accept) {
                current.swap(proposal);
                current_lp = prop_lp;
            }
            if (adapting) {
                const double gain = std::pow(static_cast<double>(t), -0.6);
                ms.log_scale      = std::clamp(ms.log_scale + gain * (accept_prob - 0.44), -30.0, 10.0);
            }
            else {
                ++ms.proposed;
                ms.accepted += accept ? 1 : 0;
            }
        }

        if (adapting) {
            if (t == restart_a || t == restart_b) {
                moments.reset();
            }
            moments.add(current);
            if (t % 100 == 0 && moments.count() >= min_window) {
                for (auto& b : blocks) {
                    const double d = static_cast<double>(b.indices.size());
                    Eigen::MatrixXd cov = moments.covariance(b.indices);
                    cov.diagonal().array() += proposal_floor;
                    b.chol = stable_cholesky(cov * (2.38 * 2.38 / d));
                }
            }
        }
        else if ((t - settings.burn_in) % settings.thin == 0) {
            trace.states.push_back(current);
            trace.log_density.push_back(current_lp);
            trace.iterations.push_back(t);
        }
    }

    for (const auto& b : blocks) {
        trace.accepted.push_back(b.accepted);
        trace.proposed.push_back(b.proposed);
        trace.log_scales.push_back(b.log_scale);
        if (b.proposed > 0 && b.accepted == 0) {
            throw SamplerError("a sampler block rejected every proposal after burn-in");
        }
    }
    for (const auto& ms : move_state) {
        trace.accepted.push_back(ms.accepted);
        trace.proposed.push_back(ms.proposed);
        trace.log_scales.push_back(ms.log_scale);
    }
    return trace;
}

namespace
{

struct SimplexTarget {
    const LogDensity* target;
    std::vector<double> buffer;
    std::size_t evaluations = 0;
};

double negated_target(const gsl_vector* x, void* params)
{
    auto* st = static_cast<SimplexTarget*>(params);
    for (std::size_t k = 0; k < st->buffer.size(); ++k) {
        st->buffer[k] = gsl_vector_get(x, k);
    }
    ++st->evaluations;
    const double lp = (*st->target)(st->buffer);
    // finite stand-in for -inf keeps the simplex arithmetic well defined
    return std::isfinite(lp) ? -lp : 1e100;
}

struct VectorFree {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct SolverFree {
    void operator()(gsl_multimin_fminimizer* s) const { gsl_multimin_fminimizer_free(s); }
};
using GslVector = std::unique_ptr<gsl_vector, VectorFree>;
using GslSolver = std::unique_ptr<gsl_multimin_fminimizer, SolverFree>;

} // namespace

std::vector<double> maximize_log_density(const LogDensity& target, std::vector<double> start,
                                         std::size_t max_evaluations, double initial_step)
{
    const std::size_t dim = start.size();
    std::vector<double> best = start;
    double best_lp           = target(start);
    SimplexTarget st{&target, std::vector<double>(dim)};
    gsl_multimin_function fn{&negated_target, dim, &st};

    GslVector x(gsl_vector_alloc(dim));
    GslVector step(gsl_vector_alloc(dim));
    GslSolver solver(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
    gsl_vector_set_all(step.get(), initial_step);

    // a collapsed simplex is rebuilt around its best vertex until that stops paying off
    while (st.evaluations < max_evaluations) {
        for (std::size_t k = 0; k < dim; ++k) {
            gsl_vector_set(x.get(), k, best[k]);
        }
        gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());
        while (st.evaluations < max_evaluations) {
            if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) {
                break;
            }
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-6) == GSL_SUCCESS) {
                break;
            }
        }
        const double lp = -solver->fval;
        if (!(lp > best_lp + 1e-3)) {
            break;
        }
        best_lp = lp;
        for (std::size_t k = 0; k < dim; ++k) {
            best[k] = gsl_vector_get(solver->x, k);
        }
    }
    return std::isfinite(target(best)) ? best : start;
}

std::uint64_t chain_seed(std::uint64_t seed, std::size_t chain)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chain), 0x5eedu};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::size_t PosteriorDraws::total_draws() const
{
    std::size_t n = 0;
    for (const auto& c : chains) {
        n += c.draws.size();
    }
    return n;
}

std::vector<ParamVector> PosteriorDraws::pooled() const
{
    std::vector<ParamVector> out;
    out.reserve(total_draws());
    for (const auto& c : chains) {
        out.insert(out.end(), c.draws.begin(), c.draws.end());
    }
    return out;
}

std::vector<double> PosteriorDraws::marginal(Param p) const
{
    std::vector<double> out;
    out.reserve(total_draws());
    for (const auto& c : chains) {
        for (const auto& d : c.draws) {
            out.push_back(d[p]);
        }
    }
    return out;
}

namespace
{

// runs job(c) for c in [0, n) on up to `threads` workers; rethrows the first failure
void for_each_chain(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job)
{
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t c) {
        try {
            job(c);
        }
        catch (...) {
            errors[c] = std::current_exception();
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t c = 0; c < n; ++c) {
            guarded(c);
        }
    }
    else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < n; c += threads) {
                    guarded(c);
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

PosteriorDraws sample_posterior(const NaturalTargetFactory& make_target, const PriorSpec& spec,
                                const SamplerSettings& settings)
{
    settings.validate(n_params);

    PosteriorDraws out;
    out.n_iter  = settings.n_iter;
    out.burn_in = settings.burn_in;
    out.thin    = settings.thin;
    out.chains.resize(settings.n_chains);

    struct ChainState {
        NaturalTarget natural;
        LogDensity working;
        Rng rng;
        std::vector<double> start;
        double start_lp = neg_inf;
    };
    std::vector<ChainState> state(settings.n_chains);

    for_each_chain(settings.n_chains, settings.threads, [&](std::size_t c) {
        auto& st            = state[c];
        out.chains[c].seed  = chain_seed(settings.seed, c);
        st.rng.seed(out.chains[c].seed);
        st.natural = make_target();
        st.working = [&spec, natural = st.natural](std::span<const double> u) {
            const ParamVector theta = from_unconstrained(u, spec);
            const double lp         = natural(theta);
            if (lp == neg_inf) {
                return lp;
            }
            return lp + log_jacobian(u, spec);
        };

        ParamVector best;
        double best_lp = neg_inf;
        for (std::size_t k = 0; k < std::max<std::size_t>(1, settings.init_candidates); ++k) {
            const ParamVector candidate = sample_prior(spec, st.rng);
            const double lp             = st.natural(candidate);
            if (lp > best_lp) {
                best_lp = lp;
                best    = candidate;
            }
        }
        if (!std::isfinite(best_lp)) {
            throw SamplerError("no prior draw gave a finite log posterior");
        }
        const auto u0 = to_unconstrained(best, spec);
        st.start.assign(u0.begin(), u0.end());
        if (settings.optimize_evaluations > 0) {
            st.start = maximize_log_density(st.working, std::move(st.start), settings.optimize_evaluations);
        }
        st.start_lp = st.working(st.start);
    });

    // a start far below the best one sits in a minor mode the chain rarely leaves
    std::size_t lead = 0;
    for (std::size_t c = 1; c < settings.n_chains; ++c) {
        if (state[c].start_lp > state[lead].start_lp) {
            lead = c;
        }
    }
    for (auto& st : state) {
        if (st.start_lp < state[lead].start_lp - settings.rescue_gap) {
            st.start = state[lead].start;
        }
    }

    std::vector<ScalarMove> moves;
    if (settings.ridge_move) {
        moves.push_back({[&spec, dir = ridge_direction()](const std::vector<double>& from, double eps,
                                                           std::vector<double>& to) {
            // symmetric in log(theta); the correction converts to the working scale
            double correction = 0.0;
            for (std::size_t k = 0; k < n_params; ++k) {
                if (dir[k] == 0.0) {
                    continue;
                }
                const Prior& prior = spec.priors[k];
                const double x     = prior.from_unconstrained(from[k]) * std::exp(dir[k] * eps);
                if (!prior.in_support(x)) {
                    return neg_inf;
                }
                to[k] = prior.to_unconstrained(x);
                if (!std::isfinite(to[k])) {
                    return neg_inf;
                }
                correction += prior.log_jacobian(from[k]) - prior.log_jacobian(to[k]) + dir[k] * eps;
            }
            return correction;
        }});
    }

    for_each_chain(settings.n_chains, settings.threads, [&](std::size_t c) {
        auto& st    = state[c];
        auto& chain = out.chains[c];
        auto trace  = run_block_mh(st.working, st.start, settings, st.rng, moves);

        chain.iterations = std::move(trace.iterations);
        chain.accepted   = std::move(trace.accepted);
        chain.proposed   = std::move(trace.proposed);
        chain.draws.reserve(trace.states.size());
        chain.log_posterior.reserve(trace.states.size());
        for (const auto& u : trace.states) {
            const ParamVector theta = from_unconstrained(u, spec);
            chain.draws.push_back(theta);
            // stored value is the natural-scale log posterior, without the Jacobian
            chain.log_posterior.push_back(st.natural(theta));
        }
    });
    return out;
}

PosteriorDraws mh_sample(const Observed& observed, const PriorSpec& spec, const ModelSetup& model,
                         const SamplerSettings& settings)
{
    const NaturalTargetFactory factory = [&]() -> NaturalTarget {
        auto evaluator = std::make_shared<PosteriorEvaluator>(observed, spec, model);
        return [evaluator](const ParamVector& theta) { return (*evaluator)(theta); };
    };
    return sample_posterior(factory, spec, settings);
}

} // namespace flucast
