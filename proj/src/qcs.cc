#include "qcsync/qcs.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcsync/errors.h"
#include "qcsync/purify.h"

namespace qcsync::qcs {

using qmath::Complex;
using qmath::DensityMatrix;
using qmath::SquareMatrix;

void QCSConfig::validate() const {
    if (pairs < 1) throw ConfigError("QCSConfig: need at least one pair");
    if (!(omega > 0) || !std::isfinite(omega)) throw ConfigError("QCSConfig: omega must be positive");
    if (!std::isfinite(epsilon) || !std::isfinite(t_true)) throw ConfigError("QCSConfig: non-finite value");
}

bool QCSConfig::branch_ok() const {
    const double th = theta();
    return th > 0 && th < std::numbers::pi;
}

double zero_probability(double theta) {
    const double c = std::cos(theta / 2);
    return c * c;
}

// ------------------------------------------------------------ Protocol steps

SquareMatrix precession(double omega, double t) {
    return SquareMatrix::diagonal({std::polar(1.0, -omega * t / 2), std::polar(1.0, omega * t / 2)});
}

std::array<SquareMatrix, 2> alice_projectors(const frames::BasisFrame& alice) {
    const double s = 1.0 / std::sqrt(2.0);
    const qmath::PureState minus{s, -s};
    const qmath::PureState plus{s, s};
    return {frames::local_gate(minus.projector(), alice), frames::local_gate(plus.projector(), alice)};
}

int alice_measure(DensityMatrix& pair, const frames::BasisFrame& alice, Rng& rng) {
    const auto projectors = alice_projectors(alice);
    auto m = qmath::projective_measure(pair, projectors, 0, rng);
    pair = std::move(m.post_state);
    return m.outcome;
}

namespace {

SquareMatrix bob_rotation(int sigma, const SquareMatrix& evolution, const frames::BasisFrame& bob) {
    SquareMatrix u = evolution;
    if (sigma == 1) u = frames::local_gate(qmath::gates::Z(), bob) * u;
    return frames::local_gate(qmath::gates::H(), bob) * u;
}

const SquareMatrix kComputational[] = {qmath::gates::proj0(), qmath::gates::proj1()};

}  // namespace

int bob_readout(const DensityMatrix& pair, int sigma, const SquareMatrix& evolution,
                const frames::BasisFrame& bob, Rng& rng) {
    const DensityMatrix rotated = qmath::apply_unitary(pair, bob_rotation(sigma, evolution, bob), {1});
    return qmath::projective_measure(rotated, kComputational, 1, rng).outcome;
}

double zero_outcome_probability(const DensityMatrix& pair, const frames::BasisFrame& alice,
                                const frames::BasisFrame& bob, const SquareMatrix& evolution) {
    const auto projectors = alice_projectors(alice);
    const auto alice_probs = qmath::outcome_probabilities(pair, projectors, 0);
    double p0 = 0;
    for (int sigma = 0; sigma < 2; ++sigma) {
        if (alice_probs[sigma] < 1e-15) continue;
        const auto post = qmath::project(pair, projectors[sigma], 0).post_state;
        const auto rotated = qmath::apply_unitary(post, bob_rotation(sigma, evolution, bob), {1});
        p0 += alice_probs[sigma] * qmath::outcome_probabilities(rotated, kComputational, 1)[0];
    }
    return p0;
}

// -------------------------------------------------------------- Estimation

double estimate_time(std::int64_t k, std::int64_t pairs, double omega, double epsilon_assumed) {
    if (pairs < 1) throw ConfigError("estimate_time: need at least one pair");
    if (k < 0 || k > pairs) throw ConfigError("estimate_time: k outside [0, M]");
    if (!(omega > 0)) throw ConfigError("estimate_time: omega must be positive");
    const double x = static_cast<double>(2 * k - pairs) / static_cast<double>(pairs);
    return (std::acos(std::clamp(x, -1.0, 1.0)) - epsilon_assumed) / omega;
}

EstimateReport make_estimate(std::int64_t k, std::int64_t pairs, double omega, double epsilon_assumed) {
    EstimateReport r;
    r.k = k;
    r.pairs = pairs;
    r.t_hat = estimate_time(k, pairs, omega, epsilon_assumed);
    const double m = static_cast<double>(pairs);
    r.x = static_cast<double>(2 * k - pairs) / m;
    const double p0 = static_cast<double>(k) / m;
    r.stderr_x = std::sqrt(4 * p0 * (1 - p0) / m);
    r.stderr_x_bound = 1 / std::sqrt(m);
    const double sin_theta = std::sqrt(std::max(0.0, 1 - r.x * r.x));
    r.stderr_t = sin_theta > 0 ? r.stderr_x / (omega * sin_theta) : r.stderr_x_bound / omega;
    return r;
}

EstimateReport simulate_qcs_sampling(const QCSConfig& cfg, Rng& rng, SamplingMethod method) {
    cfg.validate();
    if (method == SamplingMethod::Auto) {
        method = cfg.pairs <= 1000 ? SamplingMethod::PerQubit : SamplingMethod::Binomial;
    }
    std::int64_t k = 0;
    if (method == SamplingMethod::PerQubit) {
        const auto shared = DensityMatrix::from_pure(frames::phase_singlet(cfg.epsilon));
        const auto evolution = precession(cfg.omega, cfg.t_true);
        for (std::int64_t i = 0; i < cfg.pairs; ++i) {
            DensityMatrix pair = shared;
            const int sigma = alice_measure(pair, frames::kReferenceFrame, rng);
            if (bob_readout(pair, sigma, evolution, frames::kReferenceFrame, rng) == 0) ++k;
        }
    } else {
        k = BinomialSampler(cfg.pairs, zero_probability(cfg.theta())).sample(rng);
    }
    auto r = make_estimate(k, cfg.pairs, cfg.omega);
    r.branch_ok = cfg.branch_ok();
    return r;
}

// ------------------------------------------------------------ Distributions

BinomialSampler::BinomialSampler(std::int64_t trials, double p) : trials_(trials) {
    if (trials < 0) throw ConfigError("BinomialSampler: negative trial count");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("BinomialSampler: p outside [0, 1]");
    if (p == 0.0 || trials == 0) {
        lo_ = 0;
        cdf_ = {1.0};
        return;
    }
    if (p == 1.0) {
        lo_ = trials;
        cdf_ = {1.0};
        return;
    }
    constexpr double kCutoff = 1e-18;  // relative to the mode weight
    const double q = 1.0 - p;
    const double n = static_cast<double>(trials);
    const auto mode = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((n + 1) * p)), 0, trials);

    std::vector<double> up{1.0};  // weights at mode, mode+1, ...
    for (std::int64_t k = mode; k < trials; ++k) {
        const double w = up.back() * (n - static_cast<double>(k)) / static_cast<double>(k + 1) * (p / q);
        if (w < kCutoff) break;
        up.push_back(w);
    }
    std::vector<double> down;  // weights at mode-1, mode-2, ...
    double w = 1.0;
    for (std::int64_t k = mode; k > 0; --k) {
        w *= static_cast<double>(k) / (n - static_cast<double>(k) + 1) * (q / p);
        if (w < kCutoff) break;
        down.push_back(w);
    }
    lo_ = mode - static_cast<std::int64_t>(down.size());
    cdf_.reserve(down.size() + up.size());
    double acc = 0;
    for (auto it = down.rbegin(); it != down.rend(); ++it) cdf_.push_back(acc += *it);
    for (double v : up) cdf_.push_back(acc += v);
    for (double& c : cdf_) c /= acc;
}

std::int64_t BinomialSampler::sample(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
    return lo_ + idx;
}

OutcomeDistribution outcome_distribution(std::int64_t pairs, double theta) {
    if (pairs < 1 || pairs > 1'000'000) throw ConfigError("outcome_distribution: M must lie in [1, 1e6]");
    OutcomeDistribution d;
    d.pairs = pairs;
    d.theta = theta;
    d.p0 = zero_probability(theta);
    const double p1 = 1.0 - d.p0;
    const double m = static_cast<double>(pairs);
    d.exact.resize(static_cast<std::size_t>(pairs + 1));
    const double log_p0 = std::log(d.p0);
    const double log_p1 = std::log(p1);
    const double log_mfact = std::lgamma(m + 1);
    for (std::int64_t k = 0; k <= pairs; ++k) {
        const double kk = static_cast<double>(k);
        double lp = log_mfact - std::lgamma(kk + 1) - std::lgamma(m - kk + 1);
        // 0 * log(0) terms contribute nothing.
        if (k > 0) lp += kk * log_p0;
        if (k < pairs) lp += (m - kk) * log_p1;
        d.exact[static_cast<std::size_t>(k)] = std::exp(lp);
    }
    d.gaussian_mean = std::cos(theta);
    d.gaussian_variance = 4 * d.p0 * p1 / m;
    return d;
}

double OutcomeDistribution::gaussian_density(double x) const {
    if (gaussian_variance <= 0) return x == gaussian_mean ? INFINITY : 0.0;
    const double z = x - gaussian_mean;
    return std::exp(-z * z / (2 * gaussian_variance)) / std::sqrt(2 * std::numbers::pi * gaussian_variance);
}

std::vector<double> OutcomeDistribution::gaussian_lattice() const {
    const double m = static_cast<double>(pairs);
    std::vector<double> g(static_cast<std::size_t>(pairs + 1), 0.0);
    if (gaussian_variance <= 0) {
        const double k = std::round((gaussian_mean * m + m) / 2);
        g[static_cast<std::size_t>(std::clamp(k, 0.0, m))] = 1.0;
        return g;
    }
    for (std::int64_t k = 0; k <= pairs; ++k) {
        const double x = (2 * static_cast<double>(k) - m) / m;
        g[static_cast<std::size_t>(k)] = gaussian_density(x) * (2 / m);
    }
    return g;
}

double OutcomeDistribution::total_variation() const {
    const auto g = gaussian_lattice();
    double tv = 0;
    for (std::size_t k = 0; k < exact.size(); ++k) tv += std::abs(exact[k] - g[k]);
    return tv / 2;
}

double OutcomeDistribution::mean_x() const {
    const double m = static_cast<double>(pairs);
    double mean = 0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
        mean += exact[k] * (2 * static_cast<double>(k) - m) / m;
    }
    return mean;
}

// ------------------------------------------------------------ Error budget

ErrorBudget error_budget(double initial_pairs, int rounds, double f0, double omega) {
    if (rounds < 0) throw ConfigError("error_budget: negative round count");
    if (!(f0 >= 0.0 && f0 <= 1.0)) throw ConfigError("error_budget: F0 outside [0, 1]");
    if (!(omega > 0)) throw ConfigError("error_budget: omega must be positive");
    if (!(initial_pairs >= 1)) throw ConfigError("error_budget: need at least one pair");
    const double cost = std::ldexp(1.0, rounds);
    if (initial_pairs < cost) {
        throw PreconditionError("error_budget: " + std::to_string(rounds) +
                                " rounds need at least 2^n pairs; none would remain");
    }
    double f = f0;
    for (int r = 0; r < rounds; ++r) f = purify::recurrence_step(f).fidelity;
    ErrorBudget b;
    b.n_rounds = rounds;
    b.fidelity = f;
    b.pairs_used = initial_pairs / cost;
    b.dt_sql = std::sqrt(cost / initial_pairs) / omega;
    b.dt_fidelity = std::sqrt(std::max(0.0, 1 - f)) / omega;
    b.dt_total = std::sqrt(b.dt_sql * b.dt_sql + b.dt_fidelity * b.dt_fidelity);
    return b;
}

RoundOptimization optimize_rounds(double initial_pairs, double f0, double omega, int n_max) {
    if (n_max < 0) throw ConfigError("optimize_rounds: n_max must be non-negative");
    if (!(initial_pairs >= 1)) throw ConfigError("optimize_rounds: need at least one pair");
    const int limit = std::min(n_max, static_cast<int>(std::floor(std::log2(initial_pairs))));
    RoundOptimization out;
    for (int n = 0; n <= limit; ++n) {
        if (std::ldexp(1.0, n) > initial_pairs) break;  // guards log2 rounding
        out.curve.push_back(error_budget(initial_pairs, n, f0, omega));
    }
    out.n_star = 0;
    out.dt_star = out.curve.front().dt_total;
    for (const auto& b : out.curve) {
        if (b.dt_total < out.dt_star) {
            out.dt_star = b.dt_total;
            out.n_star = b.n_rounds;
        }
    }
    return out;
}

}  // namespace qcsync::qcs
