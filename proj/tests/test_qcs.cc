#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.h"
#include "qcsync/channels.h"
#include "qcsync/errors.h"
#include "qcsync/qcs.h"

using namespace qcsync;
using namespace qcsync::qcs;
using qmath::DensityMatrix;

namespace {

const double kPi = std::numbers::pi;

QCSConfig config(std::int64_t m, double omega, double t, double eps = 0) {
    QCSConfig c;
    c.pairs = m;
    c.omega = omega;
    c.t_true = t;
    c.epsilon = eps;
    return c;
}

}  // namespace

TEST(Estimator, Examples) {
    EXPECT_EQ(estimate_time(10, 10, 1.0), 0.0);
    EXPECT_NEAR(estimate_time(50, 100, 2.0), kPi / 4, 1e-15);
    EXPECT_NEAR(estimate_time(75, 100, 1.0), kPi / 3, 1e-15);
    EXPECT_NEAR(estimate_time(75, 100, 1.0, 0.1), kPi / 3 - 0.1, 1e-15);
    EXPECT_THROW(estimate_time(11, 10, 1.0), ConfigError);
    EXPECT_THROW(estimate_time(0, 0, 1.0), ConfigError);
}

TEST(Estimator, ReportErrors) {
    const auto r = make_estimate(75, 100, 1.0);
    EXPECT_NEAR(r.x, 0.5, 1e-15);
    EXPECT_NEAR(r.stderr_x, std::sqrt(4 * 0.75 * 0.25 / 100), 1e-15);
    EXPECT_NEAR(r.stderr_x_bound, 0.1, 1e-15);
    EXPECT_LE(r.stderr_x, r.stderr_x_bound);
    EXPECT_NEAR(r.stderr_t, r.stderr_x / std::sin(kPi / 3), 1e-12);
}

TEST(Sampling, ZeroTimeGivesAllZeros) {
    Rng rng(1);
    for (auto m : {SamplingMethod::PerQubit, SamplingMethod::Binomial}) {
        const auto r = simulate_qcs_sampling(config(200, 1, 0), rng, m);
        EXPECT_EQ(r.k, 200);
        EXPECT_EQ(r.t_hat, 0.0);
        EXPECT_FALSE(r.branch_ok);
    }
}

TEST(Sampling, QuarterPeriod) {
    Rng rng(2);
    const auto r = simulate_qcs_sampling(config(10000, 1, kPi / 2), rng);
    EXPECT_NEAR(static_cast<double>(r.k) / r.pairs, 0.5, 0.02);
    EXPECT_NEAR(r.t_hat, kPi / 2, 4 * r.stderr_t);
    EXPECT_TRUE(r.branch_ok);
}

TEST(Sampling, ResidualPhaseProbability) {
    // cos^2((pi/3 + 0.1)/2) for the single-qubit fringe.
    const double theta = kPi / 3 + 0.1;
    EXPECT_NEAR(zero_probability(theta), std::pow(std::cos(theta / 2), 2), 1e-15);
    EXPECT_NEAR(zero_probability(theta), 0.705522, 1e-6);
}

TEST(Sampling, BiasEqualsResidualOverOmega) {
    double sum = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(99, s));
        sum += simulate_qcs_sampling(config(1000000, 1, kPi / 3, 0.1), rng).t_hat;
    }
    const double sql = 1 / std::sqrt(1e6 * seeds);
    EXPECT_NEAR(sum / seeds - kPi / 3, 0.1, 3 * sql);
}

TEST(Sampling, PerQubitMatchesFormula) {
    // Per-qubit density-matrix path as oracle for the single-qubit probability.
    for (double eps : {0.0, 0.3}) {
        const auto cfg = config(1000, 1.3, 0.7, eps);
        const double p0 = zero_probability(cfg.theta());
        double total = 0;
        const int trials = 20;
        for (int t = 0; t < trials; ++t) {
            Rng rng(derive_seed(5, t));
            total += simulate_qcs_sampling(cfg, rng, SamplingMethod::PerQubit).k;
        }
        const double n = 1000.0 * trials;
        EXPECT_NEAR(total / n, p0, 4 * std::sqrt(p0 * (1 - p0) / n)) << eps;
    }
}

TEST(Sampling, DeterministicPerSeed) {
    Rng a(7), b(7);
    const auto cfg = config(5000, 1, 0.4);
    EXPECT_EQ(simulate_qcs_sampling(cfg, a).k, simulate_qcs_sampling(cfg, b).k);
}

TEST(Sampling, SingleBellPair) {
    Rng rng(3);
    const auto r = simulate_qcs_sampling(config(1, 1, 0), rng);
    EXPECT_TRUE(r.k == 0 || r.k == 1);
    EXPECT_TRUE(std::isfinite(r.t_hat));
}

TEST(Sampling, ConfigValidation) {
    Rng rng(1);
    EXPECT_THROW(simulate_qcs_sampling(config(0, 1, 0), rng), ConfigError);
    EXPECT_THROW(simulate_qcs_sampling(config(10, 0, 0), rng), ConfigError);
    EXPECT_THROW(simulate_qcs_sampling(config(10, 1, std::nan("")), rng), ConfigError);
}

TEST(Protocol, SingletReadoutInAnyFrames) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 20; ++i) {
        const frames::BasisFrame a{u(gen), u(gen)}, b{u(gen), u(gen)};
        const auto pair = DensityMatrix::from_pure(frames::local_singlet(a, b));
        const double t = 0.1 * i;
        EXPECT_NEAR(zero_outcome_probability(pair, a, b, precession(1.0, t)), std::pow(std::cos(t / 2), 2), 1e-12);
    }
}

TEST(Protocol, WernerContrast) {
    // Oracle: a Werner pair shrinks the fringe by (4F - 1)/3.
    for (double f : {0.6, 0.8, 0.95}) {
        const auto w = channels::werner_from_fidelity(f);
        for (double t : {0.2, 1.0, 2.5}) {
            const double expect = 0.5 + (4 * f - 1) / 3 * std::cos(t) / 2;
            EXPECT_NEAR(zero_outcome_probability(w, {}, {}, precession(1, t)), expect, 1e-12);
        }
    }
}

TEST(Protocol, AliceAnnouncesPlusAsOne) {
    const double s = 1 / std::sqrt(2.0);
    const auto plus = DensityMatrix::from_pure(qmath::tensor_product(qmath::PureState{s, s}, qmath::PureState::basis(1, 0)));
    Rng rng(1);
    auto p = plus;
    EXPECT_EQ(alice_measure(p, {}, rng), 1);
    const auto proj = alice_projectors({});
    EXPECT_NEAR(proj[0](0, 1).real(), -0.5, 1e-15);
    EXPECT_NEAR(proj[1](0, 1).real(), 0.5, 1e-15);
}

TEST(Protocol, ReadoutFrequencies) {
    const auto pair = DensityMatrix::from_pure(frames::local_singlet({}, {}));
    Rng rng(9);
    const int n = 20000;
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
        auto p = pair;
        const int sigma = alice_measure(p, {}, rng);
        zeros += bob_readout(p, sigma, precession(1, 1.1), {}, rng) == 0;
    }
    const double p0 = std::pow(std::cos(0.55), 2);
    EXPECT_NEAR(static_cast<double>(zeros) / n, p0, 4 * std::sqrt(p0 * (1 - p0) / n));
}

TEST(Distribution, FairCoin) {
    const auto d = outcome_distribution(2, kPi / 2);
    EXPECT_NEAR(d.exact[0], 0.25, 1e-15);
    EXPECT_NEAR(d.exact[1], 0.5, 1e-15);
    EXPECT_NEAR(d.exact[2], 0.25, 1e-15);
}

TEST(Distribution, NormalizedWithCosineMean) {
    const auto d = outcome_distribution(100, kPi / 3);
    double sum = 0;
    for (double p : d.exact) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(d.mean_x(), 0.5, 1e-12);
    EXPECT_NEAR(d.gaussian_mean, 0.5, 1e-15);
}

TEST(Distribution, GaussianApproximation) {
    EXPECT_LE(outcome_distribution(10000, kPi / 3).total_variation(), 0.02);
    // Signed mean: beyond pi/2 the fringe goes negative.
    EXPECT_LT(outcome_distribution(100, 2.0).gaussian_mean, 0.0);
}

TEST(Binomial, MomentsAndEdges) {
    Rng rng(13);
    const BinomialSampler s(1000, 0.3);
    const int n = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(s.sample(rng));
        sum += k;
        sq += k * k;
    }
    const double mean = sum / n, var = sq / n - mean * mean;
    EXPECT_NEAR(mean, 300, 4 * std::sqrt(210.0 / n));
    EXPECT_NEAR(var, 210, 0.05 * 210);
    EXPECT_EQ(BinomialSampler(50, 0.0).sample(rng), 0);
    EXPECT_EQ(BinomialSampler(50, 1.0).sample(rng), 50);
    EXPECT_THROW(BinomialSampler(5, 1.5), ConfigError);
}

TEST(Binomial, MatchesExactPmf) {
    const auto d = outcome_distribution(40, 1.2);
    const BinomialSampler s(40, d.p0);
    Rng rng(8);
    std::vector<int> counts(41);
    const int n = 200000;
    for (int i = 0; i < n; ++i) ++counts[s.sample(rng)];
    for (int k = 0; k <= 40; ++k) {
        const double p = d.exact[k];
        EXPECT_NEAR(counts[k] / static_cast<double>(n), p, 5 * std::sqrt(p * (1 - p) / n) + 1e-6) << k;
    }
}

TEST(Budget, Examples) {
    const double w = 1 / 17.0;  // time unit: ps
    const auto pure = error_budget(1e4, 0, 1.0, w);
    EXPECT_NEAR(pure.dt_total, 0.17, 1e-12);
    EXPECT_EQ(pure.dt_total, pure.dt_sql);
    EXPECT_NEAR(error_budget(1e5, 0, 0.9, w).dt_total, 17 * std::sqrt(1e-5 + 0.1), 1e-12);
    EXPECT_NEAR(error_budget(1e5, 0, 0.9, w).dt_total, 5.38, 0.005);
    const auto b8 = error_budget(1e5, 8, 0.9, w);
    EXPECT_NEAR(b8.fidelity, 0.9946, 5e-5);
    EXPECT_NEAR(b8.dt_total, 1.5, 0.05);
    EXPECT_EQ(b8.pairs_used, 1e5 / 256);
}

TEST(Budget, QuadratureIdentity) {
    for (int n = 0; n <= 12; ++n) {
        const auto b = error_budget(1e5, n, 0.85, 2.0);
        EXPECT_NEAR(b.dt_total * b.dt_total, b.dt_sql * b.dt_sql + b.dt_fidelity * b.dt_fidelity,
                    1e-15 * b.dt_total * b.dt_total);
    }
}

TEST(Budget, Refusals) {
    EXPECT_THROW(error_budget(100, 7, 0.9, 1), PreconditionError);
    EXPECT_THROW(error_budget(100, 1, 0.9, 0), ConfigError);
    EXPECT_THROW(error_budget(100, -1, 0.9, 1), ConfigError);
}

TEST(Optimize, PerfectPairsNeedNoRounds) {
    const auto o = optimize_rounds(1e5, 1.0, 1.0);
    EXPECT_EQ(o.n_star, 0);
}

TEST(Optimize, InteriorMinimumAtDeskScale) {
    const auto o = optimize_rounds(1e5, 0.9, 1 / 17.0);
    EXPECT_GT(o.n_star, 0);
    EXPECT_LT(o.n_star, static_cast<int>(o.curve.size()) - 1);
    EXPECT_LT(o.dt_star, o.curve.front().dt_total);
    EXPECT_LT(o.dt_star, o.curve.back().dt_total);
    EXPECT_NEAR(o.n_star, 8, 1);
    EXPECT_GE(o.dt_star, 1.3);
    EXPECT_LE(o.dt_star, 2.2);
    for (const auto& b : o.curve) EXPECT_GE(b.dt_total, o.dt_star);
}

TEST(Optimize, CurveStopsAtPairBudget) {
    const auto o = optimize_rounds(100, 0.9, 1.0);
    EXPECT_EQ(o.curve.size(), 7u);  // n = 0..6
}
