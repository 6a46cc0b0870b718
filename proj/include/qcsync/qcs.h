#pragma once

// Entanglement-based clock synchronization on M shared singlets and its error
// budget.
//
// Per pair: Alice measures in {|->, |+>} and announces sigma (1 for |+>).
// Bob's qubit precesses for time t as diag(e^{-i w t/2}, e^{i w t/2}); he
// applies Z when sigma = 1, then H, then measures. |0> occurs with probability
// p0 = cos^2((w t + eps)/2), and x = (2k - M)/M estimates cos(w t + eps).

#include <array>
#include <cstdint>
#include <vector>

#include "qcsync/frames.h"
#include "qcsync/qmath.h"
#include "qcsync/rng.h"

namespace qcsync::qcs {

struct QCSConfig {
    std::int64_t pairs = 1;  // M
    double epsilon = 0;      // residual phase, hidden from the estimator
    double omega = 1;        // rad/s
    double t_true = 0;       // s

    // Throws ConfigError on M < 1, omega <= 0 or non-finite values.
    void validate() const;
    double theta() const { return omega * t_true + epsilon; }
    // theta in (0, pi), where arccos inverts p0 without aliasing.
    bool branch_ok() const;
};

struct EstimateReport {
    std::int64_t k = 0;  // |0> outcomes
    std::int64_t pairs = 0;
    double x = 0;
    double t_hat = 0;
    double stderr_t = 0;        // delta-method error on t_hat from the binomial variance
    double stderr_x = 0;        // sqrt(4 p0 p1 / M) at p0 = k/M
    double stderr_x_bound = 0;  // 1/sqrt(M)
    bool branch_ok = true;
};

enum class SamplingMethod { Auto, PerQubit, Binomial };

// Auto uses the per-qubit density-matrix path for M <= 1000 and binomial
// sampling above.
EstimateReport simulate_qcs_sampling(const QCSConfig& cfg, Rng& rng,
                                     SamplingMethod method = SamplingMethod::Auto);

// t_hat = (arccos((2k - M)/M) - epsilon_assumed) / omega.
double estimate_time(std::int64_t k, std::int64_t pairs, double omega, double epsilon_assumed = 0);
EstimateReport make_estimate(std::int64_t k, std::int64_t pairs, double omega,
                             double epsilon_assumed = 0);

// cos^2(theta/2).
double zero_probability(double theta);

struct OutcomeDistribution {
    std::int64_t pairs = 0;
    double theta = 0;
    double p0 = 0;
    std::vector<double> exact;  // P_k, k = 0..M
    double gaussian_mean = 0;      // cos(theta)
    double gaussian_variance = 0;  // 4 p0 p1 / M

    double gaussian_density(double x) const;
    // Gaussian mass assigned to each lattice point x_k = (2k - M)/M.
    std::vector<double> gaussian_lattice() const;
    double total_variation() const;
    double mean_x() const;
};

// Exact binomial P_k (log-space, M <= 1e6) with its Gaussian approximant in x.
OutcomeDistribution outcome_distribution(std::int64_t pairs, double theta);

// Inverse-CDF binomial sampler over a window around the mode. Weights are
// built from the pmf ratio recurrence, so no factorials are ever formed.
class BinomialSampler {
public:
    BinomialSampler(std::int64_t trials, double p);
    std::int64_t sample(Rng& rng) const;

private:
    std::int64_t trials_;
    std::int64_t lo_ = 0;
    std::vector<double> cdf_;
};

struct ErrorBudget {
    double dt_sql = 0;       // s
    double dt_fidelity = 0;  // s
    double dt_total = 0;     // s
    int n_rounds = 0;
    double fidelity = 0;  // F_n
    double pairs_used = 0;  // N / 2^n
};

// dt = (1/omega) sqrt(2^n/N + 1 - F_n). Throws PreconditionError if N < 2^n.
ErrorBudget error_budget(double initial_pairs, int rounds, double f0, double omega);

struct RoundOptimization {
    int n_star = 0;
    double dt_star = 0;
    std::vector<ErrorBudget> curve;  // n = 0..min(n_max, floor(log2 N))
};

// Ties go to the smaller n.
RoundOptimization optimize_rounds(double initial_pairs, double f0, double omega, int n_max = 20);

// ---------------------------------------------------------- Per-pair protocol

qmath::SquareMatrix precession(double omega, double t);

// Index sigma: 0 -> |-><-|, 1 -> |+><+|, on Alice's local basis.
std::array<qmath::SquareMatrix, 2> alice_projectors(const frames::BasisFrame& alice);

// Alice's measurement of qubit 0; replaces `pair` by the post-measurement state.
int alice_measure(qmath::DensityMatrix& pair, const frames::BasisFrame& alice, Rng& rng);

// Bob's step on qubit 1 after Alice's outcome: the given precession unitary,
// Z if sigma = 1, H, computational measurement. Returns the bit (0 counts toward k).
int bob_readout(const qmath::DensityMatrix& pair, int sigma, const qmath::SquareMatrix& evolution,
                const frames::BasisFrame& bob, Rng& rng);

// Probability that Bob reads 0, averaged over Alice's outcome, without sampling.
double zero_outcome_probability(const qmath::DensityMatrix& pair, const frames::BasisFrame& alice,
                                const frames::BasisFrame& bob, const qmath::SquareMatrix& evolution);

}  // namespace qcsync::qcs
