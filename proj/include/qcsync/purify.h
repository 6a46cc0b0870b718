#pragma once

// BBPSSW entanglement purification toward the singlet in the parties' local
// conventions.
//
// A round on two pairs (A1,B1) and (A2,B2) runs on the four-qubit register
// [A1, B1, A2, B2]. Each party, in its own convention:
//   1. applies the shared random twirl element of pair 1 to its pair-1 qubit
//      and that of pair 2 to its pair-2 qubit,
//   2. applies CNOT from its pair-1 qubit onto its pair-2 qubit,
//   3. measures its pair-2 qubit in the computational basis.
// The round succeeds when the two outcomes coincide; Alice then applies Z to
// her kept qubit, which maps the psi+ component produced by the bilateral CNOT
// back onto psi-.

#include <cstdint>
#include <optional>
#include <vector>

#include "qcsync/frames.h"
#include "qcsync/qmath.h"
#include "qcsync/rng.h"

namespace qcsync::purify {

struct RecurrenceStep {
    double fidelity;      // F_{n+1}
    double success_prob;  // D
};

// F' = [F^2 + (1-F)^2/9] / D,  D = F^2 + 2F(1-F)/3 + 5(1-F)^2/9.
RecurrenceStep recurrence_step(double fidelity);

struct PartyFrames {
    frames::BasisFrame alice;
    frames::BasisFrame bob;
};

enum class Side { Alice, Bob };

// Working register for one round.
class RoundRegister {
public:
    // Throws ConfigError if either pair is not a valid two-qubit density matrix.
    RoundRegister(const qmath::DensityMatrix& pair1, const qmath::DensityMatrix& pair2);

    // Steps 1-2 for one party.
    void apply_party_gates(Side side, const frames::BasisFrame& frame, int twirl1, int twirl2);
    // Step 3 for one party; returns the bit.
    int measure_target(Side side, Rng& rng);
    // Arbitrary single-qubit unitary on one party's two qubits (e.g. a delay).
    void apply_to_party(Side side, const qmath::SquareMatrix& u);

    // Keeps pair 1 and applies Alice's Z if the outcomes coincide.
    std::optional<qmath::DensityMatrix> finish(int alice_bit, int bob_bit,
                                               const frames::BasisFrame& alice) const;

    const qmath::DensityMatrix& state() const { return state_; }

private:
    qmath::DensityMatrix state_;
};

struct RoundOutcome {
    int twirl1 = 0;
    int twirl2 = 0;
    int alice_bit = 0;
    int bob_bit = 0;
    std::optional<qmath::DensityMatrix> pair;  // set on success

    bool success() const { return pair.has_value(); }
};

// One Monte Carlo round. Twirl choices come from `rotations` (the stream both
// parties derive from their shared seed), measurement outcomes from `outcomes`.
RoundOutcome bbpssw_round_mc(const qmath::DensityMatrix& pair1, const qmath::DensityMatrix& pair2,
                             const PartyFrames& frames, Rng& rotations, Rng& outcomes);

enum class Mode { Analytic, MonteCarlo };

// Ideal: pairs halve each round. Realistic: pairs halve and are scaled by the
// round's success probability.
enum class Yield { Ideal, Realistic };

class PairEnsemble {
public:
    static PairEnsemble analytic(double fidelity, double count);
    static PairEnsemble montecarlo(std::vector<qmath::DensityMatrix> pairs);

    Mode mode() const { return mode_; }
    double fidelity() const { return fidelity_; }
    double count() const { return count_; }
    const std::vector<qmath::DensityMatrix>& pairs() const { return pairs_; }

private:
    PairEnsemble() = default;
    Mode mode_ = Mode::Analytic;
    double fidelity_ = 1;
    double count_ = 0;
    std::vector<qmath::DensityMatrix> pairs_;
};

struct RoundRecord {
    int round = 0;
    double fidelity = 0;         // analytic F_n, or mean fidelity of the ensemble
    double pairs_remaining = 0;
    double success_rate = 1;     // round 0 reports 1
};

struct PurificationTrajectory {
    Mode mode = Mode::Analytic;
    Yield yield = Yield::Ideal;
    std::vector<RoundRecord> rounds;
    bool undersized = false;  // analytic: count fell below one pair
    std::vector<qmath::DensityMatrix> survivors;  // Monte Carlo only

    const RoundRecord& final_round() const { return rounds.back(); }
};

struct ScheduleOptions {
    Yield yield = Yield::Ideal;
    PartyFrames frames;
    std::uint64_t rotation_seed = 0;
    std::uint64_t outcome_seed = 0;
    unsigned threads = 1;
};

// Monte Carlo rounds pair members (0,1), (2,3), ...; an odd leftover is carried
// unchanged to the next round. Attempt j of round r draws from
//   Rng(derive_seed(rotation_seed, r, j)), Rng(derive_seed(outcome_seed, r, j)),
// so the result does not depend on `threads`.
PurificationTrajectory purify_schedule(const PairEnsemble& initial, int rounds,
                                       const ScheduleOptions& options = {});

// Mean fidelity of `pairs` with the local singlet of `frames`.
double mean_local_fidelity(const std::vector<qmath::DensityMatrix>& pairs, const PartyFrames& frames);

}  // namespace qcsync::purify
