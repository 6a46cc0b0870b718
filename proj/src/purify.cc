#include "qcsync/purify.h"

#include <cmath>
#include <thread>

#include "qcsync/channels.h"
#include "qcsync/errors.h"

namespace qcsync::purify {

using qmath::DensityMatrix;
using qmath::SquareMatrix;

RecurrenceStep recurrence_step(double f) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("recurrence_step: fidelity outside [0, 1]");
    const double g = 1.0 - f;
    const double d = f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0;
    return {(f * f + g * g / 9.0) / d, d};
}

namespace {

constexpr int kAliceQubits[] = {0, 2};
constexpr int kBobQubits[] = {1, 3};

std::span<const int> qubits_of(Side side) {
    return side == Side::Alice ? std::span<const int>(kAliceQubits) : std::span<const int>(kBobQubits);
}

void require_pair(const DensityMatrix& rho, const char* what) {
    if (rho.qubits() != 2) throw ConfigError(std::string(what) + ": pair must be a two-qubit state");
    if (!qmath::validate_density(rho, 1e-10).ok()) {
        throw ConfigError(std::string(what) + ": pair is not a valid density matrix");
    }
}

}  // namespace

RoundRegister::RoundRegister(const DensityMatrix& pair1, const DensityMatrix& pair2)
    : state_([&] {
          require_pair(pair1, "bbpssw round");
          require_pair(pair2, "bbpssw round");
          return qmath::tensor_product(pair1, pair2);
      }()) {}

void RoundRegister::apply_party_gates(Side side, const frames::BasisFrame& frame, int twirl1,
                                      int twirl2) {
    const auto& group = channels::twirl_group();
    if (twirl1 < 0 || twirl1 >= channels::TwirlGroup::kSize || twirl2 < 0 ||
        twirl2 >= channels::TwirlGroup::kSize) {
        throw ConfigError("twirl element index out of range");
    }
    const SquareMatrix rotations = qmath::tensor_product(group[twirl1].local, group[twirl2].local);
    const SquareMatrix local = qmath::gates::CNOT() * rotations;
    state_ = qmath::apply_unitary(state_, frames::local_gate2(local, frame), qubits_of(side));
}

int RoundRegister::measure_target(Side side, Rng& rng) {
    static const SquareMatrix projectors[] = {qmath::gates::proj0(), qmath::gates::proj1()};
    auto m = qmath::projective_measure(state_, projectors, qubits_of(side)[1], rng);
    state_ = std::move(m.post_state);
    return m.outcome;
}

void RoundRegister::apply_to_party(Side side, const SquareMatrix& u) {
    for (int q : qubits_of(side)) state_ = qmath::apply_unitary(state_, u, {q});
}

std::optional<DensityMatrix> RoundRegister::finish(int alice_bit, int bob_bit,
                                                   const frames::BasisFrame& alice) const {
    if (alice_bit != bob_bit) return std::nullopt;
    DensityMatrix kept = qmath::partial_trace(state_, {0, 1});
    return qmath::apply_unitary(kept, frames::local_gate(qmath::gates::Z(), alice), {0});
}

RoundOutcome bbpssw_round_mc(const DensityMatrix& pair1, const DensityMatrix& pair2,
                             const PartyFrames& frames, Rng& rotations, Rng& outcomes) {
    RoundRegister reg(pair1, pair2);
    RoundOutcome out;
    out.twirl1 = static_cast<int>(rotations.below(channels::TwirlGroup::kSize));
    out.twirl2 = static_cast<int>(rotations.below(channels::TwirlGroup::kSize));
    reg.apply_party_gates(Side::Alice, frames.alice, out.twirl1, out.twirl2);
    reg.apply_party_gates(Side::Bob, frames.bob, out.twirl1, out.twirl2);
    out.alice_bit = reg.measure_target(Side::Alice, outcomes);
    out.bob_bit = reg.measure_target(Side::Bob, outcomes);
    out.pair = reg.finish(out.alice_bit, out.bob_bit, frames.alice);
    return out;
}

// ---------------------------------------------------------------- Ensembles

PairEnsemble PairEnsemble::analytic(double fidelity, double count) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw ConfigError("PairEnsemble: fidelity outside [0, 1]");
    if (!(count >= 0.0) || !std::isfinite(count)) throw ConfigError("PairEnsemble: negative pair count");
    PairEnsemble e;
    e.mode_ = Mode::Analytic;
    e.fidelity_ = fidelity;
    e.count_ = count;
    return e;
}

PairEnsemble PairEnsemble::montecarlo(std::vector<DensityMatrix> pairs) {
    for (const auto& p : pairs) require_pair(p, "PairEnsemble");
    PairEnsemble e;
    e.mode_ = Mode::MonteCarlo;
    e.count_ = static_cast<double>(pairs.size());
    e.pairs_ = std::move(pairs);
    return e;
}

double mean_local_fidelity(const std::vector<DensityMatrix>& pairs, const PartyFrames& frames) {
    if (pairs.empty()) return 0.0;
    const auto target = frames::local_singlet(frames.alice, frames.bob);
    double sum = 0;
    for (const auto& p : pairs) sum += qmath::fidelity(p, target);
    return sum / static_cast<double>(pairs.size());
}

namespace {

PurificationTrajectory run_analytic(const PairEnsemble& initial, int rounds, Yield yield) {
    PurificationTrajectory t;
    t.mode = Mode::Analytic;
    t.yield = yield;
    double f = initial.fidelity();
    double count = initial.count();
    t.rounds.push_back({0, f, count, 1.0});
    for (int r = 1; r <= rounds; ++r) {
        const auto step = recurrence_step(f);
        f = step.fidelity;
        count /= 2.0;
        if (yield == Yield::Realistic) count *= step.success_prob;
        t.rounds.push_back({r, f, count, step.success_prob});
    }
    t.undersized = count < 1.0;
    return t;
}

PurificationTrajectory run_montecarlo(const PairEnsemble& initial, int rounds,
                                      const ScheduleOptions& opt) {
    PurificationTrajectory t;
    t.mode = Mode::MonteCarlo;
    t.yield = Yield::Ideal;
    std::vector<DensityMatrix> current = initial.pairs();
    t.rounds.push_back({0, mean_local_fidelity(current, opt.frames),
                        static_cast<double>(current.size()), 1.0});

    for (int r = 1; r <= rounds; ++r) {
        if (current.size() < 2) {
            throw ExhaustionError("purification exhausted: fewer than two pairs before round " +
                                  std::to_string(r));
        }
        const std::size_t attempts = current.size() / 2;
        std::vector<std::optional<DensityMatrix>> results(attempts);

        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t j = begin; j < end; ++j) {
                Rng rot(derive_seed(opt.rotation_seed, static_cast<std::uint64_t>(r), j));
                Rng out(derive_seed(opt.outcome_seed, static_cast<std::uint64_t>(r), j));
                results[j] = bbpssw_round_mc(current[2 * j], current[2 * j + 1], opt.frames, rot, out).pair;
            }
        };
        const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(attempts)));
        if (threads == 1) {
            work(0, attempts);
        } else {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (attempts + threads - 1) / threads;
            for (unsigned w = 0; w < threads; ++w) {
                const std::size_t b = w * chunk;
                const std::size_t e = std::min(attempts, b + chunk);
                if (b < e) pool.emplace_back(work, b, e);
            }
        }

        std::vector<DensityMatrix> next;
        next.reserve(attempts + 1);
        std::size_t successes = 0;
        for (auto& res : results) {
            if (res) {
                next.push_back(std::move(*res));
                ++successes;
            }
        }
        if (current.size() % 2 == 1) next.push_back(current.back());
        current = std::move(next);
        t.rounds.push_back({r, mean_local_fidelity(current, opt.frames),
                            static_cast<double>(current.size()),
                            static_cast<double>(successes) / static_cast<double>(attempts)});
    }
    t.survivors = std::move(current);
    return t;
}

}  // namespace

PurificationTrajectory purify_schedule(const PairEnsemble& initial, int rounds,
                                       const ScheduleOptions& options) {
    if (rounds < 0) throw ConfigError("purify_schedule: negative round count");
    if (initial.mode() == Mode::Analytic) return run_analytic(initial, rounds, options.yield);
    return run_montecarlo(initial, rounds, options);
}

}  // namespace qcsync::purify
