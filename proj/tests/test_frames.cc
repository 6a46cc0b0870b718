#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcsync/errors.h"
#include "qcsync/frames.h"

using namespace qcsync;
using namespace qcsync::frames;
using qmath::Complex;
using qmath::PureState;
using qmath::SquareMatrix;

namespace {

const double kPi = std::numbers::pi;

double overlap(const PureState& a, const PureState& b) { return std::norm(a.inner(b)); }

BasisFrame random_frame(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    return {u(gen), u(gen)};
}

}  // namespace

TEST(FrameUnitary, SameFrameIsIdentity) {
    const BasisFrame f{0.4, -1.3};
    EXPECT_LT(frame_unitary(f, f).max_abs_diff(SquareMatrix::identity(1)), 1e-15);
}

TEST(FrameUnitary, PiOnOneGivesZ) {
    EXPECT_LT(frame_unitary({0, 0}, {0, kPi}).max_abs_diff(qmath::gates::Z()), 1e-15);
}

TEST(FrameUnitary, InversePair) {
    const BasisFrame a{0.3, 2.0}, b{-1.1, 0.7};
    EXPECT_LT((frame_unitary(a, b) * frame_unitary(b, a)).max_abs_diff(SquareMatrix::identity(1)), 1e-15);
}

TEST(FrameUnitary, MapsLocalKetsIntoReference) {
    // |1>^(A) = e^{-i theta1} |1>^(R).
    const BasisFrame a{0.2, 0.9};
    const auto u = frame_unitary(kReferenceFrame, a);
    EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, -0.9)), 0.0, 1e-15);
}

TEST(ConjugateToFrame, Examples) {
    const auto d = SquareMatrix::diagonal({1, std::polar(1.0, 0.8)});
    EXPECT_LT(conjugate_to_frame(SquareMatrix::identity(1), d).max_abs_diff(SquareMatrix::identity(1)), 1e-15);
    EXPECT_LT(conjugate_to_frame(qmath::gates::Z(), d).max_abs_diff(qmath::gates::Z()), 1e-15);
    const double a = 0.37;
    const auto x = conjugate_to_frame(qmath::gates::X(), SquareMatrix::diagonal({1, std::polar(1.0, a)}));
    const SquareMatrix expect{{0, std::polar(1.0, -a)}, {std::polar(1.0, a), 0}};
    EXPECT_LT(x.max_abs_diff(expect), 1e-15);
    EXPECT_THROW(conjugate_to_frame(qmath::gates::X(), SquareMatrix{{1, 0}, {0, 0.5}}), NonUnitaryError);
}

TEST(TimeDelay, Examples) {
    EXPECT_LT(time_delay_operator(3.0, 0.0).max_abs_diff(SquareMatrix::identity(1)), 1e-15);
    EXPECT_LT(time_delay_operator(1.0, kPi).max_abs_diff(qmath::gates::Z()), 1e-15);
    const double omega_cs = 2 * kPi * 9.192631770e9;
    const auto t = time_delay_operator(omega_cs, 17.3e-12);
    EXPECT_NEAR(-std::arg(t(1, 1)), 1.0, 1e-3);
}

TEST(EffectivePhase, Examples) {
    EXPECT_EQ(effective_phase({0, 0}, {0, 0}, 1, 0), 0.0);
    EXPECT_NEAR(effective_phase({0.3, 0.1}, {0.2, 0.5}, 1, 0), 0.5, 1e-15);
    EXPECT_NEAR(effective_phase({0.4, 1.2}, {0.4, 1.2}, 1, 0.7), -0.7, 1e-15);
}

TEST(EffectivePhase, AntisymmetricUnderSwap) {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_frame(gen), b = random_frame(gen);
        const double dt = std::uniform_real_distribution<double>(-2, 2)(gen);
        EXPECT_NEAR(effective_phase(a, b, 1.3, dt), -effective_phase(b, a, 1.3, -dt), 1e-12);
    }
}

TEST(EffectivePhase, KeptUnreduced) {
    EXPECT_NEAR(effective_phase({0, 0}, {0, 0}, 1, 10.0), -10.0, 1e-15);
    EXPECT_NEAR(wrap_angle(-10.0), -10.0 + 4 * kPi, 1e-12);
    EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
}

TEST(PhaseSinglet, Examples) {
    const double s = 1 / std::sqrt(2.0);
    const PureState psi_minus{0, -s, s, 0};
    const PureState psi_plus{0, s, s, 0};
    EXPECT_NEAR(overlap(phase_singlet(0.0), psi_minus), 1.0, 1e-15);
    EXPECT_NEAR(overlap(phase_singlet(kPi), psi_plus), 1.0, 1e-15);
    EXPECT_NEAR(overlap(phase_singlet(kPi / 2), psi_minus), 0.5, 1e-15);
    for (double phi : {-2.0, -0.3, 0.9, 2.5})
        EXPECT_NEAR(overlap(phase_singlet(phi), psi_minus), std::pow(std::cos(phi / 2), 2), 1e-14);
}

TEST(PhaseSinglet, DelayRelation) {
    // phase_singlet(phi) = T(omega, dt) on Bob applied to phase_singlet(phi + omega dt),
    // and equals T(omega, -dt) on Alice up to a global phase.
    for (double phi : {-1.0, 0.0, 0.4}) {
        for (double wdt : {0.2, 1.0, -0.6}) {
            const auto target = phase_singlet(phi);
            const auto shifted = phase_singlet(phi + wdt);
            const auto bob = qmath::apply_unitary(shifted, time_delay_operator(1.0, wdt), {1});
            EXPECT_LT((bob.amplitudes() - target.amplitudes()).norm(), 1e-15);
            const auto alice = qmath::apply_unitary(shifted, time_delay_operator(1.0, -wdt), {0});
            EXPECT_NEAR(overlap(alice, target), 1.0, 1e-14);
        }
    }
}

TEST(LocalSinglet, GlobalFrameInvariance) {
    std::mt19937_64 gen(2);
    const auto canonical = local_singlet(kReferenceFrame, kReferenceFrame);
    for (int i = 0; i < 100; ++i) {
        const auto f = random_frame(gen);
        EXPECT_NEAR(overlap(local_singlet(f, f), canonical), 1.0, 1e-12);
    }
}

TEST(LocalSinglet, ArrivingPairFidelityFollowsEffectivePhase) {
    // The reference singlet after Bob's delay, seen against the parties' local singlet.
    std::mt19937_64 gen(3);
    const auto canonical = local_singlet(kReferenceFrame, kReferenceFrame);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_frame(gen), b = random_frame(gen);
        const double dt = std::uniform_real_distribution<double>(0, 1)(gen);
        const auto arrived = qmath::apply_unitary(canonical, time_delay_operator(1.0, dt), {1});
        const double phi = effective_phase(a, b, 1.0, dt);
        EXPECT_NEAR(overlap(arrived, local_singlet(a, b)), std::pow(std::cos(phi / 2), 2), 1e-12);
    }
}

TEST(LocalGate, DiagonalGatesAreFrameFree) {
    const BasisFrame f{0.7, -2.2};
    EXPECT_LT(local_gate(qmath::gates::Z(), f).max_abs_diff(qmath::gates::Z()), 1e-15);
    const auto x = local_gate(qmath::gates::X(), f);
    EXPECT_LT(qmath::unitarity_residual(x), 1e-14);
    // X^(f) maps |0>^(f) to |1>^(f).
    const auto u = frame_unitary(kReferenceFrame, f);
    const PureState zero_f(u.matrix().col(0));
    const PureState one_f(u.matrix().col(1));
    EXPECT_NEAR(std::abs(one_f.inner(qmath::apply_unitary(zero_f, x, {0})) - 1.0), 0.0, 1e-15);
}

TEST(ClockModel, ReadingsAndValidation) {
    const ClockModel c(2.0, -0.25);
    EXPECT_EQ(c.reading_at(1.0), 0.75);
    EXPECT_EQ(c.reference_time_of(0.75), 1.0);
    EXPECT_THROW(ClockModel(0.0, 0.0), ConfigError);
    EXPECT_THROW(ClockModel(1.0, std::nan("")), ConfigError);
}
