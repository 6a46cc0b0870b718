#pragma once

// Basis-convention bookkeeping.
//
// A party's frame assigns phases theta_sigma to the logical states, relative to
// a common reference representation R: |sigma>^(party) = e^{-i theta_sigma} |sigma>^(R).
// Local kets and operators of a party are carried into R with frame_unitary().

#include "qcsync/qmath.h"

namespace qcsync::frames {

struct BasisFrame {
    double theta0 = 0;
    double theta1 = 0;

    // Angles wrapped into (-pi, pi], for reports only.
    BasisFrame wrapped() const;
    bool operator==(const BasisFrame&) const = default;
};

inline constexpr BasisFrame kReferenceFrame{};

class ClockModel {
public:
    ClockModel(double omega, double offset);

    double omega() const { return omega_; }
    // Party clock minus reference clock, in seconds.
    double offset() const { return offset_; }
    double reading_at(double reference_time) const { return reference_time + offset_; }
    double reference_time_of(double reading) const { return reading - offset_; }

private:
    double omega_;
    double offset_;
};

struct PhaseSinglet {
    double phi = 0;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// diag(e^{i(theta_sigma^from - theta_sigma^to)}): maps |sigma>^(from) to |sigma>^(to).
// frame_unitary(a, b) == frame_unitary(b, a)^dagger.
qmath::SquareMatrix frame_unitary(const BasisFrame& from, const BasisFrame& to);

// U op U^dagger. Throws NonUnitaryError if u_frame is not unitary.
qmath::SquareMatrix conjugate_to_frame(const qmath::SquareMatrix& op,
                                       const qmath::SquareMatrix& u_frame);

// A single-qubit gate defined in `party`'s convention, as a matrix in R.
qmath::SquareMatrix local_gate(const qmath::SquareMatrix& gate, const BasisFrame& party);

// Two-qubit gate applied by one party to two qubits it holds.
qmath::SquareMatrix local_gate2(const qmath::SquareMatrix& gate, const BasisFrame& party);

// diag(1, e^{-i omega delta_t}).
qmath::SquareMatrix time_delay_operator(double omega, double delta_t);

// phi = theta0^A + theta1^B - theta1^A - theta0^B - omega delta_t, unreduced.
double effective_phase(const BasisFrame& a, const BasisFrame& b, double omega, double delta_t);

// (|10> - e^{i phi} |01>) / sqrt(2), Alice on qubit 0.
qmath::PureState phase_singlet(double phi);
inline qmath::PureState phase_singlet(PhaseSinglet s) { return phase_singlet(s.phi); }

// The singlet written in Alice's and Bob's own conventions,
// (|1>^A|0>^B - |0>^A|1>^B)/sqrt(2), expressed in R.
qmath::PureState local_singlet(const BasisFrame& a, const BasisFrame& b);

}  // namespace qcsync::frames
