#include "qcsync/frames.h"

#include <cmath>
#include <numbers>

#include "qcsync/errors.h"

namespace qcsync::frames {

using qmath::Complex;
using qmath::SquareMatrix;

double wrap_angle(double a) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double r = std::remainder(a, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

BasisFrame BasisFrame::wrapped() const { return {wrap_angle(theta0), wrap_angle(theta1)}; }

ClockModel::ClockModel(double omega, double offset) : omega_(omega), offset_(offset) {
    if (!(omega > 0) || !std::isfinite(omega)) throw ConfigError("ClockModel: omega must be positive");
    if (!std::isfinite(offset)) throw ConfigError("ClockModel: offset must be finite");
}

SquareMatrix frame_unitary(const BasisFrame& from, const BasisFrame& to) {
    return SquareMatrix::diagonal({std::polar(1.0, from.theta0 - to.theta0),
                                   std::polar(1.0, from.theta1 - to.theta1)});
}

SquareMatrix conjugate_to_frame(const SquareMatrix& op, const SquareMatrix& u_frame) {
    if (op.dim() != u_frame.dim()) throw ConfigError("conjugate_to_frame: dimension mismatch");
    const double r = qmath::unitarity_residual(u_frame);
    if (!(r <= 1e-10)) throw NonUnitaryError("conjugate_to_frame: frame map is not unitary", r);
    return u_frame * op * u_frame.adjoint();
}

SquareMatrix local_gate(const SquareMatrix& gate, const BasisFrame& party) {
    return conjugate_to_frame(gate, frame_unitary(kReferenceFrame, party));
}

SquareMatrix local_gate2(const SquareMatrix& gate, const BasisFrame& party) {
    const SquareMatrix u = frame_unitary(kReferenceFrame, party);
    return conjugate_to_frame(gate, qmath::tensor_product(u, u));
}

SquareMatrix time_delay_operator(double omega, double delta_t) {
    return SquareMatrix::diagonal({1.0, std::polar(1.0, -omega * delta_t)});
}

double effective_phase(const BasisFrame& a, const BasisFrame& b, double omega, double delta_t) {
    return a.theta0 + b.theta1 - a.theta1 - b.theta0 - omega * delta_t;
}

qmath::PureState phase_singlet(double phi) {
    const double s = 1.0 / std::sqrt(2.0);
    return qmath::PureState{0.0, -std::polar(s, phi), s, 0.0};
}

qmath::PureState local_singlet(const BasisFrame& a, const BasisFrame& b) {
    // |sigma>^(party) = e^{-i theta_sigma}|sigma>^(R)
    const double s = 1.0 / std::sqrt(2.0);
    return qmath::PureState{0.0, -std::polar(s, -(a.theta0 + b.theta1)),
                            std::polar(s, -(a.theta1 + b.theta0)), 0.0};
}

}  // namespace qcsync::frames
