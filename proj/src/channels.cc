#include "qcsync/channels.h"

#include <cmath>
#include <sstream>

#include "qcsync/errors.h"

namespace qcsync::channels {

using qmath::Complex;
using qmath::DensityMatrix;
using qmath::Matrix;
using qmath::PureState;
using qmath::SquareMatrix;

NoiseModel::NoiseModel(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("NoiseModel: p must lie in [0, 1]");
}

PureState bell_state(Bell b) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (b) {
        case Bell::PsiMinus: return PureState{0.0, -s, s, 0.0};
        case Bell::PsiPlus: return PureState{0.0, s, s, 0.0};
        case Bell::PhiMinus: return PureState{s, 0.0, 0.0, -s};
        case Bell::PhiPlus: return PureState{s, 0.0, 0.0, s};
    }
    throw ConfigError("bell_state: unknown Bell label");
}

namespace {

// Columns are psi-, psi+, phi-, phi+.
const Matrix& bell_basis() {
    static const Matrix basis = [] {
        Matrix m(4, 4);
        for (int b = 0; b < 4; ++b) m.col(b) = bell_state(static_cast<Bell>(b)).amplitudes();
        return m;
    }();
    return basis;
}

}  // namespace

void BellDiagonal::validate() const {
    double sum = 0;
    for (double w : weights()) {
        if (!(w >= -1e-12)) throw ConfigError("BellDiagonal: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("BellDiagonal: weights do not sum to 1");
}

double BellDiagonal::max_abs_diff(const BellDiagonal& o) const {
    const auto a = weights();
    const auto b = o.weights();
    double m = 0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

DensityMatrix BellDiagonal::to_density() const {
    validate();
    const auto w = weights();
    const Matrix& B = bell_basis();
    Matrix m = Matrix::Zero(4, 4);
    for (int b = 0; b < 4; ++b) m += w[b] * B.col(b) * B.col(b).adjoint();
    return DensityMatrix::trusted(SquareMatrix(std::move(m)));
}

BellDiagonal BellDiagonal::werner(double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw ConfigError("werner: fidelity outside [0, 1]");
    const double r = (1.0 - fidelity) / 3.0;
    return {fidelity, r, r, r};
}

// ------------------------------------------------------------------- Twirling

TwirlGroup::TwirlGroup() {
    using namespace qmath::gates;
    const SquareMatrix sx = qmath::principal_sqrt(X());
    const SquareMatrix sy = qmath::principal_sqrt(Y());
    const SquareMatrix sz = qmath::principal_sqrt(Z());
    auto root = [&](char c) -> const SquareMatrix& {
        switch (c) {
            case 'X': return sx;
            case 'Y': return sy;
            default: return sz;
        }
    };
    static constexpr std::array<std::string_view, kSize> words = {
        "I", "XY", "YZ", "ZX", "XYXY", "YZYZ", "ZXZX", "XZ", "XZXZ", "XX", "YY", "ZZ"};
    for (int i = 0; i < kSize; ++i) {
        const std::string_view w = words[static_cast<std::size_t>(i)];
        SquareMatrix local = SquareMatrix::identity(1);
        if (w != "I") {
            for (char c : w) local = root(c) * local;  // circuit order
        }
        elements_[static_cast<std::size_t>(i)] =
            TwirlElement{w, local, qmath::tensor_product(local, local)};
    }
}

const TwirlGroup& twirl_group() {
    static const TwirlGroup group;
    return group;
}

DensityMatrix depolarize(const DensityMatrix& rho, const NoiseModel& noise) {
    if (rho.qubits() != 2) throw ConfigError("depolarize: expects a two-qubit state");
    const double p = noise.p();
    Matrix m = (1.0 - p) * rho.matrix().matrix();
    m.diagonal().array() += p / 4.0;
    return DensityMatrix::trusted(SquareMatrix(std::move(m)));
}

DensityMatrix twirl_average(const DensityMatrix& rho) {
    if (rho.qubits() != 2) throw ConfigError("twirl: expects a two-qubit state");
    Matrix acc = Matrix::Zero(4, 4);
    for (const auto& e : twirl_group().elements()) {
        const Matrix& B = e.bilateral.matrix();
        acc += B * rho.matrix().matrix() * B.adjoint();
    }
    acc /= static_cast<double>(TwirlGroup::kSize);
    return DensityMatrix::trusted(SquareMatrix(std::move(acc)));
}

BellDecomposition bell_weights(const DensityMatrix& rho) {
    if (rho.qubits() != 2) throw ConfigError("bell_weights: expects a two-qubit state");
    const Matrix& B = bell_basis();
    const Matrix in_bell = B.adjoint() * rho.matrix().matrix() * B;
    BellDecomposition out;
    out.weights = {in_bell(0, 0).real(), in_bell(1, 1).real(), in_bell(2, 2).real(),
                   in_bell(3, 3).real()};
    Matrix off = in_bell;
    off.diagonal().setZero();
    out.off_diagonal_residual = off.norm();
    return out;
}

BellDiagonal twirl(const DensityMatrix& rho) {
    const auto d = bell_weights(twirl_average(rho));
    if (d.off_diagonal_residual > 1e-8) {
        std::ostringstream os;
        os << "twirl: averaged state is not Bell-diagonal (residual " << d.off_diagonal_residual << ")";
        throw InvariantError(os.str());
    }
    return d.weights;
}

DensityMatrix apply_twirl_element(const DensityMatrix& rho, int index, const frames::BasisFrame& alice,
                                  const frames::BasisFrame& bob) {
    if (index < 0 || index >= TwirlGroup::kSize) throw ConfigError("twirl element index out of range");
    const SquareMatrix& local = twirl_group()[index].local;
    const SquareMatrix b = qmath::tensor_product(frames::local_gate(local, alice),
                                                 frames::local_gate(local, bob));
    return qmath::apply_unitary(rho, b, {0, 1});
}

DensityMatrix sample_twirl(const DensityMatrix& rho, Rng& rng) {
    const int i = static_cast<int>(rng.below(TwirlGroup::kSize));
    return qmath::apply_unitary(rho, twirl_group()[i].bilateral, {0, 1});
}

DensityMatrix werner_from_fidelity(double fidelity) { return BellDiagonal::werner(fidelity).to_density(); }

BellDiagonal twirled_phase_state(double p, double phi) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("twirled_phase_state: p outside [0, 1]");
    const double c2 = std::cos(phi / 2) * std::cos(phi / 2);
    const double s2 = std::sin(phi / 2) * std::sin(phi / 2);
    const double other = p / 4 + (1 - p) * s2 / 3;
    return {p / 4 + (1 - p) * c2, other, other, other};
}

double phase_state_fidelity(double p, double phi) {
    const double c = std::cos(phi / 2);
    return p / 4 + (1 - p) * c * c;
}

}  // namespace qcsync::channels
