#include "qcsync/qmath.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "qcsync/errors.h"

namespace qcsync::qmath {
namespace {

int qubits_for_dim(long dim, const char* what) {
    if (dim < 2 || dim > kMaxDim || !std::has_single_bit(static_cast<unsigned long>(dim))) {
        std::ostringstream os;
        os << what << ": dimension " << dim << " is not a power of two in [2, " << kMaxDim << "]";
        throw ConfigError(os.str());
    }
    return std::countr_zero(static_cast<unsigned long>(dim));
}

void check_targets(std::span<const int> targets, int qubits, const char* what) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= qubits) {
            throw ConfigError(std::string(what) + ": qubit index out of range");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) {
                throw ConfigError(std::string(what) + ": repeated qubit index");
            }
        }
    }
}

// Bit of basis index `idx` that holds qubit q.
inline int bit_of(int idx, int q, int qubits) { return (idx >> (qubits - 1 - q)) & 1; }

inline DensityMatrix checked(DensityMatrix rho, [[maybe_unused]] const char* what) {
#ifdef QCSYNC_CHECKED_OPS
    auto d = validate_density(rho, 1e-10);
    if (!d.ok()) {
        std::ostringstream os;
        os << what << " broke a density invariant: hermiticity " << d.hermiticity_residual
           << ", trace deviation " << d.trace_deviation << ", min eigenvalue " << d.min_eigenvalue;
        throw InvariantError(os.str());
    }
#endif
    return rho;
}

}  // namespace

// ---------------------------------------------------------------- SquareMatrix

SquareMatrix::SquareMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ConfigError("SquareMatrix: matrix is not square");
    }
    qubits_for_dim(m_.rows(), "SquareMatrix");
    if (!m_.allFinite()) {
        throw ConfigError("SquareMatrix: non-finite entry");
    }
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != n) {
            throw ConfigError("SquareMatrix: ragged initializer");
        }
        Eigen::Index c = 0;
        for (const auto& v : row) m(r, c++) = v;
        ++r;
    }
    *this = SquareMatrix(std::move(m));
}

SquareMatrix SquareMatrix::identity(int qubits) {
    const int d = 1 << qubits;
    return SquareMatrix(Matrix(Matrix::Identity(d, d)));
}

SquareMatrix SquareMatrix::zero(int qubits) {
    const int d = 1 << qubits;
    return SquareMatrix(Matrix(Matrix::Zero(d, d)));
}

SquareMatrix SquareMatrix::diagonal(std::initializer_list<Complex> entries) {
    const auto n = static_cast<Eigen::Index>(entries.size());
    Matrix m = Matrix::Zero(n, n);
    Eigen::Index i = 0;
    for (const auto& v : entries) {
        m(i, i) = v;
        ++i;
    }
    return SquareMatrix(std::move(m));
}

int SquareMatrix::qubits() const { return std::countr_zero(static_cast<unsigned long>(m_.rows())); }

SquareMatrix SquareMatrix::operator*(const SquareMatrix& o) const {
    if (dim() != o.dim()) throw ConfigError("SquareMatrix product: dimension mismatch");
    return SquareMatrix(Matrix(m_ * o.m_));
}

SquareMatrix SquareMatrix::operator+(const SquareMatrix& o) const {
    if (dim() != o.dim()) throw ConfigError("SquareMatrix sum: dimension mismatch");
    return SquareMatrix(Matrix(m_ + o.m_));
}

SquareMatrix SquareMatrix::operator-(const SquareMatrix& o) const {
    if (dim() != o.dim()) throw ConfigError("SquareMatrix difference: dimension mismatch");
    return SquareMatrix(Matrix(m_ - o.m_));
}

double SquareMatrix::max_abs_diff(const SquareMatrix& o) const {
    if (dim() != o.dim()) throw ConfigError("max_abs_diff: dimension mismatch");
    return (m_ - o.m_).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------- PureState

PureState::PureState(Vector amplitudes) : a_(std::move(amplitudes)) {
    qubits_for_dim(a_.size(), "PureState");
    if (!a_.allFinite()) throw ConfigError("PureState: non-finite amplitude");
    const double norm2 = a_.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "PureState: squared norm " << norm2 << " differs from 1";
        throw ConfigError(os.str());
    }
}

PureState::PureState(std::initializer_list<Complex> amplitudes)
    : PureState([&] {
          Vector v(static_cast<Eigen::Index>(amplitudes.size()));
          Eigen::Index i = 0;
          for (const auto& a : amplitudes) v(i++) = a;
          return v;
      }()) {}

PureState PureState::basis(int qubits, int index) {
    const int d = 1 << qubits;
    if (index < 0 || index >= d) throw ConfigError("PureState::basis: index out of range");
    Vector v = Vector::Zero(d);
    v(index) = 1.0;
    return PureState(std::move(v));
}

int PureState::qubits() const { return std::countr_zero(static_cast<unsigned long>(a_.size())); }

SquareMatrix PureState::projector() const { return SquareMatrix(Matrix(a_ * a_.adjoint())); }

// --------------------------------------------------------------- DensityMatrix

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(int qubits) {
    const double d = static_cast<double>(1 << qubits);
    return DensityMatrix(SquareMatrix::identity(qubits) * Complex(1.0 / d));
}

DensityMatrix DensityMatrix::from_matrix(SquareMatrix m, double tol) {
    const auto d = validate_density(m, tol);
    if (!d.ok()) {
        std::ostringstream os;
        os << "not a density matrix: hermiticity residual " << d.hermiticity_residual
           << ", trace deviation " << d.trace_deviation << ", min eigenvalue " << d.min_eigenvalue;
        throw InvariantError(os.str());
    }
    return DensityMatrix(std::move(m));
}

// ------------------------------------------------------------------ Operations

SquareMatrix tensor_product(const SquareMatrix& a, const SquareMatrix& b) {
    const int da = a.dim();
    const int db = b.dim();
    if (a.qubits() + b.qubits() > kMaxQubits) {
        throw ConfigError("tensor_product: result exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
    Matrix out(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
    return SquareMatrix(std::move(out));
}

PureState tensor_product(const PureState& a, const PureState& b) {
    if (a.qubits() + b.qubits() > kMaxQubits) {
        throw ConfigError("tensor_product: result exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
    Vector out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
    // Norm is a product of unit norms; rounding stays far inside the ctor tolerance.
    return PureState(std::move(out));
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    return checked(DensityMatrix::trusted(tensor_product(a.matrix(), b.matrix())), "tensor_product");
}

double unitarity_residual(const SquareMatrix& u) {
    const Matrix& m = u.matrix();
    return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

SquareMatrix embed(const SquareMatrix& u, std::span<const int> targets, int qubits) {
    if (qubits < 1 || qubits > kMaxQubits) throw ConfigError("embed: register size out of range");
    check_targets(targets, qubits, "embed");
    if (static_cast<int>(targets.size()) != u.qubits()) {
        throw ConfigError("embed: gate arity does not match target count");
    }
    const int k = static_cast<int>(targets.size());
    const int d = 1 << qubits;
    int target_mask = 0;
    for (int t : targets) target_mask |= 1 << (qubits - 1 - t);

    auto sub_index = [&](int idx) {
        int s = 0;
        for (int j = 0; j < k; ++j) s = (s << 1) | bit_of(idx, targets[j], qubits);
        return s;
    };

    Matrix out = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if ((i & ~target_mask) != (j & ~target_mask)) continue;
            out(i, j) = u(sub_index(i), sub_index(j));
        }
    }
    return SquareMatrix(std::move(out));
}

namespace {

void require_unitary(const SquareMatrix& u, const char* what) {
    const double r = unitarity_residual(u);
    if (!(r <= 1e-10)) {
        std::ostringstream os;
        os << what << ": gate is not unitary (residual " << r << ")";
        throw NonUnitaryError(os.str(), r);
    }
}

}  // namespace

DensityMatrix apply_unitary(const DensityMatrix& rho, const SquareMatrix& u,
                            std::span<const int> targets) {
    require_unitary(u, "apply_unitary");
    const SquareMatrix full = embed(u, targets, rho.qubits());
    const Matrix& U = full.matrix();
    Matrix out = U * rho.matrix().matrix() * U.adjoint();
    return checked(DensityMatrix::trusted(SquareMatrix(std::move(out))), "apply_unitary");
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const SquareMatrix& u,
                            std::initializer_list<int> targets) {
    return apply_unitary(rho, u, std::span<const int>(targets.begin(), targets.size()));
}

PureState apply_unitary(const PureState& psi, const SquareMatrix& u, std::span<const int> targets) {
    require_unitary(u, "apply_unitary");
    const SquareMatrix full = embed(u, targets, psi.qubits());
    Vector out = full.matrix() * psi.amplitudes();
    out /= out.norm();
    return PureState(std::move(out));
}

PureState apply_unitary(const PureState& psi, const SquareMatrix& u,
                        std::initializer_list<int> targets) {
    return apply_unitary(psi, u, std::span<const int>(targets.begin(), targets.size()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    if (keep.empty()) throw ConfigError("partial_trace: keep list is empty");
    const int n = rho.qubits();
    check_targets(keep, n, "partial_trace");

    std::vector<int> traced;
    for (int q = 0; q < n; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
    }
    const int k = static_cast<int>(keep.size());
    const int t = static_cast<int>(traced.size());

    auto full_index = [&](int kept_idx, int traced_idx) {
        int idx = 0;
        for (int j = 0; j < k; ++j) {
            const int b = (kept_idx >> (k - 1 - j)) & 1;
            idx |= b << (n - 1 - keep[j]);
        }
        for (int j = 0; j < t; ++j) {
            const int b = (traced_idx >> (t - 1 - j)) & 1;
            idx |= b << (n - 1 - traced[j]);
        }
        return idx;
    };

    const int dk = 1 << k;
    const int dt = 1 << t;
    const Matrix& m = rho.matrix().matrix();
    Matrix out = Matrix::Zero(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            Complex s = 0;
            for (int e = 0; e < dt; ++e) s += m(full_index(a, e), full_index(b, e));
            out(a, b) = s;
        }
    return checked(DensityMatrix::trusted(SquareMatrix(std::move(out))), "partial_trace");
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
    return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

namespace {

void check_projectors(std::span<const SquareMatrix> projectors) {
    if (projectors.empty()) throw ConfigError("projective_measure: no projectors");
    const int d = projectors.front().dim();
    SquareMatrix sum = SquareMatrix::zero(projectors.front().qubits());
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const auto& p = projectors[i];
        if (p.dim() != d) throw ConfigError("projective_measure: projector dimension mismatch");
        if ((p * p).max_abs_diff(p) > 1e-10 || p.max_abs_diff(p.adjoint()) > 1e-10) {
            throw ConfigError("projective_measure: operator is not an orthogonal projector");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if ((p * projectors[j]).matrix().cwiseAbs().maxCoeff() > 1e-10) {
                throw ConfigError("projective_measure: projectors are not mutually orthogonal");
            }
        }
        sum = sum + p;
    }
    if (sum.max_abs_diff(SquareMatrix::identity(sum.qubits())) > 1e-10) {
        throw ConfigError("projective_measure: projectors do not sum to identity");
    }
}

Matrix sandwich(const DensityMatrix& rho, const SquareMatrix& projector, int target) {
    if (projector.qubits() != 1) throw ConfigError("projective_measure: projectors act on one qubit");
    const int t[] = {target};
    const SquareMatrix full = embed(projector, t, rho.qubits());
    const Matrix& P = full.matrix();
    return P * rho.matrix().matrix() * P;
}

}  // namespace

std::vector<double> outcome_probabilities(const DensityMatrix& rho,
                                          std::span<const SquareMatrix> projectors, int target) {
    check_projectors(projectors);
    std::vector<double> probs;
    probs.reserve(projectors.size());
    for (const auto& p : projectors) probs.push_back(sandwich(rho, p, target).trace().real());
    return probs;
}

Measurement project(const DensityMatrix& rho, const SquareMatrix& projector, int target) {
    Matrix m = sandwich(rho, projector, target);
    const double prob = m.trace().real();
    if (!(prob >= 1e-15)) {
        std::ostringstream os;
        os << "projection onto a branch of probability " << prob;
        throw DegenerateBranchError(os.str());
    }
    m /= prob;
    return {0, checked(DensityMatrix::trusted(SquareMatrix(std::move(m))), "project"), prob};
}

Measurement projective_measure(const DensityMatrix& rho, std::span<const SquareMatrix> projectors,
                               int target, Rng& rng) {
    const auto probs = outcome_probabilities(rho, projectors, target);
    const double u = rng.uniform();
    double cumulative = 0;
    int chosen = -1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) {
            chosen = static_cast<int>(i);
            break;
        }
    }
    if (chosen < 0) {
        // u fell into the rounding gap above the summed probabilities.
        for (int i = static_cast<int>(probs.size()) - 1; i >= 0; --i) {
            if (probs[i] > 0) {
                chosen = i;
                break;
            }
        }
    }
    if (chosen < 0) throw DegenerateBranchError("projective_measure: all branches have zero weight");
    auto m = project(rho, projectors[chosen], target);
    m.outcome = chosen;
    return m;
}

double fidelity(const DensityMatrix& rho, const PureState& psi) {
    if (rho.dim() != psi.dim()) throw ConfigError("fidelity: dimension mismatch");
    const Vector& v = psi.amplitudes();
    const Complex f = v.dot(rho.matrix().matrix() * v);
    if (std::abs(f.imag()) > 1e-9) {
        std::ostringstream os;
        os << "fidelity: imaginary residual " << f.imag();
        throw InvariantError(os.str());
    }
    return f.real();
}

std::vector<double> hermitian_eigenvalues(const SquareMatrix& m) {
    const Matrix h = (m.matrix() + m.matrix().adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

DensityDiagnostics validate_density(const SquareMatrix& m, double tol) {
    DensityDiagnostics d;
    d.hermiticity_residual = m.max_abs_diff(m.adjoint());
    d.trace_deviation = std::abs(m.trace() - Complex(1.0));
    const auto ev = hermitian_eigenvalues(m);
    d.min_eigenvalue = ev.front();
    d.hermitian = d.hermiticity_residual <= tol;
    d.unit_trace = d.trace_deviation <= tol;
    d.positive = d.min_eigenvalue >= -std::max(tol, 1e-10);
    return d;
}

SquareMatrix principal_sqrt(const SquareMatrix& hermitian) {
    if (hermitian.max_abs_diff(hermitian.adjoint()) > 1e-12) {
        throw ConfigError("principal_sqrt: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian.matrix());
    const auto& ev = solver.eigenvalues();
    Vector roots(ev.size());
    // std::sqrt on the complex plane cut along the negative axis with +0
    // imaginary part maps -1 to +i, i.e. phases in (-pi, pi] halve to (-pi/2, pi/2].
    for (Eigen::Index i = 0; i < ev.size(); ++i) roots(i) = std::sqrt(Complex(ev(i), 0.0));
    const Matrix& V = solver.eigenvectors();
    return SquareMatrix(Matrix(V * roots.asDiagonal() * V.adjoint()));
}

namespace gates {

SquareMatrix I() { return SquareMatrix::identity(1); }
SquareMatrix X() { return SquareMatrix{{0, 1}, {1, 0}}; }
SquareMatrix Y() { return SquareMatrix{{0, Complex(0, -1)}, {Complex(0, 1), 0}}; }
SquareMatrix Z() { return SquareMatrix{{1, 0}, {0, -1}}; }
SquareMatrix H() {
    const double s = 1.0 / std::sqrt(2.0);
    return SquareMatrix{{s, s}, {s, -s}};
}
SquareMatrix CNOT() {
    return SquareMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
}
SquareMatrix proj0() { return SquareMatrix{{1, 0}, {0, 0}}; }
SquareMatrix proj1() { return SquareMatrix{{0, 0}, {0, 1}}; }

}  // namespace gates

}  // namespace qcsync::qmath
