#pragma once

// Dense complex linear algebra for 1-4 qubits.
//
// Ordering convention: qubit 0 is the highest-order tensor factor, so for two
// qubits the basis index of |a b> is 2a + b. Every module uses this.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcsync/rng.h"

namespace qcsync::qmath {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 4;
inline constexpr int kMaxDim = 1 << kMaxQubits;

// Square matrix of dimension 2^k, k in 1..4, with finite entries.
class SquareMatrix {
public:
    SquareMatrix() : SquareMatrix(identity(1)) {}
    explicit SquareMatrix(Matrix m);
    SquareMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static SquareMatrix identity(int qubits);
    static SquareMatrix zero(int qubits);
    static SquareMatrix diagonal(std::initializer_list<Complex> entries);

    int dim() const { return static_cast<int>(m_.rows()); }
    int qubits() const;
    const Matrix& matrix() const { return m_; }
    Complex operator()(int r, int c) const { return m_(r, c); }

    SquareMatrix adjoint() const { return SquareMatrix(Matrix(m_.adjoint())); }
    Complex trace() const { return m_.trace(); }

    SquareMatrix operator*(const SquareMatrix& o) const;
    SquareMatrix operator+(const SquareMatrix& o) const;
    SquareMatrix operator-(const SquareMatrix& o) const;
    SquareMatrix operator*(Complex s) const { return SquareMatrix(Matrix(m_ * s)); }

    // Largest absolute entry difference.
    double max_abs_diff(const SquareMatrix& o) const;

    bool operator==(const SquareMatrix& o) const { return m_ == o.m_; }

private:
    Matrix m_;
};

// Normalized ket of dimension 2^k.
class PureState {
public:
    explicit PureState(Vector amplitudes);
    PureState(std::initializer_list<Complex> amplitudes);

    static PureState basis(int qubits, int index);

    int dim() const { return static_cast<int>(a_.size()); }
    int qubits() const;
    const Vector& amplitudes() const { return a_; }
    Complex operator[](int i) const { return a_(i); }

    Complex inner(const PureState& o) const { return a_.dot(o.a_); }  // <this|o>
    SquareMatrix projector() const;

private:
    Vector a_;
};

// Hermitian, unit-trace, positive semidefinite matrix.
//
// Construction through from_matrix() validates the invariants; the operations
// in this module produce DensityMatrix values directly and rely on the
// invariants being preserved (checked after every call in checked builds).
class DensityMatrix {
public:
    static DensityMatrix from_pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int qubits);
    // Throws InvariantError if m violates any invariant at tolerance tol.
    static DensityMatrix from_matrix(SquareMatrix m, double tol = 1e-10);
    // No validation. For results of operations that preserve the invariants.
    static DensityMatrix trusted(SquareMatrix m) { return DensityMatrix(std::move(m)); }

    int dim() const { return m_.dim(); }
    int qubits() const { return m_.qubits(); }
    const SquareMatrix& matrix() const { return m_; }
    Complex operator()(int r, int c) const { return m_(r, c); }

    bool operator==(const DensityMatrix& o) const { return m_ == o.m_; }

private:
    explicit DensityMatrix(SquareMatrix m) : m_(std::move(m)) {}
    SquareMatrix m_;
};

// Kronecker product with `a` on the high-order qubits.
SquareMatrix tensor_product(const SquareMatrix& a, const SquareMatrix& b);
PureState tensor_product(const PureState& a, const PureState& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

// max |U^dagger U - I|.
double unitarity_residual(const SquareMatrix& u);

// Lifts u onto `targets` of a register of `qubits` qubits. targets[0] is the
// highest-order qubit of u.
SquareMatrix embed(const SquareMatrix& u, std::span<const int> targets, int qubits);

DensityMatrix apply_unitary(const DensityMatrix& rho, const SquareMatrix& u,
                            std::span<const int> targets);
DensityMatrix apply_unitary(const DensityMatrix& rho, const SquareMatrix& u,
                            std::initializer_list<int> targets);
PureState apply_unitary(const PureState& psi, const SquareMatrix& u, std::span<const int> targets);
PureState apply_unitary(const PureState& psi, const SquareMatrix& u,
                        std::initializer_list<int> targets);

// Reduced state on `keep`, in the order given.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

struct Measurement {
    int outcome;
    DensityMatrix post_state;
    double prob;
};

// tr(P_i rho P_i) for each single-qubit projector P_i acting on `target`.
std::vector<double> outcome_probabilities(const DensityMatrix& rho,
                                          std::span<const SquareMatrix> projectors, int target);

// Samples one outcome of a complete orthogonal projective measurement of
// `target` and returns the renormalized post-measurement state.
Measurement projective_measure(const DensityMatrix& rho, std::span<const SquareMatrix> projectors,
                               int target, Rng& rng);

// Post-measurement state for a given outcome, without sampling.
Measurement project(const DensityMatrix& rho, const SquareMatrix& projector, int target);

// <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const PureState& psi);

struct DensityDiagnostics {
    double hermiticity_residual = 0;  // max |rho - rho^dagger|
    double trace_deviation = 0;       // |tr rho - 1|
    double min_eigenvalue = 0;        // of the Hermitian part
    bool hermitian = false;
    bool unit_trace = false;
    bool positive = false;

    bool ok() const { return hermitian && unit_trace && positive; }
};

DensityDiagnostics validate_density(const SquareMatrix& m, double tol);
inline DensityDiagnostics validate_density(const DensityMatrix& rho, double tol) {
    return validate_density(rho.matrix(), tol);
}

// Eigenvalues of the Hermitian part, ascending.
std::vector<double> hermitian_eigenvalues(const SquareMatrix& m);

// Principal square root of a Hermitian matrix; eigenvalue phases in (-pi, pi].
SquareMatrix principal_sqrt(const SquareMatrix& hermitian);

namespace gates {
SquareMatrix I();
SquareMatrix X();
SquareMatrix Y();
SquareMatrix Z();
SquareMatrix H();
// Control is the high-order qubit.
SquareMatrix CNOT();
SquareMatrix proj0();
SquareMatrix proj1();
}  // namespace gates

}  // namespace qcsync::qmath
