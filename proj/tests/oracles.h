#pragma once

// Reference implementations written with plain index loops. They share no code
// with the library and serve as independent oracles.

#include <complex>
#include <random>
#include <vector>

#include "qcsync/qmath.h"

namespace oracle {

using C = std::complex<double>;
using Dense = std::vector<std::vector<C>>;

inline Dense dense(const qcsync::qmath::SquareMatrix& m) {
    Dense d(m.dim(), std::vector<C>(m.dim()));
    for (int r = 0; r < m.dim(); ++r)
        for (int c = 0; c < m.dim(); ++c) d[r][c] = m(r, c);
    return d;
}

inline Dense kron(const Dense& a, const Dense& b) {
    const std::size_t na = a.size(), nb = b.size();
    Dense out(na * nb, std::vector<C>(na * nb));
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
    return out;
}

inline Dense mul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense out(n, std::vector<C>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline Dense dagger(const Dense& a) {
    const std::size_t n = a.size();
    Dense out(n, std::vector<C>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = std::conj(a[j][i]);
    return out;
}

// Two-qubit state: trace out qubit 1 (keep qubit 0), or qubit 0 (keep 1).
inline Dense trace_out_2q(const Dense& rho, int traced) {
    Dense out(2, std::vector<C>(2));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int s = 0; s < 2; ++s) {
                if (traced == 1) out[a][b] += rho[2 * a + s][2 * b + s];
                else out[a][b] += rho[2 * s + a][2 * s + b];
            }
    return out;
}

inline double max_diff(const Dense& a, const qcsync::qmath::SquareMatrix& b) {
    double m = 0;
    for (int r = 0; r < b.dim(); ++r)
        for (int c = 0; c < b.dim(); ++c) m = std::max(m, std::abs(a[r][c] - b(r, c)));
    return m;
}

// Haar-ish random unitary via QR of a Gaussian matrix.
inline qcsync::qmath::SquareMatrix random_unitary(int qubits, std::mt19937_64& gen) {
    std::normal_distribution<double> n(0, 1);
    const int d = 1 << qubits;
    qcsync::qmath::Matrix g(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) g(r, c) = C(n(gen), n(gen));
    Eigen::HouseholderQR<qcsync::qmath::Matrix> qr(g);
    return qcsync::qmath::SquareMatrix(qcsync::qmath::Matrix(qr.householderQ()));
}

// Random mixed state rho = A A^dagger / tr.
inline qcsync::qmath::DensityMatrix random_density(int qubits, std::mt19937_64& gen) {
    std::normal_distribution<double> n(0, 1);
    const int d = 1 << qubits;
    qcsync::qmath::Matrix a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = C(n(gen), n(gen));
    qcsync::qmath::Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    return qcsync::qmath::DensityMatrix::from_matrix(qcsync::qmath::SquareMatrix(rho));
}

// BBPSSW map written directly from the Werner-state formulas.
inline double next_fidelity(double f) {
    const double num = f * f + (1 - f) * (1 - f) / 9;
    const double den = f * f + 2 * f * (1 - f) / 3 + 5 * (1 - f) * (1 - f) / 9;
    return num / den;
}
inline double success_probability(double f) {
    return f * f + 2 * f * (1 - f) / 3 + 5 * (1 - f) * (1 - f) / 9;
}

}  // namespace oracle
