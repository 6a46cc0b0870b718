#pragma once

// Depolarizing noise, Bell-basis bookkeeping and the 12-element bilateral twirl.
//
// Bell states, Alice on qubit 0:
//   psi-  = (|10> - |01>)/sqrt2    psi+ = (|10> + |01>)/sqrt2
//   phi-  = (|00> - |11>)/sqrt2    phi+ = (|00> + |11>)/sqrt2

#include <array>
#include <string_view>

#include "qcsync/frames.h"
#include "qcsync/qmath.h"
#include "qcsync/rng.h"

namespace qcsync::channels {

class NoiseModel {
public:
    explicit NoiseModel(double p);
    double p() const { return p_; }

private:
    double p_;
};

enum class Bell { PsiMinus = 0, PsiPlus = 1, PhiMinus = 2, PhiPlus = 3 };

qmath::PureState bell_state(Bell b);

struct BellDiagonal {
    double psi_minus = 0;
    double psi_plus = 0;
    double phi_minus = 0;
    double phi_plus = 0;

    // Throws ConfigError unless weights are >= -1e-12 and sum to 1 within 1e-12.
    void validate() const;
    double max_abs_diff(const BellDiagonal& o) const;
    std::array<double, 4> weights() const { return {psi_minus, psi_plus, phi_minus, phi_plus}; }

    // sum_b w_b |b><b| in the reference representation.
    qmath::DensityMatrix to_density() const;
    static BellDiagonal werner(double fidelity);
};

struct BellDecomposition {
    BellDiagonal weights;
    double off_diagonal_residual = 0;  // Frobenius norm of the Bell-basis off-diagonal part
};

// One element of the twirl group. The bilateral operator is local (x) local.
struct TwirlElement {
    std::string_view word;  // gate sequence, applied left to right
    qmath::SquareMatrix local;
    qmath::SquareMatrix bilateral;
};

class TwirlGroup {
public:
    static constexpr int kSize = 12;

    const std::array<TwirlElement, kSize>& elements() const { return elements_; }
    const TwirlElement& operator[](int i) const { return elements_[static_cast<std::size_t>(i)]; }

private:
    friend const TwirlGroup& twirl_group();
    TwirlGroup();
    std::array<TwirlElement, kSize> elements_;
};

// (p/4) I + (1-p) rho.
qmath::DensityMatrix depolarize(const qmath::DensityMatrix& rho, const NoiseModel& noise);

// The shared immutable group. Elements are products of G_M = sqrt(M) (x) sqrt(M),
// M in {I, X, Y, Z}, with principal square roots.
const TwirlGroup& twirl_group();

// (1/12) sum_n B_n rho B_n^dagger.
qmath::DensityMatrix twirl_average(const qmath::DensityMatrix& rho);

// Bell weights of the twirled state. Throws InvariantError if the averaged
// state keeps a Bell-basis off-diagonal part above 1e-8.
BellDiagonal twirl(const qmath::DensityMatrix& rho);

// B_n rho B_n^dagger for one element drawn uniformly from rng.
qmath::DensityMatrix sample_twirl(const qmath::DensityMatrix& rho, Rng& rng);

qmath::DensityMatrix apply_twirl_element(const qmath::DensityMatrix& rho, int index,
                                         const frames::BasisFrame& alice,
                                         const frames::BasisFrame& bob);

BellDecomposition bell_weights(const qmath::DensityMatrix& rho);

// F |psi-><psi-| + (1-F)/3 (I - |psi-><psi-|).
qmath::DensityMatrix werner_from_fidelity(double fidelity);

// Closed form of twirl(depolarize(|psi-_phi><psi-_phi|, p)).
BellDiagonal twirled_phase_state(double p, double phi);

// p/4 + (1-p) cos^2(phi/2).
double phase_state_fidelity(double p, double phi);

}  // namespace qcsync::channels
