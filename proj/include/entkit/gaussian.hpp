#ifndef ENTKIT_GAUSSIAN_HPP
#define ENTKIT_GAUSSIAN_HPP

#include <vector>

#include <Eigen/Dense>

#include "entkit/errors.hpp"

namespace entkit::gauss {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/*
 * Covariance-matrix representation of Gaussian states.
 *
 * Conventions: X = (a + a^dag)/sqrt(2), P = -i(a - a^dag)/sqrt(2),
 * quadratures ordered (X1, P1, X2, P2, ...), vacuum covariance = identity,
 * entanglement measured in ebits (log base 2).
 */

/// Block-diagonal symplectic form, n copies of [[0,1],[-1,0]].
Mat symplectic_form(int n_modes);

struct GaussianState {
    int n_modes = 0;
    Mat covariance;    // real symmetric 2n x 2n
    Vec displacement;  // real 2n

    GaussianState() = default;
    GaussianState(Mat gamma, Vec d);
    explicit GaussianState(Mat gamma);  // zero displacement

    static GaussianState vacuum(int n_modes);
};

struct SymplecticOp {
    Mat matrix;  // real 2n x 2n, S^T Sigma S = Sigma

    int n_modes() const { return static_cast<int>(matrix.rows()) / 2; }
};

/// Physicality check: Gamma + i*Sigma >= 0 up to tol on the minimum eigenvalue.
bool is_physical(const GaussianState& state, double tol = 1e-9);
bool is_physical_covariance(const Mat& gamma, double tol = 1e-9);

/// Two-mode squeezed state, covariance built from cosh(2r)/sinh(2r) blocks
/// rotated by R(phi/2) on each mode.
GaussianState make_tmss(double r, double phi);

/// Single-mode phase-space rotation through phi.
SymplecticOp make_phase_shift(double phi);

/// Two-mode beam splitter with real T, R (T^2 + R^2 = 1).  Complex
/// conventions are realized by composing phase shifts at the call site.
SymplecticOp make_beam_splitter(double T, double R);

/// Single-mode squeezer diag(e^r, e^-r).
SymplecticOp make_squeezer(double r);

/// Direct sum of two symplectic maps.
SymplecticOp direct_sum(const SymplecticOp& a, const SymplecticOp& b);

/// Embed an operator acting on the listed modes (in order) into an n-mode map.
SymplecticOp embed(const SymplecticOp& op, int n_modes, const std::vector<int>& modes);

/// Gamma -> S Gamma S^T, d -> S d.
GaussianState apply(const SymplecticOp& op, const GaussianState& state);

/// Absorbing channel with transmission tau on the listed modes: covariance
/// block tau*Gamma + (1-tau)*1, cross blocks scaled by sqrt(tau), displacement
/// scaled by sqrt(tau).
GaussianState absorb(const GaussianState& state, double tau, const std::vector<int>& modes);
GaussianState absorb(const GaussianState& state, double tau);  // all modes

/// Moduli of the paired eigenvalues of Sigma*Gamma, one per pair, ascending.
Vec symplectic_eigenvalues(const Mat& gamma);

/// Logarithmic negativity across the bipartition; modes_b lists the modes
/// whose momenta are reversed by the partial transpose.
double log_negativity(const GaussianState& state, const std::vector<int>& modes_b);
double log_negativity(const GaussianState& state);  // two-mode default {1}

/// von Neumann entropy (base 2) from symplectic eigenvalues; 0*log0 := 0.
double vn_entropy(const Mat& gamma);
double vn_entropy(const GaussianState& state);

/// Linear entropy 1 - |Gamma|^(-1/2).
double linear_entropy(const Mat& gamma);
double linear_entropy(const GaussianState& state);

/// Reduced state of the listed modes.
GaussianState reduce(const GaussianState& state, const std::vector<int>& modes);

}  // namespace entkit::gauss

#endif
