#ifndef ENTKIT_BRIDGE_HPP
#define ENTKIT_BRIDGE_HPP

#include <complex>

#include <Eigen/Dense>

#include "entkit/fock.hpp"
#include "entkit/gaussian.hpp"

namespace entkit::bridge {

using Cplx = std::complex<double>;
using gauss::Mat;
using gauss::Vec;

/*
 * Conversions between the covariance-matrix and truncated Fock
 * representations of centered two-mode states.
 */

/// Matrix element <m| W(xi) |n> of the single-mode Weyl operator, evaluated
/// through its normal-ordered Laguerre form.
Cplx weyl_element(int m, int n, double xi1, double xi2);

/// Fock matrix element rho_{a,b;c,d} of the centered Gaussian state with
/// covariance gamma (two modes).  Exactly zero when a+b+c+d is odd.  The
/// Gaussian-moment reduction enumerates Isserlis pair partitions; the cost
/// grows as the double factorial of the total degree a+b+c+d, which is
/// capped at moment_bound.
Cplx gaussian_fock_element(const Mat& gamma, int a, int b, int c, int d, int moment_bound = 12);

/// rho_{0,0,0,0} = 4 / |Gamma + 1|^(1/2).
double gaussian_vacuum_element(const Mat& gamma);

/// Fill a truncated two-mode density matrix from a centered Gaussian
/// covariance.  Requires 4*cutoff <= moment_bound.  The trace deficit is
/// recorded as truncated_weight.
fock::FockDensityMatrix gaussian_to_fock(const Mat& gamma, int cutoff, int moment_bound = 12);

/// The six normalized elements sigma_{a,b,c,d} = rho_{a,b,c,d} / rho_{0,0,0,0}
/// that pin down a centered two-mode Gaussian state.
struct SigmaElements {
    double s1010 = 0.0;
    double s0101 = 0.0;
    Cplx s1001{0.0, 0.0};
    Cplx s2000{0.0, 0.0};
    Cplx s0200{0.0, 0.0};
    Cplx s1100{0.0, 0.0};
};

/// Extract the six elements from an (unnormalized) two-mode Fock state.
SigmaElements sigma_elements(const fock::FockDensityMatrix& rho);

/// Invert the element relations for B = (Gamma + 1)^(-1) and return
/// Gamma = B^(-1) - 1.  Throws numeric_error when B is singular (the null
/// state).
Mat sigma_to_covariance(const SigmaElements& sigma);

/// chi_rho(xi) = Tr[rho W_xi] for a one- or two-mode Fock state; xi has
/// 2 * n_modes entries.
Cplx characteristic_function(const fock::FockDensityMatrix& state, const Vec& xi);

struct WignerGrid {
    double min = -4.0;
    double max = 4.0;
    int points = 81;
    // integration grid for the Fourier transform of chi
    double xi_extent = 10.0;
    int xi_points = 161;
};

struct WignerField {
    Eigen::VectorXd x;       // quadrature X samples
    Eigen::VectorXd p;       // quadrature P samples
    Eigen::MatrixXd w;       // w(i,j) = W(x(i), p(j))
    double normalization;    // trapezoidal integral over the output window
};

/// Wigner function of a single-mode state by Fourier quadrature of the
/// characteristic function.  Throws numeric_error when the quadrature
/// normalization deviates from one by more than norm_tol.
WignerField wigner(const fock::FockDensityMatrix& state, const WignerGrid& grid = {},
                   double norm_tol = 1e-3);

/// Covariance matrix and displacement of a Fock state from its second
/// moments (used for best-fit Gaussian comparisons).
std::pair<Mat, Vec> covariance_of_fock(const fock::FockDensityMatrix& state);

}  // namespace entkit::bridge

#endif
