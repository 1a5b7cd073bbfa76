#ifndef ENTKIT_CAVITY_HPP
#define ENTKIT_CAVITY_HPP

#include <complex>

#include "entkit/errors.hpp"

namespace entkit::cavity {

using Cplx = std::complex<double>;

/*
 * Atom-through-two-cavities Bell-state scheme: exact post-passage state,
 * fidelity and success probability, interaction-time asymmetry, Fabry-Perot
 * geometry and effective interaction times, detector-repetition statistics.
 * All lengths in meters, speeds in m/s, angles in radians.
 */

struct CavityGeometry {
    double L = 0.0;       // mirror separation
    double R_curv = 0.0;  // mirror radius of curvature
    double lambda = 0.0;  // wavelength
    double D0 = 0.0;      // collimator exit -> cavity A center
    double D1 = 0.0;      // cavity A center -> cavity B center

    /// Gaussian mode waist, w0^2 = lambda sqrt(L (2R - L)) / (2 pi).
    double waist() const;
    void validate() const;  // throws numeric_error unless 2R > L > 0
};

struct AtomPath {
    double y0 = 0.0;     // transverse offsets at the collimator exit
    double z0 = 0.0;
    double phi = 0.0;    // angles of the path against the axis, y and z planes
    double theta = 0.0;
    double v = 500.0;    // speed
};

struct PassageResult {
    Cplx amp_B00;  // |B,0,0>
    Cplx amp_A01;  // |A,0,1>  (photon in cavity B)
    Cplx amp_A10;  // |A,1,0>  (photon in cavity A)
    double fidelity_on_success = 1.0;
    double p_success = 0.0;
};

/// Exact state of atom + two cavity modes after sequential resonant
/// interactions g*tau_A and g*tau_B, starting from |B,0,0>.
PassageResult state_after_passage(double gtauA, double gtauB);

/// F = 1/2 + cos(gt) / (cos^2(gt) + 1) for equal interaction times.
double fidelity_ideal(double gtau);

/// P = 1 - cos^4(gt).
double success_probability(double gtau);

/// Fidelity with interaction times tau and tau(1 - epsilon).
double fidelity_asymmetric(double gtau, double epsilon);

/// Effective interaction time of the atom with one cavity (0 = A, 1 = B):
/// exact line integral of the Gaussian-by-cosine mode function along the
/// straight path.
double effective_interaction_time(const CavityGeometry& geometry, const AtomPath& path, int cavity_index);

/// Second-order estimate of epsilon = 1 - tau_B / tau_A in the path offsets
/// and angles.
double epsilon_estimate(const CavityGeometry& geometry, const AtomPath& path);

/// Probability that a detector of efficiency D fires on every run of a
/// scheme with per-run success probability P: D^(1/P).
double detection_run_probability(double D, double P);

}  // namespace entkit::cavity

#endif
