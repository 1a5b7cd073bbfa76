#ifndef ENTKIT_FOCK_HPP
#define ENTKIT_FOCK_HPP

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "entkit/errors.hpp"

namespace entkit::fock {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Beam-splitter phase conventions used in this code base.
///   symmetric_i:        a1 -> T a1 + iR a2,  a2 -> iR a1 + T a2
///   real_antisymmetric: a1 -> T a1 + R a2,   a2 -> -R a1 + T a2
enum class BsConvention { symmetric_i, real_antisymmetric };

/*
 * Dense truncated Fock-space density matrix for one or two modes.
 * Two-mode elements rho_{a,b;c,d} = <a,b|rho|c,d> are stored at
 * (a*(cutoff+1)+b, c*(cutoff+1)+d).  truncated_weight tracks probability
 * lost to the cutoff by photon-creating operations.
 */
struct FockDensityMatrix {
    int n_modes = 2;
    int cutoff = 10;
    CMat rho;
    double truncated_weight = 0.0;

    FockDensityMatrix() = default;
    FockDensityMatrix(int n_modes_, int cutoff_);

    int dim_per_mode() const { return cutoff + 1; }
    int dim() const;

    int index(int a, int b) const { return a * dim_per_mode() + b; }

    Cplx& at(int a, int b, int c, int d) { return rho(index(a, b), index(c, d)); }
    Cplx element(int a, int b, int c, int d) const;
    Cplx element1(int a, int c) const;  // single-mode accessor

    double trace() const { return rho.trace().real(); }
    void normalize();

    /// Hermiticity / positivity / trace sanity, within tolerances.
    bool is_valid_state(double tol = 1e-9) const;

    /// Resize to a new cutoff (copying the overlapping block).
    FockDensityMatrix with_cutoff(int new_cutoff) const;
};

/// Truncated two-mode Schmidt-diagonal pure vector, or a general pure vector
/// over the one/two-mode basis.
struct FockPureVector {
    int n_modes = 2;
    int cutoff = 10;
    CVec amp;
    double truncated_weight = 0.0;

    FockPureVector() = default;
    FockPureVector(int n_modes_, int cutoff_);

    int dim_per_mode() const { return cutoff + 1; }
    int index(int a, int b) const { return a * dim_per_mode() + b; }

    double norm2() const { return amp.squaredNorm(); }
    FockDensityMatrix to_density() const;
};

/// Two-mode squeezed state, amplitudes sech(r) (-e^{i phi} tanh r)^n |n,n>.
/// truncated_weight = tanh(r)^(2(cutoff+1)).
FockPureVector tmss_fock(double r, double phi, int cutoff);

/// Beam splitter on the two modes of a two-mode state.  Photon-number
/// conserving; components pushed past the per-mode cutoff are dropped and
/// accounted in truncated_weight.  Throws numeric_error when the accumulated
/// neglected weight exceeds neglect_bound.
FockDensityMatrix beam_splitter(const FockDensityMatrix& state, double T, double R,
                                BsConvention conv, double neglect_bound = 1e-6);
FockPureVector beam_splitter(const FockPureVector& state, double T, double R,
                             BsConvention conv, double neglect_bound = 1e-6);

/// POVM element of an inefficient no-click detection on one mode,
/// |0><0| -> sum_k (1-eta)^k |k><k|, followed by tracing the mode out.
/// Returns the unnormalized remaining state (trace = joint probability when
/// the input has trace one) and the conditional probability.
std::pair<FockDensityMatrix, double> project_vacuum(const FockDensityMatrix& state, int mode, double eta);

/// Projection onto exactly m photons in one mode (ideal photon-number
/// resolving detection, as used by the Procrustean step).
std::pair<FockDensityMatrix, double> project_number(const FockDensityMatrix& state, int mode, int m);

/// Trace out the given mode of a two-mode state.
FockDensityMatrix partial_trace(const FockDensityMatrix& state, int mode);

/// log2 of the trace norm of the partial transpose (second mode).
double log_negativity(const FockDensityMatrix& state);

/// von Neumann entropy (base 2) of the trace-normalized state.  Eigenvalues
/// below -1e-10 raise a positivity error; small negatives are clipped.
double vn_entropy(const FockDensityMatrix& state);

/// <psi|rho|psi> with both sides normalized.
double fidelity_with(const FockDensityMatrix& state, const FockPureVector& target);

/// Pure-state entanglement entropy of a two-mode pure vector (base 2).
double entanglement_entropy(const FockPureVector& psi);

}  // namespace entkit::fock

#endif
