#ifndef ENTKIT_DISTILL_HPP
#define ENTKIT_DISTILL_HPP

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "entkit/bridge.hpp"
#include "entkit/fock.hpp"

namespace entkit::distill {

using Cplx = std::complex<double>;
using fock::FockDensityMatrix;
using fock::FockPureVector;
using gauss::Mat;

/*
 * Procrustean concentration and the iterative two-copy Gaussification
 * protocol: ideal, inefficient-detector and asymmetric-input recurrences,
 * inter-iteration decoherence channels, and fixed-point analysis.
 *
 * Protocol steps take trace-one inputs and return trace-one outputs together
 * with the explicit success probability.
 */

/// Schmidt-diagonal pure state sum_n alpha_n |n,n>.
struct PureSchmidtCoeffs {
    std::vector<Cplx> alpha;
};

struct GaussifyStepResult {
    FockDensityMatrix state;   // normalized
    double probability = 0.0;  // raw output trace / product of input traces
    double truncated_weight = 0.0;
};

struct ChannelSpec {
    enum class Kind { none, absorb, dephase, phase_diffuse };
    Kind kind = Kind::none;
    double parameter = 1.0;  // absorb theta in [0,1], dephase kappa in [0,1], diffusion upsilon in radians
};

/// One ideal Gaussification iteration on a Schmidt-diagonal pure state:
/// alpha_n' = 2^-n sum_r C(n,r) alpha_r alpha_{n-r}, with success probability
/// |alpha'|^2 / |alpha|^4.
std::pair<PureSchmidtCoeffs, double> gaussify_pure_step(const PureSchmidtCoeffs& alpha);

/// One ideal iteration on a general two-mode state (50:50 splitters on both
/// sides, conditioned on vacuum in the measured pair).
GaussifyStepResult gaussify_mixed_step(const FockDensityMatrix& rho);

/// Iteration with detector efficiency eta (eta = 1 reduces exactly to the
/// ideal recurrence).
GaussifyStepResult gaussify_step_inefficient(const FockDensityMatrix& rho, double eta);

/// Iteration on two different input states (same recurrence coefficients,
/// bilinear in rho and sigma).
GaussifyStepResult gaussify_step_asymmetric(const FockDensityMatrix& rho, const FockDensityMatrix& sigma);

/// Inter-iteration decoherence on both modes: absorbing loop, partial
/// dephasing (off-diagonals scaled by kappa) or Gaussian phase diffusion.
FockDensityMatrix apply_channel(const FockDensityMatrix& rho, const ChannelSpec& spec);

/// Procrustean filtering of a two-mode squeezed state: the exact amplitudes
/// alpha_n(m) conditioned on m detected photons, as a normalized two-mode
/// pure state in the (Alice n, Bob n+1-m) basis, plus the outcome probability.
std::pair<FockPureVector, double> procrustean_pure(double r, double T, int m, int cutoff);

/// Closed-form zero/one-photon block of the Procrustean output when the
/// input two-mode squeezed state passed through absorbing channels with
/// transmission tau (single detected photon).  Returned unnormalized with
/// rho_0000 = 1.
FockDensityMatrix procrustean_mixed_elements(double r, double tau, double T);

/// Parameters lambda, epsilon of the mixed Procrustean family.
double procrustean_lambda(double r, double tau, double T);

struct LimitResult {
    Mat gamma;            // covariance of the element-wise limit state
    bool converges;       // physicality of gamma
    bridge::SigmaElements sigma;  // post-first-iteration elements
};

/// Element-wise Gaussification limit of an input supply: the six invariant
/// elements after one iteration, converted to a covariance matrix.
LimitResult gaussify_limit(const FockDensityMatrix& rho0);

/// Criteria for convergence to a *pure* Gaussian state.
bool check_pure_convergence(const FockDensityMatrix& rho0, double tol = 1e-8);

struct ProtocolConfig {
    int iterations = 3;
    double detector_eta = 1.0;
    ChannelSpec channel{};
    bool channel_on_both = false;  // default: paper's one-sided storage model
    int cutoff = 10;
    int max_cutoff = 12;  // auto-raise ceiling
};

struct IterationRecord {
    int iteration = 0;  // 0 = input state
    double log_negativity = 0.0;
    double vn_entropy = 0.0;
    double probability = 1.0;       // of the step that produced this state
    double distance_to_limit = 0.0; // max element distance to the limit state; NaN when divergent
    double truncated_weight = 0.0;
};

/// Run the protocol for a number of iterations, recording entanglement,
/// entropy, success probability and elementwise distance to the limit state.
std::vector<IterationRecord> run_protocol(const FockDensityMatrix& rho0, const ProtocolConfig& config);

}  // namespace entkit::distill

#endif
