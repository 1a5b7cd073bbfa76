#ifndef ENTKIT_JUMPMC_HPP
#define ENTKIT_JUMPMC_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "entkit/errors.hpp"
#include "entkit/stats.hpp"

namespace entkit::jumpmc {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/*
 * Two-ion, two-cavity weak-driving scheme: Hamiltonians, non-Hermitian
 * conditional evolution and quantum-jump Monte Carlo with beam-splitter
 * erased detection, spontaneous emission, detector inefficiency and dark
 * counts.  All rates in units of the coupling g; time in units of 1/g.
 *
 * Rate conventions: photons leak from each cavity at 2*kappa (jump
 * sqrt(2 kappa) a), spontaneous decay channels C->A and C->B at 2*gamma_A,
 * 2*gamma_B (jumps sqrt(2 gamma) |A><C|, |B><C|).
 */

struct IonCavityParams {
    double g = 1.0;
    double Omega = 2.0;
    double Delta = 20.0;
    double kappa = 10.0;
    double gamma_A = 0.0;
    double gamma_B = 0.0;

    /// x = -i g Omega / (2 Delta kappa); |x| << 1 is the weak-driving limit.
    Cplx x() const { return Cplx(0.0, -1.0) * g * Omega / (2.0 * Delta * kappa); }
    /// T_av = kappa Delta^2 / (g^2 Omega^2), the mean first-click time.
    double t_av() const { return kappa * Delta * Delta / (g * g * Omega * Omega); }
};

enum class Model { automatic, adiabatic, full };

struct JumpConfig {
    IonCavityParams params;
    int cutoff = 2;          // cavity photon cutoff
    double dt = 0.0;         // timestep; 0 selects T_av / 1e5 (paper default)
    double T_wait = 0.0;     // waiting window; 0 selects 10 * T_av
    double eta = 1.0;        // detector efficiency
    double dark_rate = 0.0;  // dark counts per unit time per detector pair
    int n_traj = 10000;
    std::uint64_t seed = 1;
    Model model = Model::automatic;
    int threads = 1;
    double capture_state_at = -1.0;  // >= 0: record the trajectory state at this time

    void validate() const;
    Model effective_model() const;
};

enum class Outcome { click, no_click, lost };

struct TrajectoryRecord {
    Outcome outcome = Outcome::no_click;
    int detector = 0;        // 1 or 2 for click outcomes
    double t_click = -1.0;
    double fidelity = 0.0;   // click-conditioned Bell fidelity
    int n_clicks = 0;        // registered clicks within the window
    bool dark = false;       // first click was a dark count
    CVec captured_state;     // populated when capture_state_at is set
};

struct MCStats {
    stats::Estimate p_success;
    stats::Estimate mean_fidelity;              // over all click trajectories
    stats::Estimate mean_fidelity_single_click; // multi-click trajectories excluded
    stats::Estimate mean_first_click_time;
    long n_traj = 0;
    long n_clicks = 0;
};

/// Interaction-picture Hamiltonian of one driven ion-cavity subsystem on the
/// three-level basis {A, B, C} x Fock(cutoff).
CMat build_full_hamiltonian(const IonCavityParams& params, int cutoff);

/// Adiabatically eliminated two-level Hamiltonian on {A, B} x Fock(cutoff).
CMat build_adiabatic_hamiltonian(const IonCavityParams& params, int cutoff);

/// Non-Hermitian conditional Hamiltonian of the joint two-subsystem space.
CMat effective_hamiltonian(const IonCavityParams& params, int cutoff, Model model);

struct JumpOperator {
    CMat matrix;    // rate folded in, so sum J^dag J = -2 Im part of H_eff
    bool photonic;  // photonic jumps can register a detector click
    int detector;   // 1 or 2 for photonic jumps
};

/// Joint-space jump operators: the two beam-splitter-erased photonic jumps
/// and, for the full model, the four spontaneous-emission jumps.
std::vector<JumpOperator> jump_operators(const IonCavityParams& params, int cutoff, Model model);

/// Dimension bookkeeping for the joint space.
int ion_levels(Model model);
int subsystem_dim(Model model, int cutoff);

/// Initial state |B,0> x |B,0>.
CVec initial_state(Model model, int cutoff);

/// Overlap of the two-ion reduced state with the click-conditioned Bell
/// target (|B,A> + i|A,B>)/sqrt(2) for detector 1 or (i|B,A> + |A,B>)/sqrt(2)
/// for detector 2.
double bell_fidelity(const CMat& two_ion_rho, int detector, Model model);

/// Reduce a joint pure state to the two-ion density matrix.
CMat reduce_to_ions(const CVec& psi, Model model, int cutoff);

/// Quantum-jump Monte Carlo over n_traj trajectories.  Fully reproducible:
/// one deterministic substream per trajectory index derived from the seed.
std::pair<std::vector<TrajectoryRecord>, MCStats> run_trajectories(const JumpConfig& config);

}  // namespace entkit::jumpmc

#endif
