#include "entkit/jumpmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

namespace entkit::jumpmc {

namespace {

// self-contained 64-bit generator so trajectory substreams are identical
// across platforms
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() {  // in [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    double uniform_open() {  // in (0, 1)
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }
};

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t traj) {
    SplitMix64 mix(master ^ (0xD1B54A32D192ED03ULL * (traj + 1)));
    return mix.next();
}

}  // namespace

void JumpConfig::validate() const {
    if (n_traj < 1) throw config_error("jump config: n_traj must be >= 1");
    if (cutoff < 1) throw config_error("jump config: cutoff must be >= 1");
    if (eta < 0.0 || eta > 1.0) throw config_error("jump config: eta must lie in [0,1]");
    if (dark_rate < 0.0) throw config_error("jump config: dark_rate must be non-negative");
    if (!(params.kappa > 0.0)) throw config_error("jump config: kappa must be positive");
    const double tav = params.t_av();
    const double step = (dt > 0.0) ? dt : tav / 1e5;
    if (step > tav / 1e4 * (1.0 + 1e-12))
        throw config_error("jump config: dt must not exceed T_av / 1e4");
    const double wait = (T_wait > 0.0) ? T_wait : 10.0 * tav;
    if (wait < step) throw config_error("jump config: waiting window shorter than one step");
}

Model JumpConfig::effective_model() const {
    if (model != Model::automatic) return model;
    return (params.gamma_A > 0.0 || params.gamma_B > 0.0) ? Model::full : Model::adiabatic;
}

int ion_levels(Model model) { return model == Model::full ? 3 : 2; }

int subsystem_dim(Model model, int cutoff) { return ion_levels(model) * (cutoff + 1); }

namespace {
constexpr int ION_A = 0;
constexpr int ION_B = 1;
constexpr int ION_C = 2;
}  // namespace

CMat build_full_hamiltonian(const IonCavityParams& params, int cutoff) {
    if (cutoff < 1) throw numeric_error("cutoff must be >= 1");
    const int f = cutoff + 1;
    CMat h = CMat::Zero(3 * f, 3 * f);
    auto idx = [f](int ion, int n) { return ion * f + n; };
    for (int n = 0; n < f; ++n) {
        h(idx(ION_C, n), idx(ION_C, n)) = params.Delta;
        if (n + 1 < f) {
            // g |C><A| a  +  h.c.
            h(idx(ION_C, n), idx(ION_A, n + 1)) = params.g * std::sqrt(n + 1.0);
            h(idx(ION_A, n + 1), idx(ION_C, n)) = params.g * std::sqrt(n + 1.0);
        }
        h(idx(ION_C, n), idx(ION_B, n)) = params.Omega / 2.0;
        h(idx(ION_B, n), idx(ION_C, n)) = params.Omega / 2.0;
    }
    return h;
}

CMat build_adiabatic_hamiltonian(const IonCavityParams& params, int cutoff) {
    if (cutoff < 1) throw numeric_error("cutoff must be >= 1");
    const int f = cutoff + 1;
    CMat h = CMat::Zero(2 * f, 2 * f);
    auto idx = [f](int ion, int n) { return ion * f + n; };
    const double g2d = params.g * params.g / params.Delta;
    const double o2d = params.Omega * params.Omega / (4.0 * params.Delta);
    const double cpl = params.Omega * params.g / (2.0 * params.Delta);
    for (int n = 0; n < f; ++n) {
        h(idx(ION_A, n), idx(ION_A, n)) = g2d * n;
        h(idx(ION_B, n), idx(ION_B, n)) = o2d;
        if (n + 1 < f) {
            // (Omega g / 2 Delta) |B><A| a + h.c.
            h(idx(ION_B, n), idx(ION_A, n + 1)) = cpl * std::sqrt(n + 1.0);
            h(idx(ION_A, n + 1), idx(ION_B, n)) = cpl * std::sqrt(n + 1.0);
        }
    }
    return h;
}

namespace {

CMat annihilation_on_subsystem(Model model, int cutoff) {
    const int f = cutoff + 1;
    const int levels = ion_levels(model);
    CMat a = CMat::Zero(levels * f, levels * f);
    for (int ion = 0; ion < levels; ++ion)
        for (int n = 1; n < f; ++n) a(ion * f + n - 1, ion * f + n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMat ion_projector(Model model, int cutoff, int from, int to) {
    const int f = cutoff + 1;
    const int levels = ion_levels(model);
    CMat p = CMat::Zero(levels * f, levels * f);
    for (int n = 0; n < f; ++n) p(to * f + n, from * f + n) = 1.0;
    return p;
}

CMat kron_with_identity(const CMat& m, int dim_other, bool m_first) {
    const int dm = static_cast<int>(m.rows());
    CMat out = CMat::Zero(dm * dim_other, dm * dim_other);
    if (m_first) {
        for (int i = 0; i < dm; ++i)
            for (int j = 0; j < dm; ++j)
                if (m(i, j) != Cplx(0, 0))
                    for (int k = 0; k < dim_other; ++k) out(i * dim_other + k, j * dim_other + k) = m(i, j);
    } else {
        for (int k = 0; k < dim_other; ++k)
            for (int i = 0; i < dm; ++i)
                for (int j = 0; j < dm; ++j)
                    if (m(i, j) != Cplx(0, 0)) out(k * dm + i, k * dm + j) = m(i, j);
    }
    return out;
}

}  // namespace

CMat effective_hamiltonian(const IonCavityParams& params, int cutoff, Model model) {
    if (model == Model::automatic)
        model = (params.gamma_A > 0.0 || params.gamma_B > 0.0) ? Model::full : Model::adiabatic;
    const CMat h1 = (model == Model::full) ? build_full_hamiltonian(params, cutoff)
                                           : build_adiabatic_hamiltonian(params, cutoff);
    const int d = subsystem_dim(model, cutoff);
    const CMat a = annihilation_on_subsystem(model, cutoff);
    CMat h_sub = h1 - Cplx(0, 1) * params.kappa * (a.adjoint() * a);
    if (model == Model::full) {
        const CMat pc = ion_projector(model, cutoff, ION_C, ION_C);
        h_sub -= Cplx(0, 1) * (params.gamma_A + params.gamma_B) * pc;
    }
    return kron_with_identity(h_sub, d, true) + kron_with_identity(h_sub, d, false);
}

std::vector<JumpOperator> jump_operators(const IonCavityParams& params, int cutoff, Model model) {
    if (model == Model::automatic)
        model = (params.gamma_A > 0.0 || params.gamma_B > 0.0) ? Model::full : Model::adiabatic;
    const int d = subsystem_dim(model, cutoff);
    const CMat a = annihilation_on_subsystem(model, cutoff);
    const CMat a_first = kron_with_identity(a, d, true);
    const CMat a_second = kron_with_identity(a, d, false);
    const double sk = std::sqrt(params.kappa);
    std::vector<JumpOperator> ops;
    ops.push_back({sk * (Cplx(0, 1) * a_first + a_second), true, 1});
    ops.push_back({sk * (a_first + Cplx(0, 1) * a_second), true, 2});
    if (model == Model::full) {
        if (params.gamma_A > 0.0) {
            const CMat j = std::sqrt(2.0 * params.gamma_A) * ion_projector(model, cutoff, ION_C, ION_A);
            ops.push_back({kron_with_identity(j, d, true), false, 0});
            ops.push_back({kron_with_identity(j, d, false), false, 0});
        }
        if (params.gamma_B > 0.0) {
            const CMat j = std::sqrt(2.0 * params.gamma_B) * ion_projector(model, cutoff, ION_C, ION_B);
            ops.push_back({kron_with_identity(j, d, true), false, 0});
            ops.push_back({kron_with_identity(j, d, false), false, 0});
        }
    }
    return ops;
}

CVec initial_state(Model model, int cutoff) {
    const int d = subsystem_dim(model, cutoff);
    const int f = cutoff + 1;
    CVec psi = CVec::Zero(d * d);
    const int b0 = ION_B * f + 0;
    psi(b0 * d + b0) = 1.0;
    return psi;
}

CMat reduce_to_ions(const CVec& psi, Model model, int cutoff) {
    const int f = cutoff + 1;
    const int levels = ion_levels(model);
    const int d = levels * f;
    CMat rho = CMat::Zero(levels * levels, levels * levels);
    for (int i1 = 0; i1 < levels; ++i1)
        for (int i2 = 0; i2 < levels; ++i2)
            for (int j1 = 0; j1 < levels; ++j1)
                for (int j2 = 0; j2 < levels; ++j2) {
                    Cplx sum(0, 0);
                    for (int n1 = 0; n1 < f; ++n1)
                        for (int n2 = 0; n2 < f; ++n2)
                            sum += psi((i1 * f + n1) * d + (i2 * f + n2)) *
                                   std::conj(psi((j1 * f + n1) * d + (j2 * f + n2)));
                    rho(i1 * levels + i2, j1 * levels + j2) = sum;
                }
    const double tr = rho.trace().real();
    if (tr > 0.0) rho /= tr;
    return rho;
}

double bell_fidelity(const CMat& two_ion_rho, int detector, Model model) {
    if (detector != 1 && detector != 2) throw numeric_error("bell_fidelity: detector must be 1 or 2");
    const int levels = ion_levels(model);
    CVec bell = CVec::Zero(levels * levels);
    const Cplx i1(0.0, 1.0);
    if (detector == 1) {
        bell(ION_B * levels + ION_A) = 1.0 / std::sqrt(2.0);
        bell(ION_A * levels + ION_B) = i1 / std::sqrt(2.0);
    } else {
        bell(ION_B * levels + ION_A) = i1 / std::sqrt(2.0);
        bell(ION_A * levels + ION_B) = 1.0 / std::sqrt(2.0);
    }
    const Cplx f = bell.adjoint() * two_ion_rho * bell;
    return f.real();
}

namespace {

struct Engine {
    Model model;
    int cutoff;
    double dt;
    long total_steps;
    double eta;
    double dark_rate;
    long capture_step;  // -1 when unused
    std::vector<CMat> ladder;  // ladder[j] = U_dt^(2^j)
    std::vector<JumpOperator> jumps;
    CVec psi0;

    // last step k <= max_steps with ||U^k phi||^2 >= u; phi must be normalized
    std::pair<long, CVec> survive_until(const CVec& phi, double u, long max_steps) const {
        CVec cur = phi;
        long taken = 0;
        for (int j = static_cast<int>(ladder.size()) - 1; j >= 0; --j) {
            const long span = 1L << j;
            if (taken + span > max_steps) continue;
            CVec cand = ladder[static_cast<size_t>(j)] * cur;
            if (cand.squaredNorm() >= u) {
                cur.swap(cand);
                taken += span;
            }
        }
        return {taken, cur};
    }

    CVec advance(const CVec& phi, long steps) const {
        CVec cur = phi;
        for (int j = 0; steps != 0; ++j, steps >>= 1)
            if (steps & 1L) cur = ladder[static_cast<size_t>(j)] * cur;
        return cur;
    }
};

TrajectoryRecord simulate_one(const Engine& eng, std::uint64_t seed) {
    SplitMix64 rng(seed);
    TrajectoryRecord rec;

    // presampled dark-count steps (classical Poisson process, both detectors)
    std::vector<std::pair<long, int>> darks;
    if (eng.dark_rate > 0.0) {
        double t = 0.0;
        const double horizon = static_cast<double>(eng.total_steps) * eng.dt;
        while (true) {
            t += -std::log(rng.uniform_open()) / eng.dark_rate;
            if (t >= horizon) break;
            const long step = static_cast<long>(std::ceil(t / eng.dt));
            const int det = (rng.uniform() < 0.5) ? 1 : 2;
            darks.emplace_back(std::min(step, eng.total_steps), det);
        }
    }
    size_t dark_pos = 0;

    CVec state = eng.psi0;
    long seg_start = 0;
    bool any_unheralded = false;

    auto handle_darks_until = [&](long limit_step, const CVec& seg_state) {
        while (dark_pos < darks.size() && darks[dark_pos].first <= limit_step) {
            const auto [dstep, ddet] = darks[dark_pos];
            ++dark_pos;
            ++rec.n_clicks;
            if (rec.outcome != Outcome::click) {
                rec.outcome = Outcome::click;
                rec.detector = ddet;
                rec.t_click = static_cast<double>(dstep) * eng.dt;
                rec.dark = true;
                CVec at = eng.advance(seg_state, dstep - seg_start);
                at.normalize();
                rec.fidelity = bell_fidelity(reduce_to_ions(at, eng.model, eng.cutoff), ddet, eng.model);
            }
        }
    };

    while (seg_start < eng.total_steps) {
        const long remaining = eng.total_steps - seg_start;
        const double u = rng.uniform_open();
        auto [survived, drifted] = eng.survive_until(state, u, remaining);

        if (eng.capture_step >= seg_start && eng.capture_step <= seg_start + survived &&
            rec.captured_state.size() == 0) {
            CVec cap = eng.advance(state, eng.capture_step - seg_start);
            cap.normalize();
            rec.captured_state = cap;
        }

        if (survived == remaining) {
            handle_darks_until(eng.total_steps, state);
            break;
        }

        const long jump_step = seg_start + survived + 1;
        handle_darks_until(jump_step, state);

        // advance the final step and select the jump channel
        CVec pre = eng.ladder[0] * drifted;
        double total_w = 0.0;
        std::vector<double> w(eng.jumps.size());
        std::vector<CVec> jumped(eng.jumps.size());
        for (size_t i = 0; i < eng.jumps.size(); ++i) {
            jumped[i] = eng.jumps[i].matrix * pre;
            w[i] = jumped[i].squaredNorm();
            total_w += w[i];
        }
        if (!(total_w > 0.0)) throw numeric_error("jump selected but all channel weights vanish");
        double pick = rng.uniform() * total_w;
        size_t chosen = 0;
        for (; chosen + 1 < w.size(); ++chosen) {
            if (pick < w[chosen]) break;
            pick -= w[chosen];
        }
        CVec post = jumped[chosen] / std::sqrt(w[chosen]);

        const bool registered = eng.jumps[chosen].photonic && (rng.uniform() < eng.eta);
        if (registered) {
            ++rec.n_clicks;
            if (rec.outcome != Outcome::click) {
                rec.outcome = Outcome::click;
                rec.detector = eng.jumps[chosen].detector;
                rec.t_click = static_cast<double>(jump_step) * eng.dt;
                rec.fidelity =
                    bell_fidelity(reduce_to_ions(post, eng.model, eng.cutoff), rec.detector, eng.model);
            }
        } else {
            any_unheralded = true;
        }

        state = post;
        seg_start = jump_step;
    }

    if (eng.capture_step >= seg_start && eng.capture_step <= eng.total_steps &&
        rec.captured_state.size() == 0) {
        CVec cap = eng.advance(state, eng.capture_step - seg_start);
        cap.normalize();
        rec.captured_state = cap;
    }

    if (rec.outcome != Outcome::click) rec.outcome = any_unheralded ? Outcome::lost : Outcome::no_click;
    return rec;
}

}  // namespace

std::pair<std::vector<TrajectoryRecord>, MCStats> run_trajectories(const JumpConfig& config) {
    config.validate();
    const Model model = config.effective_model();
    const double tav = config.params.t_av();
    const double dt = (config.dt > 0.0) ? config.dt : tav / 1e5;
    const double wait = (config.T_wait > 0.0) ? config.T_wait : 10.0 * tav;

    Engine eng;
    eng.model = model;
    eng.cutoff = config.cutoff;
    eng.dt = dt;
    eng.total_steps = static_cast<long>(std::llround(wait / dt));
    eng.eta = config.eta;
    eng.dark_rate = config.dark_rate;
    eng.capture_step =
        (config.capture_state_at >= 0.0) ? static_cast<long>(std::llround(config.capture_state_at / dt)) : -1;
    eng.jumps = jump_operators(config.params, config.cutoff, model);
    eng.psi0 = initial_state(model, config.cutoff);

    const CMat h_eff = effective_hamiltonian(config.params, config.cutoff, model);
    CMat u_dt = (Cplx(0, -1) * dt * h_eff).exp();
    // per-step norm decay on the initial state is the coarseness check
    {
        const double drop = 1.0 - (u_dt * eng.psi0).squaredNorm();
        if (drop > 1e-3) throw numeric_error("run_trajectories: dt too coarse (norm drift > 1e-3 per step)");
    }
    int levels = 0;
    for (long span = 1; span < eng.total_steps; span <<= 1) ++levels;
    eng.ladder.resize(static_cast<size_t>(levels + 1));
    eng.ladder[0] = std::move(u_dt);
    for (int j = 1; j <= levels; ++j)
        eng.ladder[static_cast<size_t>(j)] =
            eng.ladder[static_cast<size_t>(j - 1)] * eng.ladder[static_cast<size_t>(j - 1)];

    std::vector<TrajectoryRecord> records(static_cast<size_t>(config.n_traj));
    const int n_threads = std::max(1, config.threads);
    if (n_threads == 1) {
        for (int i = 0; i < config.n_traj; ++i)
            records[static_cast<size_t>(i)] = simulate_one(eng, substream_seed(config.seed, i));
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&]() {
                while (true) {
                    const int i = next.fetch_add(1);
                    if (i >= config.n_traj) return;
                    records[static_cast<size_t>(i)] = simulate_one(eng, substream_seed(config.seed, i));
                }
            });
        for (auto& t : pool) t.join();
    }

    MCStats st;
    st.n_traj = config.n_traj;
    std::vector<double> fids, fids_single, times;
    long clicks = 0;
    for (const auto& r : records) {
        if (r.outcome == Outcome::click) {
            ++clicks;
            fids.push_back(r.fidelity);
            times.push_back(r.t_click);
            if (r.n_clicks == 1) fids_single.push_back(r.fidelity);
        }
    }
    st.n_clicks = clicks;
    st.p_success = stats::binomial_estimate(clicks, config.n_traj);
    st.mean_fidelity = stats::mean_with_stderr(fids);
    st.mean_fidelity_single_click = stats::mean_with_stderr(fids_single);
    st.mean_first_click_time = stats::mean_with_stderr(times);
    return {records, st};
}

}  // namespace entkit::jumpmc
