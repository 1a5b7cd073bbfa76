#include "entkit/distill.hpp"

#include <cmath>
#include <limits>

namespace entkit::distill {

namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

double sqrt_binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(0.5 * (log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

FockDensityMatrix normalized_copy(const FockDensityMatrix& rho) {
    FockDensityMatrix out = rho;
    out.normalize();
    return out;
}

// diagonal band weight near the cutoff boundary, crude bound for the mass a
// step pushes past the cutoff
double boundary_band_weight(const FockDensityMatrix& rho) {
    const int n = rho.cutoff;
    if (n == 0) return 0.0;
    double w = 0.0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            if (a >= n - 1 || b >= n - 1) w += std::abs(rho.element(a, b, a, b));
    return w;
}

}  // namespace

std::pair<PureSchmidtCoeffs, double> gaussify_pure_step(const PureSchmidtCoeffs& alpha) {
    const int n_max = static_cast<int>(alpha.alpha.size()) - 1;
    if (n_max < 0 || alpha.alpha[0] == Cplx(0, 0))
        throw numeric_error("gaussify_pure_step: alpha_0 must be nonzero");
    PureSchmidtCoeffs out;
    out.alpha.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        Cplx sum(0, 0);
        for (int r = 0; r <= n; ++r) sum += binomial(n, r) * alpha.alpha[r] * alpha.alpha[n - r];
        out.alpha[n] = std::pow(2.0, -n) * sum;
    }
    double in2 = 0.0, out2 = 0.0;
    for (const auto& a : alpha.alpha) in2 += std::norm(a);
    for (const auto& a : out.alpha) out2 += std::norm(a);
    return {out, out2 / (in2 * in2)};
}

GaussifyStepResult gaussify_mixed_step(const FockDensityMatrix& rho) {
    return gaussify_step_asymmetric(rho, rho);
}

GaussifyStepResult gaussify_step_asymmetric(const FockDensityMatrix& rho_in, const FockDensityMatrix& sigma_in) {
    if (rho_in.n_modes != 2 || sigma_in.n_modes != 2)
        throw numeric_error("gaussify step expects two-mode states");
    if (rho_in.cutoff != sigma_in.cutoff) throw numeric_error("gaussify step: cutoff mismatch");
    const FockDensityMatrix rho = normalized_copy(rho_in);
    const FockDensityMatrix sg = normalized_copy(sigma_in);
    const int nc = rho.cutoff;

    FockDensityMatrix raw(2, nc);
    for (int a = 0; a <= nc; ++a)
        for (int b = 0; b <= nc; ++b)
            for (int c = 0; c <= nc; ++c)
                for (int d = 0; d <= nc; ++d) {
                    const double pref = std::pow(2.0, -0.5 * (a + b + c + d));
                    Cplx sum(0, 0);
                    for (int s = 0; s <= a; ++s)
                        for (int t = 0; t <= b; ++t)
                            for (int n = 0; n <= c; ++n)
                                for (int m = 0; m <= d; ++m) {
                                    const Cplx r1 = rho.element(s, t, n, m);
                                    if (r1 == Cplx(0, 0)) continue;
                                    const Cplx r2 = sg.element(a - s, b - t, c - n, d - m);
                                    if (r2 == Cplx(0, 0)) continue;
                                    const double sign = ((a + b + c + d - s - t - n - m) % 2 == 0) ? 1.0 : -1.0;
                                    sum += sign * sqrt_binomial(a, s) * sqrt_binomial(b, t) *
                                           sqrt_binomial(c, n) * sqrt_binomial(d, m) * r1 * r2;
                                }
                    raw.at(a, b, c, d) = pref * sum;
                }

    GaussifyStepResult res;
    res.probability = raw.trace();
    if (!(res.probability > 0.0)) throw numeric_error("gaussify step: vanishing success probability");
    // the exact output lives on support up to 2*cutoff; mass dropped past the
    // cutoff is estimated from the inputs' boundary bands
    res.truncated_weight = rho.truncated_weight + sg.truncated_weight +
                           boundary_band_weight(rho) + boundary_band_weight(sg);
    raw.normalize();
    raw.truncated_weight = res.truncated_weight;
    res.state = std::move(raw);
    return res;
}

GaussifyStepResult gaussify_step_inefficient(const FockDensityMatrix& rho_in, double eta) {
    if (eta < 0.0 || eta > 1.0) throw numeric_error("gaussify_step_inefficient: eta must lie in [0,1]");
    if (eta == 1.0) return gaussify_mixed_step(rho_in);
    if (rho_in.n_modes != 2) throw numeric_error("gaussify step expects a two-mode state");
    const FockDensityMatrix rho = normalized_copy(rho_in);
    const int nc = rho.cutoff;

    double max_elem = 0.0;
    for (int i = 0; i < rho.dim(); ++i)
        for (int j = 0; j < rho.dim(); ++j) max_elem = std::max(max_elem, std::abs(rho.rho(i, j)));

    // signed detection weight, the beam-splitter element <A,k|BS|a,A+k-a>
    // without the 2^{-(A+k)/2} prefactor:
    // w(a; A, k) = sum_s (-1)^(A-s) sqrt( C(a,s) C(A,s) C(A+k-a, A-s) C(k, a-s) )
    const int kmax = 2 * nc;
    auto weight = [&](int a, int cap, int k) {
        double w = 0.0;
        for (int s = std::max(0, a - k); s <= std::min(a, cap); ++s) {
            const double sign = ((cap - s) % 2 == 0) ? 1.0 : -1.0;
            w += sign * sqrt_binomial(a, s) * sqrt_binomial(cap, s) * sqrt_binomial(cap + k - a, cap - s) *
                 sqrt_binomial(k, a - s);
        }
        return w;
    };
    std::vector<double> wtab((nc + kmax + 1) * (nc + 1) * (kmax + 1), 0.0);
    auto wt = [&](int a, int cap, int k) -> double& {
        return wtab[(a * (nc + 1) + cap) * (kmax + 1) + k];
    };
    for (int cap = 0; cap <= nc; ++cap)
        for (int k = 0; k <= kmax; ++k)
            for (int a = 0; a <= std::min(cap + k, nc); ++a) wt(a, cap, k) = weight(a, cap, k);

    FockDensityMatrix raw(2, nc);
    const double ome = 1.0 - eta;
    double skipped_bound = 0.0;  // largest dropped k,l weight, kept in truncated_weight
    for (int A = 0; A <= nc; ++A)
        for (int B = 0; B <= nc; ++B)
            for (int C = 0; C <= nc; ++C)
                for (int D = 0; D <= nc; ++D) {
                    Cplx total(0, 0);
                    for (int k = 0; k <= kmax; ++k) {
                        if (k > 0 && std::pow(ome, k) * max_elem * max_elem < 1e-12) {
                            skipped_bound = std::max(skipped_bound, std::pow(ome, k) * max_elem * max_elem);
                            break;
                        }
                        for (int l = 0; l <= kmax; ++l) {
                            const double damp = std::pow(ome, k + l);
                            if (damp * max_elem * max_elem < 1e-12 && (k > 0 || l > 0)) {
                                skipped_bound = std::max(skipped_bound, damp * max_elem * max_elem);
                                break;
                            }
                            const double pref = std::pow(2.0, -0.5 * (A + B + C + D + 2 * k + 2 * l)) * damp;
                            Cplx sum(0, 0);
                            for (int a = 0; a <= std::min(A + k, nc); ++a) {
                                if (A + k - a > nc) continue;
                                for (int b = 0; b <= std::min(B + l, nc); ++b) {
                                    if (B + l - b > nc) continue;
                                    for (int c = 0; c <= std::min(C + k, nc); ++c) {
                                        if (C + k - c > nc) continue;
                                        for (int d = 0; d <= std::min(D + l, nc); ++d) {
                                            if (D + l - d > nc) continue;
                                            const Cplx r1 = rho.element(a, b, c, d);
                                            if (r1 == Cplx(0, 0)) continue;
                                            const Cplx r2 =
                                                rho.element(A + k - a, B + l - b, C + k - c, D + l - d);
                                            if (r2 == Cplx(0, 0)) continue;
                                            sum += wt(a, A, k) * wt(b, B, l) * wt(c, C, k) *
                                                   wt(d, D, l) * r1 * r2;
                                        }
                                    }
                                }
                            }
                            total += pref * sum;
                        }
                    }
                    raw.at(A, B, C, D) = total;
                }

    GaussifyStepResult res;
    res.probability = raw.trace();
    if (!(res.probability > 0.0)) throw numeric_error("gaussify step: vanishing success probability");
    res.truncated_weight = 2.0 * rho.truncated_weight + boundary_band_weight(rho) + skipped_bound;
    raw.normalize();
    raw.truncated_weight = res.truncated_weight;
    res.state = std::move(raw);
    return res;
}

FockDensityMatrix apply_channel(const FockDensityMatrix& rho, const ChannelSpec& spec) {
    if (rho.n_modes != 2) throw numeric_error("apply_channel expects a two-mode state");
    const int nc = rho.cutoff;
    FockDensityMatrix out(2, nc);
    out.truncated_weight = rho.truncated_weight;
    switch (spec.kind) {
        case ChannelSpec::Kind::none:
            return rho;
        case ChannelSpec::Kind::absorb: {
            const double theta = spec.parameter;
            if (theta < 0.0 || theta > 1.0) throw numeric_error("absorb channel: theta must lie in [0,1]");
            for (int a = 0; a <= nc; ++a)
                for (int b = 0; b <= nc; ++b)
                    for (int c = 0; c <= nc; ++c)
                        for (int d = 0; d <= nc; ++d) {
                            Cplx sum(0, 0);
                            for (int j = 0; a + j <= nc && c + j <= nc; ++j) {
                                for (int k = 0; b + k <= nc && d + k <= nc; ++k) {
                                    const Cplx r = rho.element(a + j, b + k, c + j, d + k);
                                    if (r == Cplx(0, 0)) continue;
                                    sum += sqrt_binomial(a + j, j) * sqrt_binomial(b + k, k) *
                                           sqrt_binomial(c + j, j) * sqrt_binomial(d + k, k) *
                                           std::pow(std::sqrt(theta), a + b + c + d) *
                                           std::pow(1.0 - theta, j + k) * r;
                                }
                            }
                            out.at(a, b, c, d) = sum;
                        }
            return out;
        }
        case ChannelSpec::Kind::dephase: {
            const double kappa = spec.parameter;
            if (kappa < 0.0 || kappa > 1.0) throw numeric_error("dephasing channel: kappa must lie in [0,1]");
            out.rho = rho.rho;
            for (int a = 0; a <= nc; ++a)
                for (int b = 0; b <= nc; ++b)
                    for (int c = 0; c <= nc; ++c)
                        for (int d = 0; d <= nc; ++d)
                            if (a != c || b != d) out.at(a, b, c, d) = kappa * rho.element(a, b, c, d);
            return out;
        }
        case ChannelSpec::Kind::phase_diffuse: {
            const double ups = spec.parameter;
            if (ups < 0.0) throw numeric_error("phase diffusion: upsilon must be non-negative");
            for (int a = 0; a <= nc; ++a)
                for (int b = 0; b <= nc; ++b)
                    for (int c = 0; c <= nc; ++c)
                        for (int d = 0; d <= nc; ++d) {
                            const double q = static_cast<double>(a + b - c - d);
                            out.at(a, b, c, d) = std::exp(-0.5 * q * q * ups * ups) * rho.element(a, b, c, d);
                        }
            return out;
        }
    }
    throw numeric_error("apply_channel: unknown channel kind");
}

std::pair<FockPureVector, double> procrustean_pure(double r, double T, int m, int cutoff) {
    if (m < 0) throw numeric_error("procrustean_pure: m must be non-negative");
    if (!(T > 0.0) || !(T < 1.0)) throw numeric_error("procrustean_pure: T must lie in (0,1)");
    const double R = std::sqrt(1.0 - T * T);
    const double th = std::tanh(r);

    auto alpha = [&](int n) -> double {
        // (-tanh r)^n T^(n-m) R^(m-1) [ -R^2 sqrt(C(n,m)(n+1-m)) + T^2 sqrt(C(n,m-1) m) ]
        const double lead = std::pow(-th, n) * std::pow(T, n - m) * std::pow(R, m - 1);
        const double t1 = (m <= n) ? -R * R * std::sqrt(binomial(n, m) * (n + 1 - m)) : 0.0;
        const double t2 = (m - 1 <= n) ? T * T * std::sqrt(binomial(n, m - 1) * m) : 0.0;
        return lead * (t1 + t2);
    };

    FockPureVector out(2, cutoff);
    double sum2 = 0.0;
    for (int n = std::max(0, m - 1); n <= cutoff; ++n) {
        const int nb = n + 1 - m;
        if (nb < 0) continue;
        const double an = alpha(n);
        if (nb <= cutoff) out.amp(out.index(n, nb)) = an;
        sum2 += an * an;
    }
    // tail of the probability sum beyond the cutoff
    double tail = 0.0;
    for (int n = cutoff + 1; n <= cutoff + 400; ++n) {
        const double an = alpha(n);
        const double term = an * an;
        tail += term;
        if (term < 1e-18 * (sum2 + tail)) break;
    }
    const double sech2 = 1.0 / (std::cosh(r) * std::cosh(r));
    const double prob = sech2 * (sum2 + tail);
    out.truncated_weight = (sum2 + tail > 0.0) ? tail / (sum2 + tail) : 0.0;
    const double norm = std::sqrt(sum2);
    if (!(norm > 0.0)) throw numeric_error("procrustean_pure: outcome has zero amplitude");
    out.amp /= norm;
    return {out, prob};
}

double procrustean_lambda(double r, double tau, double T) {
    const double th = std::tanh(r);
    const double denom = T * (th * th * (tau - 1.0) * (tau - 1.0) - 1.0);
    if (std::abs(denom) < 1e-14) throw numeric_error("procrustean_lambda: vanishing denominator");
    return (2.0 * T * T - 1.0) * th * tau / denom;
}

FockDensityMatrix procrustean_mixed_elements(double r, double tau, double T) {
    if (!(tau > 0.0) || tau > 1.0) throw numeric_error("procrustean_mixed_elements: tau must lie in (0,1]");
    const double lambda = procrustean_lambda(r, tau, T);
    const double eps = (1.0 - tau) / tau;
    const double th2 = std::tanh(r) * std::tanh(r);
    // x = (1-tau)^2 tanh^2 r is the loss-ladder weight of the Schmidt tail
    const double x = (tau - 1.0) * (tau - 1.0) * th2;
    FockDensityMatrix out(2, 1);
    out.at(0, 0, 0, 0) = 1.0;
    out.at(1, 1, 0, 0) = lambda;
    out.at(0, 0, 1, 1) = lambda;
    out.at(1, 1, 1, 1) = lambda * lambda * (1.0 + x);
    out.at(0, 1, 0, 1) = eps * lambda * lambda * (1.0 - x);
    // photon left on the unfiltered side; suppressed by T^2 relative to
    // rho_0101 in the operating regime T ~ tanh(r)
    out.at(1, 0, 1, 0) = eps * tau * tau * th2 / (1.0 - x);
    return out;
}

LimitResult gaussify_limit(const FockDensityMatrix& rho0) {
    const Cplx r0 = rho0.element(0, 0, 0, 0);
    if (std::abs(r0) < 1e-300) throw numeric_error("gaussify_limit: null state (rho_0000 = 0)");
    auto e = [&](int a, int b, int c, int d) { return rho0.element(a, b, c, d) / r0; };
    bridge::SigmaElements s;
    s.s1010 = (e(1, 0, 1, 0) - std::norm(e(1, 0, 0, 0))).real();
    s.s0101 = (e(0, 1, 0, 1) - std::norm(e(0, 1, 0, 0))).real();
    s.s1001 = e(1, 0, 0, 1) - e(1, 0, 0, 0) * e(0, 0, 0, 1);
    s.s2000 = e(2, 0, 0, 0) - e(1, 0, 0, 0) * e(1, 0, 0, 0) / std::sqrt(2.0);
    s.s0200 = e(0, 2, 0, 0) - e(0, 1, 0, 0) * e(0, 1, 0, 0) / std::sqrt(2.0);
    s.s1100 = e(1, 1, 0, 0) - e(1, 0, 0, 0) * e(0, 1, 0, 0);
    LimitResult res;
    res.sigma = s;
    res.gamma = bridge::sigma_to_covariance(s);
    res.converges = gauss::is_physical_covariance(res.gamma, 1e-9);
    return res;
}

bool check_pure_convergence(const FockDensityMatrix& rho0, double tol) {
    const Cplx r0 = rho0.element(0, 0, 0, 0);
    if (std::abs(r0) < 1e-300) throw numeric_error("check_pure_convergence: null state");
    auto e = [&](int a, int b, int c, int d) { return rho0.element(a, b, c, d) / r0; };
    const bool c1 = std::abs(e(1, 0, 1, 0) - std::norm(e(1, 0, 0, 0))) < tol;
    const bool c2 = std::abs(e(0, 1, 0, 1) - std::norm(e(0, 1, 0, 0))) < tol;
    const bool c3 = std::abs(e(1, 0, 0, 1) - e(1, 0, 0, 0) * e(0, 0, 0, 1)) < tol;
    if (!(c1 && c2 && c3)) return false;
    const LimitResult lim = gaussify_limit(rho0);
    if (!lim.converges) return false;
    return std::abs(lim.gamma.determinant() - 1.0) < std::max(tol, 1e-7);
}

namespace {

int support_of(const FockDensityMatrix& rho) {
    int s = 0;
    for (int a = 0; a <= rho.cutoff; ++a)
        for (int b = 0; b <= rho.cutoff; ++b)
            for (int c = 0; c <= rho.cutoff; ++c)
                for (int d = 0; d <= rho.cutoff; ++d)
                    if (std::abs(rho.element(a, b, c, d)) > 1e-14)
                        s = std::max({s, a, b, c, d});
    return s;
}

}  // namespace

std::vector<IterationRecord> run_protocol(const FockDensityMatrix& rho0, const ProtocolConfig& config) {
    if (config.iterations < 1) throw numeric_error("run_protocol: iterations must be >= 1");
    if (config.detector_eta < 1.0 && config.channel.kind != ChannelSpec::Kind::none)
        throw config_error("run_protocol: combining detector inefficiency with storage channels is not supported");

    // auto-raise the cutoff so that the final iteration is exactly supported,
    // within the configured ceiling
    const int s0 = std::max(1, support_of(rho0));
    long needed = s0;
    for (int i = 0; i < config.iterations; ++i) needed = std::min<long>(2 * needed, config.max_cutoff);
    const int cutoff = std::max(config.cutoff, static_cast<int>(std::min<long>(needed, config.max_cutoff)));

    FockDensityMatrix state = rho0.with_cutoff(cutoff);
    state.normalize();

    // the limit is set by the input supply alone
    std::optional<LimitResult> limit;
    std::optional<FockDensityMatrix> limit_state;
    try {
        limit = gaussify_limit(state);
        if (limit->converges) {
            const int conv_cut = std::min(cutoff, 3);
            limit_state = bridge::gaussian_to_fock(limit->gamma, conv_cut);
        }
    } catch (const numeric_error&) {
        limit.reset();
    }

    auto distance = [&](const FockDensityMatrix& rho) -> double {
        if (!limit_state) return std::numeric_limits<double>::quiet_NaN();
        const Cplx r0 = rho.element(0, 0, 0, 0);
        const Cplx l0 = limit_state->element(0, 0, 0, 0);
        if (std::abs(r0) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
        double dist = 0.0;
        const int n = limit_state->cutoff;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                for (int c = 0; c <= n; ++c)
                    for (int d = 0; d <= n; ++d)
                        dist = std::max(dist, std::abs(rho.element(a, b, c, d) / r0 -
                                                       limit_state->element(a, b, c, d) / l0));
        return dist;
    };

    std::vector<IterationRecord> records;
    IterationRecord rec0;
    rec0.iteration = 0;
    rec0.log_negativity = fock::log_negativity(state);
    rec0.vn_entropy = fock::vn_entropy(state);
    rec0.probability = 1.0;
    rec0.distance_to_limit = distance(state);
    rec0.truncated_weight = state.truncated_weight;
    records.push_back(rec0);

    for (int it = 1; it <= config.iterations; ++it) {
        GaussifyStepResult step;
        if (config.detector_eta < 1.0) {
            step = gaussify_step_inefficient(state, config.detector_eta);
        } else if (config.channel.kind != ChannelSpec::Kind::none) {
            const FockDensityMatrix stored = apply_channel(state, config.channel);
            if (config.channel_on_both) {
                step = gaussify_step_asymmetric(stored, stored);
            } else {
                step = gaussify_step_asymmetric(state, stored);
            }
        } else {
            step = gaussify_mixed_step(state);
        }
        state = step.state;
        IterationRecord rec;
        rec.iteration = it;
        rec.log_negativity = fock::log_negativity(state);
        rec.vn_entropy = fock::vn_entropy(state);
        rec.probability = step.probability;
        rec.distance_to_limit = distance(state);
        rec.truncated_weight = step.truncated_weight;
        records.push_back(rec);
    }
    return records;
}

}  // namespace entkit::distill
