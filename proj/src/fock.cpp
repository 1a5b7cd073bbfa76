#include "entkit/fock.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace entkit::fock {

namespace {

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

FockDensityMatrix::FockDensityMatrix(int n_modes_, int cutoff_) : n_modes(n_modes_), cutoff(cutoff_) {
    if (n_modes != 1 && n_modes != 2) throw numeric_error("FockDensityMatrix supports 1 or 2 modes");
    if (cutoff < 0) throw numeric_error("cutoff must be non-negative");
    rho = CMat::Zero(dim(), dim());
}

int FockDensityMatrix::dim() const {
    int d = dim_per_mode();
    return n_modes == 2 ? d * d : d;
}

Cplx FockDensityMatrix::element(int a, int b, int c, int d) const {
    if (n_modes != 2) throw numeric_error("two-mode element accessor on a one-mode state");
    const int N = cutoff;
    if (a < 0 || b < 0 || c < 0 || d < 0 || a > N || b > N || c > N || d > N) return Cplx(0, 0);
    return rho(index(a, b), index(c, d));
}

Cplx FockDensityMatrix::element1(int a, int c) const {
    if (n_modes != 1) throw numeric_error("one-mode element accessor on a two-mode state");
    if (a < 0 || c < 0 || a > cutoff || c > cutoff) return Cplx(0, 0);
    return rho(a, c);
}

void FockDensityMatrix::normalize() {
    const double tr = trace();
    if (!(tr > 0.0)) throw numeric_error("cannot normalize a state with non-positive trace");
    rho /= tr;
}

bool FockDensityMatrix::is_valid_state(double tol) const {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    const double tr = trace();
    if (!(tr > 0.0)) return false;
    Eigen::SelfAdjointEigenSolver<CMat> solver(rho / tr, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() > -tol;
}

FockDensityMatrix FockDensityMatrix::with_cutoff(int new_cutoff) const {
    FockDensityMatrix out(n_modes, new_cutoff);
    out.truncated_weight = truncated_weight;
    const int keep = std::min(cutoff, new_cutoff) + 1;
    if (n_modes == 1) {
        out.rho.topLeftCorner(keep, keep) = rho.topLeftCorner(keep, keep);
    } else {
        for (int a = 0; a < keep; ++a)
            for (int b = 0; b < keep; ++b)
                for (int c = 0; c < keep; ++c)
                    for (int d = 0; d < keep; ++d)
                        out.rho(out.index(a, b), out.index(c, d)) = rho(index(a, b), index(c, d));
    }
    if (new_cutoff < cutoff) {
        double dropped = trace() - out.trace();
        out.truncated_weight += std::max(0.0, dropped);
    }
    return out;
}

FockPureVector::FockPureVector(int n_modes_, int cutoff_) : n_modes(n_modes_), cutoff(cutoff_) {
    if (n_modes != 1 && n_modes != 2) throw numeric_error("FockPureVector supports 1 or 2 modes");
    const int d = dim_per_mode();
    amp = CVec::Zero(n_modes == 2 ? d * d : d);
}

FockDensityMatrix FockPureVector::to_density() const {
    FockDensityMatrix out(n_modes, cutoff);
    out.rho = amp * amp.adjoint();
    out.truncated_weight = truncated_weight;
    return out;
}

FockPureVector tmss_fock(double r, double phi, int cutoff) {
    FockPureVector psi(2, cutoff);
    const double th = std::tanh(r);
    const Cplx base = -std::exp(Cplx(0.0, phi)) * th;
    Cplx coeff = 1.0 / std::cosh(r);
    for (int n = 0; n <= cutoff; ++n) {
        psi.amp(psi.index(n, n)) = coeff;
        coeff *= base;
    }
    psi.truncated_weight = std::pow(th * th, cutoff + 1);
    return psi;
}

namespace {

// Unitary of the two-mode beam splitter restricted to the truncated basis.
// Photon number is conserved, so the matrix is block diagonal in the total
// photon number; blocks whose total exceeds the cutoff are truncated.
CMat beam_splitter_matrix(int cutoff, double T, double R, BsConvention conv) {
    if (std::abs(T * T + R * R - 1.0) > 1e-9)
        throw numeric_error("beam splitter requires T^2 + R^2 = 1");
    const int d = cutoff + 1;
    const Cplx r12 = (conv == BsConvention::symmetric_i) ? Cplx(0.0, R) : Cplx(R, 0.0);
    const Cplx r21 = (conv == BsConvention::symmetric_i) ? Cplx(0.0, R) : Cplx(-R, 0.0);
    CMat u = CMat::Zero(d * d, d * d);
    for (int n1 = 0; n1 <= cutoff; ++n1) {
        for (int n2 = 0; n2 <= cutoff; ++n2) {
            // (T a1 + r12 a2)^n1 (r21 a1 + T a2)^n2 |0,0> expanded binomially
            for (int j = 0; j <= n1; ++j) {
                for (int k = 0; k <= n2; ++k) {
                    const int m1 = n1 - j + k;
                    const int m2 = j + n2 - k;
                    if (m1 > cutoff || m2 > cutoff) continue;
                    const double binoms = std::exp(log_factorial(n1) - log_factorial(j) - log_factorial(n1 - j) +
                                                   log_factorial(n2) - log_factorial(k) - log_factorial(n2 - k));
                    const double norm = std::exp(0.5 * (log_factorial(m1) + log_factorial(m2) -
                                                        log_factorial(n1) - log_factorial(n2)));
                    const Cplx term = binoms * norm * std::pow(Cplx(T, 0.0), n1 - j + n2 - k) *
                                      std::pow(r12, j) * std::pow(r21, k);
                    u(m1 * d + m2, n1 * d + n2) += term;
                }
            }
        }
    }
    return u;
}

}  // namespace

FockDensityMatrix beam_splitter(const FockDensityMatrix& state, double T, double R,
                                BsConvention conv, double neglect_bound) {
    if (state.n_modes != 2) throw numeric_error("beam_splitter needs a two-mode state");
    const CMat u = beam_splitter_matrix(state.cutoff, T, R, conv);
    FockDensityMatrix out = state;
    out.rho = u * state.rho * u.adjoint();
    const double lost = state.trace() - out.trace();
    out.truncated_weight = state.truncated_weight + std::max(0.0, lost);
    if (out.truncated_weight > neglect_bound)
        throw numeric_error("beam_splitter: truncation weight exceeds bound");
    return out;
}

FockPureVector beam_splitter(const FockPureVector& state, double T, double R,
                             BsConvention conv, double neglect_bound) {
    if (state.n_modes != 2) throw numeric_error("beam_splitter needs a two-mode state");
    const CMat u = beam_splitter_matrix(state.cutoff, T, R, conv);
    FockPureVector out = state;
    out.amp = u * state.amp;
    const double lost = state.norm2() - out.norm2();
    out.truncated_weight = state.truncated_weight + std::max(0.0, lost);
    if (out.truncated_weight > neglect_bound)
        throw numeric_error("beam_splitter: truncation weight exceeds bound");
    return out;
}

std::pair<FockDensityMatrix, double> project_vacuum(const FockDensityMatrix& state, int mode, double eta) {
    if (state.n_modes != 2) throw numeric_error("project_vacuum expects a two-mode state");
    if (mode != 0 && mode != 1) throw numeric_error("project_vacuum: invalid mode index");
    if (eta < 0.0 || eta > 1.0) throw numeric_error("project_vacuum: eta must lie in [0,1]");
    const int d = state.dim_per_mode();
    const double tr_in = state.trace();
    FockDensityMatrix out(1, state.cutoff);
    out.truncated_weight = state.truncated_weight;
    for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) {
            Cplx sum(0, 0);
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                const Cplx e = (mode == 1) ? state.element(a, k, c, k) : state.element(k, a, k, c);
                sum += w * e;
                w *= (1.0 - eta);
                if (w == 0.0) break;
            }
            out.rho(a, c) = sum;
        }
    }
    const double prob = (tr_in > 0.0) ? out.trace() / tr_in : 0.0;
    return {out, prob};
}

std::pair<FockDensityMatrix, double> project_number(const FockDensityMatrix& state, int mode, int m) {
    if (state.n_modes != 2) throw numeric_error("project_number expects a two-mode state");
    if (mode != 0 && mode != 1) throw numeric_error("project_number: invalid mode index");
    if (m < 0 || m > state.cutoff) throw numeric_error("project_number: photon count out of range");
    const int d = state.dim_per_mode();
    const double tr_in = state.trace();
    FockDensityMatrix out(1, state.cutoff);
    out.truncated_weight = state.truncated_weight;
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
            out.rho(a, c) = (mode == 1) ? state.element(a, m, c, m) : state.element(m, a, m, c);
    const double prob = (tr_in > 0.0) ? out.trace() / tr_in : 0.0;
    return {out, prob};
}

FockDensityMatrix partial_trace(const FockDensityMatrix& state, int mode) {
    if (state.n_modes != 2) throw numeric_error("partial_trace expects a two-mode state");
    if (mode != 0 && mode != 1) throw numeric_error("partial_trace: invalid mode index");
    const int d = state.dim_per_mode();
    FockDensityMatrix out(1, state.cutoff);
    out.truncated_weight = state.truncated_weight;
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) {
            Cplx sum(0, 0);
            for (int k = 0; k < d; ++k)
                sum += (mode == 1) ? state.element(a, k, c, k) : state.element(k, a, k, c);
            out.rho(a, c) = sum;
        }
    return out;
}

double log_negativity(const FockDensityMatrix& state) {
    if (state.n_modes != 2) throw numeric_error("log_negativity expects a two-mode state");
    const double tr = state.trace();
    if (!(tr > 0.0)) throw numeric_error("log_negativity: non-positive trace");
    const int d = state.dim_per_mode();
    CMat pt(state.dim(), state.dim());
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    pt(a * d + b, c * d + e) = state.rho(a * d + e, c * d + b);
    pt /= tr;
    Eigen::SelfAdjointEigenSolver<CMat> solver((pt + pt.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw numeric_error("eigensolver failed on partial transpose");
    const double trace_norm = solver.eigenvalues().cwiseAbs().sum();
    return std::log2(trace_norm);
}

double vn_entropy(const FockDensityMatrix& state) {
    const double tr = state.trace();
    if (!(tr > 0.0)) throw numeric_error("vn_entropy: non-positive trace");
    Eigen::SelfAdjointEigenSolver<CMat> solver((state.rho + state.rho.adjoint()) / (2.0 * tr),
                                               Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw numeric_error("eigensolver failed in vn_entropy");
    double s = 0.0;
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
        double p = solver.eigenvalues()(i);
        if (p < -1e-10) throw numeric_error("vn_entropy: state is not positive semidefinite");
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

double fidelity_with(const FockDensityMatrix& state, const FockPureVector& target) {
    if (state.n_modes != target.n_modes || state.cutoff != target.cutoff)
        throw numeric_error("fidelity_with: dimension mismatch");
    const double tr = state.trace();
    const double n2 = target.norm2();
    if (!(tr > 0.0) || !(n2 > 0.0)) throw numeric_error("fidelity_with: degenerate input");
    const Cplx v = target.amp.adjoint() * state.rho * target.amp;
    return v.real() / (tr * n2);
}

double entanglement_entropy(const FockPureVector& psi) {
    if (psi.n_modes != 2) throw numeric_error("entanglement_entropy expects a two-mode vector");
    const int d = psi.dim_per_mode();
    Eigen::Map<const CMat> m(psi.amp.data(), d, d);  // amp(a*d+b) -> column-major (b,a); SVD is side-agnostic
    Eigen::JacobiSVD<CMat> svd(m);
    double s = 0.0;
    const double n2 = psi.norm2();
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        double p = svd.singularValues()(i);
        p = p * p / n2;
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

}  // namespace entkit::fock
