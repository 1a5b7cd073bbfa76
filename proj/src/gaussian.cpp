#include "entkit/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

namespace entkit::gauss {

Mat symplectic_form(int n_modes) {
    Mat sigma = Mat::Zero(2 * n_modes, 2 * n_modes);
    for (int i = 0; i < n_modes; ++i) {
        sigma(2 * i, 2 * i + 1) = 1.0;
        sigma(2 * i + 1, 2 * i) = -1.0;
    }
    return sigma;
}

GaussianState::GaussianState(Mat gamma, Vec d)
    : n_modes(static_cast<int>(gamma.rows()) / 2), covariance(std::move(gamma)), displacement(std::move(d)) {
    if (covariance.rows() != covariance.cols() || covariance.rows() % 2 != 0)
        throw numeric_error("covariance matrix must be square with even dimension");
    if (displacement.size() != covariance.rows())
        throw numeric_error("displacement dimension does not match covariance");
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw numeric_error("covariance matrix is not symmetric");
}

GaussianState::GaussianState(Mat gamma) {
    Vec d = Vec::Zero(gamma.rows());
    *this = GaussianState(std::move(gamma), std::move(d));
}

GaussianState GaussianState::vacuum(int n_modes) {
    return GaussianState(Mat::Identity(2 * n_modes, 2 * n_modes));
}

bool is_physical_covariance(const Mat& gamma, double tol) {
    const int dim = static_cast<int>(gamma.rows());
    if (gamma.cols() != dim || dim % 2 != 0) throw numeric_error("covariance matrix must be square with even dimension");
    Eigen::MatrixXcd herm = gamma.cast<std::complex<double>>();
    const Mat sigma = symplectic_form(dim / 2);
    herm += std::complex<double>(0.0, 1.0) * sigma.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw numeric_error("eigensolver failed in physicality check");
    return solver.eigenvalues().minCoeff() >= -tol;
}

bool is_physical(const GaussianState& state, double tol) {
    return is_physical_covariance(state.covariance, tol);
}

GaussianState make_tmss(double r, double phi) {
    const double c = std::cosh(2.0 * r);
    const double s = std::sinh(2.0 * r);
    Mat core(4, 4);
    core << c, 0, -s, 0,
            0, c, 0, s,
            -s, 0, c, 0,
            0, s, 0, c;
    const SymplecticOp rot = direct_sum(make_phase_shift(phi / 2.0), make_phase_shift(phi / 2.0));
    return GaussianState(rot.matrix.transpose() * core * rot.matrix);
}

SymplecticOp make_phase_shift(double phi) {
    Mat m(2, 2);
    m << std::cos(phi), -std::sin(phi),
         std::sin(phi), std::cos(phi);
    return {m};
}

SymplecticOp make_beam_splitter(double T, double R) {
    if (std::abs(T * T + R * R - 1.0) > 1e-9)
        throw numeric_error("beam splitter requires T^2 + R^2 = 1");
    Mat m = Mat::Zero(4, 4);
    m.block<2, 2>(0, 0) = T * Mat::Identity(2, 2);
    m.block<2, 2>(0, 2) = -R * Mat::Identity(2, 2);
    m.block<2, 2>(2, 0) = R * Mat::Identity(2, 2);
    m.block<2, 2>(2, 2) = T * Mat::Identity(2, 2);
    return {m};
}

SymplecticOp make_squeezer(double r) {
    Mat m(2, 2);
    m << std::exp(r), 0,
         0, std::exp(-r);
    return {m};
}

SymplecticOp direct_sum(const SymplecticOp& a, const SymplecticOp& b) {
    const int na = static_cast<int>(a.matrix.rows());
    const int nb = static_cast<int>(b.matrix.rows());
    Mat m = Mat::Zero(na + nb, na + nb);
    m.topLeftCorner(na, na) = a.matrix;
    m.bottomRightCorner(nb, nb) = b.matrix;
    return {m};
}

SymplecticOp embed(const SymplecticOp& op, int n_modes, const std::vector<int>& modes) {
    if (static_cast<int>(modes.size()) != op.n_modes())
        throw numeric_error("embed: mode list does not match operator size");
    Mat m = Mat::Identity(2 * n_modes, 2 * n_modes);
    for (size_t i = 0; i < modes.size(); ++i) {
        for (size_t j = 0; j < modes.size(); ++j) {
            m.block<2, 2>(2 * modes[i], 2 * modes[j]) = op.matrix.block<2, 2>(2 * i, 2 * j);
        }
    }
    return {m};
}

GaussianState apply(const SymplecticOp& op, const GaussianState& state) {
    if (op.matrix.rows() != state.covariance.rows())
        throw numeric_error("apply: dimension mismatch between operator and state");
    GaussianState out;
    out.n_modes = state.n_modes;
    out.covariance = op.matrix * state.covariance * op.matrix.transpose();
    out.displacement = op.matrix * state.displacement;
    return out;
}

GaussianState absorb(const GaussianState& state, double tau, const std::vector<int>& modes) {
    if (tau < 0.0 || tau > 1.0) throw numeric_error("absorb: tau must lie in [0,1]");
    std::vector<bool> hit(state.n_modes, false);
    for (int m : modes) {
        if (m < 0 || m >= state.n_modes) throw numeric_error("absorb: mode index out of range");
        hit[m] = true;
    }
    const double rt = std::sqrt(tau);
    GaussianState out = state;
    for (int i = 0; i < state.n_modes; ++i) {
        for (int j = 0; j < state.n_modes; ++j) {
            if (!hit[i] && !hit[j]) continue;
            double f = (hit[i] && hit[j]) ? tau : rt;
            out.covariance.block<2, 2>(2 * i, 2 * j) *= f;
        }
        if (hit[i]) {
            out.covariance.block<2, 2>(2 * i, 2 * i) += (1.0 - tau) * Mat::Identity(2, 2);
            out.displacement.segment<2>(2 * i) *= rt;
        }
    }
    return out;
}

GaussianState absorb(const GaussianState& state, double tau) {
    std::vector<int> all(state.n_modes);
    for (int i = 0; i < state.n_modes; ++i) all[i] = i;
    return absorb(state, tau, all);
}

Vec symplectic_eigenvalues(const Mat& gamma) {
    const int dim = static_cast<int>(gamma.rows());
    if (gamma.cols() != dim || dim % 2 != 0) throw numeric_error("covariance matrix must be square with even dimension");
    const int n = dim / 2;
    Eigen::EigenSolver<Mat> solver(symplectic_form(n) * gamma);
    if (solver.info() != Eigen::Success) throw numeric_error("eigensolver failed for Sigma*Gamma");
    std::vector<double> mods(dim);
    for (int i = 0; i < dim; ++i) mods[i] = std::abs(solver.eigenvalues()(i));
    std::sort(mods.begin(), mods.end());
    // eigenvalues come in +-(i gamma_k) pairs; take one per pair and check pairing
    Vec out(n);
    for (int k = 0; k < n; ++k) {
        const double a = mods[2 * k], b = mods[2 * k + 1];
        const double scale = std::max(1.0, std::max(a, b));
        if (std::abs(a - b) > 1e-8 * scale)
            throw numeric_error("symplectic eigenvalues do not pair within tolerance");
        out(k) = 0.5 * (a + b);
    }
    return out;
}

double log_negativity(const GaussianState& state, const std::vector<int>& modes_b) {
    if (!is_physical(state, 1e-7)) throw numeric_error("log_negativity: unphysical covariance matrix");
    Mat pt = state.covariance;
    // partial transpose flips the momenta of side B
    for (int m : modes_b) {
        if (m < 0 || m >= state.n_modes) throw numeric_error("log_negativity: mode index out of range");
        pt.row(2 * m + 1) *= -1.0;
        pt.col(2 * m + 1) *= -1.0;
    }
    const Vec nu = symplectic_eigenvalues(pt);
    double en = 0.0;
    for (int k = 0; k < nu.size(); ++k)
        if (nu(k) < 1.0) en -= std::log2(nu(k));
    return en;
}

double log_negativity(const GaussianState& state) {
    return log_negativity(state, {1});
}

namespace {
double entropy_term(double x) {
    // x * log2(x) with the 0 log 0 := 0 limit
    return x <= 0.0 ? 0.0 : x * std::log2(x);
}
}  // namespace

double vn_entropy(const Mat& gamma) {
    if (!is_physical_covariance(gamma, 1e-7)) throw numeric_error("vn_entropy: unphysical covariance matrix");
    const Vec nu = symplectic_eigenvalues(gamma);
    double s = 0.0;
    for (int k = 0; k < nu.size(); ++k) {
        const double g = std::max(nu(k), 1.0);  // clamp numerically sub-1 pure eigenvalues
        s += entropy_term((g + 1.0) / 2.0) - entropy_term((g - 1.0) / 2.0);
    }
    return s;
}

double vn_entropy(const GaussianState& state) { return vn_entropy(state.covariance); }

double linear_entropy(const Mat& gamma) {
    if (!is_physical_covariance(gamma, 1e-7)) throw numeric_error("linear_entropy: unphysical covariance matrix");
    return 1.0 - 1.0 / std::sqrt(gamma.determinant());
}

double linear_entropy(const GaussianState& state) { return linear_entropy(state.covariance); }

GaussianState reduce(const GaussianState& state, const std::vector<int>& modes) {
    const int n = static_cast<int>(modes.size());
    Mat gamma(2 * n, 2 * n);
    Vec d(2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            gamma.block<2, 2>(2 * i, 2 * j) = state.covariance.block<2, 2>(2 * modes[i], 2 * modes[j]);
        d.segment<2>(2 * i) = state.displacement.segment<2>(2 * modes[i]);
    }
    return GaussianState(std::move(gamma), std::move(d));
}

}  // namespace entkit::gauss
