#include "entkit/bridge.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/LU>
#include <unsupported/Eigen/KroneckerProduct>

namespace entkit::bridge {

namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

// associated Laguerre L_n^(k)(x) via the three-term recurrence
double assoc_laguerre(int n, int k, double x) {
    if (n == 0) return 1.0;
    double lm2 = 1.0;
    double lm1 = 1.0 + k - x;
    for (int i = 2; i <= n; ++i) {
        const double l = ((2.0 * i - 1.0 + k - x) * lm1 - (i - 1.0 + k) * lm2) / i;
        lm2 = lm1;
        lm1 = l;
    }
    return lm1;
}

// 2-variable polynomial, exponents -> coefficient
using Poly2 = std::map<std::array<int, 2>, Cplx>;

void add_term(Poly2& p, int e1, int e2, Cplx c) {
    if (c == Cplx(0, 0)) return;
    p[{e1, e2}] += c;
}

// Polynomial part of <m| W |n> in the phase-space variables (xi1, xi2):
// the full element is this polynomial times exp(-(xi1^2+xi2^2)/4).
Poly2 weyl_poly(int m, int n) {
    const int p = std::abs(m - n);
    const int nl = std::min(m, n);
    const double pref = std::exp(0.5 * (log_factorial(nl) - log_factorial(std::max(m, n))));
    // ((s*xi1 + i*xi2)/sqrt(2))^p with s = +1 for m >= n and -1 otherwise
    const double s = (m >= n) ? 1.0 : -1.0;
    Poly2 lead;
    for (int t = 0; t <= p; ++t) {
        const Cplx it = std::pow(Cplx(0.0, 1.0), t);
        const double coeff = binomial(p, t) * std::pow(s, p - t) * std::pow(2.0, -0.5 * p);
        add_term(lead, p - t, t, pref * coeff * it);
    }
    // L_nl^(p)((xi1^2+xi2^2)/2) expanded into monomials
    Poly2 lag;
    for (int j = 0; j <= nl; ++j) {
        const double cj = std::pow(-1.0, j) * binomial(nl + p, nl - j) / std::exp(log_factorial(j)) *
                          std::pow(2.0, -j);
        for (int sidx = 0; sidx <= j; ++sidx)
            add_term(lag, 2 * sidx, 2 * (j - sidx), Cplx(cj * binomial(j, sidx), 0.0));
    }
    Poly2 out;
    for (const auto& [ea, ca] : lead)
        for (const auto& [eb, cb] : lag)
            add_term(out, ea[0] + eb[0], ea[1] + eb[1], ca * cb);
    return out;
}

// Gaussian moments E[xi1^k1 xi2^k2 xi3^k3 xi4^k4] for a centered Gaussian
// with covariance C.  The recursion pairs the first remaining factor with
// every other factor (Isserlis); memoization collapses repeated sub-moments.
class MomentTable {
  public:
    explicit MomentTable(const Mat& cov) : cov_(cov) {}

    double moment(std::array<int, 4> k) {
        int total = k[0] + k[1] + k[2] + k[3];
        if (total % 2 != 0) return 0.0;
        if (total == 0) return 1.0;
        const uint32_t key = pack(k);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        int i = 0;
        while (k[i] == 0) ++i;
        std::array<int, 4> rest = k;
        rest[i] -= 1;
        double sum = 0.0;
        for (int j = 0; j < 4; ++j) {
            if (rest[j] == 0) continue;
            std::array<int, 4> next = rest;
            next[j] -= 1;
            sum += cov_(i, j) * rest[j] * moment(next);
        }
        memo_.emplace(key, sum);
        return sum;
    }

  private:
    static uint32_t pack(const std::array<int, 4>& k) {
        return static_cast<uint32_t>(k[0]) | (static_cast<uint32_t>(k[1]) << 8) |
               (static_cast<uint32_t>(k[2]) << 16) | (static_cast<uint32_t>(k[3]) << 24);
    }
    Mat cov_;
    std::unordered_map<uint32_t, double> memo_;
};

Mat moment_covariance(const Mat& gamma) {
    const Mat sigma = gauss::symplectic_form(2);
    const Mat gp1 = gamma + Mat::Identity(4, 4);
    Eigen::FullPivLU<Mat> lu(gp1);
    if (!lu.isInvertible()) throw numeric_error("Gamma + 1 is singular");
    const Mat b = lu.inverse();
    return 2.0 * sigma * b * sigma.transpose();
}

}  // namespace

Cplx weyl_element(int m, int n, double xi1, double xi2) {
    if (m < 0 || n < 0) throw numeric_error("weyl_element: negative index");
    const double x = 0.5 * (xi1 * xi1 + xi2 * xi2);
    const double env = std::exp(-0.5 * x);
    const int p = std::abs(m - n);
    const int nl = std::min(m, n);
    const double pref = std::exp(0.5 * (log_factorial(nl) - log_factorial(std::max(m, n))));
    const Cplx base = (m >= n) ? Cplx(xi1, xi2) : Cplx(-xi1, xi2);
    return pref * env * std::pow(base / std::sqrt(2.0), p) * assoc_laguerre(nl, p, x);
}

double gaussian_vacuum_element(const Mat& gamma) {
    const double det = (gamma + Mat::Identity(4, 4)).determinant();
    if (!(det > 0.0)) throw numeric_error("Gamma + 1 must be positive definite");
    return 4.0 / std::sqrt(det);
}

Cplx gaussian_fock_element(const Mat& gamma, int a, int b, int c, int d, int moment_bound) {
    if (gamma.rows() != 4 || gamma.cols() != 4)
        throw numeric_error("gaussian_fock_element expects a two-mode covariance");
    if (a < 0 || b < 0 || c < 0 || d < 0) throw numeric_error("negative Fock index");
    if ((a + b + c + d) % 2 != 0) return Cplx(0.0, 0.0);
    if (a + b + c + d > moment_bound)
        throw numeric_error("gaussian_fock_element: moment bound exceeded");
    if (!gauss::is_physical_covariance(gamma, 1e-7))
        throw numeric_error("gaussian_fock_element: unphysical covariance");

    const double rho0 = gaussian_vacuum_element(gamma);
    if (a + b + c + d == 0) return Cplx(rho0, 0.0);

    MomentTable moments(moment_covariance(gamma));
    const Poly2 p1 = weyl_poly(a, c);
    const Poly2 p2 = weyl_poly(b, d);
    Cplx sum(0.0, 0.0);
    for (const auto& [e1, c1] : p1)
        for (const auto& [e2, c2] : p2)
            sum += c1 * c2 * moments.moment({e1[0], e1[1], e2[0], e2[1]});
    return rho0 * sum;
}

fock::FockDensityMatrix gaussian_to_fock(const Mat& gamma, int cutoff, int moment_bound) {
    if (4 * cutoff > moment_bound)
        throw numeric_error("gaussian_to_fock: cutoff needs moment_bound >= 4*cutoff");
    if (!gauss::is_physical_covariance(gamma, 1e-7))
        throw numeric_error("gaussian_to_fock: unphysical covariance");
    fock::FockDensityMatrix out(2, cutoff);
    const double rho0 = gaussian_vacuum_element(gamma);
    MomentTable moments(moment_covariance(gamma));
    std::map<std::pair<int, int>, Poly2> polys;
    for (int m = 0; m <= cutoff; ++m)
        for (int n = 0; n <= cutoff; ++n) polys[{m, n}] = weyl_poly(m, n);
    for (int a = 0; a <= cutoff; ++a)
        for (int b = 0; b <= cutoff; ++b)
            for (int c = 0; c <= cutoff; ++c)
                for (int d = 0; d <= cutoff; ++d) {
                    if ((a + b + c + d) % 2 != 0) continue;
                    if (out.index(c, d) < out.index(a, b)) continue;  // fill upper, mirror below
                    const Poly2& p1 = polys[{a, c}];
                    const Poly2& p2 = polys[{b, d}];
                    Cplx sum(0.0, 0.0);
                    for (const auto& [e1, c1] : p1)
                        for (const auto& [e2, c2] : p2)
                            sum += c1 * c2 * moments.moment({e1[0], e1[1], e2[0], e2[1]});
                    out.at(a, b, c, d) = rho0 * sum;
                    out.at(c, d, a, b) = std::conj(rho0 * sum);
                }
    out.truncated_weight = std::max(0.0, 1.0 - out.trace());
    return out;
}

SigmaElements sigma_elements(const fock::FockDensityMatrix& rho) {
    const Cplx r0 = rho.element(0, 0, 0, 0);
    if (std::abs(r0) < 1e-300) throw numeric_error("sigma_elements: vanishing rho_0000 (null state)");
    SigmaElements s;
    s.s1010 = (rho.element(1, 0, 1, 0) / r0).real();
    s.s0101 = (rho.element(0, 1, 0, 1) / r0).real();
    s.s1001 = rho.element(1, 0, 0, 1) / r0;
    s.s2000 = rho.element(2, 0, 0, 0) / r0;
    s.s0200 = rho.element(0, 2, 0, 0) / r0;
    s.s1100 = rho.element(1, 1, 0, 0) / r0;
    return s;
}

Mat sigma_to_covariance(const SigmaElements& sigma) {
    Mat b(4, 4);
    const double re2000 = std::sqrt(2.0) * sigma.s2000.real();
    const double im2000 = std::sqrt(2.0) * sigma.s2000.imag();
    const double re0200 = std::sqrt(2.0) * sigma.s0200.real();
    const double im0200 = std::sqrt(2.0) * sigma.s0200.imag();
    b(0, 0) = 0.5 * (1.0 - sigma.s1010 - re2000);
    b(1, 1) = 0.5 * (1.0 - sigma.s1010 + re2000);
    b(0, 1) = b(1, 0) = -0.5 * im2000;
    b(2, 2) = 0.5 * (1.0 - sigma.s0101 - re0200);
    b(3, 3) = 0.5 * (1.0 - sigma.s0101 + re0200);
    b(2, 3) = b(3, 2) = -0.5 * im0200;
    b(0, 2) = b(2, 0) = -0.5 * (sigma.s1001.real() + sigma.s1100.real());
    b(1, 3) = b(3, 1) = 0.5 * (sigma.s1100.real() - sigma.s1001.real());
    b(0, 3) = b(3, 0) = 0.5 * (sigma.s1001.imag() - sigma.s1100.imag());
    b(1, 2) = b(2, 1) = -0.5 * (sigma.s1001.imag() + sigma.s1100.imag());
    Eigen::FullPivLU<Mat> lu(b);
    if (!lu.isInvertible()) throw numeric_error("sigma_to_covariance: B is singular (null state)");
    return lu.inverse() - Mat::Identity(4, 4);
}

Cplx characteristic_function(const fock::FockDensityMatrix& state, const Vec& xi) {
    if (xi.size() != 2 * state.n_modes)
        throw numeric_error("characteristic_function: xi dimension mismatch");
    const int d = state.dim_per_mode();
    Cplx chi(0.0, 0.0);
    if (state.n_modes == 1) {
        for (int n = 0; n < d; ++n)
            for (int m = 0; m < d; ++m) {
                const Cplx r = state.rho(n, m);
                if (r == Cplx(0, 0)) continue;
                chi += r * weyl_element(m, n, xi(0), xi(1));
            }
    } else {
        // cache the two single-mode element tables
        Eigen::MatrixXcd w1(d, d), w2(d, d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) {
                w1(m, n) = weyl_element(m, n, xi(0), xi(1));
                w2(m, n) = weyl_element(m, n, xi(2), xi(3));
            }
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) {
                        const Cplx r = state.rho(state.index(a, b), state.index(c, e));
                        if (r == Cplx(0, 0)) continue;
                        chi += r * w1(c, a) * w2(e, b);
                    }
    }
    return chi;
}

WignerField wigner(const fock::FockDensityMatrix& state, const WignerGrid& grid, double norm_tol) {
    if (state.n_modes != 1)
        throw numeric_error("wigner expects a single-mode state (partial_trace first)");
    fock::FockDensityMatrix st = state;
    st.normalize();

    const int nb = grid.xi_points;
    const double bstep = 2.0 * grid.xi_extent / (nb - 1);
    Eigen::VectorXd bax(nb);
    for (int i = 0; i < nb; ++i) bax(i) = -grid.xi_extent + i * bstep;

    Eigen::MatrixXcd chi(nb, nb);
    const int d = st.dim_per_mode();
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            Cplx c(0, 0);
            for (int n = 0; n < d; ++n)
                for (int m = 0; m < d; ++m) {
                    const Cplx r = st.rho(n, m);
                    if (r == Cplx(0, 0)) continue;
                    c += r * weyl_element(m, n, bax(i), bax(j));
                }
            chi(i, j) = c;
        }

    WignerField out;
    out.x.resize(grid.points);
    out.p.resize(grid.points);
    const double step = (grid.max - grid.min) / (grid.points - 1);
    for (int i = 0; i < grid.points; ++i) {
        out.x(i) = grid.min + i * step;
        out.p(i) = grid.min + i * step;
    }
    out.w.resize(grid.points, grid.points);

    // W(x,p) = (1/(2 pi)^2) int e^{i (x b2 - p b1)} chi(b) d^2 b, trapezoidal
    Eigen::VectorXd wt = Eigen::VectorXd::Ones(nb);
    wt(0) = wt(nb - 1) = 0.5;
    for (int ix = 0; ix < grid.points; ++ix) {
        Eigen::VectorXcd ex(nb), ep(nb);
        for (int i = 0; i < nb; ++i) {
            ex(i) = std::exp(Cplx(0.0, out.x(ix) * bax(i))) * wt(i);
        }
        for (int ip = 0; ip < grid.points; ++ip) {
            for (int i = 0; i < nb; ++i) ep(i) = std::exp(Cplx(0.0, -out.p(ip) * bax(i))) * wt(i);
            // sum over b1 (index i, paired with -p) and b2 (index j, paired with x)
            Cplx acc(0, 0);
            for (int i = 0; i < nb; ++i) {
                Cplx row(0, 0);
                for (int j = 0; j < nb; ++j) row += chi(i, j) * ex(j);
                acc += row * ep(i);
            }
            out.w(ix, ip) = acc.real() * bstep * bstep / (4.0 * M_PI * M_PI);
        }
    }

    // normalization over the output window, trapezoidal in both axes
    double integral = 0.0;
    for (int i = 0; i < grid.points; ++i)
        for (int j = 0; j < grid.points; ++j) {
            double w = 1.0;
            if (i == 0 || i == grid.points - 1) w *= 0.5;
            if (j == 0 || j == grid.points - 1) w *= 0.5;
            integral += w * out.w(i, j);
        }
    out.normalization = integral * step * step;
    if (std::abs(out.normalization - 1.0) > norm_tol)
        throw numeric_error("wigner: quadrature grid too coarse (normalization deviates)");
    return out;
}

std::pair<Mat, Vec> covariance_of_fock(const fock::FockDensityMatrix& state) {
    fock::FockDensityMatrix st = state;
    st.normalize();
    const int d = st.dim_per_mode();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXcd x1 = (a + a.adjoint()) / std::sqrt(2.0);
    const Eigen::MatrixXcd p1 = Cplx(0, -1) * (a - a.adjoint()) / std::sqrt(2.0);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);

    std::vector<Eigen::MatrixXcd> quad;
    if (state.n_modes == 1) {
        quad = {x1, p1};
    } else {
        quad.resize(4);
        quad[0] = Eigen::kroneckerProduct(x1, id).eval();
        quad[1] = Eigen::kroneckerProduct(p1, id).eval();
        quad[2] = Eigen::kroneckerProduct(id, x1).eval();
        quad[3] = Eigen::kroneckerProduct(id, p1).eval();
    }
    const int nq = static_cast<int>(quad.size());
    Vec disp(nq);
    for (int j = 0; j < nq; ++j) disp(j) = (st.rho * quad[j]).trace().real();
    Mat gamma(nq, nq);
    for (int j = 0; j < nq; ++j)
        for (int k = 0; k < nq; ++k) {
            const Cplx m = (st.rho * (quad[j] * quad[k] + quad[k] * quad[j])).trace();
            gamma(j, k) = m.real() - 2.0 * disp(j) * disp(k);
        }
    return {gamma, disp};
}

}  // namespace entkit::bridge
