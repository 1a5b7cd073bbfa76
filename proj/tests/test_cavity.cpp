#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "entkit/cavity.hpp"

using namespace entkit;
using cavity::AtomPath;
using cavity::CavityGeometry;

namespace {

// geometry tuned to the microwave-cavity figures: waist 5.97 mm at 5.87 mm
CavityGeometry paris_geometry() {
    CavityGeometry g;
    g.lambda = 5.87e-3;
    g.L = 27e-3;
    g.R_curv = 40.44e-3;
    g.D0 = 0.25;
    g.D1 = 0.25;
    return g;
}

// sequential Jaynes-Cummings propagation on atom x two modes (cutoff 2),
// independent of the closed-form amplitudes
Eigen::Vector3cd passage_by_matrix_exponential(double gtauA, double gtauB) {
    const int nf = 3;  // photon states 0..2 per mode
    const int dim = 2 * nf * nf;
    auto idx = [nf](int atom, int na, int nb) { return (atom * nf + na) * nf + nb; };
    Eigen::MatrixXcd hA = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd hB = Eigen::MatrixXcd::Zero(dim, dim);
    // atom 0 = B (excited for this transition), 1 = A; coupling a |B><A| + h.c.
    for (int na = 0; na < nf; ++na)
        for (int nb = 0; nb < nf; ++nb) {
            if (na + 1 < nf) {
                hA(idx(0, na, nb), idx(1, na + 1, nb)) = std::sqrt(na + 1.0);
                hA(idx(1, na + 1, nb), idx(0, na, nb)) = std::sqrt(na + 1.0);
            }
            if (nb + 1 < nf) {
                hB(idx(0, na, nb), idx(1, na, nb + 1)) = std::sqrt(nb + 1.0);
                hB(idx(1, na, nb + 1), idx(0, na, nb)) = std::sqrt(nb + 1.0);
            }
        }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi(idx(0, 0, 0)) = 1.0;
    const std::complex<double> mi(0.0, -1.0);
    psi = (mi * gtauB * hB).exp() * ((mi * gtauA * hA).exp() * psi);
    Eigen::Vector3cd out;
    out << psi(idx(0, 0, 0)), psi(idx(1, 0, 1)), psi(idx(1, 1, 0));
    return out;
}

}  // namespace

TEST_CASE("state after passage") {
    SUBCASE("zero interaction leaves |B,0,0>") {
        const auto res = cavity::state_after_passage(0.0, 0.0);
        CHECK(std::abs(res.amp_B00 - std::complex<double>(1, 0)) < 1e-15);
        CHECK(res.p_success == doctest::Approx(0.0));
    }
    SUBCASE("quarter oscillations leave the atom in |A>") {
        const auto res = cavity::state_after_passage(M_PI / 2.0, M_PI / 2.0);
        CHECK(std::abs(res.amp_B00) < 1e-15);
        CHECK(res.p_success == doctest::Approx(1.0));
    }
    SUBCASE("equal times reproduce the closed-form fidelity") {
        for (double t = 0.1; t < 1.4; t += 0.3) {
            const auto res = cavity::state_after_passage(t, t);
            CHECK(res.fidelity_on_success == doctest::Approx(cavity::fidelity_ideal(t)).epsilon(1e-12));
            CHECK(res.p_success == doctest::Approx(cavity::success_probability(t)).epsilon(1e-12));
        }
    }
    SUBCASE("matches sequential matrix-exponential propagation") {
        for (double ta = 0.0; ta <= 1.2; ta += 0.4) {
            for (double tb = 0.0; tb <= 1.2; tb += 0.4) {
                const auto res = cavity::state_after_passage(ta, tb);
                const auto ref = passage_by_matrix_exponential(ta, tb);
                CHECK(std::abs(res.amp_B00 - ref(0)) < 1e-10);
                CHECK(std::abs(res.amp_A01 - ref(1)) < 1e-10);
                CHECK(std::abs(res.amp_A10 - ref(2)) < 1e-10);
            }
        }
    }
    SUBCASE("norm and failure-branch bookkeeping") {
        const auto res = cavity::state_after_passage(0.7, 0.5);
        CHECK(std::norm(res.amp_B00) + res.p_success == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("ideal fidelity and success probability") {
    CHECK(cavity::fidelity_ideal(0.0) == doctest::Approx(1.0));
    CHECK(cavity::success_probability(0.0) == doctest::Approx(0.0));
    CHECK(cavity::success_probability(0.5) == doctest::Approx(0.40687).epsilon(1e-4));
    CHECK(cavity::fidelity_ideal(0.5) == doctest::Approx(0.995767).epsilon(1e-5));

    // F - (1 - (g tau)^4 / 16) = O((g tau)^6)
    for (double t = 0.05; t <= 0.3; t += 0.05) {
        const double resid = cavity::fidelity_ideal(t) - (1.0 - std::pow(t, 4) / 16.0);
        CHECK(std::abs(resid) / std::pow(t, 6) < 0.2);
    }
    // monotone success probability on [0, pi/2]
    double prev = -1.0;
    for (double t = 0.0; t <= M_PI / 2.0; t += 0.1) {
        const double p = cavity::success_probability(t);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("asymmetric interaction times") {
    for (double t = 0.2; t <= 1.0; t += 0.2)
        CHECK(cavity::fidelity_asymmetric(t, 0.0) == doctest::Approx(cavity::fidelity_ideal(t)).epsilon(1e-14));

    SUBCASE("maximum sits at a small negative epsilon") {
        const double gtau = 0.5;
        double best_eps = 0.0, best = -1.0;
        for (double e = -0.5; e <= 0.5; e += 0.001) {
            const double f = cavity::fidelity_asymmetric(gtau, e);
            if (f > best) {
                best = f;
                best_eps = e;
            }
        }
        CHECK(best_eps < 0.0);
        CHECK(best_eps > -0.2);
    }
    SUBCASE("quoted drop at g tau = 0.8") {
        CHECK(cavity::fidelity_asymmetric(0.8, 0.0) == doctest::Approx(0.96).epsilon(0.01));
        CHECK(cavity::fidelity_asymmetric(0.8, 0.2) == doctest::Approx(0.93).epsilon(0.01));
    }
}

TEST_CASE("effective interaction time") {
    const CavityGeometry g = paris_geometry();
    CHECK(g.waist() == doctest::Approx(5.97e-3).epsilon(2e-3));

    SUBCASE("on-axis value") {
        AtomPath path;
        path.v = 500.0;
        const double tau = cavity::effective_interaction_time(g, path, 0);
        CHECK(tau == doctest::Approx(std::sqrt(M_PI) * g.waist() / path.v).epsilon(1e-12));
    }
    SUBCASE("closed form equals the line-integral quadrature") {
        std::mt19937 rng(4);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        const double k = 2.0 * M_PI / g.lambda;
        const double w0 = g.waist();
        for (int trial = 0; trial < 8; ++trial) {
            AtomPath path;
            path.y0 = 0.4e-3 * uni(rng);
            path.z0 = 0.4e-3 * uni(rng);
            path.phi = 2e-3 * uni(rng);
            path.theta = 2e-3 * uni(rng);
            path.v = 500.0;
            for (int cavity_index = 0; cavity_index < 2; ++cavity_index) {
                const double closed = cavity::effective_interaction_time(g, path, cavity_index);
                // trapezoidal quadrature along the path, extended to +-8 beam radii
                const double D = (cavity_index == 0) ? g.D0 : g.D0 + g.D1;
                const double vx = path.v * std::cos(path.theta) * std::cos(path.phi);
                const double vy = path.v * std::cos(path.theta) * std::sin(path.phi);
                const double vz = path.v * std::sin(path.theta);
                const double t_cross = D / vx;
                const double span = 8.0 * w0 / path.v;
                const int n_steps = 40000;
                double integral = 0.0;
                for (int i = 0; i <= n_steps; ++i) {
                    const double t = -span + 2.0 * span * i / n_steps;
                    const double x = vx * (t);
                    const double y = path.y0 + vy * (t + t_cross);
                    const double z = path.z0 + vz * (t + t_cross);
                    const double u = std::exp(-(x * x + y * y) / (w0 * w0)) * std::cos(k * z);
                    const double wgt = (i == 0 || i == n_steps) ? 0.5 : 1.0;
                    integral += wgt * u;
                }
                integral *= 2.0 * span / n_steps;
                CHECK(closed == doctest::Approx(integral).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("collimation error estimate") {
    const CavityGeometry g = paris_geometry();
    SUBCASE("perfect path gives zero") {
        AtomPath path;
        CHECK(cavity::epsilon_estimate(g, path) == doctest::Approx(0.0));
    }
    SUBCASE("worst case of the microwave experiments stays below 0.2") {
        AtomPath path;
        path.y0 = 0.25e-3;
        path.z0 = 0.25e-3;
        path.phi = 0.25e-3 / g.D1;
        path.theta = 0.25e-3 / g.D1;
        const double eps = cavity::epsilon_estimate(g, path);
        CHECK(eps < 0.2);
        CHECK(eps > 0.05);
    }
    SUBCASE("second-order estimate matches the exact ratio to higher order") {
        AtomPath base;
        base.y0 = 0.3e-3;
        base.z0 = 0.2e-3;
        base.phi = 1.2e-3;
        base.theta = 0.8e-3;
        base.v = 500.0;
        auto resid = [&](double scale) {
            AtomPath p = base;
            p.y0 *= scale;
            p.z0 *= scale;
            p.phi *= scale;
            p.theta *= scale;
            const double tA = cavity::effective_interaction_time(g, p, 0);
            const double tB = cavity::effective_interaction_time(g, p, 1);
            return std::abs((1.0 - tB / tA) - cavity::epsilon_estimate(g, p));
        };
        // halving the path parameters must shrink the residual by at least 2^3
        const double r1 = resid(1.0);
        const double r2 = resid(0.5);
        CHECK(r2 < r1 / 8.0 * 1.2);
    }
}

TEST_CASE("detector repetition statistics") {
    CHECK(cavity::detection_run_probability(1.0, 0.3) == doctest::Approx(1.0));
    CHECK(cavity::detection_run_probability(0.4, 0.407) == doctest::Approx(0.105).epsilon(0.05));
    CHECK_THROWS_AS(cavity::detection_run_probability(0.4, 0.0), numeric_error);

    double prev = 0.0;
    for (double d = 0.1; d <= 1.0; d += 0.1) {
        const double p = cavity::detection_run_probability(d, 0.5);
        CHECK(p >= prev);
        CHECK(p <= d + 1e-12);
        prev = p;
    }
    prev = 0.0;
    for (double ps = 0.1; ps <= 1.0; ps += 0.1) {
        const double p = cavity::detection_run_probability(0.4, ps);
        CHECK(p >= prev);
        prev = p;
    }
}
