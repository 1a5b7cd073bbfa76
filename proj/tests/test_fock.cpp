#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "entkit/fock.hpp"

using namespace entkit;
using fock::BsConvention;
using fock::Cplx;
using fock::FockDensityMatrix;
using fock::FockPureVector;

namespace {

FockPureVector random_pure(std::mt19937& rng, int cutoff, int max_total_photons) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    FockPureVector psi(2, cutoff);
    for (int a = 0; a <= cutoff; ++a)
        for (int b = 0; b <= cutoff; ++b)
            if (a + b <= max_total_photons) psi.amp(psi.index(a, b)) = Cplx(gauss(rng), gauss(rng));
    psi.amp /= std::sqrt(psi.norm2());
    return psi;
}

}  // namespace

TEST_CASE("two-mode squeezed state amplitudes") {
    const FockPureVector vac = fock::tmss_fock(0.0, 0.0, 4);
    CHECK(std::abs(vac.amp(vac.index(0, 0)) - 1.0) < 1e-15);
    CHECK(vac.norm2() == doctest::Approx(1.0));

    const double r = std::atanh(0.1);
    const FockPureVector psi = fock::tmss_fock(r, 0.0, 4);
    for (int n = 1; n <= 4; ++n) {
        const Cplx ratio = psi.amp(psi.index(n, n)) / psi.amp(psi.index(n - 1, n - 1));
        CHECK(ratio.real() == doctest::Approx(-0.1).epsilon(1e-12));
        CHECK(ratio.imag() == doctest::Approx(0.0));
    }
    // norm deficit equals the geometric tail
    const double r2 = 0.8;
    for (int nc = 2; nc <= 6; ++nc) {
        const FockPureVector p2 = fock::tmss_fock(r2, 0.4, nc);
        const double tail = std::pow(std::tanh(r2), 2 * (nc + 1));
        CHECK(1.0 - p2.norm2() == doctest::Approx(tail).epsilon(1e-12));
        CHECK(p2.truncated_weight == doctest::Approx(tail));
    }
}

TEST_CASE("beam splitter transformations") {
    const double s = std::sqrt(0.5);

    SUBCASE("vacuum is unchanged") {
        FockPureVector vac(2, 3);
        vac.amp(0) = 1.0;
        const FockPureVector out = fock::beam_splitter(vac, 0.3, std::sqrt(1.0 - 0.09), BsConvention::symmetric_i);
        CHECK(std::abs(out.amp(0) - 1.0) < 1e-14);
    }

    SUBCASE("|1,1> on a 50:50 splitter, symmetric-i convention") {
        FockPureVector in(2, 2);
        in.amp(in.index(1, 1)) = 1.0;
        const FockPureVector out = fock::beam_splitter(in, s, s, BsConvention::symmetric_i);
        CHECK(std::abs(out.amp(out.index(1, 1))) < 1e-14);
        CHECK(out.amp(out.index(2, 0)).imag() == doctest::Approx(s));
        CHECK(out.amp(out.index(0, 2)).imag() == doctest::Approx(s));
    }

    SUBCASE("|2,0> on a 50:50 splitter, real-antisymmetric convention") {
        FockPureVector in(2, 2);
        in.amp(in.index(2, 0)) = 1.0;
        const FockPureVector out = fock::beam_splitter(in, s, s, BsConvention::real_antisymmetric);
        CHECK(out.amp(out.index(2, 0)).real() == doctest::Approx(0.5));
        CHECK(out.amp(out.index(1, 1)).real() == doctest::Approx(s));
        CHECK(out.amp(out.index(0, 2)).real() == doctest::Approx(0.5));
    }

    SUBCASE("|0,1> picks up the antisymmetric sign") {
        FockPureVector in(2, 1);
        in.amp(in.index(0, 1)) = 1.0;
        const FockPureVector out = fock::beam_splitter(in, s, s, BsConvention::real_antisymmetric);
        CHECK(out.amp(out.index(1, 0)).real() == doctest::Approx(-s));
        CHECK(out.amp(out.index(0, 1)).real() == doctest::Approx(s));
    }

    SUBCASE("unitary below the truncation boundary") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 5; ++trial) {
            const FockPureVector psi = random_pure(rng, 6, 6);
            FockDensityMatrix rho = psi.to_density();
            const FockDensityMatrix out = fock::beam_splitter(rho, 0.6, 0.8, BsConvention::real_antisymmetric);
            CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK((out.rho * out.rho).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("cutoff overflow raises once the neglected weight passes the bound") {
        FockPureVector in(2, 2);
        in.amp(in.index(2, 2)) = 1.0;
        CHECK_THROWS_AS(fock::beam_splitter(in, s, s, BsConvention::symmetric_i), numeric_error);
        CHECK_NOTHROW(fock::beam_splitter(in, s, s, BsConvention::symmetric_i, 1.0));
    }
}

TEST_CASE("inefficient vacuum projection") {
    SUBCASE("vacuum input is untouched") {
        FockPureVector vac(2, 3);
        vac.amp(0) = 1.0;
        const auto [state, prob] = fock::project_vacuum(vac.to_density(), 1, 0.37);
        CHECK(prob == doctest::Approx(1.0));
        CHECK(std::abs(state.element1(0, 0) - 1.0) < 1e-14);
    }
    SUBCASE("single photon on the detected mode") {
        FockPureVector one(2, 3);
        one.amp(one.index(0, 1)) = 1.0;
        const auto [s1, p1] = fock::project_vacuum(one.to_density(), 1, 1.0);
        CHECK(p1 == doctest::Approx(0.0));
        (void)s1;
        const double eta = 0.42;
        const auto [s2, p2] = fock::project_vacuum(one.to_density(), 1, eta);
        CHECK(p2 == doctest::Approx(1.0 - eta));
        (void)s2;
    }
    SUBCASE("photon-number-resolved POVM completeness") {
        std::mt19937 rng(17);
        const FockDensityMatrix rho = random_pure(rng, 4, 4).to_density();
        const double eta = 0.6;
        // p_n = sum_k C(k,n) eta^n (1-eta)^(k-n) <k|rho_B|k>
        double total = 0.0;
        for (int n = 0; n <= 4; ++n) {
            double pn = 0.0;
            for (int k = n; k <= 4; ++k) {
                double binom = 1.0;
                for (int i = 0; i < n; ++i) binom *= static_cast<double>(k - i) / (n - i);
                double marg = 0.0;
                for (int a = 0; a <= 4; ++a) marg += rho.element(a, k, a, k).real();
                pn += binom * std::pow(eta, n) * std::pow(1.0 - eta, k - n) * marg;
            }
            total += pn;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        // and the n = 0 element is what project_vacuum reports
        const auto [st, p0] = fock::project_vacuum(rho, 1, eta);
        (void)st;
        double pn0 = 0.0;
        for (int k = 0; k <= 4; ++k) {
            double marg = 0.0;
            for (int a = 0; a <= 4; ++a) marg += rho.element(a, k, a, k).real();
            pn0 += std::pow(1.0 - eta, k) * marg;
        }
        CHECK(p0 == doctest::Approx(pn0).epsilon(1e-12));
    }
    SUBCASE("a perfect detector is the exact vacuum projection") {
        std::mt19937 rng(8);
        const FockDensityMatrix rho = random_pure(rng, 3, 3).to_density();
        const auto [ideal, p_ideal] = fock::project_vacuum(rho, 1, 1.0);
        const auto [proj, p_proj] = fock::project_number(rho, 1, 0);
        CHECK((ideal.rho - proj.rho).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p_ideal == p_proj);
    }
    FockPureVector vac(2, 2);
    vac.amp(0) = 1.0;
    CHECK_THROWS_AS(fock::project_vacuum(vac.to_density(), 3, 1.0), numeric_error);
}

TEST_CASE("partial trace") {
    SUBCASE("product state reduces to its factor") {
        FockPureVector prod(2, 3);
        prod.amp(prod.index(1, 0)) = std::sqrt(0.7);
        prod.amp(prod.index(2, 0)) = std::sqrt(0.3);
        const FockDensityMatrix red = fock::partial_trace(prod.to_density(), 1);
        CHECK(red.element1(1, 1).real() == doctest::Approx(0.7));
        CHECK(red.element1(2, 2).real() == doctest::Approx(0.3));
        CHECK(red.element1(1, 2).real() == doctest::Approx(std::sqrt(0.21)));
        CHECK(red.trace() == doctest::Approx(1.0));
    }
    SUBCASE("tmss reduces to the Schmidt mixture") {
        const double r = 0.4;
        const FockDensityMatrix red = fock::partial_trace(fock::tmss_fock(r, 0.0, 12).to_density(), 1);
        const double l2 = std::tanh(r) * std::tanh(r);
        for (int n = 0; n <= 4; ++n)
            CHECK(red.element1(n, n).real() == doctest::Approx((1.0 - l2) * std::pow(l2, n)).epsilon(1e-10));
        CHECK(std::abs(red.element1(0, 2)) < 1e-14);
    }
    SUBCASE("Bell-like state reduces to the maximal mixture") {
        FockPureVector bell(2, 1);
        bell.amp(bell.index(0, 0)) = std::sqrt(0.5);
        bell.amp(bell.index(1, 1)) = std::sqrt(0.5);
        const FockDensityMatrix red = fock::partial_trace(bell.to_density(), 0);
        CHECK(red.element1(0, 0).real() == doctest::Approx(0.5));
        CHECK(red.element1(1, 1).real() == doctest::Approx(0.5));
        CHECK(std::abs(red.element1(0, 1)) < 1e-14);
    }
}

TEST_CASE("entanglement and entropy measures") {
    SUBCASE("product states carry no negativity") {
        FockPureVector prod(2, 2);
        prod.amp(prod.index(1, 2)) = 1.0;
        CHECK(fock::log_negativity(prod.to_density()) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("one ebit for the Bell state") {
        FockPureVector bell(2, 1);
        bell.amp(bell.index(0, 0)) = std::sqrt(0.5);
        bell.amp(bell.index(1, 1)) = std::sqrt(0.5);
        CHECK(fock::log_negativity(bell.to_density()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fock::vn_entropy(bell.to_density()) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("separable mixtures stay at zero") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        FockDensityMatrix mix(2, 2);
        for (int k = 0; k < 4; ++k) {
            FockPureVector a(1, 2), b(1, 2);
            for (int i = 0; i <= 2; ++i) {
                a.amp(i) = Cplx(uni(rng) - 0.5, uni(rng) - 0.5);
                b.amp(i) = Cplx(uni(rng) - 0.5, uni(rng) - 0.5);
            }
            a.amp /= std::sqrt(a.norm2());
            b.amp /= std::sqrt(b.norm2());
            FockPureVector prod(2, 2);
            for (int i = 0; i <= 2; ++i)
                for (int j = 0; j <= 2; ++j) prod.amp(prod.index(i, j)) = a.amp(i) * b.amp(j);
            mix.rho += 0.25 * (prod.amp * prod.amp.adjoint());
        }
        CHECK(fock::log_negativity(mix) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("negativity is invariant under local phase rotations") {
        const FockDensityMatrix rho = fock::tmss_fock(0.35, 0.2, 6).to_density();
        FockDensityMatrix rotated = rho;
        const double phi = 0.77;
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b)
                for (int c = 0; c <= 6; ++c)
                    for (int d = 0; d <= 6; ++d)
                        rotated.at(a, b, c, d) =
                            rho.element(a, b, c, d) * std::exp(Cplx(0.0, phi * (a - c)));
        CHECK(fock::log_negativity(rotated) == doctest::Approx(fock::log_negativity(rho)).epsilon(1e-10));
    }
    SUBCASE("fidelity singles out the target") {
        std::mt19937 rng(9);
        const FockPureVector psi = random_pure(rng, 3, 3);
        CHECK(fock::fidelity_with(psi.to_density(), psi) == doctest::Approx(1.0).epsilon(1e-12));
        const FockPureVector other = random_pure(rng, 3, 3);
        CHECK(fock::fidelity_with(psi.to_density(), other) < 1.0 - 1e-3);
    }
}
