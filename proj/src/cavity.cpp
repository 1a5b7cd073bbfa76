#include "entkit/cavity.hpp"

#include <cmath>

namespace entkit::cavity {

double CavityGeometry::waist() const {
    validate();
    return std::sqrt(lambda * std::sqrt(L * (2.0 * R_curv - L)) / (2.0 * M_PI));
}

void CavityGeometry::validate() const {
    if (!(L > 0.0) || !(2.0 * R_curv > L)) throw numeric_error("cavity geometry requires 2R > L > 0");
    if (!(lambda > 0.0)) throw numeric_error("cavity geometry requires a positive wavelength");
    if (D0 < 0.0 || D1 <= 0.0) throw numeric_error("cavity geometry requires D0 >= 0 and D1 > 0");
}

PassageResult state_after_passage(double gtauA, double gtauB) {
    const double ca = std::cos(gtauA), sa = std::sin(gtauA);
    const double cb = std::cos(gtauB), sb = std::sin(gtauB);
    PassageResult res;
    res.amp_B00 = Cplx(ca * cb, 0.0);
    res.amp_A01 = Cplx(0.0, -ca * sb);
    res.amp_A10 = Cplx(0.0, -sa);
    res.p_success = std::norm(res.amp_A01) + std::norm(res.amp_A10);
    if (res.p_success > 0.0) {
        // overlap of the conditional cavity state with (|0,1> + |1,0>)/sqrt(2)
        const Cplx overlap = (res.amp_A01 + res.amp_A10) / std::sqrt(2.0);
        res.fidelity_on_success = std::norm(overlap) / res.p_success;
    }
    return res;
}

double fidelity_ideal(double gtau) {
    const double c = std::cos(gtau);
    return 0.5 + c / (c * c + 1.0);
}

double success_probability(double gtau) {
    const double c2 = std::cos(gtau) * std::cos(gtau);
    return 1.0 - c2 * c2;
}

double fidelity_asymmetric(double gtau, double epsilon) {
    const double c = std::cos(gtau), s = std::sin(gtau);
    const double sb = std::sin(gtau * (1.0 - epsilon));
    return 0.5 + c * s * sb / (c * c * sb * sb + s * s);
}

double effective_interaction_time(const CavityGeometry& geometry, const AtomPath& path, int cavity_index) {
    geometry.validate();
    if (cavity_index != 0 && cavity_index != 1) throw numeric_error("cavity index must be 0 (A) or 1 (B)");
    if (!(path.v > 0.0)) throw numeric_error("atom speed must be positive");
    if (std::abs(path.phi) >= M_PI / 2.0 || std::abs(path.theta) >= M_PI / 2.0)
        throw numeric_error("path angles must satisfy |phi|, |theta| < pi/2");
    const double w0 = geometry.waist();
    const double k = 2.0 * M_PI / geometry.lambda;
    const double D = (cavity_index == 0) ? geometry.D0 : geometry.D0 + geometry.D1;

    // straight path through the cavity center plane; offsets at the crossing
    const double dy = path.y0 + std::tan(path.phi) * D;
    const double dz = path.z0 + std::tan(path.theta) / std::cos(path.phi) * D;

    // exact Gaussian line integral of exp(-(x^2+y^2)/w0^2) cos(k z) along the
    // path with direction (cos t cos f, cos t sin f, sin t)
    const double ct = std::cos(path.theta);
    const double cf = std::cos(path.phi), sf = std::sin(path.phi);
    const double prefactor = std::sqrt(M_PI) * w0 / (path.v * ct);
    const double gauss_y = std::exp(-dy * dy * cf * cf / (w0 * w0));
    const double gauss_z = std::exp(-k * k * w0 * w0 * std::tan(path.theta) * std::tan(path.theta) / 4.0);
    const double phase = k * (dz - dy * std::tan(path.theta) * sf);
    return prefactor * gauss_y * gauss_z * std::cos(phase);
}

double epsilon_estimate(const CavityGeometry& geometry, const AtomPath& path) {
    geometry.validate();
    const double w0 = geometry.waist();
    const double d0f = geometry.D0 * path.phi;
    const double d1f = geometry.D1 * path.phi;
    const double d0t = geometry.D0 * path.theta;
    const double d1t = geometry.D1 * path.theta;
    const double term_y = (d1f * d1f + d1f * 2.0 * d0f + 2.0 * path.y0 * d1f) / (w0 * w0);
    const double term_z = 2.0 * M_PI * M_PI / (geometry.lambda * geometry.lambda) *
                          (d1t * d1t + d1t * 2.0 * d0t + 2.0 * path.z0 * d1t);
    return term_y + term_z;
}

double detection_run_probability(double D, double P) {
    if (!(P > 0.0) || P > 1.0) throw numeric_error("detection_run_probability: P must lie in (0,1]");
    if (D < 0.0 || D > 1.0) throw numeric_error("detection_run_probability: D must lie in [0,1]");
    return std::pow(D, 1.0 / P);
}

}  // namespace entkit::cavity
