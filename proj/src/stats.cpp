#include "entkit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "entkit/errors.hpp"

namespace entkit::stats {

Estimate mean_with_stderr(const std::vector<double>& samples) {
    const size_t n = samples.size();
    if (n == 0) return {0.0, 0.0};
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

Estimate binomial_estimate(long successes, long trials) {
    if (trials <= 0) throw numeric_error("binomial_estimate: no trials");
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    return {p, std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(trials))};
}

namespace {
double ks_q(double lambda) {
    // Q_KS(lambda) = 2 sum_j (-1)^(j-1) exp(-2 j^2 lambda^2)
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}
}  // namespace

double ks_exponential_pvalue(std::vector<double> samples, double rate, double t_max) {
    const size_t n = samples.size();
    if (n == 0) throw numeric_error("ks test needs samples");
    std::sort(samples.begin(), samples.end());
    const double tail = (t_max > 0.0) ? 1.0 - std::exp(-rate * t_max) : 1.0;
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double f = (1.0 - std::exp(-rate * samples[i])) / tail;
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
    }
    const double sn = std::sqrt(static_cast<double>(n));
    return ks_q((sn + 0.12 + 0.11 / sn) * d);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw numeric_error("linear_fit: need matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw numeric_error("linear_fit: degenerate x values");
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    const double mean_y = sy / n;
    double ss_tot = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.slope * x[i] + fit.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace entkit::stats
