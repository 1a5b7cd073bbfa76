#ifndef ENTKIT_STATS_HPP
#define ENTKIT_STATS_HPP

#include <vector>

namespace entkit::stats {

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

Estimate mean_with_stderr(const std::vector<double>& samples);
Estimate binomial_estimate(long successes, long trials);

/// One-sample Kolmogorov-Smirnov test of the samples against the CDF of an
/// exponential with the given rate, truncated at t_max (pass t_max <= 0 for
/// the untruncated distribution).  Returns the asymptotic p-value.
double ks_exponential_pvalue(std::vector<double> samples, double rate, double t_max);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace entkit::stats

#endif
