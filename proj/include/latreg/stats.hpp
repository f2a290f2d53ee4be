#pragma once

#include <functional>
#include <vector>

namespace latreg {

double normal_cdf(double x, double mean = 0.0, double stddev = 1.0);

/// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Critical value of the two-sided KS test, asymptotic form c(alpha)/sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

/// Total variation distance between two samples, estimated from a shared
/// equal-width histogram spanning both samples.
double histogram_tv_distance(const std::vector<double>& a, const std::vector<double>& b,
                             int bins);

}  // namespace latreg
