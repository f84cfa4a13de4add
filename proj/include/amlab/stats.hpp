#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace amlab {

double normal_pdf(double x, double mean = 0.0, double sd = 1.0);
double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// One-sample Kolmogorov-Smirnov statistic against an exact CDF.
// `samples` need not be sorted; a sorted copy is made.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
double ks_pvalue(double statistic, std::size_t n);

}  // namespace amlab
