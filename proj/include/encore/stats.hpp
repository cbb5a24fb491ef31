#pragma once

#include <vector>

namespace encore {

/// Quantile with linear interpolation between order statistics. p in [0, 1].
double quantile(std::vector<double> values, double p);

double mean(const std::vector<double>& values);

/// Sample standard deviation (n-1 denominator); 0 when fewer than 2 values.
double sample_sd(const std::vector<double>& values);

}  // namespace encore
