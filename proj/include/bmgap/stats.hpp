#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bmgap {

/// Monte Carlo mean with a batch-means standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t batches = 0;
};

/// Default batch count: n/4 clamped to [8, 256] (and to n).
std::size_t default_batches(std::size_t n);

/// Splits the samples, in order, into `batches` contiguous groups whose sizes differ
/// by at most one, and returns the batch-size-weighted mean of the batch means (the
/// plain sample mean) with std_error = sd(batch means) / sqrt(batches).
/// Throws InvalidArgument when n < batches or batches < 8.
Estimate batch_means(std::span<const double> samples, std::size_t batches);
Estimate batch_means(std::span<const double> samples);

/// Ratio of means sum(num)/sum(den) with a delta-method standard error over batch means.
Estimate ratio_estimate(std::span<const double> numerator, std::span<const double> denominator, std::size_t batches);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Least-squares line y = intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace bmgap
