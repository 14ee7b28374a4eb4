#include "bmgap/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bmgap/errors.hpp"

namespace bmgap {

std::size_t default_batches(std::size_t n) {
  return std::min(n, std::clamp<std::size_t>(n / 4, 8, 256));
}

namespace {

std::vector<double> group_means(std::span<const double> samples, std::size_t batches) {
  const std::size_t n = samples.size();
  std::vector<double> means(batches, 0.0);
  std::size_t start = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t size = n / batches + (b < n % batches ? 1 : 0);
    double sum = 0.0;
    for (std::size_t i = start; i < start + size; ++i) sum += samples[i];
    means[b] = sum / static_cast<double>(size);
    start += size;
  }
  return means;
}

void check_batches(std::size_t n, std::size_t batches) {
  if (batches < 8) throw InvalidArgument("batch means needs at least 8 batches");
  if (n < batches) throw InvalidArgument("fewer samples than batches");
}

}  // namespace

Estimate batch_means(std::span<const double> samples, std::size_t batches) {
  check_batches(samples.size(), batches);
  const auto means = group_means(samples, batches);
  double total = 0.0;
  for (const double v : samples) total += v;
  const double mean = total / static_cast<double>(samples.size());

  double batch_avg = 0.0;
  for (const double m : means) batch_avg += m;
  batch_avg /= static_cast<double>(batches);
  double ss = 0.0;
  for (const double m : means) ss += (m - batch_avg) * (m - batch_avg);
  const double var = ss / static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches)), samples.size(), batches};
}

Estimate batch_means(std::span<const double> samples) { return batch_means(samples, default_batches(samples.size())); }

Estimate ratio_estimate(std::span<const double> numerator, std::span<const double> denominator, std::size_t batches) {
  if (numerator.size() != denominator.size()) throw InvalidArgument("ratio: sample counts differ");
  check_batches(numerator.size(), batches);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < numerator.size(); ++i) {
    num += numerator[i];
    den += denominator[i];
  }
  if (den == 0.0) throw DegenerateSample("ratio: denominator sums to zero");
  const double ratio = num / den;

  const auto nm = group_means(numerator, batches);
  const auto dm = group_means(denominator, batches);
  const double den_mean = den / static_cast<double>(denominator.size());
  // Linearization: R_b - R ~ (N_b - R D_b) / mean(D).
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const double resid = (nm[b] - ratio * dm[b]) / den_mean;
    ss += resid * resid;
  }
  const double var = ss / static_cast<double>(batches - 1);
  return {ratio, std::sqrt(var / static_cast<double>(batches)), numerator.size(), batches};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line needs at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: abscissae are all equal");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

}  // namespace bmgap
