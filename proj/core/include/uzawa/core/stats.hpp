#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uzawa {

/// Sample mean with a normal-approximation 95% half-width.
struct MeanEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t count = 0;
};

double mean(std::span<const double> xs);
/// Unbiased sample variance; 0 for fewer than two samples.
double sample_variance(std::span<const double> xs);
MeanEstimate mean_with_ci(std::span<const double> xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

/// Running mean/variance (Welford).
class RunningStats {
 public:
  void add(double x) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  MeanEstimate estimate() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace uzawa
