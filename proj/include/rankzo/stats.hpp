#pragma once

#include <span>
#include <vector>

namespace rankzo::stats {

double normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

/// Inverse standard normal CDF. Rational initial guess refined by one
/// Halley step against erfc; accurate to a few ulps on (0, 1).
double normal_quantile(double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of ys on xs. Requires at least two points.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Median of a copy of the input; mean of the two central values for even sizes.
double median(std::vector<double> values);

double pearson(std::span<const double> a, std::span<const double> b);

/// Half-width used by the Monte-Carlo pass criterion: 3 * sqrt(b(1-b)/trials),
/// with b clamped to [0, 1].
double three_sigma(double bound, long long trials);

}  // namespace rankzo::stats
