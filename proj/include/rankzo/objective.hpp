#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace rankzo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything needed to build an Objective. Only `dim` and `value` are
/// required; the rest is instrumentation used by theory-validation runs.
struct ObjectiveParts {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::optional<double> smoothness;
  std::optional<double> strong_convexity;
  std::optional<double> optimum_value;
  std::optional<Vector> optimum_point;
};

/// Smooth black-box objective. Immutable after construction, so a single
/// instance may be evaluated from several threads at once.
class Objective {
 public:
  explicit Objective(ObjectiveParts parts);

  [[nodiscard]] const std::string& name() const { return parts_.name; }
  [[nodiscard]] int dim() const { return parts_.dim; }

  /// f(x). Does not touch any query ledger; accounting lives with the rank oracle.
  [[nodiscard]] double evaluate(const Vector& x) const;

  [[nodiscard]] bool has_gradient() const { return static_cast<bool>(parts_.gradient); }
  [[nodiscard]] Vector gradient(const Vector& x) const;

  [[nodiscard]] std::optional<double> smoothness() const { return parts_.smoothness; }
  [[nodiscard]] std::optional<double> strong_convexity() const { return parts_.strong_convexity; }
  [[nodiscard]] std::optional<double> optimum_value() const { return parts_.optimum_value; }
  [[nodiscard]] const std::optional<Vector>& optimum_point() const { return parts_.optimum_point; }

 private:
  void check_dim(const Vector& x) const;
  ObjectiveParts parts_;
};

/// Taylor remainder d(y, x) = f(y) - f(x) - <grad f(x), y - x>.
double remainder(const Objective& obj, const Vector& y, const Vector& x);

/// Symmetric matrix Q^T D Q with Q a seeded random orthogonal matrix and a
/// log-uniform spectrum whose smallest and largest entries are exactly mu and L.
Matrix quadratic_matrix(int d, double mu, double L, std::uint64_t seed);

/// f(x) = 1/2 (x - x*)^T A (x - x*) with A = quadratic_matrix(d, mu, L, seed)
/// and x* ~ N(0, I) from the same seed. f* = 0.
Objective make_quadratic(int d, double mu, double L, std::uint64_t seed);

/// Separable Rosenbrock: sum over pairs of 100 (x_{2i+1} - x_{2i}^2)^2 + (1 - x_{2i})^2.
/// f* = 0 at the all-ones point. L is the largest Hessian spectral norm found
/// on a grid over the box [-2, 2]^d (see rosenbrock_box_half_width()).
Objective make_rosenbrock_like(int d);
double rosenbrock_box_half_width();
double rosenbrock_measured_smoothness();

/// f(x) = <g, x> + c. Zero remainder everywhere; L is recorded as `nominal_L`.
Objective make_linear(Vector g, double nominal_L = 1.0);

/// Strictly increasing maps applied to objective values.
struct MonotoneTransform {
  enum class Kind { affine, exponential, cube_plus_linear };
  Kind kind = Kind::affine;
  double a = 1.0;  // affine slope, or linear coefficient of y^3 + a y
  double b = 0.0;  // affine offset

  static MonotoneTransform affine(double a, double b);
  static MonotoneTransform exponential();
  static MonotoneTransform cube_plus_linear(double a);

  [[nodiscard]] double apply(double y) const;
};

/// t(f(x)). Gradient, L, mu and f* are dropped: they do not survive t.
/// The minimizer x* does, and is kept.
Objective wrap_monotone(const Objective& obj, const MonotoneTransform& t);

}  // namespace rankzo
