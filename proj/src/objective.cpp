#include "rankzo/objective.hpp"

#include "rankzo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

namespace rankzo {

Objective::Objective(ObjectiveParts parts) : parts_(std::move(parts)) {
  if (parts_.dim <= 0) throw std::invalid_argument("Objective: dimension must be positive");
  if (!parts_.value) throw std::invalid_argument("Objective: value function is empty");
  if (parts_.smoothness && !(*parts_.smoothness > 0.0))
    throw std::invalid_argument("Objective: L must be positive");
  if (parts_.strong_convexity && *parts_.strong_convexity < 0.0)
    throw std::invalid_argument("Objective: mu must be nonnegative");
}

void Objective::check_dim(const Vector& x) const {
  if (x.size() != parts_.dim)
    throw DimensionError("objective '" + parts_.name + "' expects dimension " +
                         std::to_string(parts_.dim) + ", got " + std::to_string(x.size()));
}

double Objective::evaluate(const Vector& x) const {
  check_dim(x);
  return parts_.value(x);
}

Vector Objective::gradient(const Vector& x) const {
  check_dim(x);
  if (!parts_.gradient) throw std::logic_error("objective '" + parts_.name + "' has no gradient");
  return parts_.gradient(x);
}

double remainder(const Objective& obj, const Vector& y, const Vector& x) {
  if (!obj.has_gradient()) throw std::logic_error("remainder: objective has no gradient");
  return obj.evaluate(y) - obj.evaluate(x) - obj.gradient(x).dot(y - x);
}

Matrix quadratic_matrix(int d, double mu, double L, std::uint64_t seed) {
  if (d <= 0) throw std::invalid_argument("make_quadratic: d must be positive");
  if (!(mu > 0.0) || !(L > 0.0)) throw std::invalid_argument("make_quadratic: mu and L must be positive");
  if (mu > L) throw std::invalid_argument("make_quadratic: mu must not exceed L");

  CounterRng rng(seed, /*stream=*/0x51ADull);
  Matrix g(d, d);
  rng.fill_normal({g.data(), static_cast<std::size_t>(g.size())});
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();

  std::vector<double> spectrum(static_cast<std::size_t>(d));
  spectrum.front() = L;
  if (d > 1) {
    spectrum[0] = mu;
    spectrum[static_cast<std::size_t>(d - 1)] = L;
    const double lo = std::log(mu), hi = std::log(L);
    for (int i = 1; i + 1 < d; ++i) spectrum[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * rng.uniform());
    std::sort(spectrum.begin(), spectrum.end());
  }
  const Vector diag = Eigen::Map<const Vector>(spectrum.data(), d);
  Matrix a = q.transpose() * diag.asDiagonal() * q;
  return 0.5 * (a + a.transpose());
}

Objective make_quadratic(int d, double mu, double L, std::uint64_t seed) {
  auto a = std::make_shared<const Matrix>(quadratic_matrix(d, mu, L, seed));
  CounterRng rng(seed, /*stream=*/0x0B7ull);
  Vector x_star(d);
  rng.fill_normal({x_star.data(), static_cast<std::size_t>(d)});

  ObjectiveParts parts;
  parts.name = "quadratic";
  parts.dim = d;
  parts.value = [a, x_star](const Vector& x) {
    const Vector r = x - x_star;
    return 0.5 * r.dot(*a * r);
  };
  parts.gradient = [a, x_star](const Vector& x) -> Vector { return *a * (x - x_star); };
  parts.smoothness = L;
  parts.strong_convexity = mu;
  parts.optimum_value = 0.0;
  parts.optimum_point = x_star;
  return Objective(std::move(parts));
}

namespace {

constexpr double kRosenBox = 2.0;

double rosen_block_hessian_norm(double u, double v) {
  // Hessian of 100 (v - u^2)^2 + (1 - u)^2.
  const double huu = 1200.0 * u * u - 400.0 * v + 2.0;
  const double huv = -400.0 * u;
  const double hvv = 200.0;
  const double mean = 0.5 * (huu + hvv);
  const double rad = std::sqrt(0.25 * (huu - hvv) * (huu - hvv) + huv * huv);
  return std::max(std::abs(mean + rad), std::abs(mean - rad));
}

double measure_rosen_smoothness() {
  constexpr int steps = 400;
  double best = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double u = -kRosenBox + 2.0 * kRosenBox * i / steps;
    for (int j = 0; j <= steps; ++j) {
      const double v = -kRosenBox + 2.0 * kRosenBox * j / steps;
      best = std::max(best, rosen_block_hessian_norm(u, v));
    }
  }
  return best;
}

}  // namespace

double rosenbrock_box_half_width() { return kRosenBox; }

double rosenbrock_measured_smoothness() {
  static const double value = measure_rosen_smoothness();
  return value;
}

Objective make_rosenbrock_like(int d) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("make_rosenbrock_like: d must be even and >= 2");
  ObjectiveParts parts;
  parts.name = "rosenbrock";
  parts.dim = d;
  parts.value = [](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
      const double u = x[i], v = x[i + 1];
      const double r1 = v - u * u;
      const double r2 = 1.0 - u;
      s += 100.0 * r1 * r1 + r2 * r2;
    }
    return s;
  };
  parts.gradient = [](const Vector& x) -> Vector {
    Vector g(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
      const double u = x[i], v = x[i + 1];
      const double r1 = v - u * u;
      g[i] = -400.0 * u * r1 - 2.0 * (1.0 - u);
      g[i + 1] = 200.0 * r1;
    }
    return g;
  };
  parts.smoothness = rosenbrock_measured_smoothness();
  parts.optimum_value = 0.0;
  parts.optimum_point = Vector::Ones(d);
  return Objective(std::move(parts));
}

Objective make_linear(Vector g, double nominal_L) {
  ObjectiveParts parts;
  parts.name = "linear";
  parts.dim = static_cast<int>(g.size());
  auto gp = std::make_shared<const Vector>(std::move(g));
  parts.value = [gp](const Vector& x) { return gp->dot(x); };
  parts.gradient = [gp](const Vector&) -> Vector { return *gp; };
  parts.smoothness = nominal_L;
  return Objective(std::move(parts));
}

MonotoneTransform MonotoneTransform::affine(double a, double b) {
  if (!(a > 0.0)) throw std::invalid_argument("affine transform needs a > 0");
  return {Kind::affine, a, b};
}

MonotoneTransform MonotoneTransform::exponential() { return {Kind::exponential, 1.0, 0.0}; }

MonotoneTransform MonotoneTransform::cube_plus_linear(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("cube-plus-linear transform needs a > 0");
  return {Kind::cube_plus_linear, a, 0.0};
}

double MonotoneTransform::apply(double y) const {
  switch (kind) {
    case Kind::affine: return a * y + b;
    case Kind::exponential: return std::exp(y);
    case Kind::cube_plus_linear: return y * y * y + a * y;
  }
  return y;
}

Objective wrap_monotone(const Objective& obj, const MonotoneTransform& t) {
  if (t.kind != MonotoneTransform::Kind::exponential && !(t.a > 0.0))
    throw std::invalid_argument("wrap_monotone: transform is not strictly increasing");
  ObjectiveParts parts;
  parts.name = obj.name() + "+monotone";
  parts.dim = obj.dim();
  parts.value = [obj, t](const Vector& x) { return t.apply(obj.evaluate(x)); };
  parts.optimum_point = obj.optimum_point();  // still the minimizer of t(f)
  return Objective(std::move(parts));
}

}  // namespace rankzo
