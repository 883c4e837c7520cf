#pragma once

#include "rankzo/objective.hpp"

#include <cmath>

namespace testutil {

using rankzo::Objective;
using rankzo::ObjectiveParts;
using rankzo::Vector;

/// 1/2 x^T diag(D) x.
inline Objective diag_quadratic(Vector diag) {
  ObjectiveParts p;
  p.name = "diag";
  p.dim = static_cast<int>(diag.size());
  p.value = [diag](const Vector& x) { return 0.5 * x.dot(diag.cwiseProduct(x)); };
  p.gradient = [diag](const Vector& x) -> Vector { return diag.cwiseProduct(x); };
  p.smoothness = diag.maxCoeff();
  p.strong_convexity = diag.minCoeff();
  p.optimum_value = 0.0;
  p.optimum_point = Vector::Zero(diag.size());
  return Objective(std::move(p));
}

inline Objective half_norm_sq(int d) { return diag_quadratic(Vector::Ones(d)); }

/// 1/4 ||x||^4.
inline Objective quartic(int d) {
  ObjectiveParts p;
  p.name = "quartic";
  p.dim = d;
  p.value = [](const Vector& x) { return 0.25 * std::pow(x.squaredNorm(), 2); };
  p.gradient = [](const Vector& x) -> Vector { return x.squaredNorm() * x; };
  return Objective(std::move(p));
}

inline Objective constant(int d, double c) {
  ObjectiveParts p;
  p.name = "constant";
  p.dim = d;
  p.value = [c](const Vector&) { return c; };
  p.gradient = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  p.smoothness = 1.0;
  return Objective(std::move(p));
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Central finite-difference gradient.
inline Vector fd_gradient(const Objective& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f.evaluate(a) - f.evaluate(b)) / (2 * h);
  }
  return g;
}

}  // namespace testutil
