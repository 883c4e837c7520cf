#include "helpers.hpp"
#include "rankzo/objective.hpp"
#include "rankzo/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

using namespace rankzo;
using testutil::vec;

TEST_CASE("evaluate on simple quadratics") {
  CHECK(testutil::half_norm_sq(2).evaluate(vec({3, 4})) == 12.5);
  CHECK(testutil::half_norm_sq(2).evaluate(vec({0, 0})) == 0.0);
  CHECK(testutil::diag_quadratic(vec({1, 100})).evaluate(vec({1, 1})) == 50.5);
  CHECK_THROWS_AS((void)testutil::half_norm_sq(2).evaluate(vec({1, 2, 3})), DimensionError);
}

TEST_CASE("remainder") {
  const auto q = testutil::half_norm_sq(3);
  const Vector x = vec({1, -2, 0.5}), y = vec({0.3, 4, -1});
  CHECK(remainder(q, y, x) == doctest::Approx(0.5 * (y - x).squaredNorm()));
  CHECK(remainder(q, x, x) == 0.0);
  CHECK(remainder(testutil::quartic(1), vec({1.1}), vec({1.0})) == doctest::Approx(0.016025).epsilon(1e-12));
  const Objective no_grad = wrap_monotone(q, MonotoneTransform::affine(1, 0));
  CHECK_THROWS_AS((void)remainder(no_grad, y, x), std::logic_error);
}

TEST_CASE("make_quadratic spectrum, optimum and gradient") {
  SUBCASE("isotropic case is the identity") {
    const Matrix A = quadratic_matrix(2, 1.0, 1.0, 3);
    CHECK((A - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    const Objective f = make_quadratic(2, 1.0, 1.0, 3);
    CHECK(f.evaluate(*f.optimum_point()) == 0.0);
  }
  SUBCASE("extreme eigenvalues are attained") {
    const Matrix A = quadratic_matrix(4, 1.0, 100.0, 9);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    const Vector ev = es.eigenvalues();
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[3] == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(ev[1] >= 1.0 - 1e-12);
    CHECK(ev[1] <= ev[2]);
    CHECK(ev[2] <= 100.0 + 1e-12);
  }
  SUBCASE("gradient matches finite differences") {
    const Objective f = make_quadratic(12, 1.0, 10.0, 5);
    CounterRng r(99);
    for (int i = 0; i < 10; ++i) {
      Vector x(12);
      r.fill_normal({x.data(), 12});
      const Vector g = f.gradient(x), fd = testutil::fd_gradient(f, x);
      CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
    }
  }
  SUBCASE("populated metadata and determinism") {
    const Objective f = make_quadratic(8, 2.0, 20.0, 4), g = make_quadratic(8, 2.0, 20.0, 4);
    CHECK(*f.smoothness() == 20.0);
    CHECK(*f.strong_convexity() == 2.0);
    CHECK(*f.optimum_value() == 0.0);
    CHECK(*f.optimum_point() == *g.optimum_point());
    CHECK(f.optimum_point()->isApprox(*g.optimum_point()));
    CHECK(*f.optimum_point() != *make_quadratic(8, 2.0, 20.0, 5).optimum_point());
  }
  CHECK_THROWS_AS((void)make_quadratic(4, 10.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("quadratic smoothness, strong convexity and PL on random pairs") {
  const Objective f = make_quadratic(10, 0.5, 8.0, 21);
  CounterRng r(1234);
  for (int i = 0; i < 1000; ++i) {
    Vector x(10), y(10);
    r.fill_normal({x.data(), 10});
    r.fill_normal({y.data(), 10});
    const double rem = remainder(f, y, x), dist = (y - x).squaredNorm();
    CHECK(std::abs(rem) <= 4.0 * dist * (1 + 1e-12));
    CHECK(rem >= 0.25 * dist * (1 - 1e-12));
    CHECK(f.gradient(x).squaredNorm() >= 2 * 0.5 * f.evaluate(x) * (1 - 1e-12));
  }
}

TEST_CASE("rosenbrock-like objective") {
  const Objective f = make_rosenbrock_like(6);
  CHECK(f.evaluate(Vector::Ones(6)) == 0.0);
  CHECK(*f.optimum_value() == 0.0);
  CHECK(*f.smoothness() <= 1e4);
  CHECK(*f.smoothness() > 1e3);
  CounterRng r(77);
  const double w = rosenbrock_box_half_width();
  for (int i = 0; i < 10; ++i) {
    Vector x(6);
    for (int j = 0; j < 6; ++j) x[j] = w * (2 * r.uniform() - 1);
    const Vector g = f.gradient(x), fd = testutil::fd_gradient(f, x, 1e-5);
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
  for (int i = 0; i < 10000; ++i) {
    Vector x(6);
    for (int j = 0; j < 6; ++j) x[j] = 4 * w * (2 * r.uniform() - 1);
    CHECK_UNARY(f.evaluate(x) >= 0.0);
  }
  CHECK_THROWS_AS((void)make_rosenbrock_like(3), std::invalid_argument);
}

TEST_CASE("rosenbrock smoothness estimate bounds the Hessian on the box") {
  // Hessian of one pair block, checked on a grid offset from the measurement grid.
  const double w = rosenbrock_box_half_width(), L = rosenbrock_measured_smoothness();
  double worst = 0;
  for (int i = 0; i < 97; ++i)
    for (int j = 0; j < 97; ++j) {
      const double u = -w + 2 * w * (i + 0.5) / 97, v = -w + 2 * w * (j + 0.5) / 97;
      Eigen::Matrix2d H;
      H << 1200 * u * u - 400 * v + 2, -400 * u, -400 * u, 200;
      worst = std::max(worst, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(H).eigenvalues().cwiseAbs().maxCoeff());
    }
  CHECK(worst <= L);
}

TEST_CASE("wrap_monotone") {
  const Objective q = testutil::half_norm_sq(1);
  const Objective same = wrap_monotone(q, MonotoneTransform::affine(1, 0));
  const Objective shifted = wrap_monotone(q, MonotoneTransform::affine(3, 7));
  CHECK(shifted.evaluate(vec({2})) == 13.0);
  CHECK(same.dim() == 1);
  CHECK_FALSE(same.has_gradient());
  CHECK_FALSE(same.smoothness());
  CHECK_FALSE(same.optimum_value());
  CHECK(*same.optimum_point() == *q.optimum_point());
  for (double x : {-3.0, 0.0, 0.25, 9.0}) CHECK(same.evaluate(vec({x})) == q.evaluate(vec({x})));

  const Objective lin = make_linear(vec({1.0}));
  const Objective e = wrap_monotone(lin, MonotoneTransform::exponential());
  CHECK(e.evaluate(vec({-1})) < e.evaluate(vec({0})));
  CHECK(e.evaluate(vec({0})) == 1.0);
  CHECK(e.evaluate(vec({0})) < e.evaluate(vec({2})));
  CHECK_THROWS((void)MonotoneTransform::affine(-1, 0));
  CHECK_THROWS((void)MonotoneTransform::cube_plus_linear(0));

  // Ordering of 100 random probes is preserved by every transform.
  const Objective f = make_quadratic(5, 1, 10, 2);
  CounterRng r(8);
  std::vector<Vector> probes;
  for (int i = 0; i < 100; ++i) {
    Vector x(5);
    r.fill_normal({x.data(), 5});
    probes.push_back(x);
  }
  auto order_of = [&](const Objective& g) {
    std::vector<int> idx(100);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> v;
    for (const auto& p : probes) v.push_back(g.evaluate(p));
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    return idx;
  };
  const auto base = order_of(f);
  CHECK(order_of(wrap_monotone(f, MonotoneTransform::affine(3, 7))) == base);
  CHECK(order_of(wrap_monotone(f, MonotoneTransform::exponential())) == base);
  CHECK(order_of(wrap_monotone(f, MonotoneTransform::cube_plus_linear(0.5))) == base);
}
