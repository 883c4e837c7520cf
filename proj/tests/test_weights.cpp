#include "rankzo/stats.hpp"
#include "rankzo/weights.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace rankzo;

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("uniform weights") {
  const WeightVector w8 = uniform_weights(8);
  CHECK(std::vector<double>(w8.plus().begin(), w8.plus().end()) == std::vector<double>{0.5, 0.5});
  CHECK(std::vector<double>(w8.minus().begin(), w8.minus().end()) == std::vector<double>{-0.5, -0.5});
  const WeightVector w16 = uniform_weights(16);
  for (double v : w16.plus()) CHECK(v == 0.25);
  for (double v : w16.minus()) CHECK(v == -0.25);
  CHECK(weight_ratio(w16) == 1.0);
  CHECK(w16.at_rank(0) == 0.25);
  CHECK(w16.at_rank(8) == 0.0);
  CHECK(w16.at_rank(15) == -0.25);
  CHECK_THROWS((void)uniform_weights(6));
}

TEST_CASE("log weights") {
  const WeightVector w = log_weights(20);
  // Unnormalized values log(21) - log(k); normalization cancels in ratios.
  CHECK(w.plus()[0] / w.plus()[4] == doctest::Approx(std::log(21.0) / (std::log(21.0) - std::log(5.0))).epsilon(1e-13));
  CHECK(w.plus()[0] / w.plus()[4] == doctest::Approx(2.1215).epsilon(1e-4));
  for (int k = 1; k < 5; ++k) CHECK(w.plus()[k] < w.plus()[k - 1]);
  CHECK(weight_ratio(w) == doctest::Approx(1 / 2.12149).epsilon(1e-5));
  // Worst rank carries the largest negative magnitude.
  CHECK(w.at_rank(19) == doctest::Approx(-w.plus()[0]));
  CHECK(w.at_rank(15) == doctest::Approx(-w.plus()[4]));
}

TEST_CASE("blom weights") {
  const WeightVector w = blom_weights(20);
  const boost::math::normal_distribution<double> nd;
  const double q1 = boost::math::quantile(nd, 0.625 / 20.25);
  CHECK(q1 == doctest::Approx(-1.86824).epsilon(1e-5));
  double total = 0;
  for (int k = 1; k <= 5; ++k) total += std::abs(boost::math::quantile(nd, (k - 0.375) / 20.25));
  CHECK(w.plus()[0] == doctest::Approx(std::abs(q1) / total).epsilon(1e-12));
  for (int k = 0; k < 5; ++k) CHECK(std::abs(w.at_rank(k) + w.at_rank(19 - k)) < 1e-10);
  const WeightVector lw = log_weights(20);
  CHECK(stats::pearson(w.plus(), lw.plus()) >= 0.95);
}

TEST_CASE("normalization and monotonicity for every scheme and N") {
  for (WeightScheme s : {WeightScheme::uniform, WeightScheme::log, WeightScheme::blom}) {
    for (int N = 4; N <= 256; N += 4) {
      const WeightVector w = make_weights(s, N);
      CHECK(std::abs(sum(w.plus()) - 1.0) <= 1e-12);
      CHECK(std::abs(sum(w.minus()) + 1.0) <= 1e-12);
      CHECK(w.plus().size() == static_cast<std::size_t>(N / 4));
      for (std::size_t k = 1; k < w.plus().size(); ++k) {
        CHECK(w.plus()[k] <= w.plus()[k - 1]);
        CHECK(std::abs(w.minus()[k]) >= std::abs(w.minus()[k - 1]));
      }
      const double r = weight_ratio(w);
      CHECK(r > 0.0);
      CHECK(r <= 1.0);
    }
  }
}

TEST_CASE("positive-only weights") {
  const WeightVector w = positive_only_weights(WeightScheme::uniform, 8);
  CHECK(w.positive_only());
  CHECK(w.plus().size() == 2);
  CHECK(sum(w.plus()) == 1.0);
  CHECK(w.minus().empty());
  CHECK(w.ranks() == std::vector<int>{0, 1});
  const WeightVector b = positive_only_weights(WeightScheme::blom, 32);
  CHECK(std::abs(sum(b.plus()) - 1.0) <= 1e-12);
  for (double v : b.plus()) CHECK(v > 0.0);
}

TEST_CASE("weight vector invariants are enforced") {
  CHECK_THROWS((void)WeightVector(WeightScheme::uniform, 8, {0.6, 0.6}, {-0.5, -0.5}));
  CHECK_THROWS((void)WeightVector(WeightScheme::uniform, 8, {0.5, 0.5}, {0.5, -1.5}));
  CHECK_THROWS((void)WeightVector(WeightScheme::uniform, 8, {0.4, 0.6}, {-0.5, -0.5}));
  CHECK_THROWS((void)WeightVector(WeightScheme::uniform, 8, {0.0, 0.0}, {0.0, 0.0}));
  CHECK_NOTHROW((void)WeightVector(WeightScheme::uniform, 8, {0.5, 0.5}, {-0.5, -0.5}));
  CHECK(parse_weight_scheme("blom") == WeightScheme::blom);
  CHECK(to_string(WeightScheme::log) == "log");
  CHECK_THROWS((void)parse_weight_scheme("cma"));
}
