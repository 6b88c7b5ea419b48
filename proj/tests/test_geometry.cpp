#include <cmath>
#include <random>

#include "adamir/analysis.hpp"
#include "adamir/errors.hpp"
#include "adamir/geometry.hpp"
#include "adamir/problems.hpp"
#include "doctest.h"

using namespace adamir;

namespace {

Point vec(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

// Closed-form divergences written out independently of the library.
double kl(const Point& y, const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] > 0) s += y[i] * std::log(y[i] / x[i]);
  return s;
}

double itakura_saito(const Point& y, const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += y[i] / x[i] - std::log(y[i] / x[i]) - 1.0;
  return s;
}

}  // namespace

TEST_CASE("h_value examples") {
  CHECK(BregmanGeometry::entropic(2).h_value(vec({1, 0})) == 0.0);
  CHECK(BregmanGeometry::euclidean(2).h_value(vec({3, 4})) == doctest::Approx(12.5));
  CHECK(BregmanGeometry::log_barrier(2).h_value(vec({1, 1})) == 0.0);
  CHECK_THROWS_AS(BregmanGeometry::log_barrier(2).h_value(vec({1, 0})), DomainViolation);
  CHECK_THROWS_AS(BregmanGeometry::entropic(2).h_value(vec({0.7, 0.7})), DomainViolation);
  CHECK_THROWS_AS(BregmanGeometry::entropic(2).h_value(vec({1.5, -0.5})), DomainViolation);
  CHECK_THROWS_AS(BregmanGeometry::euclidean(2).h_value(vec({1, 2, 3})), DomainViolation);
}

TEST_CASE("divergence examples") {
  const Point a = vec({0.5, 0.5});
  const Point b = vec({0.25, 0.75});
  for (const auto& g : {BregmanGeometry::euclidean(2), BregmanGeometry::entropic(2),
                        BregmanGeometry::log_barrier(2)})
    CHECK(std::abs(g.divergence(b, b)) <= 1e-15);

  const auto lb = BregmanGeometry::log_barrier(2);
  const double expected_is = 2.0 * (0.5 - std::log(0.5) - 1.0);
  CHECK(expected_is == doctest::Approx(0.386294).epsilon(1e-6));
  CHECK(lb.divergence(vec({1, 1}), vec({2, 2})) == doctest::Approx(expected_is).epsilon(1e-14));
  CHECK(itakura_saito(vec({1, 1}), vec({2, 2})) == doctest::Approx(expected_is).epsilon(1e-14));

  const auto en = BregmanGeometry::entropic(2);
  const double expected_kl = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(expected_kl == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(en.divergence(a, b) == doctest::Approx(expected_kl).epsilon(1e-14));
  CHECK(kl(a, b) == doctest::Approx(expected_kl).epsilon(1e-14));

  CHECK(BregmanGeometry::euclidean(2).divergence(vec({1, 2}), vec({0, 0})) == doctest::Approx(2.5));
}

TEST_CASE("mirror map examples") {
  const Point e = BregmanGeometry::entropic(2).mirror_map(vec({0, 0}));
  CHECK(e[0] == doctest::Approx(0.5));
  CHECK(e[1] == doctest::Approx(0.5));
  const Point l = BregmanGeometry::log_barrier(2).mirror_map(vec({-1, -2}));
  CHECK(l[0] == doctest::Approx(1.0));
  CHECK(l[1] == doctest::Approx(0.5));
  CHECK(BregmanGeometry::euclidean(2).mirror_map(vec({1, 2})) == vec({1, 2}));
  CHECK_THROWS_AS(BregmanGeometry::log_barrier(2).mirror_map(vec({-1, 0})), NoMaximizer);
  CHECK_THROWS_AS(BregmanGeometry::log_barrier(2).mirror_map(vec({2, -1})), NoMaximizer);
  // Huge dual coordinates must not overflow the softmax.
  const Point s = BregmanGeometry::entropic(3).mirror_map(vec({1000, 999, -1000}));
  CHECK(s.allFinite());
  CHECK(s.sum() == doctest::Approx(1.0));
  CHECK(s[0] / s[1] == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("prox examples") {
  const Point x = vec({0.5, 0.5});
  for (const auto& g : {BregmanGeometry::euclidean(2), BregmanGeometry::entropic(2),
                        BregmanGeometry::log_barrier(2)}) {
    const Point p = g.prox_step(x, Point::Zero(2));
    CHECK((p - x).norm() <= 1e-15);
  }
  const Point e = BregmanGeometry::entropic(2).prox_step(x, vec({std::log(3.0), 0}));
  CHECK(e[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(e[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(BregmanGeometry::euclidean(2).prox_step(vec({1, 1}), vec({-1, 2})) == vec({0, 3}));

  const auto lb = BregmanGeometry::log_barrier(2);
  const Point l = lb.prox_step(vec({1, 2}), vec({0.5, -1}));
  CHECK(l[0] == doctest::Approx(2.0));
  CHECK(l[1] == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(lb.prox_step(vec({1, 2}), vec({1.0, 0})), StepTooLarge);
  CHECK_THROWS_AS(lb.prox_step(vec({1, 2}), vec({0, 0.6})), StepTooLarge);
}

TEST_CASE("symmetric divergence examples") {
  CHECK(BregmanGeometry::euclidean(2).symmetric_divergence(vec({0, 0}), vec({1, 1})) ==
        doctest::Approx(2.0));
  const Point a = vec({0.5, 0.5});
  const Point b = vec({0.25, 0.75});
  const double expected = kl(a, b) + kl(b, a);
  CHECK(kl(b, a) == doctest::Approx(0.130812).epsilon(1e-6));
  CHECK(expected == doctest::Approx(0.274653).epsilon(1e-6));
  CHECK(BregmanGeometry::entropic(2).symmetric_divergence(a, b) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(BregmanGeometry::entropic(2).symmetric_divergence(a, a) == 0.0);
}

TEST_CASE("entropic product factorizes per block") {
  const auto g = BregmanGeometry::entropic_product(2, 3);
  CHECK(g.blocks() == 2);
  CHECK(g.block_size() == 3);
  const Point x = vec({0.2, 0.3, 0.5, 0.6, 0.3, 0.1});
  const Point y = vec({0.1, 0.1, 0.8, 0.3, 0.3, 0.4});
  CHECK(g.divergence(y, x) == doctest::Approx(kl(y.head(3), x.head(3)) + kl(y.tail(3), x.tail(3))));
  const Point b = g.barycenter();
  CHECK(b.head(3).sum() == doctest::Approx(1.0));
  CHECK(b.tail(3).sum() == doctest::Approx(1.0));
  // Block norm and its dual.
  const Point d = x - y;
  const double n = std::hypot(d.head(3).lpNorm<1>(), d.tail(3).lpNorm<1>());
  CHECK(g.norm(d) == doctest::Approx(n));
  CHECK(g.dual_norm(vec({1, -2, 0, 0, 0, 3})) == doctest::Approx(std::hypot(2.0, 3.0)));
  CHECK_THROWS_AS(g.check_domain(vec({0.2, 0.3, 0.5, 0.6, 0.3, 0.2})), DomainViolation);
  CHECK_THROWS_AS(BregmanGeometry::euclidean(3).barycenter(), DomainViolation);
}

TEST_CASE("property: three-point identity and prox stationarity") {
  for (const auto& g : {BregmanGeometry::euclidean(5), BregmanGeometry::entropic(4),
                        BregmanGeometry::entropic_product(3, 4), BregmanGeometry::log_barrier(5)}) {
    CAPTURE(to_string(g.kind()));
    const GeometryCheck c = check_geometry_identities(g, 2000, 3);
    CHECK(c.samples == 2000);
    CHECK(c.three_point <= 1e-9);
    CHECK(c.prox <= 1e-8);
  }
}

TEST_CASE("property: strong convexity, prox/mirror consistency, nonnegativity") {
  std::mt19937_64 rng(99);
  for (const auto& g : {BregmanGeometry::euclidean(4), BregmanGeometry::entropic(4),
                        BregmanGeometry::entropic_product(2, 3), BregmanGeometry::log_barrier(4)}) {
    CAPTURE(to_string(g.kind()));
    double worst_sc = 0.0;
    double worst_pm = 0.0;
    for (int s = 0; s < 10'000; ++s) {
      const Point x = sample_interior_point(g, rng);
      const Point y = sample_interior_point(g, rng);
      const double d = g.divergence(y, x);
      REQUIRE(d >= -1e-12);
      if (g.kind() != GeometryKind::LogBarrier) {
        const double nrm = g.norm(y - x);
        worst_sc = std::max(worst_sc, 0.5 * g.modulus() * nrm * nrm - d);
      }
      if (d <= 1e-12) REQUIRE((y - x).norm() <= 1e-6);
      const DualVector v = sample_dual_step(g, x, rng);
      const Point p = g.prox_step(x, v);
      const Point m = g.mirror_map(g.h_gradient(x) + v);
      worst_pm = std::max(worst_pm, ((p - m).array().abs() / (1.0 + m.array().abs())).maxCoeff());
    }
    CHECK(worst_sc <= 1e-12);
    CHECK(worst_pm <= 1e-10);
  }
}

TEST_CASE("log-barrier strong convexity on a bounded box") {
  // K = 1/R² on (0, R]^d in the L2 norm.
  const double r = 2.0;
  const auto g = BregmanGeometry::log_barrier(3, 1.0 / (r * r));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1e-3, r);
  for (int s = 0; s < 5000; ++s) {
    const Point x = vec({u(rng), u(rng), u(rng)});
    const Point y = vec({u(rng), u(rng), u(rng)});
    REQUIRE(g.divergence(y, x) >= 0.5 * g.modulus() * (y - x).squaredNorm() - 1e-12);
  }
}

TEST_CASE("entropic prox handles underflow without NaN") {
  const auto g = BregmanGeometry::entropic(3);
  const Point p = g.prox_step(vec({0.4, 0.3, 0.3}), vec({0, -800, -2000}));
  CHECK(p.allFinite());
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(std::isfinite(g.divergence(vec({0.2, 0.3, 0.5}), p)));
}
