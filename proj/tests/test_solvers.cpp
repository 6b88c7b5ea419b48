#include <cmath>
#include <random>

#include "adamir/errors.hpp"
#include "adamir/solvers.hpp"
#include "doctest.h"

using namespace adamir;

namespace {

Point vec(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

// f(x) = ⟨c, x⟩ on the positive orthant with the log-barrier kernel. Pushing along c < 0 makes
// the prox leave the domain once γ|c|x ≥ 1.
class BarrierLinear final : public Problem {
 public:
  explicit BarrierLinear(DualVector c) : Problem(BregmanGeometry::log_barrier(c.size())), c_(c) {}
  std::string name() const override { return "barrier_linear"; }
  double value(const Point& x) const override {
    geometry().check_prox_domain(x);
    return c_.dot(x);
  }
  DualVector gradient(const Point& x) const override {
    geometry().check_prox_domain(x);
    return c_;
  }

 private:
  DualVector c_;
};

}  // namespace

TEST_CASE("adamir_init examples") {
  const auto eu = BregmanGeometry::euclidean(2);
  const AdaMirState s = adamir_init(eu, vec({0, 0}), vec({1, 1}));
  CHECK(s.rho0_sq == doctest::Approx(2.0));
  CHECK(s.residual_sq_sum == s.rho0_sq);
  CHECK(s.step() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.t == 1);
  CHECK(s.x_prev == vec({0, 0}));
  CHECK(s.x_curr == vec({1, 1}));
  CHECK_THROWS_AS(adamir_init(eu, vec({1, 1}), vec({1, 1})), DegenerateInit);
  CHECK_THROWS_AS(adamir_init(eu, vec({1, 1}), vec({1, 1 + 1e-8})), DegenerateInit);
  const AdaMirState e = adamir_init(BregmanGeometry::entropic(2), vec({0.5, 0.5}), vec({0.25, 0.75}));
  CHECK(e.rho0_sq == doctest::Approx(0.274653).epsilon(1e-6));
}

TEST_CASE("adamir_step on the Euclidean quadratic") {
  // f = ½‖x‖², x0 = (2,0), x1 = (1,0). With D = ½‖·‖², ρ₀² = ‖x0 − x1‖² = 1 so γ₁ = 1,
  // x2 = x1 − γ₁x1 = 0 and ρ₁² = ‖x2 − x1‖²/γ₁² = 1.
  const QuadraticProblem quad(Point::Zero(2));
  const StochasticOracle o(quad, {});
  AdaMirState s = adamir_init(quad.geometry(), vec({2, 0}), vec({1, 0}));
  const StepInfo a = adamir_step(s, quad.geometry(), o);
  CHECK(a.gamma == doctest::Approx(1.0));
  CHECK(a.rho_sq == doctest::Approx(1.0));
  CHECK(s.x_curr.norm() <= 1e-15);
  CHECK(s.x_prev == vec({1, 0}));
  CHECK(s.t == 2);
  CHECK(s.step() == doctest::Approx(1.0 / std::sqrt(2.0)));
  // At the minimizer the signal vanishes: no move, ρ = 0, γ frozen.
  const StepInfo b = adamir_step(s, quad.geometry(), o);
  CHECK(b.rho_sq == 0.0);
  CHECK(s.x_curr.norm() <= 1e-15);
  const StepInfo c = adamir_step(s, quad.geometry(), o);
  CHECK(c.gamma == b.gamma);
  CHECK(s.average()[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("zero gradient keeps the iterate and the step") {
  const Point x1 = vec({0.3, -0.2, 1.0});
  const QuadraticProblem quad(x1);
  const StochasticOracle o(quad, {});
  AdaMirState s = adamir_init(quad.geometry(), vec({0, 0, 0}), x1);
  const double g0 = s.step();
  for (int k = 0; k < 5; ++k) {
    const StepInfo info = adamir_step(s, quad.geometry(), o);
    CHECK(info.rho_sq == 0.0);
    CHECK(info.gamma == g0);
    CHECK(s.x_curr == x1);
  }
}

TEST_CASE("AdaMir on a Fisher market follows EGD with the adaptive step") {
  const FisherProblem p(make_random_market(6, 4, 2, 8, 11), std::nullopt);
  const StochasticOracle o(p, {});
  const Point b0 = p.geometry().barycenter();
  const Point b1 = egd_step(p.market(), b0, 1e-2);
  AdaMirState s = adamir_init(p.geometry(), b0, b1);
  Point shadow = b1;
  for (int k = 0; k < 50; ++k) {
    const double gamma = s.step();
    const StepInfo info = adamir_step(s, p.geometry(), o);
    CHECK(info.gamma == gamma);
    shadow = egd_step(p.market(), shadow, gamma);
    REQUIRE((s.x_curr - shadow).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  // The first step from uniform bids.
  AdaMirState u = adamir_init(p.geometry(), b1, b0);
  const double g1 = u.step();
  adamir_step(u, p.geometry(), o);
  CHECK((u.x_curr - egd_step(p.market(), b0, g1)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("egd and proportional response") {
  const FisherMarket m = make_random_market(4, 3, 2, 8, 1);
  const auto geom = BregmanGeometry::entropic_product(4, 3);
  std::mt19937_64 rng(8);
  const Point b = sample_interior_point(geom, rng);
  CHECK((egd_step(m, b, 1e-12) - b).lpNorm<Eigen::Infinity>() <= 1e-11);
  CHECK((egd_step(m, b, 1.0) - pr_step(m, b)).lpNorm<Eigen::Infinity>() <= 1e-12);

  // egd_step written out: b' ∝ b·(u/p)^γ per row.
  const Eigen::VectorXd p = m.prices(b);
  const Point e = egd_step(m, b, 0.3);
  for (Eigen::Index i = 0; i < 4; ++i) {
    Eigen::VectorXd w(3);
    for (Eigen::Index j = 0; j < 3; ++j) w[j] = b[i * 3 + j] * std::pow(m.utilities(i, j) / p[j], 0.3);
    w /= w.sum();
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(e[i * 3 + j] == doctest::Approx(w[j]).epsilon(1e-12));
  }

  FisherMarket single = make_random_market(1, 1, 2, 8, 2);
  CHECK(egd_step(single, Point::Ones(1), 0.7)[0] == 1.0);
  CHECK(pr_step(single, Point::Ones(1))[0] == 1.0);

  FisherMarket flat = make_random_market(3, 2, 2, 8, 0);
  flat.utilities.setConstant(4.0);
  const Point uni = Point::Constant(6, 0.5);
  CHECK((pr_step(flat, uni) - uni).norm() <= 1e-15);

  // N = 1: one PR step allocates in proportion to utilities from any interior point.
  const FisherMarket buyer = make_random_market(1, 4, 2, 8, 3);
  const Point any = vec({0.1, 0.2, 0.3, 0.4});
  const Point expected = buyer.utilities.row(0).transpose() / buyer.utilities.sum();
  CHECK((pr_step(buyer, any) - expected).norm() <= 1e-15);

  Point corner(6);
  corner << 1, 0, 1, 0, 1, 0;
  CHECK_THROWS_AS(pr_step(flat, corner), DomainViolation);
}

TEST_CASE("solver shorthand grammar") {
  CHECK(SolverSpec::parse("adamir", 10).kind == SolverKind::AdaMir);
  CHECK(SolverSpec::parse("pr", 10).kind == SolverKind::ProportionalResponse);
  const SolverSpec e = SolverSpec::parse("egd:0.1", 10);
  CHECK(e.kind == SolverKind::FixedMD);
  CHECK(e.gamma == 0.1);
  CHECK(e.label() == "egd:0.1");
  const SolverSpec d = SolverSpec::parse("md-decay:2.5", 7);
  CHECK(d.kind == SolverKind::DecayedMD);
  CHECK(d.horizon == 7);
  CHECK(d.label() == "md-decay:2.5");
  for (const char* bad : {"", "sgd", "egd", "egd:", "egd:-1", "egd:0", "egd:abc", "md-decay:nan",
                          "adamir:1", "pr:1", "egd:0.1x"})
    CHECK_THROWS_AS(SolverSpec::parse(bad, 10), ConfigError);
  CHECK_THROWS_AS(SolverSpec::parse("adamir", 0), ConfigError);
}

TEST_CASE("run basics") {
  const FisherProblem p(make_random_market(5, 3, 2, 8, 0));
  const StochasticOracle o(p, {});
  for (const char* s : {"adamir", "pr", "egd:0.1", "md-decay:0.5"}) {
    CAPTURE(s);
    const Trace tr = run(SolverSpec::parse(s, 1), p, o);
    REQUIRE(tr.complete());
    REQUIRE(tr.records.size() == 1);
    CHECK(tr.records[0].t == 1);
    CHECK(tr.records[0].f_avg == tr.records[0].f_last);
    CHECK(tr.solver == s);
    CHECK(tr.problem == "fisher");
    REQUIRE(tr.f_star);
    CHECK(tr.records[0].div_to_opt);
  }
  const Trace tr = run(SolverSpec::parse("md-decay:0.5", 9), p, o);
  for (const TraceRecord& r : tr.records) CHECK(r.gamma == doctest::Approx(0.5 / std::sqrt(double(r.t))));
  const Trace fixed = run(SolverSpec::parse("egd:0.1", 9), p, o);
  for (const TraceRecord& r : fixed.records) CHECK(r.gamma == 0.1);
}

TEST_CASE("run is deterministic") {
  const auto rc = make_synthetic_rc_problem(3);
  const StochasticOracle o(*rc, {1.0, NoiseKind::SphereUniform, 0, 77});
  const Trace a = run(SolverSpec::parse("adamir", 300), *rc, o);
  const Trace b = run(SolverSpec::parse("adamir", 300), *rc, o);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    REQUIRE(a.records[k].f_last == b.records[k].f_last);
    REQUIRE(a.records[k].rho_sq == b.records[k].rho_sq);
    REQUIRE(a.records[k].gamma == b.records[k].gamma);
  }
}

TEST_CASE("proportional response decreases the potential on the large market") {
  const FisherProblem p(make_random_market(50, 5, 2, 8, 0), std::nullopt);
  const StochasticOracle o(p, {});
  const Trace tr = run(SolverSpec::parse("pr", 1000), p, o);
  REQUIRE(tr.complete());
  for (std::size_t k = 1; k < tr.records.size(); ++k)
    REQUIRE(tr.records[k].f_last <= tr.records[k - 1].f_last + 1e-12);
}

TEST_CASE("explicit initialization") {
  const QuadraticProblem quad(vec({1, 1}));
  const StochasticOracle o(quad, {});
  InitPolicy init;
  init.x0 = vec({2, 0});
  init.x1 = vec({1, 0});
  const Trace tr = run(SolverSpec::parse("adamir", 3), quad, o, init);
  REQUIRE(tr.rho0_sq);
  CHECK(*tr.rho0_sq == doctest::Approx(1.0));
  CHECK(tr.records[0].gamma == doctest::Approx(1.0));
  CHECK(tr.records[0].f_last == doctest::Approx(0.5));
  // Euclidean runs have no barycenter.
  CHECK_THROWS(run(SolverSpec::parse("adamir", 3), quad, o));
  init.x1 = init.x0;
  const Trace degenerate = run(SolverSpec::parse("adamir", 3), quad, o, init);
  CHECK(degenerate.failure);
}

TEST_CASE("solver errors leave a partial trace") {
  const BarrierLinear p(vec({-1.0, -0.5}));
  const StochasticOracle o(p, {});
  InitPolicy init;
  init.x0 = vec({1, 1});
  init.x1 = vec({1.001, 1.0005});
  const Trace tr = run(SolverSpec::parse("adamir", 1000), p, o, init);
  REQUIRE(tr.failure);
  CHECK(tr.failure->find("aborted after") == 0);
  CHECK(tr.records.size() < 1000);
  CHECK_FALSE(tr.complete());
}

TEST_CASE("run rejects mismatched inputs") {
  const auto rc = make_synthetic_rc_problem(3);
  const auto other = make_synthetic_rc_problem(3);
  const StochasticOracle o(*other, {});
  CHECK_THROWS_AS(run(SolverSpec::parse("adamir", 5), *rc, o), ConfigError);
  const StochasticOracle own(*rc, {});
  CHECK_THROWS_AS(run(SolverSpec::parse("pr", 5), *rc, own), ConfigError);
}

TEST_CASE("property: step monotonicity and the step identity on every run") {
  const FisherProblem fisher(make_random_market(8, 3, 2, 8, 4));
  const auto rc = make_synthetic_rc_problem(3);
  for (const Problem* p : std::initializer_list<const Problem*>{&fisher, rc.get()})
    for (double sigma : {0.0, 0.5}) {
      const StochasticOracle o(*p, {sigma, sigma > 0 ? NoiseKind::SphereUniform : NoiseKind::None, 0, 3});
      const Trace tr = run(SolverSpec::parse("adamir", 2000), *p, o);
      REQUIRE(tr.complete());
      CHECK(check_step_monotone(tr).passed);
      CHECK(check_step_identity(tr).passed);
      CHECK(check_divergence_bound(tr).passed);
    }
}

TEST_CASE("property: residual bounds on the RC problem") {
  const auto rc = make_synthetic_rc_problem(3);
  const double g = *rc->rc_constant();
  const StochasticOracle det(*rc, {});
  CHECK(check_residual_bound(run(SolverSpec::parse("adamir", 5000), *rc, det), rc_residual_bound(g)).passed);
  for (double sigma : {0.1, 1.0})
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const StochasticOracle o(*rc, {sigma, NoiseKind::SphereUniform, 0, seed});
      const Trace tr = run(SolverSpec::parse("adamir", 3000), *rc, o);
      CHECK(check_residual_bound(tr, stochastic_residual_bound(g, 1.0, sigma)).passed);
    }
}

TEST_CASE("property: step stabilization on a Fisher market") {
  const FisherProblem p(make_random_market(10, 3, 2, 8, 0));
  const StochasticOracle o(p, {});
  const Trace tr = run(SolverSpec::parse("adamir", 4000), p, o);
  REQUIRE(tr.complete());
  const double g1000 = tr.records[999].gamma;
  const double g2000 = tr.records[1999].gamma;
  CHECK(g2000 > 0);
  CHECK(g1000 - g2000 <= 1e-4);
  CHECK(tr.records[1999].gamma - tr.records[3999].gamma <= 1e-4);
}
