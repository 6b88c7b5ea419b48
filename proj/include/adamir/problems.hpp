#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "adamir/geometry.hpp"

namespace adamir {

struct Optimum {
  Point point;
  double value;
};

/// A convex objective over the domain of a Bregman geometry, with optional certified
/// regularity constants (G for relative continuity, L for relative smoothness) and an
/// optional certified minimizer.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual double value(const Point& x) const = 0;
  /// Subgradient selection ∇f(x).
  virtual DualVector gradient(const Point& x) const = 0;
  /// One-sided directional derivative f'(x; d). Defaults to ⟨∇f(x), d⟩.
  virtual double directional_derivative(const Point& x, const DualVector& d) const;
  /// Nonnegative first-order stationarity measure; zero at minimizers.
  virtual double optimality_gap(const Point& x) const;

  const BregmanGeometry& geometry() const { return geometry_; }
  Eigen::Index dimension() const { return geometry_.dimension(); }
  std::optional<double> rc_constant() const { return rc_constant_; }
  std::optional<double> rs_constant() const { return rs_constant_; }
  const std::optional<Optimum>& known_optimum() const { return known_optimum_; }

 protected:
  explicit Problem(BregmanGeometry geometry) : geometry_(std::move(geometry)) {}

  void set_rc_constant(double g) { rc_constant_ = g; }
  void set_rs_constant(double l) { rs_constant_ = l; }
  /// Stores the optimum after checking first-order optimality within `tolerance`.
  void set_known_optimum(Optimum optimum, double tolerance = 1e-6);

 private:
  BregmanGeometry geometry_;
  std::optional<double> rc_constant_;
  std::optional<double> rs_constant_;
  std::optional<Optimum> known_optimum_;
};

// --------------------------------------------------------------------------------------------
// Sampling utilities shared by the certificate checks.

/// Random point in the prox domain. Entropic points mix flat and skewed Dirichlet draws.
Point sample_interior_point(const BregmanGeometry& geom, std::mt19937_64& rng);

struct SampledBound {
  double max_violation = -std::numeric_limits<double>::infinity();
  int samples = 0;
  bool holds(double tolerance) const { return max_violation <= tolerance; }
};

/// max over pairs of ⟨∇f(x), x − y⟩ − G·√(2·D(y, x)).
SampledBound sample_rc_bound(const Problem& problem, double g, int samples, std::uint64_t seed);
/// max over pairs of f(x) − f(y) − ⟨∇f(y), x − y⟩ − L·D(x, y).
SampledBound sample_rs_bound(const Problem& problem, double l, int samples, std::uint64_t seed);
/// max over pairs of ⟨∇f(x) − ∇f(y), x − y⟩ − L·[D(x, y) + D(y, x)].
SampledBound sample_rs_monotone_bound(const Problem& problem, double l, int samples,
                                      std::uint64_t seed);
/// max over triples of f(λx + (1−λ)y) − λf(x) − (1−λ)f(y).
SampledBound sample_convexity(const Problem& problem, int samples, std::uint64_t seed);

// --------------------------------------------------------------------------------------------
// Fisher market.

/// Linear Fisher market with unit budgets. Bids are stored row-major: b[i*M + j].
struct FisherMarket {
  Eigen::Index num_players = 0;
  Eigen::Index num_goods = 0;
  Eigen::MatrixXd utilities;  ///< N×M, strictly positive
  // Provenance, kept for reproducible manifests.
  std::uint64_t seed = 0;
  double lo = 0.0;
  double hi = 0.0;

  Eigen::Index dimension() const { return num_players * num_goods; }
  void validate() const;
  Eigen::VectorXd prices(const Point& bids) const;
};

/// u_ij ~ Uniform[lo, hi] from a generator seeded with `seed`.
FisherMarket make_random_market(Eigen::Index num_players, Eigen::Index num_goods, double lo,
                                double hi, std::uint64_t seed);

/// Φ(b) = Σ_j p_j log p_j − Σ_ij b_ij log u_ij on feasible bids (every budget spent).
double fisher_objective(const FisherMarket& mkt, const Point& bids);
/// The same expression on the whole nonnegative orthant, for finite differences.
double fisher_potential(const FisherMarket& mkt, const Point& bids);
/// ∂Φ/∂b_ij = 1 + log p_j − log u_ij.
DualVector fisher_gradient(const FisherMarket& mkt, const Point& bids);
/// Same as fisher_gradient with utilities replaced by `utilities`.
DualVector fisher_gradient(const FisherMarket& mkt, const Point& bids,
                           const Eigen::MatrixXd& utilities);

/// Returns the relative-smoothness constant of Φ w.r.t. the per-player entropy (L = 1), after
/// checking Φ(x) ≤ Φ(y) + ⟨∇Φ(y), x − y⟩ + L·D(x, y) + 1e-9 on `samples` random pairs.
/// `declared` lets callers probe other constants; a failing sample raises CertificateViolation.
double fisher_rs_certificate(const FisherMarket& mkt, double declared = 1.0, int samples = 1000,
                             std::uint64_t seed = 0x5eed);

struct ReferenceSolveOptions {
  double residual_tolerance = 1e-12;
  long max_iterations = 1'000'000;
};

class FisherProblem final : public Problem {
 public:
  /// Certifies L = 1 and, when `options` is set, computes the reference optimum by running
  /// proportional response from the barycenter until the symmetric residual drops below the
  /// tolerance.
  explicit FisherProblem(FisherMarket market,
                         std::optional<ReferenceSolveOptions> options = ReferenceSolveOptions{});

  std::string name() const override { return "fisher"; }
  double value(const Point& x) const override { return fisher_objective(market_, x); }
  DualVector gradient(const Point& x) const override { return fisher_gradient(market_, x); }

  const FisherMarket& market() const { return market_; }
  long reference_iterations() const { return reference_iterations_; }

 private:
  FisherMarket market_;
  long reference_iterations_ = 0;
};

// --------------------------------------------------------------------------------------------
// Piecewise-linear problems on the simplex.

/// f(x) = max_k ⟨c_k, x⟩ on the unit simplex with the entropic geometry. It is relatively
/// continuous with G = max_k span(c_k) / (2√K), since ⟨c, x − y⟩ ≤ ½·span(c)·‖x − y‖₁ on the
/// simplex and ‖x − y‖₁ ≤ √(2D(y, x)/K) (Pinsker).
class PiecewiseLinearProblem final : public Problem {
 public:
  PiecewiseLinearProblem(std::string name, std::vector<DualVector> pieces,
                         std::optional<Point> minimizer = std::nullopt);

  std::string name() const override { return name_; }
  double value(const Point& x) const override;
  DualVector gradient(const Point& x) const override;
  double directional_derivative(const Point& x, const DualVector& d) const override;
  double optimality_gap(const Point& x) const override;

  const std::vector<DualVector>& pieces() const { return pieces_; }

 private:
  std::string name_;
  std::vector<DualVector> pieces_;
};

/// f(x) = ⟨c, x⟩ on the simplex. Its minimizer is the vertex of the smallest cost.
std::unique_ptr<PiecewiseLinearProblem> make_linear_simplex_problem(const DualVector& c);

struct KinkParameters {
  double slope_above = 1.0;  ///< slope of f in x₁ for x₁ > kink
  double slope_below = 3.0;  ///< slope magnitude of f in x₁ for x₁ < kink
  double kink = 0.3;         ///< optimal value of the first coordinate
};

/// Relatively continuous test problem on the d-simplex:
///   f(x) = max(a·(x₁ − s), b·(s − x₁)),
/// written as the maximum of two linear forms (x₁ − s = ⟨e₁ − s·𝟙, x⟩ on the simplex).
/// min f = 0 on the face {x₁ = s}; the certified minimizer spreads the remaining mass evenly.
/// The asymmetric kink keeps the Bregman residuals away from zero, so step sizes keep
/// decaying like 1/√t and the problem exercises the relatively continuous regime.
std::unique_ptr<PiecewiseLinearProblem> make_synthetic_rc_problem(Eigen::Index d,
                                                                  KinkParameters params = {});

// --------------------------------------------------------------------------------------------

/// f(x) = ½‖x − center‖² on ℝᵈ with the Euclidean geometry (L = 1, minimizer `center`).
class QuadraticProblem final : public Problem {
 public:
  explicit QuadraticProblem(Point center);

  std::string name() const override { return "quadratic"; }
  double value(const Point& x) const override { return 0.5 * (x - center_).squaredNorm(); }
  DualVector gradient(const Point& x) const override { return x - center_; }

 private:
  Point center_;
};

}  // namespace adamir
