#include "adamir/problems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adamir/errors.hpp"

namespace adamir {

double Problem::directional_derivative(const Point& x, const DualVector& d) const {
  return gradient(x).dot(d);
}

double Problem::optimality_gap(const Point& x) const {
  const DualVector g = gradient(x);
  const BregmanGeometry& geom = geometry();
  if (geom.kind() != GeometryKind::Entropic) return g.norm();
  // Frank-Wolfe gap over the product of simplices.
  const Eigen::Index m = geom.block_size();
  double gap = 0.0;
  for (Eigen::Index b = 0; b < geom.blocks(); ++b) {
    const auto gb = g.segment(b * m, m);
    gap += gb.dot(x.segment(b * m, m)) - gb.minCoeff();
  }
  return std::max(gap, 0.0);
}

void Problem::set_known_optimum(Optimum optimum, double tolerance) {
  geometry_.check_domain(optimum.point);
  const double gap = optimality_gap(optimum.point);
  if (!(gap <= tolerance)) {
    std::ostringstream msg;
    msg << name() << ": declared optimum has first-order gap " << gap << " > " << tolerance;
    throw CertificateViolation(msg.str());
  }
  optimum.value = value(optimum.point);
  known_optimum_ = std::move(optimum);
}

Point sample_interior_point(const BregmanGeometry& geom, std::mt19937_64& rng) {
  const Eigen::Index d = geom.dimension();
  Point x(d);
  switch (geom.kind()) {
    case GeometryKind::Euclidean: {
      std::normal_distribution<double> normal(0.0, 2.0);
      for (Eigen::Index i = 0; i < d; ++i) x[i] = normal(rng);
      return x;
    }
    case GeometryKind::LogBarrier: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index i = 0; i < d; ++i) x[i] = std::exp(normal(rng));
      return x;
    }
    case GeometryKind::Entropic: {
      const Eigen::Index m = geom.block_size();
      std::bernoulli_distribution skewed(0.5);
      for (Eigen::Index b = 0; b < geom.blocks(); ++b) {
        std::gamma_distribution<double> gamma(skewed(rng) ? 0.3 : 1.0, 1.0);
        auto block = x.segment(b * m, m);
        do {
          for (Eigen::Index i = 0; i < m; ++i) block[i] = std::max(gamma(rng), 1e-200);
        } while (!(block.sum() > 0.0));
        block /= block.sum();
      }
      return x;
    }
  }
  return x;
}

namespace {

template <typename Fn>
SampledBound sample_pairs(const Problem& problem, int samples, std::uint64_t seed, Fn&& fn) {
  std::mt19937_64 rng(seed);
  SampledBound out;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_interior_point(problem.geometry(), rng);
    const Point y = sample_interior_point(problem.geometry(), rng);
    out.max_violation = std::max(out.max_violation, fn(x, y));
    ++out.samples;
  }
  return out;
}

}  // namespace

SampledBound sample_rc_bound(const Problem& problem, double g, int samples, std::uint64_t seed) {
  const BregmanGeometry& geom = problem.geometry();
  return sample_pairs(problem, samples, seed, [&](const Point& x, const Point& y) {
    return problem.gradient(x).dot(x - y) - g * std::sqrt(2.0 * geom.divergence(y, x));
  });
}

SampledBound sample_rs_bound(const Problem& problem, double l, int samples, std::uint64_t seed) {
  const BregmanGeometry& geom = problem.geometry();
  return sample_pairs(problem, samples, seed, [&](const Point& x, const Point& y) {
    return problem.value(x) - problem.value(y) - problem.gradient(y).dot(x - y) -
           l * geom.divergence(x, y);
  });
}

SampledBound sample_rs_monotone_bound(const Problem& problem, double l, int samples,
                                      std::uint64_t seed) {
  const BregmanGeometry& geom = problem.geometry();
  return sample_pairs(problem, samples, seed, [&](const Point& x, const Point& y) {
    return (problem.gradient(x) - problem.gradient(y)).dot(x - y) -
           l * geom.symmetric_divergence(x, y);
  });
}

SampledBound sample_convexity(const Problem& problem, int samples, std::uint64_t seed) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::mt19937_64 lambda_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return sample_pairs(problem, samples, seed, [&](const Point& x, const Point& y) {
    const double lambda = unit(lambda_rng);
    const Point mid = lambda * x + (1.0 - lambda) * y;
    return problem.value(mid) - lambda * problem.value(x) - (1.0 - lambda) * problem.value(y);
  });
}

// --------------------------------------------------------------------------------------------

PiecewiseLinearProblem::PiecewiseLinearProblem(std::string name, std::vector<DualVector> pieces,
                                               std::optional<Point> minimizer)
    : Problem(BregmanGeometry::entropic(pieces.empty() ? 1 : pieces.front().size())),
      name_(std::move(name)),
      pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ConfigError("piecewise-linear problem needs at least one piece");
  double g = 0.0;
  for (const DualVector& c : pieces_) {
    if (c.size() != dimension()) throw ConfigError("piece dimensions disagree");
    if (!c.allFinite()) throw ConfigError("piece has non-finite coefficients");
    g = std::max(g, 0.5 * (c.maxCoeff() - c.minCoeff()));
  }
  g /= std::sqrt(geometry().modulus());
  const SampledBound rc = sample_rc_bound(*this, g, 1000, 0xc0ffee);
  if (!rc.holds(1e-9)) {
    std::ostringstream msg;
    msg << name_ << ": relative-continuity certificate failed, violation " << rc.max_violation;
    throw CertificateViolation(msg.str());
  }
  set_rc_constant(g);
  if (minimizer) set_known_optimum({std::move(*minimizer), 0.0});
}

double PiecewiseLinearProblem::value(const Point& x) const {
  geometry().check_domain(x);
  double best = -std::numeric_limits<double>::infinity();
  for (const DualVector& c : pieces_) best = std::max(best, c.dot(x));
  return best;
}

DualVector PiecewiseLinearProblem::gradient(const Point& x) const {
  geometry().check_domain(x);
  std::size_t arg = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double v = pieces_[k].dot(x);
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  return pieces_[arg];
}

double PiecewiseLinearProblem::directional_derivative(const Point& x, const DualVector& d) const {
  const double top = value(x);
  const double tol = 1e-12 * (1.0 + std::abs(top));
  double out = -std::numeric_limits<double>::infinity();
  for (const DualVector& c : pieces_)
    if (c.dot(x) >= top - tol) out = std::max(out, c.dot(d));
  return out;
}

// Necessary condition only: f'(x; e_j − x) ≥ 0 along every vertex direction.
double PiecewiseLinearProblem::optimality_gap(const Point& x) const {
  double gap = 0.0;
  for (Eigen::Index j = 0; j < dimension(); ++j) {
    DualVector dir = -x;
    dir[j] += 1.0;
    gap = std::max(gap, -directional_derivative(x, dir));
  }
  return gap;
}

std::unique_ptr<PiecewiseLinearProblem> make_linear_simplex_problem(const DualVector& c) {
  Eigen::Index best = 0;
  c.minCoeff(&best);
  Point vertex = Point::Zero(c.size());
  vertex[best] = 1.0;
  return std::make_unique<PiecewiseLinearProblem>("linear", std::vector<DualVector>{c},
                                                  std::move(vertex));
}

std::unique_ptr<PiecewiseLinearProblem> make_synthetic_rc_problem(Eigen::Index d,
                                                                  KinkParameters params) {
  if (d < 2) throw ConfigError("synthetic RC problem needs d >= 2");
  if (!(params.kink > 0.0 && params.kink < 1.0))
    throw ConfigError("kink location must lie in (0, 1)");
  if (!(params.slope_above > 0.0 && params.slope_below > 0.0))
    throw ConfigError("kink slopes must be positive");
  DualVector offset = DualVector::Constant(d, -params.kink);
  offset[0] += 1.0;  // e₁ − s·𝟙
  Point minimizer = Point::Constant(d, (1.0 - params.kink) / static_cast<double>(d - 1));
  minimizer[0] = params.kink;
  return std::make_unique<PiecewiseLinearProblem>(
      "synthetic_rc",
      std::vector<DualVector>{params.slope_above * offset, -params.slope_below * offset},
      std::move(minimizer));
}

QuadraticProblem::QuadraticProblem(Point center)
    : Problem(BregmanGeometry::euclidean(center.size())), center_(std::move(center)) {
  set_rs_constant(1.0);
  set_known_optimum({center_, 0.0});
}

}  // namespace adamir
