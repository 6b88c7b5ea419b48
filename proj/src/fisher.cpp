#include <cmath>
#include <sstream>

#include "adamir/errors.hpp"
#include "adamir/problems.hpp"
#include "adamir/solvers.hpp"

namespace adamir {

namespace {

constexpr double kRowSumTolerance = 1e-9;
constexpr double kRsSlack = 1e-9;
constexpr double kReferenceGapTolerance = 1e-6;

void check_bids(const FisherMarket& mkt, const Point& bids) {
  if (bids.size() != mkt.dimension()) {
    std::ostringstream msg;
    msg << "fisher: expected " << mkt.dimension() << " bids, got " << bids.size();
    throw DomainViolation(msg.str());
  }
  if (!bids.allFinite()) throw DomainViolation("fisher: non-finite bid");
  if (bids.minCoeff() < 0.0) throw DomainViolation("fisher: negative bid");
  for (Eigen::Index i = 0; i < mkt.num_players; ++i) {
    const double budget = bids.segment(i * mkt.num_goods, mkt.num_goods).sum();
    if (std::abs(budget - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "fisher: player " << i << " spends " << budget << " instead of 1";
      throw DomainViolation(msg.str());
    }
  }
}

Eigen::VectorXd positive_prices(const FisherMarket& mkt, const Point& bids) {
  Eigen::VectorXd p = mkt.prices(bids);
  if (p.minCoeff() <= 0.0) throw DomainViolation("fisher: a good has zero price");
  return p;
}

}  // namespace

void FisherMarket::validate() const {
  if (num_players <= 0 || num_goods <= 0) throw ConfigError("fisher: empty market");
  if (utilities.rows() != num_players || utilities.cols() != num_goods)
    throw ConfigError("fisher: utility matrix has the wrong shape");
  if (!utilities.allFinite() || utilities.minCoeff() <= 0.0)
    throw ConfigError("fisher: utilities must be finite and strictly positive");
}

Eigen::VectorXd FisherMarket::prices(const Point& bids) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_goods);
  for (Eigen::Index i = 0; i < num_players; ++i) p += bids.segment(i * num_goods, num_goods);
  return p;
}

FisherMarket make_random_market(Eigen::Index num_players, Eigen::Index num_goods, double lo,
                                double hi, std::uint64_t seed) {
  if (!(lo > 0.0 && lo < hi && std::isfinite(hi)))
    throw ConfigError("fisher: utilities need 0 < lo < hi");
  if (num_players <= 0 || num_goods <= 0) throw ConfigError("fisher: empty market");
  FisherMarket mkt;
  mkt.num_players = num_players;
  mkt.num_goods = num_goods;
  mkt.seed = seed;
  mkt.lo = lo;
  mkt.hi = hi;
  mkt.utilities.resize(num_players, num_goods);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (Eigen::Index i = 0; i < num_players; ++i)
    for (Eigen::Index j = 0; j < num_goods; ++j) mkt.utilities(i, j) = dist(rng);
  return mkt;
}

double fisher_objective(const FisherMarket& mkt, const Point& bids) {
  check_bids(mkt, bids);
  return fisher_potential(mkt, bids);
}

double fisher_potential(const FisherMarket& mkt, const Point& bids) {
  if (bids.size() != mkt.dimension() || !bids.allFinite() || bids.minCoeff() < 0.0)
    throw DomainViolation("fisher: bids must be finite, nonnegative and of size N*M");
  const Eigen::VectorXd p = mkt.prices(bids);
  double phi = 0.0;
  for (Eigen::Index j = 0; j < mkt.num_goods; ++j)
    if (p[j] > 0.0) phi += p[j] * std::log(p[j]);
  for (Eigen::Index i = 0; i < mkt.num_players; ++i)
    for (Eigen::Index j = 0; j < mkt.num_goods; ++j)
      phi -= bids[i * mkt.num_goods + j] * std::log(mkt.utilities(i, j));
  return phi;
}

DualVector fisher_gradient(const FisherMarket& mkt, const Point& bids) {
  return fisher_gradient(mkt, bids, mkt.utilities);
}

DualVector fisher_gradient(const FisherMarket& mkt, const Point& bids,
                           const Eigen::MatrixXd& utilities) {
  check_bids(mkt, bids);
  const Eigen::VectorXd p = positive_prices(mkt, bids);
  DualVector g(mkt.dimension());
  for (Eigen::Index i = 0; i < mkt.num_players; ++i)
    for (Eigen::Index j = 0; j < mkt.num_goods; ++j)
      g[i * mkt.num_goods + j] = 1.0 + std::log(p[j]) - std::log(utilities(i, j));
  return g;
}

double fisher_rs_certificate(const FisherMarket& mkt, double declared, int samples,
                             std::uint64_t seed) {
  mkt.validate();
  const BregmanGeometry geom = BregmanGeometry::entropic_product(mkt.num_players, mkt.num_goods);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_interior_point(geom, rng);
    const Point y = sample_interior_point(geom, rng);
    const double gap = fisher_objective(mkt, x) - fisher_objective(mkt, y) -
                       fisher_gradient(mkt, y).dot(x - y) - declared * geom.divergence(x, y);
    if (gap > kRsSlack) {
      std::ostringstream msg;
      msg << "fisher: relative smoothness with L = " << declared << " fails by " << gap
          << " on sample " << s;
      throw CertificateViolation(msg.str());
    }
  }
  return declared;
}

FisherProblem::FisherProblem(FisherMarket market, std::optional<ReferenceSolveOptions> options)
    : Problem(BregmanGeometry::entropic_product(market.num_players, market.num_goods)),
      market_(std::move(market)) {
  market_.validate();
  set_rs_constant(fisher_rs_certificate(market_));
  if (!options) return;
  Point b = geometry().barycenter();
  for (long it = 0; it < options->max_iterations; ++it) {
    const Point next = pr_step(market_, b);
    const double residual = geometry().symmetric_divergence(b, next);
    b = next;
    reference_iterations_ = it + 1;
    if (residual < options->residual_tolerance) break;
  }
  set_known_optimum({b, 0.0}, kReferenceGapTolerance);
}

}  // namespace adamir
