#include "adamir/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adamir/errors.hpp"

namespace adamir {

namespace {

constexpr double kSimplexSumTolerance = 1e-9;

double safe_log(double v) { return std::log(v > kLogFloor ? v : kLogFloor); }

}  // namespace

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Euclidean:
      return "euclidean";
    case GeometryKind::Entropic:
      return "entropic";
    case GeometryKind::LogBarrier:
      return "log_barrier";
  }
  return "unknown";
}

BregmanGeometry::BregmanGeometry(GeometryKind kind, Eigen::Index dimension, Eigen::Index blocks,
                                 double modulus)
    : kind_(kind), dimension_(dimension), blocks_(blocks), modulus_(modulus) {
  if (dimension <= 0) throw ConfigError("geometry dimension must be positive");
  if (blocks <= 0 || dimension % blocks != 0)
    throw ConfigError("geometry blocks must evenly divide the dimension");
  if (!(modulus > 0.0) || !std::isfinite(modulus))
    throw ConfigError("strong-convexity modulus must be positive");
}

BregmanGeometry BregmanGeometry::euclidean(Eigen::Index dimension) {
  return {GeometryKind::Euclidean, dimension, 1, 1.0};
}

BregmanGeometry BregmanGeometry::entropic(Eigen::Index dimension) {
  return {GeometryKind::Entropic, dimension, 1, 1.0};
}

BregmanGeometry BregmanGeometry::entropic_product(Eigen::Index blocks, Eigen::Index block_size) {
  if (block_size <= 0) throw ConfigError("simplex block size must be positive");
  return {GeometryKind::Entropic, blocks * block_size, blocks, 1.0};
}

BregmanGeometry BregmanGeometry::log_barrier(Eigen::Index dimension, double modulus) {
  return {GeometryKind::LogBarrier, dimension, 1, modulus};
}

AmbientNorm BregmanGeometry::ambient_norm() const {
  return kind_ == GeometryKind::Entropic ? AmbientNorm::L1 : AmbientNorm::L2;
}

void BregmanGeometry::check_dimension(const Eigen::VectorXd& v) const {
  if (v.size() != dimension_) {
    std::ostringstream msg;
    msg << "expected a vector of dimension " << dimension_ << ", got " << v.size();
    throw DomainViolation(msg.str());
  }
  if (!v.allFinite()) throw DomainViolation("vector has non-finite entries");
}

void BregmanGeometry::check_domain(const Point& x) const {
  check_dimension(x);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return;
    case GeometryKind::Entropic: {
      const Eigen::Index m = block_size();
      for (Eigen::Index b = 0; b < blocks_; ++b) {
        const auto block = x.segment(b * m, m);
        if (block.minCoeff() < 0.0)
          throw DomainViolation("entropic geometry: negative coordinate");
        if (std::abs(block.sum() - 1.0) > kSimplexSumTolerance) {
          std::ostringstream msg;
          msg << "entropic geometry: block " << b << " sums to " << block.sum();
          throw DomainViolation(msg.str());
        }
      }
      return;
    }
    case GeometryKind::LogBarrier:
      if (x.minCoeff() <= 0.0) throw DomainViolation("log-barrier geometry: nonpositive coordinate");
      return;
  }
}

// Entropic points with coordinates that underflowed to zero are accepted: logs are taken on
// max(x, kLogFloor), which is how the prox keeps working on IEEE-underflowed iterates.
void BregmanGeometry::check_prox_domain(const Point& x) const { check_domain(x); }

bool BregmanGeometry::in_prox_domain(const Point& x) const {
  try {
    check_prox_domain(x);
    return true;
  } catch (const DomainViolation&) {
    return false;
  }
}

double BregmanGeometry::h_value(const Point& x) const {
  check_domain(x);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return 0.5 * x.squaredNorm();
    case GeometryKind::Entropic: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] > 0.0) sum += x[i] * std::log(x[i]);
      return sum;
    }
    case GeometryKind::LogBarrier:
      return -x.array().log().sum();
  }
  return 0.0;
}

DualVector BregmanGeometry::h_gradient(const Point& x) const {
  check_prox_domain(x);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return x;
    case GeometryKind::Entropic:
      return x.unaryExpr([](double v) { return 1.0 + safe_log(v); });
    case GeometryKind::LogBarrier:
      return -x.cwiseInverse();
  }
  return x;
}

double BregmanGeometry::divergence(const Point& y, const Point& x) const {
  check_domain(y);
  check_prox_domain(x);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return 0.5 * (y - x).squaredNorm();
    case GeometryKind::Entropic: {
      // Relative entropy plus the Σ(x − y) term that the h-based definition carries.
      double sum = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0) sum += y[i] * (std::log(y[i]) - safe_log(x[i]));
        sum += x[i] - y[i];
      }
      return std::max(sum, 0.0);
    }
    case GeometryKind::LogBarrier: {
      const Eigen::ArrayXd ratio = y.array() / x.array();
      return (ratio - ratio.log() - 1.0).sum();
    }
  }
  return 0.0;
}

double BregmanGeometry::symmetric_divergence(const Point& x, const Point& y) const {
  check_prox_domain(x);
  check_prox_domain(y);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return (x - y).squaredNorm();
    case GeometryKind::Entropic: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        sum += (safe_log(x[i]) - safe_log(y[i])) * (x[i] - y[i]);
      return sum;
    }
    case GeometryKind::LogBarrier:
      return ((x - y).array().square() / (x.array() * y.array())).sum();
  }
  return 0.0;
}

Point BregmanGeometry::mirror_map(const DualVector& y) const {
  check_dimension(y);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return y;
    case GeometryKind::Entropic: {
      Point x(dimension_);
      const Eigen::Index m = block_size();
      for (Eigen::Index b = 0; b < blocks_; ++b) {
        const auto yb = y.segment(b * m, m);
        auto xb = x.segment(b * m, m);
        xb = (yb.array() - yb.maxCoeff()).exp().matrix();
        xb /= xb.sum();
      }
      return x;
    }
    case GeometryKind::LogBarrier:
      if (y.maxCoeff() >= 0.0)
        throw NoMaximizer("log-barrier mirror map requires strictly negative dual coordinates");
      return -y.cwiseInverse();
  }
  return y;
}

Point BregmanGeometry::prox_step(const Point& x, const DualVector& v) const {
  check_prox_domain(x);
  check_dimension(v);
  switch (kind_) {
    case GeometryKind::Euclidean:
      return x + v;
    case GeometryKind::Entropic: {
      // Log-domain exponential weights, stabilized per block by the largest exponent.
      Point out(dimension_);
      const Eigen::Index m = block_size();
      for (Eigen::Index b = 0; b < blocks_; ++b) {
        const Eigen::Index off = b * m;
        double z_max = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = off; i < off + m; ++i)
          if (x[i] > 0.0) z_max = std::max(z_max, std::log(x[i]) + v[i]);
        double total = 0.0;
        for (Eigen::Index i = off; i < off + m; ++i) {
          out[i] = x[i] > 0.0 ? std::exp(std::log(x[i]) + v[i] - z_max) : 0.0;
          total += out[i];
        }
        out.segment(off, m) /= total;
      }
      return out;
    }
    case GeometryKind::LogBarrier: {
      const Eigen::ArrayXd denom = 1.0 - x.array() * v.array();
      if (denom.minCoeff() <= 0.0)
        throw StepTooLarge("log-barrier prox leaves the positive orthant (1 - x*v <= 0)");
      return (x.array() / denom).matrix();
    }
  }
  return x;
}

double BregmanGeometry::norm(const Point& x) const {
  if (kind_ != GeometryKind::Entropic) return x.norm();
  const Eigen::Index m = block_size();
  double sum = 0.0;
  for (Eigen::Index b = 0; b < blocks_; ++b) sum += std::pow(x.segment(b * m, m).lpNorm<1>(), 2);
  return std::sqrt(sum);
}

double BregmanGeometry::dual_norm(const DualVector& v) const {
  if (kind_ != GeometryKind::Entropic) return v.norm();
  const Eigen::Index m = block_size();
  double sum = 0.0;
  for (Eigen::Index b = 0; b < blocks_; ++b)
    sum += std::pow(v.segment(b * m, m).lpNorm<Eigen::Infinity>(), 2);
  return std::sqrt(sum);
}

Point BregmanGeometry::barycenter() const {
  if (kind_ != GeometryKind::Entropic)
    throw DomainViolation("barycenter is only defined for the entropic (simplex) geometry");
  return Point::Constant(dimension_, 1.0 / static_cast<double>(block_size()));
}

}  // namespace adamir
