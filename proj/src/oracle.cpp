#include "adamir/oracle.hpp"

#include <cmath>

#include "adamir/errors.hpp"

namespace adamir {

namespace {

constexpr std::uint32_t kQueryChannel = 1;
constexpr std::uint32_t kCalibrationChannel = 2;
constexpr int kCalibrationProbes = 10'000;

// Unit dual-norm direction, symmetric under U -> -U.
DualVector unit_dual_direction(const BregmanGeometry& geom, std::mt19937_64& rng) {
  const Eigen::Index d = geom.dimension();
  std::normal_distribution<double> normal(0.0, 1.0);
  DualVector u(d);
  if (geom.kind() != GeometryKind::Entropic) {
    do {
      for (Eigen::Index i = 0; i < d; ++i) u[i] = normal(rng);
    } while (!(u.norm() > 0.0));
    return u / u.norm();
  }
  // Dual of the block norm is (Σ_b ‖v_b‖_∞²)^½: spread an ℓ2-unit weight vector over the
  // blocks, and within each block draw uniformly on the ℓ∞ sphere (one face coordinate pinned
  // at ±1, the others uniform in [−1, 1]).
  const Eigen::Index blocks = geom.blocks();
  const Eigen::Index m = geom.block_size();
  Eigen::VectorXd weights(blocks);
  do {
    for (Eigen::Index b = 0; b < blocks; ++b) weights[b] = std::abs(normal(rng));
  } while (!(weights.norm() > 0.0));
  weights /= weights.norm();
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> face(0, m - 1);
  std::bernoulli_distribution sign(0.5);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    auto block = u.segment(b * m, m);
    for (Eigen::Index i = 0; i < m; ++i) block[i] = box(rng);
    block[face(rng)] = sign(rng) ? 1.0 : -1.0;
    block *= weights[b];
  }
  return u;
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None:
      return "none";
    case NoiseKind::SphereUniform:
      return "sphere_uniform";
    case NoiseKind::FisherUtilityResample:
      return "fisher_utility_resample";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "none") return NoiseKind::None;
  if (text == "sphere" || text == "sphere_uniform") return NoiseKind::SphereUniform;
  if (text == "resample" || text == "fisher_utility_resample")
    return NoiseKind::FisherUtilityResample;
  throw ConfigError("unknown noise kind '" + std::string(text) + "'");
}

void OracleConfig::validate() const {
  if (!std::isfinite(sigma) || sigma < 0.0) throw ConfigError("sigma must be finite and >= 0");
  switch (noise_kind) {
    case NoiseKind::None:
      if (sigma != 0.0) throw ConfigError("sigma > 0 requires a noise kind");
      return;
    case NoiseKind::SphereUniform:
      if (!(sigma > 0.0)) throw ConfigError("sphere-uniform noise requires sigma > 0");
      return;
    case NoiseKind::FisherUtilityResample:
      if (!(rel_width > 0.0 && rel_width < 1.0))
        throw ConfigError("utility resampling requires 0 < rel_width < 1");
      return;
  }
}

StochasticOracle::StochasticOracle(const Problem& problem, OracleConfig config)
    : problem_(&problem), config_(config) {
  config_.validate();
  if (config_.noise_kind != NoiseKind::FisherUtilityResample) return;
  fisher_ = dynamic_cast<const FisherProblem*>(&problem);
  if (fisher_ == nullptr) throw ConfigError("utility resampling only applies to Fisher markets");
  const Point center = problem.geometry().barycenter();
  const DualVector exact = problem.gradient(center);
  double sigma = 0.0;
  for (int probe = 0; probe < kCalibrationProbes; ++probe) {
    const DualVector noisy =
        resampled_gradient(center, static_cast<std::uint64_t>(probe), kCalibrationChannel);
    sigma = std::max(sigma, problem.geometry().dual_norm(noisy - exact));
  }
  config_.sigma = sigma;
}

std::mt19937_64 StochasticOracle::stream(std::uint64_t t, std::uint32_t channel) const {
  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                    static_cast<std::uint32_t>(config_.seed >> 32), static_cast<std::uint32_t>(t),
                    static_cast<std::uint32_t>(t >> 32), channel};
  return std::mt19937_64(seq);
}

DualVector StochasticOracle::resampled_gradient(const Point& x, std::uint64_t t,
                                                std::uint32_t channel) const {
  const FisherMarket& mkt = fisher_->market();
  std::mt19937_64 rng = stream(t, channel);
  std::uniform_real_distribution<double> delta(-config_.rel_width, config_.rel_width);
  Eigen::MatrixXd u = mkt.utilities;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) u(i, j) *= 1.0 + delta(rng);
  return fisher_gradient(mkt, x, u);
}

DualVector StochasticOracle::sphere_noise(std::uint64_t t) const {
  const BregmanGeometry& geom = problem_->geometry();
  if (config_.noise_kind != NoiseKind::SphereUniform) return DualVector::Zero(geom.dimension());
  std::mt19937_64 rng = stream(t, kQueryChannel);
  std::uniform_real_distribution<double> radius(0.0, config_.sigma);
  const double r = radius(rng);
  return r * unit_dual_direction(geom, rng);
}

DualVector StochasticOracle::query(const Point& x, std::uint64_t t) const {
  switch (config_.noise_kind) {
    case NoiseKind::None:
      return problem_->gradient(x);
    case NoiseKind::SphereUniform:
      return problem_->gradient(x) + sphere_noise(t);
    case NoiseKind::FisherUtilityResample:
      problem_->geometry().check_domain(x);
      return resampled_gradient(x, t, kQueryChannel);
  }
  return problem_->gradient(x);
}

}  // namespace adamir
