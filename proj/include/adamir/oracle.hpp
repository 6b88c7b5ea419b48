#pragma once

#include <cstdint>
#include <string_view>

#include "adamir/geometry.hpp"
#include "adamir/problems.hpp"

namespace adamir {

enum class NoiseKind { None, SphereUniform, FisherUtilityResample };

std::string_view to_string(NoiseKind kind);
/// Accepts "none", "sphere" / "sphere_uniform", "resample" / "fisher_utility_resample".
NoiseKind parse_noise_kind(std::string_view text);

struct OracleConfig {
  double sigma = 0.0;  ///< dual-norm noise bound; estimated by the oracle for FisherUtilityResample
  NoiseKind noise_kind = NoiseKind::None;
  double rel_width = 0.0;  ///< multiplicative utility perturbation width, FisherUtilityResample only
  std::uint64_t seed = 0;

  /// Throws ConfigError unless: None ⇔ σ = 0, SphereUniform ⇒ σ > 0,
  /// FisherUtilityResample ⇒ 0 < rel_width < 1.
  void validate() const;
};

/// Stochastic first-order oracle g(x; ω_t) = ∇f(x) + U_t.
///
/// The noise at iteration t is a pure function of (seed, t): every query builds its own
/// generator from a seed sequence over both, so replays and parallel sweeps are bit-identical.
///   - SphereUniform: U_t has dual norm r ~ Uniform[0, σ] and a sign-symmetric direction on the
///     unit dual sphere, hence E[U_t] = 0 and ‖U_t‖_* ≤ σ.
///   - FisherUtilityResample: the Fisher gradient evaluated at utilities u_ij·(1 + δ_ij) with
///     δ_ij ~ Uniform[−w, w]. σ is estimated at construction as the largest deviation seen over
///     10⁴ probes at the barycenter. This channel is only approximately zero-mean.
class StochasticOracle {
 public:
  StochasticOracle(const Problem& problem, OracleConfig config);

  DualVector query(const Point& x, std::uint64_t t) const;
  /// The additive noise U_t of the SphereUniform channel (zero for None).
  DualVector sphere_noise(std::uint64_t t) const;

  const Problem& problem() const { return *problem_; }
  /// Effective configuration; for FisherUtilityResample, `sigma` holds the estimate.
  const OracleConfig& config() const { return config_; }
  bool deterministic() const { return config_.noise_kind == NoiseKind::None; }

 private:
  std::mt19937_64 stream(std::uint64_t t, std::uint32_t channel) const;
  DualVector resampled_gradient(const Point& x, std::uint64_t t, std::uint32_t channel) const;

  const Problem* problem_;
  const FisherProblem* fisher_ = nullptr;
  OracleConfig config_;
};

}  // namespace adamir
