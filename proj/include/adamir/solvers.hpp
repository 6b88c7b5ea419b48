#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "adamir/analysis.hpp"
#include "adamir/geometry.hpp"
#include "adamir/oracle.hpp"
#include "adamir/problems.hpp"

namespace adamir {

struct AdaMirState {
  Point x_prev;
  Point x_curr;
  double residual_sq_sum = 0.0;  ///< Σ_{s<t} ρ_s², including ρ₀²
  double rho0_sq = 0.0;
  long t = 1;
  Eigen::VectorXd avg_accumulator;
  long avg_count = 0;

  double step() const;
  Point average() const;
};

inline constexpr double kDegenerateInit = 1e-14;

/// Throws DegenerateInit when D(x0, x1) + D(x1, x0) ≤ 1e-14.
AdaMirState adamir_init(const BregmanGeometry& geom, const Point& x0, const Point& x1);

struct StepInfo {
  double gamma = 0.0;
  double rho_sq = 0.0;
};

/// One AdaMir iteration: X_t joins the ergodic average, X_{t+1} = prox(X_t, −γ_t g_t).
StepInfo adamir_step(AdaMirState& state, const BregmanGeometry& geom,
                     const StochasticOracle& oracle);

Point egd_step(const FisherMarket& mkt, const Point& bids, double gamma);
Point pr_step(const FisherMarket& mkt, const Point& bids);

enum class SolverKind { AdaMir, FixedMD, ProportionalResponse, DecayedMD };

struct SolverSpec {
  SolverKind kind = SolverKind::AdaMir;
  double gamma = 0.0;  ///< FixedMD step, or γ₀ for DecayedMD
  long horizon = 1;

  void validate() const;
  std::string label() const;
  /// `adamir | pr | egd:<gamma> | md-decay:<gamma0>`.
  static SolverSpec parse(std::string_view shorthand, long horizon);
};

struct InitPolicy {
  std::optional<Point> x0;  ///< defaults to the barycenter
  std::optional<Point> x1;  ///< AdaMir only; defaults to prox(x0, −γ_init ∇f(x0))
  double gamma_init = 1e-2;
};

struct RunOptions {
  bool record_wallclock = false;
};

/// Runs `spec.horizon` iterations and records one TraceRecord per iterate X_1..X_T.
/// Solver errors stop the run and leave the partial trace with `failure` set.
Trace run(const SolverSpec& spec, const Problem& problem, const StochasticOracle& oracle,
          const InitPolicy& init = {}, const RunOptions& options = {});

}  // namespace adamir
