#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adamir/problems.hpp"

namespace adamir {

struct TraceRecord {
  long t = 0;
  double f_last = 0.0;  ///< f(X_t)
  double f_avg = 0.0;   ///< f(x̄_t), x̄_t = (1/t) Σ_{s≤t} X_s
  double gamma = 0.0;   ///< step used at t
  double rho_sq = 0.0;  ///< ρ_t²
  std::optional<double> div_to_opt;  ///< D(x*, X_t)
  std::int64_t wallclock_ns = 0;
};

struct Trace {
  std::string solver;
  std::string problem;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::string noise;
  long horizon = 0;
  std::optional<double> rho0_sq;  ///< AdaMir only
  std::optional<double> f_star;
  std::optional<std::string> failure;
  std::vector<TraceRecord> records;

  bool complete() const { return !failure && static_cast<long>(records.size()) == horizon; }
};

// --------------------------------------------------------------------------------------------
// Rate fits.

enum class GapField { FAvgGap, FLastGap, DivToOpt };

/// What to do with gaps at or below kConvergedGap inside the window.
enum class ConvergedPolicy { Reject, Exclude };

inline constexpr double kConvergedGap = 1e-15;

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  long t_lo = 0;
  long t_hi = 0;
  int points = 0;
};

/// Least-squares line through (log t, log gap) for t in [t_lo, t_hi].
/// Throws NonPositiveGap on a converged gap under ConvergedPolicy::Reject, and MissingOptimum
/// when the field needs f* or D(x*, ·) and the trace lacks it.
RateFit fit_rate(const Trace& trace, GapField field, long t_lo, long t_hi,
                 ConvergedPolicy policy = ConvergedPolicy::Reject);
/// Default window: drops the first 10% of the trace as burn-in.
RateFit fit_rate(const Trace& trace, GapField field,
                 ConvergedPolicy policy = ConvergedPolicy::Reject);
/// Same fit over raw (t, value) samples.
RateFit fit_power_law(const std::vector<std::pair<long, double>>& samples,
                      ConvergedPolicy policy = ConvergedPolicy::Reject);

double gap_value(const TraceRecord& record, GapField field, double f_star);

// --------------------------------------------------------------------------------------------
// Certificates.

struct CertificateReport {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  long horizon = 0;
  std::string detail;
};

/// Σ_{t≤T}[f(X_t) − f*] ≤ D(x*, X₁)/γ_T + (Σ γ_t²ρ_t²)/γ_T + Σ γ_tρ_t², up to 1e-6·(1 + |RHS|).
/// Uses the first `horizon` records (all of them when horizon ≤ 0).
CertificateReport check_regret_certificate(const Trace& trace, const Problem& problem,
                                           long horizon = 0);
/// max_{t≤T} D(x*, X_t) ≤ D(x*, X₁) + Σ_{s≤T} γ_s²ρ_s² + 1e-6.
CertificateReport check_divergence_bound(const Trace& trace, long horizon = 0);
/// 1/γ_T² = ρ₀² + Σ_{t<T} ρ_t² for every T, to 1e-9 relative.
CertificateReport check_step_identity(const Trace& trace);
/// ρ_t² ≤ bound + 1e-9 for all t.
CertificateReport check_residual_bound(const Trace& trace, double bound);
/// γ_{t+1} ≤ γ_t for all t.
CertificateReport check_step_monotone(const Trace& trace);

/// 2G²: the residual bound for deterministic RC runs.
double rc_residual_bound(double g);
/// (√2·G + √(2/K)·σ)²: the residual bound under noise of dual norm ≤ σ.
double stochastic_residual_bound(double g, double modulus, double sigma);

/// min_t f(X_t) ≥ f* − 1e-9: no solver beats the reference optimum.
CertificateReport check_reference_optimum(const Trace& trace, double f_star);

/// min_{t≤T} ρ_t², reported for non-convex runs; never asserted.
double best_residual(const Trace& trace);

// --------------------------------------------------------------------------------------------
// Geometry identities.

struct GeometryCheck {
  int samples = 0;
  double three_point = 0.0;  ///< max |D(p,y) − D(p,x) − D(x,y) − ⟨∇h(y)−∇h(x), x−p⟩| / (1 + |D(p,y)|)
  double prox = 0.0;         ///< max prox stationarity residual, relative to 1 + ‖∇h(x)‖∞ + ‖v‖∞
};

/// Dual vector v for which prox_step(x, v) is defined and does not underflow.
DualVector sample_dual_step(const BregmanGeometry& geom, const Point& x, std::mt19937_64& rng);

/// Three-point identity and prox stationarity ∇h(P_x(v)) = ∇h(x) + v on random triples; for the
/// entropic kernel the residual is taken modulo a constant per simplex block.
GeometryCheck check_geometry_identities(const BregmanGeometry& geom, int samples,
                                        std::uint64_t seed);

/// Max abs error between fisher_gradient and central differences of fisher_potential at
/// `points` random interior bids.
double fisher_gradient_fd_error(const FisherMarket& mkt, int points, double eps,
                                std::uint64_t seed);

// --------------------------------------------------------------------------------------------
// Numeric-sequence inequalities.

/// Left- and right-hand sides of one inequality on one sequence. Two-sided inequalities put
/// the lower bound in `lower`.
struct LemmaSides {
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> lower;
};

/// Σ a_t/√(Σ_{i≤t} a_i) with lower √Σa and rhs 2√Σa.
LemmaSides sqrt_sum_bound(const std::vector<double>& a);
/// Σ a_t/(1 + Σ_{i≤t} a_i) ≤ 1 + log(1 + Σa).
LemmaSides log_sum_bound(const std::vector<double>& a);
/// Σ b_t/(Σ_{i≤t} b_i) ≤ 2 + log(Σb/b₁), b₁ > 0.
LemmaSides ratio_sum_bound(const std::vector<double>& b);
/// Σ_{t=1}^T a_t/√(a₀ + Σ_{i<t} a_i), lower √(a₀ + Σ_{t<T} a_t) − √a₀,
/// rhs 2a/√a₀ + 3√a + 3√(a₀ + Σ_{t<T} a_t), with a_t ∈ [0, a].
LemmaSides offset_sqrt_sum_bound(const std::vector<double>& a, double a0, double a_max);
/// Σ_{t=1}^T a_t/(a₀ + Σ_{i<t} a_i) ≤ 2 + 4a/a₀ + 2 log(1 + Σ_{t<T} a_t/a₀).
LemmaSides offset_ratio_sum_bound(const std::vector<double>& a, double a0, double a_max);

struct LemmaBounds {
  std::function<LemmaSides(const std::vector<double>&)> sqrt_sum = sqrt_sum_bound;
  std::function<LemmaSides(const std::vector<double>&)> log_sum = log_sum_bound;
  std::function<LemmaSides(const std::vector<double>&)> ratio_sum = ratio_sum_bound;
  std::function<LemmaSides(const std::vector<double>&, double, double)> offset_sqrt_sum =
      offset_sqrt_sum_bound;
  std::function<LemmaSides(const std::vector<double>&, double, double)> offset_ratio_sum =
      offset_ratio_sum_bound;
};

struct LemmaReport {
  int sequences = 0;
  int checks = 0;
};

inline constexpr double kLemmaSlack = 1e-9;

/// Random nonnegative sequence: length 1..200, values spanning 1e-6..1e3, with exact zeros.
std::vector<double> sample_sequence(std::mt19937_64& rng);

/// Checks every inequality on `samples` random sequences; throws LemmaViolation on the first
/// failure. `bounds` can be swapped out to check the checker.
LemmaReport check_sequence_lemmas(int samples, std::uint64_t seed,
                                  const LemmaBounds& bounds = {});
/// Checks every inequality on one sequence (with a₀ and a = max a_t, or 1 when all zero).
void check_sequence_lemmas_on(const std::vector<double>& a, double a0,
                              const LemmaBounds& bounds = {});

// --------------------------------------------------------------------------------------------
// Multi-seed statistics.

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
};

struct MultiseedStats {
  long horizon = 0;
  int seeds = 0;
  std::vector<long> t;
  SeriesStats f_avg;
  SeriesStats f_last;
};

/// Per-t mean and normal-approximation 95% CI (mean ± 1.96·s/√S) of f_avg and f_last.
/// A single trace yields a zero-width interval. Throws MismatchedHorizons.
MultiseedStats summarize_multiseed(const std::vector<Trace>& traces);

// --------------------------------------------------------------------------------------------
// Serialization.

/// Header `t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns`, one row per record, doubles in
/// shortest round-trip form.
void write_trace_csv(const Trace& trace, std::ostream& out);
Trace read_trace_csv(std::istream& in);
std::string format_double(double v);

}  // namespace adamir
