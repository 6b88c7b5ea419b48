#include "adamir/solvers.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "adamir/errors.hpp"

namespace adamir {

double AdaMirState::step() const { return 1.0 / std::sqrt(residual_sq_sum); }

Point AdaMirState::average() const {
  if (avg_count == 0) return x_curr;
  return avg_accumulator / static_cast<double>(avg_count);
}

AdaMirState adamir_init(const BregmanGeometry& geom, const Point& x0, const Point& x1) {
  const double rho0_sq = geom.symmetric_divergence(x0, x1);
  if (!(rho0_sq > kDegenerateInit)) {
    std::ostringstream msg;
    msg << "adamir: initial points coincide (symmetric divergence " << rho0_sq << ")";
    throw DegenerateInit(msg.str());
  }
  AdaMirState s;
  s.x_prev = x0;
  s.x_curr = x1;
  s.rho0_sq = rho0_sq;
  s.residual_sq_sum = rho0_sq;
  s.t = 1;
  s.avg_accumulator = Eigen::VectorXd::Zero(x1.size());
  s.avg_count = 0;
  return s;
}

StepInfo adamir_step(AdaMirState& state, const BregmanGeometry& geom,
                     const StochasticOracle& oracle) {
  const double gamma = state.step();
  const DualVector g = oracle.query(state.x_curr, static_cast<std::uint64_t>(state.t));
  Point next = geom.prox_step(state.x_curr, -gamma * g);
  const double rho_sq = geom.symmetric_divergence(state.x_curr, next) / (gamma * gamma);
  state.avg_accumulator += state.x_curr;
  ++state.avg_count;
  state.residual_sq_sum += rho_sq;
  state.x_prev = std::move(state.x_curr);
  state.x_curr = std::move(next);
  ++state.t;
  return {gamma, rho_sq};
}

Point egd_step(const FisherMarket& mkt, const Point& bids, double gamma) {
  if (!(gamma >= 0.0)) throw ConfigError("egd: step must be nonnegative");
  const DualVector g = fisher_gradient(mkt, bids);
  const BregmanGeometry geom = BregmanGeometry::entropic_product(mkt.num_players, mkt.num_goods);
  return geom.prox_step(bids, -gamma * g);
}

Point pr_step(const FisherMarket& mkt, const Point& bids) {
  fisher_gradient(mkt, bids);  // domain and price checks
  const Eigen::VectorXd p = mkt.prices(bids);
  const Eigen::Index m = mkt.num_goods;
  Point out(bids.size());
  for (Eigen::Index i = 0; i < mkt.num_players; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      out[i * m + j] = mkt.utilities(i, j) * bids[i * m + j] / p[j];
      total += out[i * m + j];
    }
    out.segment(i * m, m) /= total;
  }
  return out;
}

void SolverSpec::validate() const {
  if (horizon < 1) throw ConfigError("solver horizon must be at least 1");
  if ((kind == SolverKind::FixedMD || kind == SolverKind::DecayedMD) &&
      !(gamma > 0.0 && std::isfinite(gamma)))
    throw ConfigError("solver step size must be positive");
}

std::string SolverSpec::label() const {
  switch (kind) {
    case SolverKind::AdaMir:
      return "adamir";
    case SolverKind::ProportionalResponse:
      return "pr";
    case SolverKind::FixedMD:
      return "egd:" + format_double(gamma);
    case SolverKind::DecayedMD:
      return "md-decay:" + format_double(gamma);
  }
  return "unknown";
}

SolverSpec SolverSpec::parse(std::string_view shorthand, long horizon) {
  SolverSpec spec;
  spec.horizon = horizon;
  const auto colon = shorthand.find(':');
  const std::string_view head = shorthand.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  auto parse_step = [&]() {
    const std::string_view arg = shorthand.substr(colon + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw ConfigError("bad step size in solver '" + std::string(shorthand) + "'");
    return value;
  };
  if (head == "adamir" && !has_arg) {
    spec.kind = SolverKind::AdaMir;
  } else if (head == "pr" && !has_arg) {
    spec.kind = SolverKind::ProportionalResponse;
  } else if (head == "egd" && has_arg) {
    spec.kind = SolverKind::FixedMD;
    spec.gamma = parse_step();
  } else if (head == "md-decay" && has_arg) {
    spec.kind = SolverKind::DecayedMD;
    spec.gamma = parse_step();
  } else {
    throw ConfigError("unknown solver '" + std::string(shorthand) +
                      "' (expected adamir | pr | egd:<gamma> | md-decay:<gamma0>)");
  }
  spec.validate();
  return spec;
}

namespace {

class Clock {
 public:
  explicit Clock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ns() const {
    if (!enabled_) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

Trace empty_trace(const SolverSpec& spec, const Problem& problem, const StochasticOracle& oracle) {
  Trace trace;
  trace.solver = spec.label();
  trace.problem = problem.name();
  trace.seed = oracle.config().seed;
  trace.sigma = oracle.config().sigma;
  trace.noise = std::string(to_string(oracle.config().noise_kind));
  trace.horizon = spec.horizon;
  if (problem.known_optimum()) trace.f_star = problem.known_optimum()->value;
  trace.records.reserve(static_cast<std::size_t>(spec.horizon));
  return trace;
}

TraceRecord make_record(const Problem& problem, long t, const Point& x, const Point& avg,
                        double gamma, double rho_sq) {
  TraceRecord r;
  r.t = t;
  r.f_last = problem.value(x);
  r.f_avg = problem.value(avg);
  r.gamma = gamma;
  r.rho_sq = rho_sq;
  if (const auto& opt = problem.known_optimum())
    r.div_to_opt = problem.geometry().divergence(opt->point, x);
  return r;
}

void run_adamir(Trace& trace, const SolverSpec& spec, const Problem& problem,
                const StochasticOracle& oracle, const Point& x0, const InitPolicy& init,
                const Clock& clock) {
  const BregmanGeometry& geom = problem.geometry();
  const Point x1 = init.x1 ? *init.x1 : geom.prox_step(x0, -init.gamma_init * problem.gradient(x0));
  AdaMirState state = adamir_init(geom, x0, x1);
  trace.rho0_sq = state.rho0_sq;
  for (long t = 1; t <= spec.horizon; ++t) {
    const Point x_t = state.x_curr;
    const StepInfo info = adamir_step(state, geom, oracle);
    TraceRecord r = make_record(problem, t, x_t, state.average(), info.gamma, info.rho_sq);
    r.wallclock_ns = clock.elapsed_ns();
    trace.records.push_back(r);
  }
}

void run_fixed(Trace& trace, const SolverSpec& spec, const Problem& problem,
               const StochasticOracle& oracle, const Point& x0, const Clock& clock) {
  const BregmanGeometry& geom = problem.geometry();
  const auto* fisher = dynamic_cast<const FisherProblem*>(&problem);
  if (spec.kind == SolverKind::ProportionalResponse && fisher == nullptr)
    throw ConfigError("proportional response only applies to Fisher markets");
  Point x = x0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.size());
  for (long t = 1; t <= spec.horizon; ++t) {
    double gamma = 1.0;
    if (spec.kind == SolverKind::FixedMD) gamma = spec.gamma;
    if (spec.kind == SolverKind::DecayedMD) gamma = spec.gamma / std::sqrt(static_cast<double>(t));
    Point next;
    if (spec.kind == SolverKind::ProportionalResponse && oracle.deterministic())
      next = pr_step(fisher->market(), x);
    else
      next = geom.prox_step(x, -gamma * oracle.query(x, static_cast<std::uint64_t>(t)));
    const double rho_sq = geom.symmetric_divergence(x, next) / (gamma * gamma);
    sum += x;
    TraceRecord r =
        make_record(problem, t, x, Point(sum / static_cast<double>(t)), gamma, rho_sq);
    r.wallclock_ns = clock.elapsed_ns();
    trace.records.push_back(r);
    x = std::move(next);
  }
}

}  // namespace

Trace run(const SolverSpec& spec, const Problem& problem, const StochasticOracle& oracle,
          const InitPolicy& init, const RunOptions& options) {
  spec.validate();
  if (&oracle.problem() != &problem) throw ConfigError("oracle is bound to a different problem");
  Trace trace = empty_trace(spec, problem, oracle);
  const Point x0 = init.x0 ? *init.x0 : problem.geometry().barycenter();
  const Clock clock(options.record_wallclock);
  try {
    if (spec.kind == SolverKind::AdaMir)
      run_adamir(trace, spec, problem, oracle, x0, init, clock);
    else
      run_fixed(trace, spec, problem, oracle, x0, clock);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "aborted after " << trace.records.size() << " iterations: " << e.what();
    trace.failure = msg.str();
  }
  return trace;
}

}  // namespace adamir
