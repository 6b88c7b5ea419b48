#include "adamir/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "adamir/errors.hpp"

namespace adamir {

LemmaViolation::LemmaViolation(std::string lemma, std::vector<double> sequence, double a0,
                               double lhs, double rhs)
    : Error([&] {
        std::ostringstream msg;
        msg.precision(17);
        msg << "sequence inequality " << lemma << " violated: lhs " << lhs << " > rhs " << rhs
            << " (length " << sequence.size() << ", a0 " << a0 << ")";
        return msg.str();
      }()),
      lemma_(std::move(lemma)),
      sequence_(std::move(sequence)),
      a0_(a0),
      lhs_(lhs),
      rhs_(rhs) {}

// --------------------------------------------------------------------------------------------

double gap_value(const TraceRecord& record, GapField field, double f_star) {
  switch (field) {
    case GapField::FAvgGap:
      return record.f_avg - f_star;
    case GapField::FLastGap:
      return record.f_last - f_star;
    case GapField::DivToOpt:
      if (!record.div_to_opt) throw MissingOptimum("trace has no divergence to the optimum");
      return *record.div_to_opt;
  }
  return 0.0;
}

RateFit fit_power_law(const std::vector<std::pair<long, double>>& samples, ConvergedPolicy policy) {
  std::vector<double> xs;
  std::vector<double> ys;
  long t_lo = 0;
  long t_hi = 0;
  for (const auto& [t, gap] : samples) {
    if (!(gap > kConvergedGap)) {
      if (policy == ConvergedPolicy::Reject) {
        std::ostringstream msg;
        msg << "gap " << gap << " at t = " << t << " is at or below " << kConvergedGap;
        throw NonPositiveGap(msg.str());
      }
      continue;
    }
    if (xs.empty()) t_lo = t;
    t_hi = t;
    xs.push_back(std::log(static_cast<double>(t)));
    ys.push_back(std::log(gap));
  }
  if (xs.size() < 2 || t_lo == t_hi)
    throw NonPositiveGap("rate fit needs at least two unconverged points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

RateFit fit_rate(const Trace& trace, GapField field, long t_lo, long t_hi,
                 ConvergedPolicy policy) {
  if (t_lo >= t_hi) throw ConfigError("rate window needs t_lo < t_hi");
  double f_star = 0.0;
  if (field != GapField::DivToOpt) {
    if (!trace.f_star) throw MissingOptimum("trace has no known optimal value");
    f_star = *trace.f_star;
  }
  std::vector<std::pair<long, double>> samples;
  for (const TraceRecord& r : trace.records)
    if (r.t >= t_lo && r.t <= t_hi) samples.emplace_back(r.t, gap_value(r, field, f_star));
  return fit_power_law(samples, policy);
}

RateFit fit_rate(const Trace& trace, GapField field, ConvergedPolicy policy) {
  const long n = static_cast<long>(trace.records.size());
  return fit_rate(trace, field, n / 10 + 1, n, policy);
}

// --------------------------------------------------------------------------------------------

namespace {

long effective_horizon(const Trace& trace, long horizon) {
  const long n = static_cast<long>(trace.records.size());
  if (horizon <= 0) horizon = n;
  if (horizon > n || horizon < 1) {
    std::ostringstream msg;
    msg << "certificate horizon " << horizon << " outside the trace (" << n << " records)";
    throw ConfigError(msg.str());
  }
  return horizon;
}

bool within(double lhs, double rhs, double abs_tol) { return lhs <= rhs + abs_tol; }

}  // namespace

CertificateReport check_regret_certificate(const Trace& trace, const Problem& problem,
                                           long horizon) {
  const auto& opt = problem.known_optimum();
  if (!opt) throw MissingOptimum(problem.name() + ": regret certificate needs a known optimum");
  const long T = effective_horizon(trace, horizon);
  if (!trace.records.front().div_to_opt)
    throw MissingOptimum("trace has no divergence to the optimum");
  const double d1 = *trace.records.front().div_to_opt;
  double lhs = 0.0;
  double s_sq = 0.0;
  double s_lin = 0.0;
  for (long k = 0; k < T; ++k) {
    const TraceRecord& r = trace.records[static_cast<std::size_t>(k)];
    lhs += r.f_last - opt->value;
    s_sq += r.gamma * r.gamma * r.rho_sq;
    s_lin += r.gamma * r.rho_sq;
  }
  const double gamma_T = trace.records[static_cast<std::size_t>(T - 1)].gamma;
  CertificateReport rep;
  rep.name = "regret";
  rep.horizon = T;
  rep.lhs = lhs;
  rep.rhs = d1 / gamma_T + s_sq / gamma_T + s_lin;
  rep.passed = within(lhs, rep.rhs, 1e-6 * (1.0 + std::abs(rep.rhs)));
  return rep;
}

CertificateReport check_divergence_bound(const Trace& trace, long horizon) {
  const long T = effective_horizon(trace, horizon);
  if (!trace.records.front().div_to_opt)
    throw MissingOptimum("trace has no divergence to the optimum");
  double budget = *trace.records.front().div_to_opt;
  double worst = 0.0;
  for (long k = 0; k < T; ++k) {
    const TraceRecord& r = trace.records[static_cast<std::size_t>(k)];
    budget += r.gamma * r.gamma * r.rho_sq;
    worst = std::max(worst, r.div_to_opt.value_or(0.0));
  }
  CertificateReport rep;
  rep.name = "divergence_bound";
  rep.horizon = T;
  rep.lhs = worst;
  rep.rhs = budget;
  rep.passed = within(worst, budget, 1e-6);
  return rep;
}

CertificateReport check_step_identity(const Trace& trace) {
  if (!trace.rho0_sq) throw ConfigError("step identity needs an AdaMir trace");
  CertificateReport rep;
  rep.name = "step_identity";
  rep.horizon = static_cast<long>(trace.records.size());
  rep.passed = true;
  double sum = *trace.rho0_sq;
  double worst = 0.0;
  for (const TraceRecord& r : trace.records) {
    const double inv = 1.0 / (r.gamma * r.gamma);
    const double rel = std::abs(inv - sum) / std::max(std::abs(sum), 1e-300);
    if (rel > worst) {
      worst = rel;
      rep.lhs = inv;
      rep.rhs = sum;
    }
    sum += r.rho_sq;
  }
  rep.passed = worst <= 1e-9;
  std::ostringstream msg;
  msg << "max relative error " << worst;
  rep.detail = msg.str();
  return rep;
}

CertificateReport check_residual_bound(const Trace& trace, double bound) {
  CertificateReport rep;
  rep.name = "residual_bound";
  rep.horizon = static_cast<long>(trace.records.size());
  rep.rhs = bound;
  for (const TraceRecord& r : trace.records) rep.lhs = std::max(rep.lhs, r.rho_sq);
  rep.passed = within(rep.lhs, bound, 1e-9);
  return rep;
}

CertificateReport check_step_monotone(const Trace& trace) {
  CertificateReport rep;
  rep.name = "step_monotone";
  rep.horizon = static_cast<long>(trace.records.size());
  rep.passed = true;
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const double up = trace.records[k].gamma - trace.records[k - 1].gamma;
    if (up > rep.lhs) rep.lhs = up;
    if (up > 0.0) rep.passed = false;
  }
  return rep;
}

double rc_residual_bound(double g) { return 2.0 * g * g; }

double stochastic_residual_bound(double g, double modulus, double sigma) {
  const double r = std::sqrt(2.0) * g + std::sqrt(2.0 / modulus) * sigma;
  return r * r;
}

double best_residual(const Trace& trace) {
  double best = std::numeric_limits<double>::infinity();
  for (const TraceRecord& r : trace.records) best = std::min(best, r.rho_sq);
  return best;
}

// --------------------------------------------------------------------------------------------

LemmaSides sqrt_sum_bound(const std::vector<double>& a) {
  double s = 0.0;
  double lhs = 0.0;
  for (double v : a) {
    s += v;
    if (v > 0.0) lhs += v / std::sqrt(s);
  }
  return {lhs, 2.0 * std::sqrt(s), std::sqrt(s)};
}

LemmaSides log_sum_bound(const std::vector<double>& a) {
  double s = 0.0;
  double lhs = 0.0;
  for (double v : a) {
    s += v;
    lhs += v / (1.0 + s);
  }
  return {lhs, 1.0 + std::log1p(s), std::nullopt};
}

LemmaSides ratio_sum_bound(const std::vector<double>& b) {
  if (b.empty() || !(b.front() > 0.0)) throw ConfigError("ratio-sum inequality needs b_1 > 0");
  double s = 0.0;
  double lhs = 0.0;
  for (double v : b) {
    s += v;
    lhs += v / s;
  }
  return {lhs, 2.0 + std::log(s / b.front()), std::nullopt};
}

LemmaSides offset_sqrt_sum_bound(const std::vector<double>& a, double a0, double a_max) {
  double prefix = 0.0;  // Σ_{i<t} a_i
  double lhs = 0.0;
  for (double v : a) {
    lhs += v / std::sqrt(a0 + prefix);
    prefix += v;
  }
  const double head = a.empty() ? 0.0 : prefix - a.back();  // Σ_{t<T} a_t
  const double root = std::sqrt(a0 + head);
  return {lhs, 2.0 * a_max / std::sqrt(a0) + 3.0 * std::sqrt(a_max) + 3.0 * root,
          root - std::sqrt(a0)};
}

LemmaSides offset_ratio_sum_bound(const std::vector<double>& a, double a0, double a_max) {
  double prefix = 0.0;
  double lhs = 0.0;
  for (double v : a) {
    lhs += v / (a0 + prefix);
    prefix += v;
  }
  const double head = a.empty() ? 0.0 : prefix - a.back();
  return {lhs, 2.0 + 4.0 * a_max / a0 + 2.0 * std::log1p(head / a0), std::nullopt};
}

std::vector<double> sample_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> length(1, 200);
  std::uniform_real_distribution<double> exponent(-6.0, 3.0);
  std::uniform_int_distribution<int> style(0, 3);
  std::bernoulli_distribution zero(0.1);
  std::vector<double> a(static_cast<std::size_t>(length(rng)));
  switch (style(rng)) {
    case 0: {  // constant
      const double c = std::pow(10.0, exponent(rng));
      std::fill(a.begin(), a.end(), c);
      break;
    }
    case 1: {  // one scale with jitter
      const double c = std::pow(10.0, exponent(rng));
      std::uniform_real_distribution<double> jitter(0.0, 2.0);
      for (double& v : a) v = zero(rng) ? 0.0 : c * jitter(rng);
      break;
    }
    default:  // mixed scales
      for (double& v : a) v = zero(rng) ? 0.0 : std::pow(10.0, exponent(rng));
      break;
  }
  return a;
}

namespace {

void expect(const std::string& lemma, const std::vector<double>& a, double a0, double lhs,
            double rhs) {
  const double slack = kLemmaSlack * std::max(std::abs(lhs), std::abs(rhs));
  if (!(lhs <= rhs + slack)) throw LemmaViolation(lemma, a, a0, lhs, rhs);
}

int check_sides(const std::string& lemma, const std::vector<double>& a, double a0,
                const LemmaSides& s) {
  int checks = 1;
  expect(lemma, a, a0, s.lhs, s.rhs);
  if (s.lower) {
    expect(lemma + " (lower)", a, a0, *s.lower, s.lhs);
    ++checks;
  }
  return checks;
}

int check_one(const std::vector<double>& a, double a0, const LemmaBounds& bounds) {
  const double a_max = a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  int checks = 0;
  checks += check_sides("sqrt-sum", a, a0, bounds.sqrt_sum(a));
  checks += check_sides("log-sum", a, a0, bounds.log_sum(a));
  if (!a.empty() && a.front() > 0.0) checks += check_sides("ratio-sum", a, a0, bounds.ratio_sum(a));
  checks += check_sides("offset-sqrt-sum", a, a0, bounds.offset_sqrt_sum(a, a0, a_max));
  checks += check_sides("offset-ratio-sum", a, a0, bounds.offset_ratio_sum(a, a0, a_max));
  return checks;
}

}  // namespace

void check_sequence_lemmas_on(const std::vector<double>& a, double a0, const LemmaBounds& bounds) {
  if (!(a0 > 0.0)) throw ConfigError("sequence inequalities need a0 > 0");
  for (double v : a)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("sequence entries must be >= 0");
  check_one(a, a0, bounds);
}

LemmaReport check_sequence_lemmas(int samples, std::uint64_t seed, const LemmaBounds& bounds) {
  if (samples < 1) throw ConfigError("need at least one sample sequence");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(-6.0, 3.0);
  LemmaReport rep;
  for (int s = 0; s < samples; ++s) {
    const std::vector<double> a = sample_sequence(rng);
    const double a0 = std::pow(10.0, exponent(rng));
    rep.checks += check_one(a, a0, bounds);
    ++rep.sequences;
  }
  return rep;
}

// --------------------------------------------------------------------------------------------

MultiseedStats summarize_multiseed(const std::vector<Trace>& traces) {
  if (traces.empty()) throw MismatchedHorizons("no traces to summarize");
  const std::size_t n = traces.front().records.size();
  for (const Trace& tr : traces) {
    if (tr.records.size() != n || tr.horizon != traces.front().horizon) {
      std::ostringstream msg;
      msg << "trace '" << tr.solver << "' seed " << tr.seed << " has " << tr.records.size()
          << " records, expected " << n;
      throw MismatchedHorizons(msg.str());
    }
  }
  MultiseedStats st;
  st.horizon = traces.front().horizon;
  st.seeds = static_cast<int>(traces.size());
  const double S = static_cast<double>(traces.size());
  auto fill = [&](SeriesStats& out, auto field) {
    out.mean.resize(n);
    out.ci_lo.resize(n);
    out.ci_hi.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      double mean = 0.0;
      for (const Trace& tr : traces) mean += field(tr.records[k]);
      mean /= S;
      double var = 0.0;
      for (const Trace& tr : traces) {
        const double d = field(tr.records[k]) - mean;
        var += d * d;
      }
      const double half = traces.size() > 1 ? 1.96 * std::sqrt(var / (S - 1.0)) / std::sqrt(S) : 0.0;
      out.mean[k] = mean;
      out.ci_lo[k] = mean - half;
      out.ci_hi[k] = mean + half;
    }
  };
  st.t.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    st.t[k] = traces.front().records[k].t;
    for (const Trace& tr : traces)
      if (tr.records[k].t != st.t[k]) throw MismatchedHorizons("traces disagree on t");
  }
  fill(st.f_avg, [](const TraceRecord& r) { return r.f_avg; });
  fill(st.f_last, [](const TraceRecord& r) { return r.f_last; });
  return st;
}

// --------------------------------------------------------------------------------------------

namespace {

constexpr const char* kCsvHeader = "t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns";

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("bad number in trace CSV: '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("bad integer in trace CSV: '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    out << r.t << ',' << format_double(r.f_last) << ',' << format_double(r.f_avg) << ','
        << format_double(r.gamma) << ',' << format_double(r.rho_sq) << ',';
    if (r.div_to_opt) out << format_double(*r.div_to_opt);
    out << ',' << r.wallclock_ns << '\n';
  }
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ConfigError("trace CSV has an unexpected header");
  Trace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 7) throw ConfigError("trace CSV row has the wrong number of fields");
    TraceRecord r;
    r.t = parse_int<long>(cells[0]);
    r.f_last = parse_double(cells[1]);
    r.f_avg = parse_double(cells[2]);
    r.gamma = parse_double(cells[3]);
    r.rho_sq = parse_double(cells[4]);
    if (!cells[5].empty()) r.div_to_opt = parse_double(cells[5]);
    r.wallclock_ns = parse_int<std::int64_t>(cells[6]);
    trace.records.push_back(r);
  }
  trace.horizon = static_cast<long>(trace.records.size());
  return trace;
}

}  // namespace adamir

namespace adamir {

CertificateReport check_reference_optimum(const Trace& trace, double f_star) {
  CertificateReport rep;
  rep.name = "reference_optimum";
  rep.horizon = static_cast<long>(trace.records.size());
  rep.lhs = std::numeric_limits<double>::infinity();
  for (const TraceRecord& r : trace.records) rep.lhs = std::min(rep.lhs, r.f_last);
  rep.rhs = f_star - 1e-9;
  rep.passed = rep.lhs >= rep.rhs;
  return rep;
}

DualVector sample_dual_step(const BregmanGeometry& geom, const Point& x, std::mt19937_64& rng) {
  const Eigen::Index d = geom.dimension();
  DualVector v(d);
  if (geom.kind() == GeometryKind::LogBarrier) {
    // v_i = w_i / x_i with w_i < 1 keeps 1 − x_i v_i > 0.
    std::uniform_real_distribution<double> w(-3.0, 0.9);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = w(rng) / x[i];
    return v;
  }
  std::normal_distribution<double> normal(0.0, 2.0);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

GeometryCheck check_geometry_identities(const BregmanGeometry& geom, int samples,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeometryCheck out;
  const Eigen::Index m = geom.block_size();
  for (int s = 0; s < samples; ++s) {
    const Point p = sample_interior_point(geom, rng);
    const Point x = sample_interior_point(geom, rng);
    const Point y = sample_interior_point(geom, rng);
    const double dpy = geom.divergence(p, y);
    const double lhs = dpy - geom.divergence(p, x) - geom.divergence(x, y);
    const double rhs = (geom.h_gradient(y) - geom.h_gradient(x)).dot(x - p);
    out.three_point = std::max(out.three_point, std::abs(lhs - rhs) / (1.0 + std::abs(dpy)));

    const DualVector v = sample_dual_step(geom, x, rng);
    const DualVector grad_x = geom.h_gradient(x);
    DualVector r = geom.h_gradient(geom.prox_step(x, v)) - grad_x - v;
    if (geom.kind() == GeometryKind::Entropic)
      for (Eigen::Index b = 0; b < geom.blocks(); ++b) {
        auto rb = r.segment(b * m, m);
        rb.array() -= rb.mean();
      }
    const double scale =
        1.0 + grad_x.lpNorm<Eigen::Infinity>() + v.lpNorm<Eigen::Infinity>();
    out.prox = std::max(out.prox, r.lpNorm<Eigen::Infinity>() / scale);
    ++out.samples;
  }
  return out;
}

double fisher_gradient_fd_error(const FisherMarket& mkt, int points, double eps,
                                std::uint64_t seed) {
  const BregmanGeometry geom = BregmanGeometry::entropic_product(mkt.num_players, mkt.num_goods);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < points; ++s) {
    Point b = sample_interior_point(geom, rng);
    // Keep every coordinate well above the step so both probes stay in the orthant.
    b = (b.array() + 1e-3).matrix();
    for (Eigen::Index i = 0; i < mkt.num_players; ++i)
      b.segment(i * mkt.num_goods, mkt.num_goods) /= b.segment(i * mkt.num_goods, mkt.num_goods).sum();
    const DualVector g = fisher_gradient(mkt, b);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      Point hi = b;
      Point lo = b;
      hi[k] += eps;
      lo[k] -= eps;
      const double fd = (fisher_potential(mkt, hi) - fisher_potential(mkt, lo)) / (2.0 * eps);
      worst = std::max(worst, std::abs(fd - g[k]));
    }
  }
  return worst;
}

}  // namespace adamir
