#include "adamir/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "adamir/analysis.hpp"
#include "adamir/errors.hpp"
#include "adamir/solvers.hpp"

namespace adamir::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// --------------------------------------------------------------------------------------------
// Configuration.

std::unique_ptr<Problem> build_problem(const ProblemConfig& config) {
  if (config.kind == "fisher") {
    if (!config.market_file.empty()) {
      std::ifstream in(config.market_file);
      if (!in) throw ConfigError("cannot read market file '" + config.market_file + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      return std::make_unique<FisherProblem>(market_from_json(buf.str()));
    }
    return std::make_unique<FisherProblem>(
        make_random_market(config.n, config.m, config.lo, config.hi, config.market_seed));
  }
  if (config.kind == "synthetic_rc" || config.kind == "synthetic-rc") {
    if (config.d < 2) throw ConfigError("synthetic_rc needs d >= 2");
    return make_synthetic_rc_problem(config.d);
  }
  throw ConfigError("unknown problem '" + config.kind + "' (expected fisher | synthetic_rc)");
}

OracleConfig oracle_config(const RunConfig& config, std::uint64_t seed) {
  OracleConfig oc;
  oc.seed = seed;
  oc.sigma = config.sigma;
  if (config.noise.empty())
    oc.noise_kind = config.sigma > 0.0 ? NoiseKind::SphereUniform : NoiseKind::None;
  else
    oc.noise_kind = parse_noise_kind(config.noise);
  if (oc.noise_kind == NoiseKind::FisherUtilityResample) {
    oc.rel_width = config.rel_width;
    oc.sigma = 0.0;
  }
  oc.validate();
  return oc;
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "adamir_out";
}

std::string market_to_json(const FisherMarket& mkt) {
  json u = json::array();
  for (Eigen::Index i = 0; i < mkt.num_players; ++i)
    for (Eigen::Index j = 0; j < mkt.num_goods; ++j) u.push_back(mkt.utilities(i, j));
  const json j = {{"n", mkt.num_players}, {"m", mkt.num_goods}, {"seed", mkt.seed},
                  {"lo", mkt.lo},         {"hi", mkt.hi},       {"u", u}};
  return j.dump(2);
}

FisherMarket market_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    FisherMarket mkt;
    mkt.num_players = j.at("n").get<Eigen::Index>();
    mkt.num_goods = j.at("m").get<Eigen::Index>();
    mkt.seed = j.value("seed", std::uint64_t{0});
    mkt.lo = j.value("lo", 0.0);
    mkt.hi = j.value("hi", 0.0);
    const auto u = j.at("u").get<std::vector<double>>();
    if (mkt.num_players <= 0 || mkt.num_goods <= 0 ||
        static_cast<Eigen::Index>(u.size()) != mkt.num_players * mkt.num_goods)
      throw ConfigError("market JSON: u must hold n*m entries");
    mkt.utilities.resize(mkt.num_players, mkt.num_goods);
    for (Eigen::Index i = 0; i < mkt.num_players; ++i)
      for (Eigen::Index j2 = 0; j2 < mkt.num_goods; ++j2)
        mkt.utilities(i, j2) = u[static_cast<std::size_t>(i * mkt.num_goods + j2)];
    mkt.validate();
    return mkt;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("market JSON: ") + e.what());
  }
}

namespace {

json config_json(const RunConfig& c) {
  json solvers = c.solvers;
  json seeds = c.seeds;
  return {{"problem",
           {{"kind", c.problem.kind},
            {"n", c.problem.n},
            {"m", c.problem.m},
            {"lo", c.problem.lo},
            {"hi", c.problem.hi},
            {"market_seed", c.problem.market_seed},
            {"market_file", c.problem.market_file},
            {"d", c.problem.d}}},
          {"solvers", solvers},
          {"T", c.horizon},
          {"sigma", c.sigma},
          {"noise", c.noise.empty() ? (c.sigma > 0.0 ? "sphere_uniform" : "none") : c.noise},
          {"rel_width", c.rel_width},
          {"seeds", seeds},
          {"gamma_init", c.gamma_init},
          {"wallclock", c.wallclock}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const CertificateReport& r) {
  json j = {{"name", r.name}, {"passed", r.passed}, {"lhs", r.lhs},
            {"rhs", r.rhs},   {"horizon", r.horizon}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

json fit_json(const Trace& trace, GapField field) {
  try {
    const RateFit f = fit_rate(trace, field, ConvergedPolicy::Exclude);
    return {{"slope", f.slope},  {"intercept", f.intercept}, {"r_squared", f.r_squared},
            {"t_lo", f.t_lo},    {"t_hi", f.t_hi},           {"points", f.points}};
  } catch (const Error&) {
    return nullptr;
  }
}

std::string file_stem(const Trace& trace) {
  std::string label = trace.solver;
  std::replace(label.begin(), label.end(), ':', '-');
  return trace.problem + "_" + label + "_seed" + std::to_string(trace.seed);
}

std::vector<CertificateReport> certificates(const Trace& trace, const Problem& problem,
                                            const OracleConfig& oc) {
  std::vector<CertificateReport> out;
  if (trace.records.empty()) return out;
  out.push_back(check_step_monotone(trace));
  if (trace.rho0_sq) out.push_back(check_step_identity(trace));
  const bool adamir = trace.rho0_sq.has_value();
  if (adamir && oc.noise_kind == NoiseKind::None && problem.known_optimum()) {
    out.push_back(check_regret_certificate(trace, problem));
    out.push_back(check_divergence_bound(trace));
  }
  if (adamir && problem.rc_constant()) {
    const double g = *problem.rc_constant();
    if (oc.noise_kind == NoiseKind::None)
      out.push_back(check_residual_bound(trace, rc_residual_bound(g)));
    else if (oc.noise_kind == NoiseKind::SphereUniform)
      out.push_back(
          check_residual_bound(trace, stochastic_residual_bound(g, problem.geometry().modulus(), oc.sigma)));
  }
  if (trace.f_star) out.push_back(check_reference_optimum(trace, *trace.f_star));
  return out;
}

json run_json(const Trace& trace, const Problem& problem, const OracleConfig& oc,
              const std::string& csv) {
  json j = {{"solver", trace.solver},
            {"problem", trace.problem},
            {"seed", trace.seed},
            {"sigma", trace.sigma},
            {"noise", trace.noise},
            {"T", trace.horizon},
            {"csv", csv},
            {"records", trace.records.size()},
            {"failure", trace.failure ? json(*trace.failure) : json(nullptr)},
            {"rho0_sq", optional_json(trace.rho0_sq)}};
  if (!trace.records.empty()) {
    const TraceRecord& last = trace.records.back();
    json fin = {{"t", last.t},
                {"f_last", last.f_last},
                {"f_avg", last.f_avg},
                {"gamma", last.gamma},
                {"rho_sq", last.rho_sq},
                {"div_to_opt", optional_json(last.div_to_opt)},
                {"f_last_gap", nullptr},
                {"f_avg_gap", nullptr}};
    if (trace.f_star) {
      fin["f_last_gap"] = last.f_last - *trace.f_star;
      fin["f_avg_gap"] = last.f_avg - *trace.f_star;
    }
    j["final"] = fin;
    j["best_rho_sq"] = best_residual(trace);
  }
  j["rate_fits"] = {{"f_avg_gap", fit_json(trace, GapField::FAvgGap)},
                    {"f_last_gap", fit_json(trace, GapField::FLastGap)},
                    {"div_to_opt", fit_json(trace, GapField::DivToOpt)}};
  json certs = json::array();
  for (const CertificateReport& r : certificates(trace, problem, oc)) certs.push_back(report_json(r));
  j["certificates"] = certs;
  return j;
}

json problem_json(const Problem& problem) {
  json j = {{"name", problem.name()},
            {"dimension", problem.dimension()},
            {"geometry", std::string(to_string(problem.geometry().kind()))},
            {"rc_constant", optional_json(problem.rc_constant())},
            {"rs_constant", optional_json(problem.rs_constant())},
            {"f_star", problem.known_optimum() ? json(problem.known_optimum()->value) : json(nullptr)}};
  if (const auto* fisher = dynamic_cast<const FisherProblem*>(&problem)) {
    j["market"] = json::parse(market_to_json(fisher->market()));
    j["reference_iterations"] = fisher->reference_iterations();
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

struct Job {
  SolverSpec spec;
  std::uint64_t seed;
};

struct RunOutcome {
  std::vector<Trace> traces;
  std::vector<OracleConfig> oracles;
  json summary;
  bool aborted = false;
};

// Runs every job (in parallel up to `jobs`), writes the CSVs and summary.json.
RunOutcome execute(const RunConfig& config, const std::string& command, const fs::path& dir,
                   std::ostream& out, std::ostream& err) {
  if (config.horizon < 1) throw ConfigError("--T must be at least 1");
  if (config.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (config.seeds.empty()) throw ConfigError("no seeds given");
  if (config.solvers.empty()) throw ConfigError("no solvers given");
  if (!(config.gamma_init > 0.0)) throw ConfigError("--gamma-init must be positive");
  std::vector<Job> jobs;
  for (const std::string& s : config.solvers)
    for (std::uint64_t seed : config.seeds) jobs.push_back({SolverSpec::parse(s, config.horizon), seed});
  for (std::uint64_t seed : config.seeds) oracle_config(config, seed);  // validate up front

  std::unique_ptr<Problem> problem = build_problem(config.problem);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  RunOutcome res;
  res.traces.resize(jobs.size());
  res.oracles.resize(jobs.size());
  std::vector<std::string> config_errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        const StochasticOracle oracle(*problem, oracle_config(config, jobs[k].seed));
        res.oracles[k] = oracle.config();
        InitPolicy init;
        init.gamma_init = config.gamma_init;
        res.traces[k] = run(jobs[k].spec, *problem, oracle, init, RunOptions{config.wallclock});
      } catch (const Error& e) {
        config_errors[k] = e.what();
      }
    }
  };
  const int threads = std::min<int>(config.jobs, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::string& e : config_errors)
    if (!e.empty()) throw ConfigError(e);

  json runs = json::array();
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Trace& trace = res.traces[k];
    const std::string csv = file_stem(trace) + ".csv";
    std::ostringstream buf;
    write_trace_csv(trace, buf);
    write_text(dir / csv, buf.str());
    runs.push_back(run_json(trace, *problem, res.oracles[k], csv));
    if (trace.failure) {
      res.aborted = true;
      err << "solver " << trace.solver << " (seed " << trace.seed << ") " << *trace.failure << '\n';
    }
    out << csv << ": " << trace.records.size() << " records" << (trace.failure ? " (aborted)" : "")
        << '\n';
  }
  res.summary = {{"command", command},
                 {"config", config_json(config)},
                 {"problem", problem_json(*problem)},
                 {"runs", runs}};
  if (!res.oracles.empty()) res.summary["config"]["sigma_effective"] = res.oracles.front().sigma;
  write_text(dir / "summary.json", res.summary.dump(2) + "\n");
  out << "summary.json written to " << dir.string() << '\n';
  return res;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunOutcome res = execute(config, "run", resolve_out_dir(config.out_dir), out, err);
    return res.aborted ? kSolverAbort : kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

int cmd_sweep(RunConfig config, long seeds, std::ostream& out, std::ostream& err) {
  if (seeds < 1) {
    err << "error: --seeds must be at least 1\n";
    return kConfigError;
  }
  config.seeds.clear();
  for (long s = 1; s <= seeds; ++s) config.seeds.push_back(static_cast<std::uint64_t>(s));
  try {
    const fs::path dir = resolve_out_dir(config.out_dir);
    const RunOutcome res = execute(config, "sweep", dir, out, err);
    json per_solver = json::object();
    for (const std::string& s : config.solvers) {
      const std::string label = SolverSpec::parse(s, config.horizon).label();
      std::vector<Trace> group;
      for (const Trace& tr : res.traces)
        if (tr.solver == label) group.push_back(tr);
      json entry = {{"seeds", group.size()}};
      try {
        const MultiseedStats st = summarize_multiseed(group);
        auto series = [](const SeriesStats& s2) {
          return json{{"mean", s2.mean}, {"ci_lo", s2.ci_lo}, {"ci_hi", s2.ci_hi}};
        };
        entry["t"] = st.t;
        entry["f_avg"] = series(st.f_avg);
        entry["f_last"] = series(st.f_last);
      } catch (const MismatchedHorizons& e) {
        entry["error"] = e.what();
      }
      per_solver[label] = entry;
    }
    const json stats = {{"command", "sweep"},
                        {"config", res.summary["config"]},
                        {"f_star", res.summary["problem"]["f_star"]},
                        {"ci", "normal approximation, mean +/- 1.96 s/sqrt(S)"},
                        {"solvers", per_solver}};
    write_text(dir / "stats.json", stats.dump(2) + "\n");
    out << "stats.json written to " << dir.string() << '\n';
    return res.aborted ? kSolverAbort : kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

// --------------------------------------------------------------------------------------------
// verify

namespace {

template <typename Fn>
CheckResult timed(const std::string& name, Fn&& fn) {
  CheckResult r;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

}  // namespace

std::vector<CheckResult> verify_checks(const VerifyOptions& options) {
  const bool q = options.quick;
  std::vector<CheckResult> results;

  const std::vector<std::pair<std::string, BregmanGeometry>> geometries = {
      {"euclidean", BregmanGeometry::euclidean(5)},
      {"entropic", BregmanGeometry::entropic(4)},
      {"entropic_product", BregmanGeometry::entropic_product(3, 4)},
      {"log_barrier", BregmanGeometry::log_barrier(5)}};
  for (const auto& [name, geom] : geometries) {
    results.push_back(timed("three-point/prox " + name, [&, &geom = geom](CheckResult& r) {
      const GeometryCheck c = check_geometry_identities(geom, q ? 500 : 10'000, 11);
      r.passed = c.three_point <= 1e-9 && c.prox <= 1e-9;
      r.detail = "three-point " + fmt(c.three_point) + ", prox " + fmt(c.prox);
    }));
  }

  results.push_back(timed("sequence inequalities", [&](CheckResult& r) {
    LemmaBounds bounds;
    if (options.corrupt_lemma)
      bounds.sqrt_sum = [](const std::vector<double>& a) {
        LemmaSides s = sqrt_sum_bound(a);
        s.rhs = *s.lower;  // claims Σ a_t/√S_t ≤ √A
        return s;
      };
    try {
      const LemmaReport rep = check_sequence_lemmas(q ? 1000 : 10'000, 7, bounds);
      r.passed = true;
      r.detail = std::to_string(rep.checks) + " inequalities on " + std::to_string(rep.sequences) +
                 " sequences";
    } catch (const LemmaViolation& e) {
      r.passed = false;
      r.detail = e.what();
    }
  }));

  results.push_back(timed("fisher RS certificate", [&](CheckResult& r) {
    const FisherMarket mkt = make_random_market(5, 3, 2.0, 8.0, 3);
    fisher_rs_certificate(mkt, 1.0);
    bool caught = false;
    try {
      fisher_rs_certificate(mkt, 0.01);
    } catch (const CertificateViolation&) {
      caught = true;
    }
    r.passed = caught;
    r.detail = caught ? "L = 1 holds, L = 0.01 rejected" : "L = 0.01 was not rejected";
  }));

  results.push_back(timed("synthetic RC certificate", [&](CheckResult& r) {
    const auto p = make_synthetic_rc_problem(3);
    const double g = *p->rc_constant();
    const SampledBound ok = sample_rc_bound(*p, g, 1000, 21);
    const SampledBound bad = sample_rc_bound(*p, g / 10.0, 1000, 21);
    r.passed = ok.holds(1e-9) && !bad.holds(1e-9);
    r.detail = "G = " + fmt(g) + ", margin " + fmt(-ok.max_violation) + "; G/10 violated by " +
               fmt(bad.max_violation);
  }));

  results.push_back(timed("fisher gradient vs finite differences", [&](CheckResult& r) {
    const FisherMarket mkt = make_random_market(10, 4, 2.0, 8.0, 5);
    const double e = fisher_gradient_fd_error(mkt, q ? 100 : 1000, 1e-6, 13);
    r.passed = e <= 1e-5;
    r.detail = "max abs error " + fmt(e);
  }));

  results.push_back(timed("PR = EGD(1)", [&](CheckResult& r) {
    std::mt19937_64 rng(17);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const FisherMarket mkt = make_random_market(6, 4, 2.0, 8.0, rng());
      const BregmanGeometry geom = BregmanGeometry::entropic_product(6, 4);
      const Point b = sample_interior_point(geom, rng);
      worst = std::max(worst, (pr_step(mkt, b) - egd_step(mkt, b, 1.0)).lpNorm<Eigen::Infinity>());
    }
    r.passed = worst <= 1e-12;
    r.detail = "max coordinate difference " + fmt(worst);
  }));

  auto adamir_battery = [&](const std::string& name, const Problem& problem, long horizon,
                            bool mutate) {
    results.push_back(timed("AdaMir certificates " + name, [&](CheckResult& r) {
      const StochasticOracle oracle(problem, {});
      const Trace tr = run(SolverSpec::parse("adamir", horizon), problem, oracle);
      if (tr.failure) throw Error(*tr.failure);
      std::vector<CertificateReport> reps = {check_step_monotone(tr), check_step_identity(tr),
                                             check_divergence_bound(tr),
                                             check_reference_optimum(tr, problem.known_optimum()->value)};
      for (long T = 10; T <= horizon; T *= 10) reps.push_back(check_regret_certificate(tr, problem, T));
      if (problem.rc_constant())
        reps.push_back(check_residual_bound(tr, rc_residual_bound(*problem.rc_constant())));
      r.passed = true;
      for (const CertificateReport& c : reps)
        if (!c.passed) {
          r.passed = false;
          r.detail += c.name + " (T=" + std::to_string(c.horizon) + ") failed; ";
        }
      if (mutate) {
        Trace bad = tr;
        for (TraceRecord& rec : bad.records) rec.rho_sq = 0.0;
        const bool flipped = !check_regret_certificate(bad, problem).passed;
        if (!flipped) r.passed = false;
        r.detail += flipped ? "zeroed residuals rejected; " : "zeroed residuals accepted; ";
      }
      if (r.passed) r.detail += std::to_string(reps.size()) + " certificates hold";
    }));
  };
  {
    const FisherProblem fisher(make_random_market(q ? 10 : 50, q ? 3 : 5, 2.0, 8.0, 0));
    adamir_battery("fisher", fisher, q ? 1000 : 10'000, false);
    results.push_back(timed("fisher reference optimum", [&](CheckResult& r) {
      const StochasticOracle oracle(fisher, {});
      r.passed = true;
      for (const char* s : {"egd:0.1", "pr"}) {
        const Trace tr = run(SolverSpec::parse(s, q ? 1000 : 5000), fisher, oracle);
        const CertificateReport c = check_reference_optimum(tr, fisher.known_optimum()->value);
        r.passed = r.passed && c.passed;
        r.detail += std::string(s) + " best " + fmt(c.lhs - fisher.known_optimum()->value) + "; ";
      }
    }));
  }
  {
    const auto rc = make_synthetic_rc_problem(3);
    adamir_battery("synthetic_rc", *rc, q ? 1000 : 10'000, true);
  }
  return results;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  const std::vector<CheckResult> results = verify_checks(options);
  std::size_t width = 0;
  for (const CheckResult& r : results) width = std::max(width, r.name.size());
  int failed = 0;
  for (const CheckResult& r : results) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.name
        << (r.passed ? "PASS  " : "FAIL  ") << std::right << std::fixed << std::setprecision(2)
        << std::setw(7) << r.seconds << "s  " << std::left << r.detail << '\n';
    if (!r.passed) ++failed;
  }
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  if (failed > 0) {
    out << "failed:";
    for (const CheckResult& r : results)
      if (!r.passed) out << ' ' << r.name << ';';
    out << '\n';
  }
  return failed == 0 ? kOk : kCheckFailed;
}

// --------------------------------------------------------------------------------------------
// Entry point.

namespace {

void add_run_options(CLI::App& cmd, RunConfig& c) {
  cmd.add_option("--problem", c.problem.kind, "fisher | synthetic_rc")->capture_default_str();
  cmd.add_option("--n", c.problem.n, "Fisher players")->capture_default_str();
  cmd.add_option("--m", c.problem.m, "Fisher goods")->capture_default_str();
  cmd.add_option("--lo", c.problem.lo, "lower utility bound")->capture_default_str();
  cmd.add_option("--hi", c.problem.hi, "upper utility bound")->capture_default_str();
  cmd.add_option("--market-seed", c.problem.market_seed, "utility generator seed")
      ->capture_default_str();
  cmd.add_option("--market", c.problem.market_file, "market JSON {n,m,seed,lo,hi,u}");
  cmd.add_option("--d", c.problem.d, "synthetic_rc dimension")->capture_default_str();
  cmd.add_option("--solvers", c.solvers, "adamir | pr | egd:<gamma> | md-decay:<gamma0>")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--T", c.horizon, "iterations")->capture_default_str();
  cmd.add_option("--sigma", c.sigma, "noise bound (dual norm)")->capture_default_str();
  cmd.add_option("--noise", c.noise, "none | sphere | resample (default: sphere iff sigma > 0)");
  cmd.add_option("--rel-width", c.rel_width, "utility perturbation width for resample")
      ->capture_default_str();
  cmd.add_option("--gamma-init", c.gamma_init, "step of the prox move that produces X1")
      ->capture_default_str();
  cmd.add_option("--out", c.out_dir, std::string("output directory (default $") + kOutDirEnv +
                                         " or ./adamir_out)");
  cmd.add_option("--jobs", c.jobs, "parallel runs")->capture_default_str();
  cmd.add_flag("--wallclock", c.wallclock, "record elapsed time (breaks byte-identical CSVs)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AdaMir: adaptive mirror descent experiments"};
  app.set_config("--config", "", "TOML/INI file with [run] / [sweep] sections; flags override it");
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App* run_cmd = app.add_subcommand("run", "run each solver for each seed");
  add_run_options(*run_cmd, run_cfg);
  run_cmd->add_option("--seeds", run_cfg.seeds, "oracle seeds")->delimiter(',')->capture_default_str();

  RunConfig sweep_cfg;
  long sweep_seeds = 50;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run seeds 1..S and aggregate");
  add_run_options(*sweep_cmd, sweep_cfg);
  sweep_cmd->add_option("--seeds", sweep_seeds, "number of seeds S")->capture_default_str();

  VerifyOptions verify_opts;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the certificate battery");
  verify_cmd->add_flag("--quick", verify_opts.quick, "smaller samples");
  verify_cmd->add_flag("--corrupt-lemma", verify_opts.corrupt_lemma)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (*run_cmd) return cmd_run(run_cfg, std::cout, std::cerr);
  if (*sweep_cmd) return cmd_sweep(sweep_cfg, sweep_seeds, std::cout, std::cerr);
  return cmd_verify(verify_opts, std::cout);
}

}  // namespace adamir::cli
