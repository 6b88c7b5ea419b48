#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adamir/oracle.hpp"
#include "adamir/problems.hpp"

namespace adamir::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kSolverAbort = 3 };

/// Name of the environment variable that sets the default output directory.
inline constexpr const char* kOutDirEnv = "ADAMIR_OUT_DIR";

struct ProblemConfig {
  std::string kind = "fisher";  ///< fisher | synthetic_rc
  long n = 50;
  long m = 5;
  double lo = 2.0;
  double hi = 8.0;
  std::uint64_t market_seed = 0;
  std::string market_file;  ///< optional market JSON, overrides n/m/lo/hi/seed
  long d = 3;
};

struct RunConfig {
  ProblemConfig problem;
  std::vector<std::string> solvers{"adamir"};
  long horizon = 1000;
  double sigma = 0.0;
  std::string noise;  ///< empty: sphere when sigma > 0, none otherwise
  double rel_width = 0.1;
  std::vector<std::uint64_t> seeds{1};
  double gamma_init = 1e-2;
  std::string out_dir;
  int jobs = 1;
  bool wallclock = false;
};

std::unique_ptr<Problem> build_problem(const ProblemConfig& config);
OracleConfig oracle_config(const RunConfig& config, std::uint64_t seed);
/// `--out`, else $ADAMIR_OUT_DIR, else ./adamir_out.
std::string resolve_out_dir(const std::string& flag);

std::string market_to_json(const FisherMarket& mkt);
FisherMarket market_from_json(const std::string& text);

/// Every (solver × seed) pair; one CSV per run plus summary.json.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
/// cmd_run over seeds 1..S plus stats.json with per-solver means and 95% intervals.
int cmd_sweep(RunConfig config, long seeds, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  bool quick = false;
  bool corrupt_lemma = false;  ///< test fixture: replaces one inequality by a false one
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CheckResult> verify_checks(const VerifyOptions& options);
int cmd_verify(const VerifyOptions& options, std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int main(int argc, char** argv);

}  // namespace adamir::cli
