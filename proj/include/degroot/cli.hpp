#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "degroot/block_model.hpp"
#include "degroot/experiments.hpp"
#include "degroot/weight_function.hpp"

namespace degroot {

// Fully validated run description. Every numeric field is range-checked at
// parse time; `run` only dispatches and writes artifacts.
struct RunConfig {
  std::string subcommand;  // sweep | concentration | speedup | perturb | audit | probe

  int n1 = 0;
  int n2 = -1;  // resolved from --n2, or derived from --n
  int m = 0;
  double p = 0.0;
  double q = 0.0;
  std::string family = "power";

  std::string alpha_spec;          // sweep/perturb: original start:stop:step text
  std::vector<double> alpha_grid;  // parsed form
  double alpha = 1.0;              // concentration/probe exponent
  double alpha0 = 0.0, alpha1 = 0.0;  // speedup pair

  std::string n_grid_spec;  // concentration: comma-separated sizes
  std::vector<int> n_grid;
  std::string deltas_spec;  // perturb: comma-separated mixing weights
  std::vector<double> deltas;

  int trials = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  int samples = 200;  // probe
  int t = 10;         // probe horizon
  std::string norm = "d_weighted";
  bool svg = true;           // sweep plot emission
  bool numeric_full = false;
  double density_threshold = 5.0;  // audit
  std::string out_dir = ".";       // flag > DEGROOT_OUT > "."

  EliteGrassrootsSpec spec() const;
  WeightFunction phi(double exponent) const;  // family dispatch
};

// Parse/usage failures carry exit code 2, runtime failures 1, help text 0.
struct CliError : std::runtime_error {
  int exit_code;
  explicit CliError(const std::string& msg, int code = 2)
      : std::runtime_error(msg), exit_code(code) {}
};

// args excludes the program name. Honors `--config FILE` (flat key=value
// lines mirroring the flags; explicit flags override file entries) and the
// DEGROOT_OUT environment variable.
RunConfig parse_config(const std::vector<std::string>& args);

// Inclusive start:stop:step grid generated by integer index.
std::vector<double> parse_alpha_grid(const std::string& text);

// Sorted key=value lines; feeding the file back through --config reproduces
// the run byte-for-byte.
std::string manifest_text(const RunConfig& cfg);

// Seam for tests: run() never computes numbers itself, it routes through
// these callables and serializes whatever they return.
struct ExperimentHooks {
  std::function<std::vector<SweepRow>(const SweepConfig&)> sweep;
  std::function<std::vector<ConcentrationRow>(const EliteGrassrootsSpec&,
                                              const WeightFunction&,
                                              const std::vector<int>&, int,
                                              std::uint64_t, int)>
      concentration;
  std::function<SpeedupResult(const EliteGrassrootsSpec&, const WeightFunction&, double,
                              double, int, std::uint64_t, int)>
      speedup;
  std::function<PerturbTable(const EliteGrassrootsSpec&, const WeightFunction&,
                             const std::vector<double>&, const std::vector<double>&,
                             int, std::uint64_t, int)>
      perturb;
  std::function<ProbeReport(const EliteGrassrootsSpec&, const WeightFunction&, int, int,
                            std::uint64_t)>
      probe;
  std::function<AssumptionReport(const BlockModelSpec&, double)> audit;
};

ExperimentHooks default_hooks();

// Writes the subcommand's CSV plus manifest.txt into cfg.out_dir, prints a
// short summary to `out`, and returns 0 (clean) or 1 (failed trials/rows).
int run(const RunConfig& cfg, std::ostream& out,
        const ExperimentHooks& hooks = default_hooks());

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace degroot
