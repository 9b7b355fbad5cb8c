#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "degroot/block_model.hpp"
#include "degroot/learning.hpp"
#include "degroot/spectral.hpp"
#include "degroot/weight_function.hpp"

namespace degroot {

// One alpha-sweep: closed-form and numeric subdominant eigenvalues of the
// expected matrix on a fixed alpha grid, plus optional Monte Carlo trials on
// sampled graphs. Trials are keyed by (alpha index, trial index) so results
// are identical for any thread count.
struct SweepConfig {
  EliteGrassrootsSpec spec;
  WeightFunction phi = WeightFunction::power(0.0);  // family; exponent set per grid point
  std::vector<double> alpha_grid;                   // strictly increasing
  int trials = 0;                                   // 0 = expectation-only
  std::uint64_t seed = 0;
  int threads = 1;
  bool numeric_full = false;  // true: eigensolve the n x n expected matrix;
                              // false: the m x m reduction (same spectrum, fast)
  NormKind norm = NormKind::d_weighted;  // carried along for distance probes
  std::vector<int> probe_times;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct SweepRow {
  double alpha = 0.0;
  int case_id = 0;
  std::string branch;
  double lambda2_closed = 0.0;
  double lambda2_numeric = 0.0;
  double abs_gap = 0.0;  // |closed - numeric|
  // Magnitude statistics over successful random trials; NaN when trials == 0.
  double lambda2_random_mean = 0.0;
  double lambda2_random_std = 0.0;
  int trials = 0;
  int failed = 0;          // disconnected draws or construction errors
  std::string error;       // nonempty when the deterministic part itself failed
};

std::vector<SweepRow> alpha_sweep(const SweepConfig& cfg);

// Columns: alpha, case_id, branch, lambda2_closed, lambda2_numeric, abs_gap
// and, when any row carries trials, lambda2_random_mean, lambda2_random_std,
// trials, failed.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ConcentrationRow {
  int n = 0;
  int n1 = 0;
  int n2 = 0;
  int trials = 0;
  int failed = 0;
  double median_abs_gap = 0.0;  // median over trials of |lambda2(T) - lambda2(T*)|
  double rate_scale = 0.0;      // sqrt(log n) / (tau_n sqrt n)
  double ratio = 0.0;           // median_abs_gap / rate_scale
};

// Rescales `base` to each n in n_grid (group fractions and p, q held fixed)
// and measures how fast the sampled subdominant eigenvalue concentrates
// around the expected one.
std::vector<ConcentrationRow> concentration_study(const EliteGrassrootsSpec& base,
                                                  const WeightFunction& phi,
                                                  const std::vector<int>& n_grid,
                                                  int trials, std::uint64_t seed,
                                                  int threads = 1);

void write_concentration_csv(std::ostream& out, const std::vector<ConcentrationRow>& rows);

struct SpeedupResult {
  double fraction = 0.0;  // trials where |lambda2(alpha0)| > |lambda2(alpha1)|
  double ci_low = 0.0;    // Wilson 95% interval
  double ci_high = 0.0;
  int trials = 0;
  int successes = 0;
  int failed = 0;
};

// Both alphas must fall in the decreasing region of classify_regime; then on
// each sampled graph the higher exponent should contract strictly faster.
SpeedupResult speedup_detection(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                                double alpha0, double alpha1, int trials,
                                std::uint64_t seed, int threads = 1);

void write_speedup_csv(std::ostream& out, const SpeedupResult& r,
                       double alpha0, double alpha1);

struct PerturbRow {
  double delta = 0.0;
  SweepRow row;
};

struct PerturbSummary {
  double delta = 0.0;
  int case_id = 0;
  double threshold = 0.0;  // recomputed from the perturbed expected degrees
  std::optional<double> secondary_threshold;
  bool monotonic_ok = false;  // finite-difference sign checks on the grid
};

struct PerturbTable {
  std::vector<PerturbRow> rows;
  std::vector<PerturbSummary> summaries;
};

// Repeats the sweep with every weight mixed toward i.i.d. noise:
// (1-delta) A + delta eps. The expectation stays a two-parameter block model
// with p~ = (1-delta) p + delta mean, q~ = (1-delta) q + delta mean, so the
// closed forms apply verbatim with perturbed parameters.
PerturbTable perturbation_study(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                                const std::vector<double>& alpha_grid,
                                const std::vector<double>& delta_grid, int trials,
                                std::uint64_t seed, int threads = 1,
                                const NoiseLaw& noise = {});

void write_perturb_csv(std::ostream& out, const PerturbTable& table);

// Finite-difference monotonicity verdict reused by perturbation_study and the
// regime acceptance checks: slope of |lambda2| is <= tol inside the
// decreasing region and >= -tol outside, skipping threshold neighborhoods.
bool monotonicity_ok(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                     const std::vector<double>& alpha_grid, double exclusion = 1e-3,
                     double tol = 1e-10);

struct ProbeReport {
  std::vector<int> times;             // 0..t
  std::vector<double> worst_distance;  // weighted-norm distance at each time
  std::vector<double> sample_distance;  // each probe's distance at the final time
  int rank = 0;       // 1 = the worst vector beats every sampled probe
  double max_ratio = 0.0;  // max sample distance / worst distance (inf if worst is 0)
  int samples = 0;
};

// Checks the extremal property of a candidate worst-case belief vector by
// racing it against random unit probes under the weighted norm.
ProbeReport slowest_convergence_probe(const LearningMatrix& T, const Eigen::VectorXd& worst,
                                      int samples, int t, std::uint64_t seed);

void write_probe_csv(std::ostream& out, const ProbeReport& report);

}  // namespace degroot
