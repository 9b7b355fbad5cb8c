#include "degroot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "degroot/graph.hpp"
#include "degroot/rng.hpp"

namespace degroot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Static strided partition: slot i goes to thread i % threads, so results are
// a pure function of the index and the reduction order never changes.
template <typename F>
void parallel_for(int count, int threads, F&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&fn, t, count, threads] {
      for (int i = t; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  if (n == 0) return kNaN;
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct TrialStats {
  double mean = kNaN;
  double stddev = kNaN;
  int failed = 0;
  std::vector<double> values;  // successes, in trial order
};

TrialStats collect(const std::vector<double>& slot, const std::vector<char>& ok) {
  TrialStats s;
  for (size_t j = 0; j < slot.size(); ++j) {
    if (ok[j])
      s.values.push_back(slot[j]);
    else
      ++s.failed;
  }
  if (s.values.empty()) return s;
  double sum = 0.0;
  for (double v : s.values) sum += v;
  s.mean = sum / static_cast<double>(s.values.size());
  if (s.values.size() >= 2) {
    double sq = 0.0;
    for (double v : s.values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.values.size() - 1));
  } else {
    s.stddev = 0.0;
  }
  return s;
}

double expected_lambda2(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                        bool full) {
  if (full)
    return lambda2_signed(build_learning_matrix(expected_adjacency(spec.block), phi));
  auto f = reduce_block_matrix(spec, phi);
  return eigen_symmetrized(f.matrix, f.diag1, f.diag2).lambda2;
}

// Random-graph subdominant magnitude; reports failure (disconnected draw or a
// construction error such as an isolated vertex at negative alpha) via ok.
void run_trials(const BlockModelSpec& block, const WeightFunction& phi, int trials,
                int threads, const std::function<std::uint64_t(int)>& sample_key,
                const std::function<Graph(Graph, int)>& post,
                std::vector<double>& slot, std::vector<char>& ok) {
  slot.assign(trials, kNaN);
  ok.assign(trials, 0);
  parallel_for(trials, threads, [&](int j) {
    try {
      Graph g = sample_adjacency(block, sample_key(j));
      if (post) g = post(std::move(g), j);
      if (!is_connected(g)) return;
      auto T = build_learning_matrix(g, phi);
      slot[j] = std::abs(lambda2_signed(T));
      ok[j] = 1;
    } catch (const std::exception&) {
      // leave ok[j] = 0
    }
  });
}

std::string interval_str(const AlphaInterval& iv) {
  std::ostringstream os;
  os << (iv.lo_closed ? '[' : '(');
  if (std::isinf(iv.lo))
    os << "-inf";
  else
    os << iv.lo;
  os << ", ";
  if (std::isinf(iv.hi))
    os << "inf";
  else
    os << iv.hi;
  os << (iv.hi_closed ? ']' : ')');
  return os.str();
}

std::string region_str(const RegimeClassification& rc) {
  std::ostringstream os;
  os << "case " << rc.case_id << ": ";
  for (size_t i = 0; i < rc.decreasing_intervals.size(); ++i) {
    if (i) os << " U ";
    os << interval_str(rc.decreasing_intervals[i]);
  }
  return os.str();
}

SweepRow sweep_row(const EliteGrassrootsSpec& spec, const WeightFunction& phi_a,
                   double alpha, bool numeric_full) {
  SweepRow row;
  row.alpha = alpha;
  row.lambda2_closed = kNaN;
  row.lambda2_numeric = kNaN;
  row.abs_gap = kNaN;
  row.lambda2_random_mean = kNaN;
  row.lambda2_random_std = kNaN;
  try {
    auto closed = lambda2_closed_form(spec, phi_a);
    row.case_id = closed.case_id;
    row.branch = closed.branch;
    row.lambda2_closed = closed.lambda2;
    row.lambda2_numeric = expected_lambda2(spec, phi_a, numeric_full);
    row.abs_gap = std::abs(row.lambda2_closed - row.lambda2_numeric);
  } catch (const std::exception& ex) {
    row.error = ex.what();
  }
  return row;
}

}  // namespace

void SweepConfig::validate() const {
  if (trials < 0) throw std::invalid_argument("trials must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (alpha_grid.empty()) throw std::invalid_argument("alpha_grid must be nonempty");
  for (size_t i = 1; i < alpha_grid.size(); ++i)
    if (!(alpha_grid[i] > alpha_grid[i - 1]))
      throw std::invalid_argument("alpha_grid must be strictly increasing");
  for (double a : alpha_grid)
    if (!std::isfinite(a)) throw std::invalid_argument("alpha_grid entries must be finite");
}

std::vector<SweepRow> alpha_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  rows.reserve(cfg.alpha_grid.size());
  for (size_t i = 0; i < cfg.alpha_grid.size(); ++i) {
    const double alpha = cfg.alpha_grid[i];
    const auto phi_a = cfg.phi.with_alpha(alpha);
    SweepRow row = sweep_row(cfg.spec, phi_a, alpha, cfg.numeric_full);
    row.trials = cfg.trials;
    if (cfg.trials > 0) {
      const std::uint64_t k_alpha = rng::derive(cfg.seed, i);
      std::vector<double> slot;
      std::vector<char> ok;
      run_trials(
          cfg.spec.block, phi_a, cfg.trials, cfg.threads,
          [&](int j) { return rng::derive(k_alpha, 2 * static_cast<std::uint64_t>(j)); },
          nullptr, slot, ok);
      auto stats = collect(slot, ok);
      row.lambda2_random_mean = stats.mean;
      row.lambda2_random_std = stats.stddev;
      row.failed = stats.failed;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  bool with_trials = false;
  for (const auto& r : rows) with_trials = with_trials || r.trials > 0;
  out << "alpha,case_id,branch,lambda2_closed,lambda2_numeric,abs_gap";
  if (with_trials) out << ",lambda2_random_mean,lambda2_random_std,trials,failed";
  out << "\n";
  for (const auto& r : rows) {
    out << fmt(r.alpha) << ',' << r.case_id << ',' << r.branch << ','
        << fmt(r.lambda2_closed) << ',' << fmt(r.lambda2_numeric) << ','
        << fmt(r.abs_gap);
    if (with_trials)
      out << ',' << fmt(r.lambda2_random_mean) << ',' << fmt(r.lambda2_random_std)
          << ',' << r.trials << ',' << r.failed;
    out << "\n";
  }
}

std::vector<ConcentrationRow> concentration_study(const EliteGrassrootsSpec& base,
                                                  const WeightFunction& phi,
                                                  const std::vector<int>& n_grid,
                                                  int trials, std::uint64_t seed,
                                                  int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("n_grid must be nonempty");
  for (size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly increasing");

  const double frac2 = static_cast<double>(base.n2) / static_cast<double>(base.n());
  std::vector<ConcentrationRow> rows;
  for (size_t idx = 0; idx < n_grid.size(); ++idx) {
    const int n = n_grid[idx];
    const int n2 = std::max(1, static_cast<int>(std::lround(frac2 * n)));
    const int n1 = n - (base.m - 1) * n2;
    if (n1 < 1 || n1 == n2)
      throw std::invalid_argument("n_grid value " + std::to_string(n) +
                                  " cannot preserve the base group fractions");
    auto spec = elite_grassroots_spec(n1, n2, base.m, base.p, base.q);
    const double star = lambda2_signed(
        build_learning_matrix(expected_adjacency(spec.block), phi));

    std::vector<double> slot(trials, kNaN);
    std::vector<char> ok(trials, 0);
    const std::uint64_t k_n = rng::derive(seed, idx);
    parallel_for(trials, threads, [&](int j) {
      try {
        Graph g = sample_adjacency(spec.block, rng::derive(k_n, j));
        if (!is_connected(g)) return;
        auto T = build_learning_matrix(g, phi);
        slot[j] = std::abs(lambda2_signed(T) - star);
        ok[j] = 1;
      } catch (const std::exception&) {
      }
    });

    ConcentrationRow row;
    row.n = n;
    row.n1 = n1;
    row.n2 = n2;
    row.trials = trials;
    std::vector<double> gaps;
    for (int j = 0; j < trials; ++j) {
      if (ok[j])
        gaps.push_back(slot[j]);
      else
        ++row.failed;
    }
    row.median_abs_gap = median_of(gaps);
    const double tau = check_assumptions(spec.block).tau_n;
    row.rate_scale = std::sqrt(std::log(static_cast<double>(n))) /
                     (tau * std::sqrt(static_cast<double>(n)));
    row.ratio = row.median_abs_gap / row.rate_scale;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_concentration_csv(std::ostream& out, const std::vector<ConcentrationRow>& rows) {
  out << "n,n1,n2,trials,failed,median_abs_gap,rate_scale,ratio\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.n1 << ',' << r.n2 << ',' << r.trials << ',' << r.failed
        << ',' << fmt(r.median_abs_gap) << ',' << fmt(r.rate_scale) << ','
        << fmt(r.ratio) << "\n";
}

SpeedupResult speedup_detection(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                                double alpha0, double alpha1, int trials,
                                std::uint64_t seed, int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(alpha0 <= alpha1))
    throw std::invalid_argument("alpha0 must not exceed alpha1");
  auto rc = classify_regime(spec, phi);
  for (double a : {alpha0, alpha1}) {
    if (!rc.contains(a)) {
      std::ostringstream os;
      os << "alpha = " << a << " lies outside the decreasing region (" << region_str(rc)
         << "); the speedup comparison only applies inside it";
      throw std::domain_error(os.str());
    }
  }

  const auto phi0 = phi.with_alpha(alpha0);
  const auto phi1 = phi.with_alpha(alpha1);
  std::vector<char> win(trials, 0);
  std::vector<char> ok(trials, 0);
  parallel_for(trials, threads, [&](int j) {
    try {
      Graph g = sample_adjacency(spec.block, rng::derive(seed, j));
      if (!is_connected(g)) return;
      const double m0 = std::abs(lambda2_signed(build_learning_matrix(g, phi0)));
      const double m1 = std::abs(lambda2_signed(build_learning_matrix(g, phi1)));
      win[j] = m0 > m1 ? 1 : 0;
      ok[j] = 1;
    } catch (const std::exception&) {
    }
  });

  SpeedupResult res;
  res.trials = trials;
  for (int j = 0; j < trials; ++j) {
    if (!ok[j])
      ++res.failed;
    else if (win[j])
      ++res.successes;
  }
  const int valid = trials - res.failed;
  if (valid > 0) {
    const double z = 1.959963984540054;  // 95% two-sided normal quantile
    const double nn = valid;
    const double ph = static_cast<double>(res.successes) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (ph + z * z / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
    res.fraction = ph;
    // Wilson interval; analytically it always contains ph, so clamp away the
    // last-ulp rounding that can push an endpoint across it at ph = 0 or 1.
    res.ci_low = std::min(std::max(0.0, center - half), ph);
    res.ci_high = std::max(std::min(1.0, center + half), ph);
  }
  return res;
}

void write_speedup_csv(std::ostream& out, const SpeedupResult& r, double alpha0,
                       double alpha1) {
  out << "alpha0,alpha1,trials,successes,failed,fraction,ci_low,ci_high\n";
  out << fmt(alpha0) << ',' << fmt(alpha1) << ',' << r.trials << ',' << r.successes
      << ',' << r.failed << ',' << fmt(r.fraction) << ',' << fmt(r.ci_low) << ','
      << fmt(r.ci_high) << "\n";
}

bool monotonicity_ok(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                     const std::vector<double>& alpha_grid, double exclusion,
                     double tol) {
  auto rc = classify_regime(spec, phi);
  const double h = 1e-4;
  auto abs_l2 = [&](double a) {
    return lambda2_closed_form(spec, phi.with_alpha(a)).abs_lambda2;
  };
  for (double a : alpha_grid) {
    if (std::abs(a - rc.alpha_threshold) < exclusion) continue;
    if (rc.secondary_threshold && std::abs(a - *rc.secondary_threshold) < exclusion)
      continue;
    const double slope = (abs_l2(a + h) - abs_l2(a - h)) / (2.0 * h);
    if (rc.contains(a)) {
      if (slope > tol) return false;
    } else {
      if (slope < -tol) return false;
    }
  }
  return true;
}

PerturbTable perturbation_study(const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                                const std::vector<double>& alpha_grid,
                                const std::vector<double>& delta_grid, int trials,
                                std::uint64_t seed, int threads,
                                const NoiseLaw& noise) {
  SweepConfig probe;
  probe.spec = spec;
  probe.phi = phi;
  probe.alpha_grid = alpha_grid;
  probe.trials = trials;
  probe.threads = threads;
  probe.validate();
  if (delta_grid.empty()) throw std::invalid_argument("delta_grid must be nonempty");
  for (double d : delta_grid)
    if (!(d >= 0.0 && d <= 1.0))
      throw std::invalid_argument("delta values must lie in [0, 1]");

  PerturbTable table;
  for (size_t di = 0; di < delta_grid.size(); ++di) {
    const double delta = delta_grid[di];
    // mixing toward i.i.d. noise keeps the two-parameter block structure
    const double pt = (1.0 - delta) * spec.p + delta * noise.mean;
    const double qt = (1.0 - delta) * spec.q + delta * noise.mean;
    auto tilted = elite_grassroots_spec(spec.n1, spec.n2, spec.m, pt, qt);

    PerturbSummary summary;
    summary.delta = delta;
    auto rc = classify_regime(tilted, phi);
    summary.case_id = rc.case_id;
    summary.threshold = rc.alpha_threshold;
    summary.secondary_threshold = rc.secondary_threshold;
    summary.monotonic_ok = monotonicity_ok(tilted, phi, alpha_grid);
    table.summaries.push_back(summary);

    for (size_t i = 0; i < alpha_grid.size(); ++i) {
      const double alpha = alpha_grid[i];
      const auto phi_a = phi.with_alpha(alpha);
      SweepRow row = sweep_row(tilted, phi_a, alpha, false);
      row.trials = trials;
      if (trials > 0) {
        const std::uint64_t k_alpha = rng::derive(seed, i);
        std::vector<double> slot;
        std::vector<char> ok;
        run_trials(
            spec.block, phi_a, trials, threads,
            [&](int j) { return rng::derive(k_alpha, 2 * static_cast<std::uint64_t>(j)); },
            [&](Graph g, int j) {
              PerturbationSpec pert;
              pert.delta = delta;
              pert.noise = noise;
              pert.seed = rng::derive(
                  rng::derive(k_alpha, 2 * static_cast<std::uint64_t>(j) + 1), di);
              return perturb(g, pert);
            },
            slot, ok);
        auto stats = collect(slot, ok);
        row.lambda2_random_mean = stats.mean;
        row.lambda2_random_std = stats.stddev;
        row.failed = stats.failed;
      }
      table.rows.push_back(PerturbRow{delta, std::move(row)});
    }
  }
  return table;
}

void write_perturb_csv(std::ostream& out, const PerturbTable& table) {
  bool with_trials = false;
  for (const auto& r : table.rows) with_trials = with_trials || r.row.trials > 0;
  out << "delta,alpha,case_id,branch,lambda2_closed,lambda2_numeric,abs_gap";
  if (with_trials) out << ",lambda2_random_mean,lambda2_random_std,trials,failed";
  out << "\n";
  for (const auto& pr : table.rows) {
    const auto& r = pr.row;
    out << fmt(pr.delta) << ',' << fmt(r.alpha) << ',' << r.case_id << ',' << r.branch
        << ',' << fmt(r.lambda2_closed) << ',' << fmt(r.lambda2_numeric) << ','
        << fmt(r.abs_gap);
    if (with_trials)
      out << ',' << fmt(r.lambda2_random_mean) << ',' << fmt(r.lambda2_random_std)
          << ',' << r.trials << ',' << r.failed;
    out << "\n";
  }
}

ProbeReport slowest_convergence_probe(const LearningMatrix& T, const Eigen::VectorXd& worst,
                                      int samples, int t, std::uint64_t seed) {
  if (worst.size() != T.n)
    throw std::invalid_argument("worst vector length does not match the matrix");
  if (std::abs(worst.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("worst vector must have unit norm");
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  if (samples < 0) throw std::invalid_argument("samples must be >= 0");

  const Eigen::ArrayXd w = T.diag1.array() * T.diag2.array();
  const Eigen::VectorXd cons = consensus_from_matrix(T);
  auto wnorm = [&](const Eigen::VectorXd& x) {
    return std::sqrt((x.array().square() * w).sum());
  };
  // relative decay: weighted distance at time k over the distance at time 0,
  // so unit vectors with different overlaps against consensus are comparable
  auto decay_curve = [&](const Eigen::VectorXd& b0, std::vector<double>* curve) {
    const double limit = cons.dot(b0);
    Eigen::VectorXd dev = (b0.array() - limit).matrix();
    const double d0 = wnorm(dev);
    // vectors along the consensus direction have only rounding residue left
    const bool live = d0 > 1e-12 * wnorm(b0);
    double last = live ? 1.0 : 0.0;
    if (curve) curve->push_back(last);
    for (int k = 1; k <= t; ++k) {
      dev = T.entries * dev;  // (T - T_inf) acts as T on the deviation
      last = live ? wnorm(dev) / d0 : 0.0;
      if (curve) curve->push_back(last);
    }
    return last;
  };

  ProbeReport report;
  report.samples = samples;
  for (int k = 0; k <= t; ++k) report.times.push_back(k);
  const double dw = decay_curve(worst, &report.worst_distance);

  double max_sample = 0.0;
  int beaten = 0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd b0(T.n);
    const std::uint64_t key = rng::derive(seed, s);
    for (int i = 0; i < T.n; ++i) b0[i] = rng::normal(key, i);
    b0.normalize();
    const double ds = decay_curve(b0, nullptr);
    report.sample_distance.push_back(ds);
    max_sample = std::max(max_sample, ds);
    if (ds > dw + 1e-12 + 1e-9 * dw) ++beaten;
  }
  report.rank = 1 + beaten;
  if (samples == 0)
    report.max_ratio = 0.0;
  else if (dw > 0.0)
    report.max_ratio = max_sample / dw;
  else
    report.max_ratio = max_sample > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return report;
}

void write_probe_csv(std::ostream& out, const ProbeReport& report) {
  out << "series,index,distance\n";
  for (size_t k = 0; k < report.times.size(); ++k)
    out << "worst," << report.times[k] << ',' << fmt(report.worst_distance[k]) << "\n";
  for (size_t s = 0; s < report.sample_distance.size(); ++s)
    out << "sample," << s << ',' << fmt(report.sample_distance[s]) << "\n";
}

}  // namespace degroot
