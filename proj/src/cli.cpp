#include "degroot/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "degroot/graph.hpp"
#include "degroot/learning.hpp"
#include "degroot/spectral.hpp"
#include "degroot/svg_plot.hpp"
#include "degroot/version.hpp"

namespace degroot {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Console summaries; files keep the full-precision fmt.
std::string human(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& field, const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw CliError(field + ": cannot parse number '" + trim(text) + "'");
  }
}

int to_int(const std::string& field, const std::string& text) {
  try {
    size_t used = 0;
    const int v = std::stoi(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw CliError(field + ": cannot parse integer '" + trim(text) + "'");
  }
}

struct FileConfig {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> kv;
};

FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot read config file: " + path);
  FileConfig fc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw CliError("config file " + path + " line " + std::to_string(lineno) +
                     " is not key=value: '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "subcommand")
      fc.subcommand = value;
    else if (key == "version")
      continue;  // informational; not a flag
    else
      fc.kv.emplace_back(key, value);
  }
  return fc;
}

std::string key_to_flag(const std::string& key) {
  std::string flag = "--";
  for (char c : key) flag += c == '_' ? '-' : c;
  return flag;
}

bool looks_numeric_value(const std::string& tok) {
  return tok.size() >= 2 && tok[0] == '-' &&
         (std::isdigit(static_cast<unsigned char>(tok[1])) || tok[1] == '.');
}

}  // namespace

EliteGrassrootsSpec RunConfig::spec() const {
  return elite_grassroots_spec(n1, n2, m, p, q);
}

WeightFunction RunConfig::phi(double exponent) const {
  if (family != "power") throw std::invalid_argument("unknown weight family: " + family);
  return WeightFunction::power(exponent);
}

std::vector<double> parse_alpha_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3)
    throw CliError("alpha: grid must be start:stop:step, got '" + text + "'");
  const double lo = to_double("alpha start", parts[0]);
  const double hi = to_double("alpha stop", parts[1]);
  const double step = to_double("alpha step", parts[2]);
  if (!(step > 0.0)) throw CliError("alpha: step must be positive");
  if (hi < lo) throw CliError("alpha: stop must be >= start");
  // generated by integer index so the end point is hit exactly when step
  // divides the range, with no accumulated addition error
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (int i = 0; i < count; ++i) grid.push_back(lo + i * step);
  return grid;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  // peel --config before CLI11 sees anything
  std::vector<std::string> user;
  std::optional<std::string> config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw CliError("--config requires a file path");
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      user.push_back(a);
    }
  }

  std::string user_sub;
  if (!user.empty() && !user[0].empty() && user[0][0] != '-') user_sub = user[0];

  // file entries first, explicit flags after: TakeLast makes flags win
  std::vector<std::string> final_args;
  if (config_path) {
    const auto fc = load_config_file(*config_path);
    if (!user_sub.empty() && !fc.subcommand.empty() && user_sub != fc.subcommand)
      throw CliError("config file subcommand '" + fc.subcommand +
                     "' conflicts with command line subcommand '" + user_sub + "'");
    const std::string sub = user_sub.empty() ? fc.subcommand : user_sub;
    if (sub.empty())
      throw CliError("no subcommand given on the command line or in the config file");
    final_args.push_back(sub);
    for (const auto& [k, v] : fc.kv) final_args.push_back(key_to_flag(k) + "=" + v);
    for (size_t i = user_sub.empty() ? 0 : 1; i < user.size(); ++i)
      final_args.push_back(user[i]);
  } else {
    final_args = user;
  }

  // "--alpha -10:10:0.25" -> "--alpha=-10:10:0.25" so values that start with
  // a minus sign are never mistaken for options
  std::vector<std::string> merged;
  for (size_t i = 0; i < final_args.size(); ++i) {
    const std::string& tok = final_args[i];
    if (tok.rfind("--", 0) == 0 && tok.find('=') == std::string::npos &&
        i + 1 < final_args.size() && looks_numeric_value(final_args[i + 1])) {
      merged.push_back(tok + "=" + final_args[i + 1]);
      ++i;
    } else {
      merged.push_back(tok);
    }
  }

  RunConfig cfg;
  cfg.trials = -1;  // sentinel: per-subcommand default applied below
  int n_total = -1;
  std::string out_flag;

  CLI::App app{"degree-weighted social learning experiments"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_family) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--n1", cfg.n1, "size of group 1")->required();
    sub->add_option("--n2", cfg.n2, "size of each of the other m-1 groups");
    sub->add_option("--n", n_total, "total vertex count (alternative to --n2)");
    sub->add_option("--m", cfg.m, "number of groups")->required();
    sub->add_option("--p", cfg.p, "within-group link probability")->required();
    sub->add_option("--q", cfg.q, "between-group link probability")->required();
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--out", out_flag, "output directory (overrides DEGROOT_OUT)");
    if (with_family)
      sub->add_option("--family", cfg.family, "weight function family (power)");
  };

  auto* sweep = app.add_subcommand("sweep", "lambda2 versus alpha, closed form and samples");
  add_common(sweep, true);
  sweep->add_option("--alpha", cfg.alpha_spec, "alpha grid start:stop:step")->required();
  sweep->add_option("--trials", cfg.trials, "random graphs per alpha (0 = expectation only)");
  sweep->add_option("--norm", cfg.norm, "distance norm: d_weighted | euclidean");
  sweep->add_flag("--full-numeric", cfg.numeric_full,
                  "eigensolve the full n x n expected matrix instead of the m x m reduction");
  sweep->add_flag("--svg,!--no-svg", cfg.svg, "write sweep.svg");

  auto* conc = app.add_subcommand("concentration", "eigenvalue gap versus network size");
  add_common(conc, true);
  conc->add_option("--alpha", cfg.alpha, "weight exponent");
  conc->add_option("--n-grid", cfg.n_grid_spec, "comma-separated network sizes")->required();
  conc->add_option("--trials", cfg.trials, "random graphs per size");

  auto* speed = app.add_subcommand("speedup", "paired comparison of two exponents");
  add_common(speed, true);
  speed->add_option("--alpha0", cfg.alpha0, "baseline exponent")->required();
  speed->add_option("--alpha1", cfg.alpha1, "larger exponent")->required();
  speed->add_option("--trials", cfg.trials, "sampled graphs");

  auto* pert = app.add_subcommand("perturb", "sweep repeated under noise mixing");
  add_common(pert, true);
  pert->add_option("--alpha", cfg.alpha_spec, "alpha grid start:stop:step")->required();
  pert->add_option("--deltas", cfg.deltas_spec, "comma-separated mixing weights in [0,1]")
      ->required();
  pert->add_option("--trials", cfg.trials, "random graphs per alpha");

  auto* probe = app.add_subcommand("probe", "race the worst-case beliefs against random probes");
  add_common(probe, true);
  probe->add_option("--alpha", cfg.alpha, "weight exponent");
  probe->add_option("--samples", cfg.samples, "random probe count");
  probe->add_option("--t", cfg.t, "time horizon");

  auto* audit = app.add_subcommand("audit", "report standing-assumption proxies");
  add_common(audit, false);
  audit->add_option("--density-threshold", cfg.density_threshold,
                    "pass threshold for tau_n / sqrt(log n / n)");

  try {
    std::reverse(merged.begin(), merged.end());
    app.parse(std::move(merged));
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    throw CliError(subs.empty() ? app.help() : subs[0]->help(), 0);
  } catch (const CLI::ParseError& e) {
    throw CliError(e.what(), 2);
  }

  cfg.subcommand = app.get_subcommands()[0]->get_name();

  if (!out_flag.empty()) {
    cfg.out_dir = out_flag;
  } else if (const char* env = std::getenv("DEGROOT_OUT"); env && *env) {
    cfg.out_dir = env;
  } else {
    cfg.out_dir = ".";
  }

  if (cfg.trials < 0) {  // not given: subcommand default
    if (cfg.subcommand == "sweep" || cfg.subcommand == "concentration")
      cfg.trials = 20;
    else if (cfg.subcommand == "speedup")
      cfg.trials = 100;
    else
      cfg.trials = 0;
  }

  if (cfg.n1 < 1) throw CliError("n1 must be >= 1, got " + std::to_string(cfg.n1));
  if (cfg.m < 2) throw CliError("m must be >= 2, got " + std::to_string(cfg.m));
  if (n_total >= 0 && cfg.n2 >= 0 && n_total != cfg.n1 + (cfg.m - 1) * cfg.n2)
    throw CliError("n disagrees with n1 + (m-1) n2: " + std::to_string(n_total) +
                   " vs " + std::to_string(cfg.n1 + (cfg.m - 1) * cfg.n2));
  if (cfg.n2 < 0) {
    if (n_total < 0) throw CliError("missing group size: provide --n2 or --n");
    const int rest = n_total - cfg.n1;
    if (rest < cfg.m - 1 || rest % (cfg.m - 1) != 0)
      throw CliError("n = " + std::to_string(n_total) +
                     " does not split as n1 + (m-1) n2 with integer n2 >= 1");
    cfg.n2 = rest / (cfg.m - 1);
  }
  if (cfg.n2 < 1) throw CliError("n2 must be >= 1, got " + std::to_string(cfg.n2));
  if (!(cfg.p > 0.0 && cfg.p <= 1.0))
    throw CliError("p out of range (0, 1]: " + fmt(cfg.p));
  if (!(cfg.q > 0.0 && cfg.q <= 1.0))
    throw CliError("q out of range (0, 1]: " + fmt(cfg.q));
  if (cfg.family != "power") throw CliError("unknown family: " + cfg.family);
  if (cfg.norm != "d_weighted" && cfg.norm != "euclidean")
    throw CliError("unknown norm: " + cfg.norm);
  if (cfg.threads < 1) throw CliError("threads must be >= 1");
  if (cfg.trials < 0) throw CliError("trials must be >= 0");
  if (cfg.samples < 0) throw CliError("samples must be >= 0");
  if (cfg.t < 1) throw CliError("t must be >= 1");

  if (cfg.subcommand == "sweep" || cfg.subcommand == "perturb")
    cfg.alpha_grid = parse_alpha_grid(cfg.alpha_spec);

  if (cfg.subcommand == "concentration") {
    cfg.n_grid.clear();
    for (const auto& part : split(cfg.n_grid_spec, ','))
      cfg.n_grid.push_back(to_int("n-grid", part));
    if (cfg.n_grid.empty()) throw CliError("n-grid must be nonempty");
    for (size_t i = 0; i < cfg.n_grid.size(); ++i) {
      if (cfg.n_grid[i] < 2) throw CliError("n-grid entries must be >= 2");
      if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
        throw CliError("n-grid must be strictly increasing");
    }
  }

  if (cfg.subcommand == "perturb") {
    cfg.deltas.clear();
    for (const auto& part : split(cfg.deltas_spec, ','))
      cfg.deltas.push_back(to_double("deltas", part));
    for (double d : cfg.deltas)
      if (!(d >= 0.0 && d <= 1.0))
        throw CliError("deltas must lie in [0, 1], got " + fmt(d));
  }

  if (cfg.subcommand == "speedup") {
    if (!std::isfinite(cfg.alpha0) || !std::isfinite(cfg.alpha1))
      throw CliError("alpha0 and alpha1 must be finite");
  }

  try {
    cfg.spec();  // surface spec construction problems as config errors
  } catch (const std::invalid_argument& e) {
    throw CliError(e.what(), 2);
  }
  return cfg;
}

std::string manifest_text(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("subcommand", cfg.subcommand);
  kv.emplace_back("version", kVersion);
  kv.emplace_back("out", cfg.out_dir);
  kv.emplace_back("n1", std::to_string(cfg.n1));
  kv.emplace_back("n2", std::to_string(cfg.n2));
  kv.emplace_back("m", std::to_string(cfg.m));
  kv.emplace_back("p", fmt(cfg.p));
  kv.emplace_back("q", fmt(cfg.q));
  if (cfg.subcommand != "audit") {
    kv.emplace_back("family", cfg.family);
    kv.emplace_back("seed", std::to_string(cfg.seed));
    kv.emplace_back("threads", std::to_string(cfg.threads));
  }
  if (cfg.subcommand == "sweep") {
    kv.emplace_back("alpha", cfg.alpha_spec);
    kv.emplace_back("trials", std::to_string(cfg.trials));
    kv.emplace_back("norm", cfg.norm);
    kv.emplace_back("svg", cfg.svg ? "true" : "false");
    kv.emplace_back("full_numeric", cfg.numeric_full ? "true" : "false");
  } else if (cfg.subcommand == "concentration") {
    kv.emplace_back("alpha", fmt(cfg.alpha));
    kv.emplace_back("n_grid", cfg.n_grid_spec);
    kv.emplace_back("trials", std::to_string(cfg.trials));
  } else if (cfg.subcommand == "speedup") {
    kv.emplace_back("alpha0", fmt(cfg.alpha0));
    kv.emplace_back("alpha1", fmt(cfg.alpha1));
    kv.emplace_back("trials", std::to_string(cfg.trials));
  } else if (cfg.subcommand == "perturb") {
    kv.emplace_back("alpha", cfg.alpha_spec);
    kv.emplace_back("deltas", cfg.deltas_spec);
    kv.emplace_back("trials", std::to_string(cfg.trials));
  } else if (cfg.subcommand == "probe") {
    kv.emplace_back("alpha", fmt(cfg.alpha));
    kv.emplace_back("samples", std::to_string(cfg.samples));
    kv.emplace_back("t", std::to_string(cfg.t));
  } else if (cfg.subcommand == "audit") {
    kv.emplace_back("density_threshold", fmt(cfg.density_threshold));
  }
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

ExperimentHooks default_hooks() {
  ExperimentHooks h;
  h.sweep = [](const SweepConfig& sc) { return alpha_sweep(sc); };
  h.concentration = [](const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                       const std::vector<int>& n_grid, int trials, std::uint64_t seed,
                       int threads) {
    return concentration_study(spec, phi, n_grid, trials, seed, threads);
  };
  h.speedup = [](const EliteGrassrootsSpec& spec, const WeightFunction& phi, double a0,
                 double a1, int trials, std::uint64_t seed, int threads) {
    return speedup_detection(spec, phi, a0, a1, trials, seed, threads);
  };
  h.perturb = [](const EliteGrassrootsSpec& spec, const WeightFunction& phi,
                 const std::vector<double>& grid, const std::vector<double>& deltas,
                 int trials, std::uint64_t seed, int threads) {
    return perturbation_study(spec, phi, grid, deltas, trials, seed, threads);
  };
  h.probe = [](const EliteGrassrootsSpec& spec, const WeightFunction& phi, int samples,
               int t, std::uint64_t seed) {
    auto T = build_learning_matrix(expected_adjacency(spec.block), phi);
    auto worst = worst_initial_beliefs(spec, phi);
    return slowest_convergence_probe(T, worst.primary, samples, t, seed);
  };
  h.audit = [](const BlockModelSpec& block, double threshold) {
    return check_assumptions(block, threshold);
  };
  return h;
}

int run(const RunConfig& cfg, std::ostream& out, const ExperimentHooks& hooks) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw CliError("cannot create output directory " + cfg.out_dir + ": " + ec.message(),
                   1);
  auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(cfg.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CliError("cannot write " + path.string(), 1);
    f << content;
    f.close();
    if (!f) throw CliError("short write to " + path.string(), 1);
  };

  int failures = 0;
  if (cfg.subcommand == "sweep") {
    SweepConfig sc;
    sc.spec = cfg.spec();
    sc.phi = cfg.phi(0.0);
    sc.alpha_grid = cfg.alpha_grid;
    sc.trials = cfg.trials;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    sc.numeric_full = cfg.numeric_full;
    sc.norm = cfg.norm == "euclidean" ? NormKind::euclidean : NormKind::d_weighted;
    const auto rows = hooks.sweep(sc);
    for (const auto& r : rows) failures += r.failed + (r.error.empty() ? 0 : 1);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file("sweep.csv", csv.str());
    if (cfg.svg) {
      std::vector<double> xs, ys;
      for (const auto& r : rows) {
        xs.push_back(r.alpha);
        ys.push_back(std::abs(r.lambda2_closed));
      }
      write_file("sweep.svg", line_plot(xs, ys, "subdominant eigenvalue magnitude",
                                        "alpha", "|lambda2|"));
    }
    write_file("manifest.txt", manifest_text(cfg));
    out << "sweep: " << rows.size() << " rows, " << failures << " failures -> "
        << cfg.out_dir << "\n";
  } else if (cfg.subcommand == "concentration") {
    const auto rows = hooks.concentration(cfg.spec(), cfg.phi(cfg.alpha), cfg.n_grid,
                                          cfg.trials, cfg.seed, cfg.threads);
    for (const auto& r : rows) failures += r.failed;
    std::ostringstream csv;
    write_concentration_csv(csv, rows);
    write_file("concentration.csv", csv.str());
    write_file("manifest.txt", manifest_text(cfg));
    out << "concentration: " << rows.size() << " sizes, " << failures
        << " failed trials -> " << cfg.out_dir << "\n";
  } else if (cfg.subcommand == "speedup") {
    const auto res = hooks.speedup(cfg.spec(), cfg.phi(0.0), cfg.alpha0, cfg.alpha1,
                                   cfg.trials, cfg.seed, cfg.threads);
    failures += res.failed;
    std::ostringstream csv;
    write_speedup_csv(csv, res, cfg.alpha0, cfg.alpha1);
    write_file("speedup.csv", csv.str());
    write_file("manifest.txt", manifest_text(cfg));
    out << "speedup: fraction " << human(res.fraction) << " [" << human(res.ci_low)
        << ", " << human(res.ci_high) << "] over " << res.trials << " trials ("
        << res.failed << " failed) -> " << cfg.out_dir << "\n";
  } else if (cfg.subcommand == "perturb") {
    const auto table = hooks.perturb(cfg.spec(), cfg.phi(0.0), cfg.alpha_grid,
                                     cfg.deltas, cfg.trials, cfg.seed, cfg.threads);
    for (const auto& r : table.rows)
      failures += r.row.failed + (r.row.error.empty() ? 0 : 1);
    std::ostringstream csv;
    write_perturb_csv(csv, table);
    write_file("perturb.csv", csv.str());
    write_file("manifest.txt", manifest_text(cfg));
    for (const auto& s : table.summaries) {
      out << "delta " << human(s.delta) << ": case " << s.case_id << ", threshold "
          << human(s.threshold);
      if (s.secondary_threshold) out << ", secondary " << human(*s.secondary_threshold);
      out << ", monotonic " << (s.monotonic_ok ? "ok" : "VIOLATED") << "\n";
    }
    out << "perturb: " << table.rows.size() << " rows, " << failures << " failures -> "
        << cfg.out_dir << "\n";
  } else if (cfg.subcommand == "probe") {
    const auto report =
        hooks.probe(cfg.spec(), cfg.phi(cfg.alpha), cfg.samples, cfg.t, cfg.seed);
    failures += report.rank == 1 ? 0 : 1;
    std::ostringstream csv;
    write_probe_csv(csv, report);
    write_file("probe.csv", csv.str());
    write_file("manifest.txt", manifest_text(cfg));
    out << "probe: rank " << report.rank << " of " << report.samples + 1
        << ", max ratio " << human(report.max_ratio) << " -> " << cfg.out_dir << "\n";
  } else if (cfg.subcommand == "audit") {
    const auto report = hooks.audit(cfg.spec().block, cfg.density_threshold);
    const std::string text = format_report(report) + "\n";
    out << text;
    write_file("audit.txt", text);
    write_file("manifest.txt", manifest_text(cfg));
  } else {
    throw CliError("unknown subcommand: " + cfg.subcommand);
  }
  return failures == 0 ? 0 : 1;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    const auto cfg = parse_config(args);
    return run(cfg, out, default_hooks());
  } catch (const CliError& e) {
    if (e.exit_code == 0)
      out << e.what() << "\n";
    else
      err << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace degroot
