// Experiment runner: every subcommand loads a walk configuration, executes
// one module operation with seeded determinism, and writes CSV/JSON outputs
// plus a manifest into its own run directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "tdr/cartan.hpp"
#include "tdr/csv.hpp"
#include "tdr/empirical.hpp"
#include "tdr/fiber.hpp"
#include "tdr/llt.hpp"
#include "tdr/orbits.hpp"
#include "tdr/parallel.hpp"
#include "tdr/rng.hpp"
#include "tdr/runio.hpp"
#include "tdr/walk.hpp"

namespace {

using namespace tdr;

// untyped parameter bag: subcommand defaults overridden by --set key=value
class Params {
 public:
  explicit Params(std::map<std::string, std::string> defaults)
      : values_(std::move(defaults)) {}

  void apply_overrides(const std::vector<std::string>& kvs) {
    for (const auto& kv : kvs) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: " + kv);
      const std::string key = kv.substr(0, eq);
      if (!values_.count(key)) throw ConfigError("unknown parameter: " + key);
      values_[key] = kv.substr(eq + 1);
    }
  }

  long long ll(const std::string& k) const { return std::stoll(at(k)); }
  double dbl(const std::string& k) const { return std::stod(at(k)); }
  std::string str(const std::string& k) const { return at(k); }

  std::vector<long long> ll_list(const std::string& k) const {
    std::vector<long long> out;
    std::stringstream ss(at(k));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    return out;
  }
  std::vector<double> dbl_list(const std::string& k) const {
    std::vector<double> out;
    std::stringstream ss(at(k));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
  }

  std::string to_json() const {
    nlohmann::json j;
    for (const auto& [k, v] : values_) j[k] = v;
    return j.dump();
  }

 private:
  const std::string& at(const std::string& k) const {
    const auto it = values_.find(k);
    if (it == values_.end()) throw ConfigError("unknown parameter: " + k);
    return it->second;
  }
  std::map<std::string, std::string> values_;
};

// "1/4,0/1" -> rational point; plain decimals -> float point
TorusPoint parse_point(const std::string& text, int dim, bool exact) {
  std::vector<std::pair<long long, long long>> rat;
  std::vector<double> flo;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto slash = item.find('/');
    if (slash != std::string::npos) {
      rat.emplace_back(std::stoll(item.substr(0, slash)),
                       std::stoll(item.substr(slash + 1)));
      flo.push_back(static_cast<double>(rat.back().first) / rat.back().second);
    } else {
      flo.push_back(std::stod(item));
      rat.emplace_back(0, 1);
    }
  }
  if (static_cast<int>(flo.size()) != dim)
    throw ConfigError("point has wrong dimension: " + text);
  if (exact) return TorusPoint::rational(rat);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = flo[static_cast<std::size_t>(i)];
  return TorusPoint::floating(x);
}

struct RunEnv {
  WalkConfig cfg;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_root;
};

std::vector<std::string> coord_header(const std::string& prefix, int dim,
                                      const std::vector<std::string>& rest) {
  std::vector<std::string> h;
  for (int i = 0; i < dim; ++i) h.push_back(prefix + std::to_string(i));
  h.insert(h.end(), rest.begin(), rest.end());
  return h;
}

int run_simulate(const RunEnv& env, const Params& p, RunDir& dir) {
  const bool exact = p.str("mode") == "exact";
  const StateXT start{parse_point(p.str("x"), env.cfg.dim, exact), p.dbl("t0")};
  const Trajectory tr = simulate(env.cfg, start, static_cast<int>(p.ll("n")), env.seed);
  std::vector<std::string> header{"step"};
  const auto coords = coord_header("x", env.cfg.dim, {"t"});
  header.insert(header.end(), coords.begin(), coords.end());
  CsvWriter csv(dir.file("trajectory.csv"), header);
  for (std::size_t s = 0; s < tr.states.size(); ++s) {
    const Eigen::VectorXd x = tr.states[s].x.to_double();
    std::vector<CsvCell> cells{static_cast<long long>(s)};
    for (int i = 0; i < x.size(); ++i) cells.emplace_back(x[i]);
    cells.emplace_back(tr.states[s].t);
    csv.row(cells);
  }
  dir.note_output("trajectory.csv");
  return 0;
}

int run_orbit(const RunEnv& env, const Params& p, RunDir& dir) {
  const TorusPoint x = parse_point(p.str("x"), env.cfg.dim, true);
  const auto orbit = rational_orbit(x, env.cfg);
  const auto comps = block_orbit_components(x, env.cfg, p.ll("m"));
  auto point_json = [](const TorusPoint& pt) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [num, den] : pt.reduced_coords())
      arr.push_back({{"num", num.str()}, {"den", den.str()}});
    return arr;
  };
  nlohmann::json j;
  j["orbit_size"] = orbit.size();
  j["orbit"] = nlohmann::json::array();
  for (const auto& pt : orbit) j["orbit"].push_back(point_json(pt));
  j["m"] = p.ll("m");
  j["components"] = nlohmann::json::array();
  for (const auto& c : comps) {
    nlohmann::json comp = nlohmann::json::array();
    for (const auto& [pt, k] : c.vertices) comp.push_back({{"x", point_json(pt)}, {"k", k}});
    j["components"].push_back(comp);
  }
  std::ofstream out(dir.file("orbit.json"));
  out << j.dump(2) << "\n";
  dir.note_output("orbit.json");
  return 0;
}

int run_lyapunov(const RunEnv& env, const Params& p, RunDir& dir) {
  const LyapunovEstimate e =
      lyapunov_estimate(env.cfg, static_cast<int>(p.ll("n")), static_cast<int>(p.ll("N")),
                        env.seed, env.threads);
  CsvWriter csv(dir.file("lyapunov.csv"), {"n", "N", "lambda_hat", "ci_lo", "ci_hi"});
  csv.row({static_cast<long long>(e.n), static_cast<long long>(e.N), e.lambda, e.ci_lo,
           e.ci_hi});
  dir.note_output("lyapunov.csv");
  return 0;
}

int run_cartan_check(const RunEnv& env, const Params& p, RunDir& dir) {
  const long long samples = p.ll("samples");
  const int max_len = static_cast<int>(p.ll("max_len"));
  long long violations = 0, gap_skips = 0;
  double worst_norm = 0.0, worst_dir = 0.0;
  for (long long i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(env.seed, static_cast<std::uint64_t>(i));
    Word w;
    const int len = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_len));
    for (int k = 0; k < len; ++k) w.letters.push_back(rng.categorical(env.cfg.cum_probs));
    const Eigen::MatrixXd g = word_product(w, env.cfg).entries.to_double();
    Eigen::VectorXd v(env.cfg.dim);
    for (int k = 0; k < env.cfg.dim; ++k) v[k] = rng.normal();
    v.normalize();
    try {
      const auto rep = check_growth_contraction(g, v);
      if (!rep.ok()) ++violations;
      if (rep.upper > 0.0)
        worst_norm = std::max(worst_norm, (rep.lower - rep.norm_gv) / rep.upper);
      if (std::isfinite(rep.dir_bound))
        worst_dir = std::max(worst_dir, rep.dir_dist - rep.dir_bound);
    } catch (const GapError&) {
      ++gap_skips;
    }
  }
  CsvWriter csv(dir.file("cartan_check.csv"),
                {"samples", "violations", "gap_skips", "worst_norm_excess",
                 "worst_dir_excess"});
  csv.row({samples, violations, gap_skips, worst_norm, worst_dir});
  dir.note_output("cartan_check.csv");

  std::vector<int> ns;
  for (long long n : p.ll_list("density_n_list")) ns.push_back(static_cast<int>(n));
  const DensityConvergenceResult dc =
      density_convergence(env.cfg, ns, static_cast<int>(p.ll("density_N")), env.seed);
  CsvWriter dcsv(dir.file("density.csv"), {"n", "median", "rate", "dropped"});
  for (const auto& row : dc.rows)
    dcsv.row({static_cast<long long>(row.n), row.median_dist, dc.rate,
              static_cast<long long>(row.dropped)});
  dir.note_output("density.csv");
  return violations == 0 ? 0 : 1;
}

int run_tail(const RunEnv& env, const Params& p, RunDir& dir) {
  const TailResult r = return_tail(env.cfg, p.ll("kmax"), p.ll("N"), env.seed, p.ll("cap"),
                                   {p.ll("fit_lo"), p.ll("fit_hi")}, env.threads);
  CsvWriter csv(dir.file("tail.csv"), {"k", "p_hat", "ci_lo", "ci_hi"});
  for (const auto& row : r.rows) csv.row({row.k, row.p_hat, row.ci_lo, row.ci_hi});
  CsvWriter fit(dir.file("tail_fit.csv"), {"slope", "slope_stderr", "censored", "N"});
  fit.row({r.slope, r.slope_stderr, r.censored, r.N});
  dir.note_output("tail.csv");
  dir.note_output("tail_fit.csv");
  return 0;
}

int run_certify(const RunEnv& env, const Params& p, RunDir& dir) {
  DriftGridSpec grid;
  grid.count = static_cast<int>(p.ll("count"));
  grid.eps_min = p.dbl("eps_min");
  const double delta = p.dbl("delta");
  const int kmax = static_cast<int>(p.ll("kmax"));
  const double target_a = p.dbl("target_a");
  DriftCertificate best;
  for (int k = 1; k <= kmax; ++k) {
    best = drift_certify(env.cfg, delta, k, grid, static_cast<int>(p.ll("N")),
                         env.seed + static_cast<std::uint64_t>(k), p.ll("cap"),
                         env.threads);
    if (best.ok && best.a <= target_a) break;
  }
  CsvWriter csv(dir.file("certificate.csv"),
                coord_header("x", env.cfg.dim,
                             {"u_value", "estimate", "ucb", "censored", "valid"}));
  for (const auto& row : best.rows) {
    std::vector<CsvCell> cells;
    for (int i = 0; i < row.point.size(); ++i) cells.emplace_back(row.point[i]);
    cells.emplace_back(row.u_value);
    cells.emplace_back(row.estimate);
    cells.emplace_back(row.ucb);
    cells.emplace_back(row.censored);
    cells.emplace_back(static_cast<long long>(row.valid));
    csv.row(cells);
  }
  nlohmann::json j;
  j["ok"] = best.ok;
  j["delta"] = best.delta;
  j["k"] = best.k;
  j["a"] = best.a;
  j["C"] = best.C;
  j["confidence"] = best.confidence;
  j["violations"] = best.violations;
  std::ofstream out(dir.file("certificate.json"));
  out << j.dump(2) << "\n";
  dir.note_output("certificate.csv");
  dir.note_output("certificate.json");
  return best.ok ? 0 : 1;
}

int run_llt1d(const RunEnv& env, const Params& p, RunDir& dir) {
  const auto rows = llt_1d_check(chi_lattice_of(env.cfg), p.ll_list("n_list"));
  CsvWriter csv(dir.file("llt1d.csv"), {"n", "exact", "limit", "rel_err"});
  for (const auto& r : rows) csv.row({r.n, r.exact, r.limit, r.rel_err});
  dir.note_output("llt1d.csv");
  return 0;
}

int run_jointllt(const RunEnv& env, const Params& p, RunDir& dir) {
  const auto U = p.dbl_list("U");
  const auto I = p.dbl_list("I");
  std::vector<int> ns;
  for (long long n : p.ll_list("n_list")) ns.push_back(static_cast<int>(n));
  const JointLltResult r =
      joint_llt_estimate(env.cfg, {U.at(0), U.at(1)}, {I.at(0), I.at(1)}, ns, p.ll("N"),
                         env.seed, env.threads, p.dbl("lambda"));
  CsvWriter csv(dir.file("jointllt.csv"), {"n", "p_hat", "scaled", "ci_lo", "ci_hi"});
  for (const auto& row : r.rows) {
    csv.row({static_cast<long long>(row.n), row.p_hat, row.scaled, row.ci_lo, row.ci_hi});
    if (row.wide_ci)
      std::cerr << "warning: CI wider than the estimate at n=" << row.n
                << "; increase N\n";
  }
  nlohmann::json j;
  j["lambda_hat"] = r.lambda_hat;
  j["n_cap"] = r.n_cap;
  j["note"] = "centering error grows linearly in n; keep n <= n_cap";
  std::ofstream out(dir.file("jointllt.json"));
  out << j.dump(2) << "\n";
  dir.note_output("jointllt.csv");
  dir.note_output("jointllt.json");
  return 0;
}

int run_angles(const RunEnv& env, const Params& p, RunDir& dir) {
  const int n = static_cast<int>(p.ll("n"));
  const int lookahead = static_cast<int>(p.ll("lookahead"));
  const BasePoint c = make_base_point(env.cfg, n + lookahead + 10, env.seed, 0.0);
  const AnglesResult r =
      law_of_angles(env.cfg, c, n, WindowSpec::defaults(env.cfg),
                    static_cast<int>(p.ll("N")), env.seed, lookahead, p.ll("budget"));
  CsvWriter csv(dir.file("angles.csv"), {"sample", "angle_cond", "angle_uncond"});
  const std::size_t rows = std::min(r.cond_angles.size(), r.uncond_angles.size());
  for (std::size_t i = 0; i < rows; ++i)
    csv.row({static_cast<long long>(i), r.cond_angles[i], r.uncond_angles[i]});
  nlohmann::json j;
  j["ks"] = r.ks;
  j["accepted"] = r.accepted;
  j["dropped"] = r.dropped;
  std::ofstream out(dir.file("angles.json"));
  out << j.dump(2) << "\n";
  dir.note_output("angles.csv");
  dir.note_output("angles.json");
  return 0;
}

int run_drift(const RunEnv& env, const Params& p, RunDir& dir) {
  const int n_max = static_cast<int>(p.ll("n_max"));
  const int lookahead = static_cast<int>(p.ll("lookahead"));
  const BasePoint c = make_base_point(env.cfg, n_max + lookahead + 10, env.seed, 0.0);
  const DriftDemoResult r = drift_demo(
      env.cfg, c, p.dbl("u_max"), p.dbl("u_min"), static_cast<int>(p.ll("directions")),
      static_cast<int>(p.ll("accepted")), WindowSpec::defaults(env.cfg), p.dbl("eps1"),
      env.seed, n_max, lookahead, p.ll("budget"));
  CsvWriter csv(dir.file("drift.csv"),
                {"direction", "n_p", "u_norm", "log_ratio", "ang_dist", "in_window"});
  for (const auto& rec : r.records)
    csv.row({static_cast<long long>(rec.direction), static_cast<long long>(rec.n_p),
             rec.u_norm, rec.log_ratio, rec.ang_dist,
             static_cast<long long>(rec.in_window)});
  nlohmann::json j;
  j["C"] = r.C;
  j["delta_hat"] = r.delta_hat;
  j["within_fraction"] = r.within_fraction;
  j["wrap_failures"] = r.wrap_failures;
  j["skipped_directions"] = r.skipped_directions;
  std::ofstream out(dir.file("drift.json"));
  out << j.dump(2) << "\n";
  dir.note_output("drift.csv");
  dir.note_output("drift.json");
  return 0;
}

int run_equidist(const RunEnv& env, const Params& p, RunDir& dir) {
  std::vector<int> ns;
  for (long long n : p.ll_list("n_list")) ns.push_back(static_cast<int>(n));
  const int lookahead = static_cast<int>(p.ll("lookahead"));
  const BasePoint c = make_base_point(env.cfg, ns.back() + lookahead + 10, env.seed, 0.0);
  const EquidistResult r = fiber_equidistribution(
      env.cfg, c, ns, WindowSpec::defaults(env.cfg), static_cast<int>(p.ll("theta_bins")),
      static_cast<int>(p.ll("N")), env.seed, lookahead, p.ll("budget"));
  CsvWriter csv(dir.file("equidist.csv"),
                {"n", "theta_bin", "chi", "mass", "ci_lo", "ci_hi"});
  for (std::size_t ni = 0; ni < r.cells_by_n.size(); ++ni)
    for (const auto& cell : r.cells_by_n[ni])
      csv.row({static_cast<long long>(r.n_list[ni]), static_cast<long long>(cell.theta_bin),
               cell.chi_value, cell.mass, cell.ci_lo, cell.ci_hi});
  nlohmann::json j;
  j["l1_diffs"] = r.l1_diffs;
  std::ofstream out(dir.file("equidist.json"));
  out << j.dump(2) << "\n";
  dir.note_output("equidist.csv");
  dir.note_output("equidist.json");
  return 0;
}

int run_weyl(const RunEnv& env, const Params& p, RunDir& dir) {
  const int n = static_cast<int>(p.ll("n"));
  const int burn = static_cast<int>(p.ll("burn_in"));
  Rng rng(env.seed ^ 0x1f83d9abfb41bd6bULL);
  Eigen::VectorXd x0(env.cfg.dim);
  for (int i = 0; i < env.cfg.dim; ++i) x0[i] = rng.u01();
  const Trajectory tr =
      simulate(env.cfg, {TorusPoint::floating(x0), 0.0}, n + burn, env.seed);
  const EmpiricalMeasure m = EmpiricalMeasure::from_trajectory(tr, burn);

  const int kmax = static_cast<int>(p.ll("kmax"));
  CsvWriter csv(dir.file("weyl.csv"), coord_header("k", env.cfg.dim, {"re", "im", "abs"}));
  std::vector<int> idx(static_cast<std::size_t>(env.cfg.dim), -kmax);
  for (;;) {
    Eigen::VectorXi k(env.cfg.dim);
    bool zero = true;
    for (int i = 0; i < env.cfg.dim; ++i) {
      k[i] = idx[static_cast<std::size_t>(i)];
      if (k[i] != 0) zero = false;
    }
    if (!zero) {
      const std::complex<double> w = weyl_sum(m, k);
      std::vector<CsvCell> cells;
      for (int i = 0; i < env.cfg.dim; ++i) cells.emplace_back(static_cast<long long>(k[i]));
      cells.emplace_back(w.real());
      cells.emplace_back(w.imag());
      cells.emplace_back(std::abs(w));
      csv.row(cells);
    }
    int j = 0;
    while (j < env.cfg.dim && idx[static_cast<std::size_t>(j)] == kmax)
      idx[static_cast<std::size_t>(j++)] = -kmax;
    if (j == env.cfg.dim) break;
    ++idx[static_cast<std::size_t>(j)];
  }

  const double window = p.dbl("window");
  CsvWriter marg(dir.file("marginal.csv"), {"shift", "discrepancy"});
  for (double s : p.dbl_list("shifts"))
    marg.row({s, real_marginal_invariance(m, {s}, static_cast<int>(p.ll("bins")),
                                          {-window, window})});

  CsvWriter atoms_csv(dir.file("atoms.csv"), coord_header("center", env.cfg.dim, {"mass"}));
  for (const auto& a : atom_detect(m, p.dbl("atoms_radius"), p.dbl("atoms_threshold"))) {
    std::vector<CsvCell> cells;
    for (int i = 0; i < a.center.size(); ++i) cells.emplace_back(a.center[i]);
    cells.emplace_back(a.mass);
    atoms_csv.row(cells);
  }

  dir.note_output("weyl.csv");
  dir.note_output("marginal.csv");
  dir.note_output("atoms.csv");
  return 0;
}

std::map<std::string, std::map<std::string, std::string>> subcommand_defaults() {
  return {
      {"simulate", {{"n", "10000"}, {"x", "1/4,0/1"}, {"mode", "exact"}, {"t0", "0"}}},
      {"orbit", {{"x", "1/4,0/1"}, {"m", "2"}}},
      {"lyapunov", {{"n", "10000"}, {"N", "100"}}},
      {"cartan-check",
       {{"samples", "10000"},
        {"max_len", "30"},
        {"density_n_list", "5,10,20,40"},
        {"density_N", "500"}}},
      {"tail",
       {{"kmax", "10000"},
        {"N", "100000"},
        {"cap", "10000000"},
        {"fit_lo", "100"},
        {"fit_hi", "10000"}}},
      {"certify",
       {{"delta", "0.05"},
        {"kmax", "8"},
        {"count", "64"},
        {"eps_min", "0.0001"},
        {"N", "2000"},
        {"cap", "1000000"},
        {"target_a", "0.95"}}},
      {"llt1d", {{"n_list", "100,1000,10000"}}},
      {"jointllt",
       {{"U", "-1,1"},
        {"I", "-0.5,0.5"},
        {"n_list", "100,200,400"},
        {"N", "1000000"},
        {"lambda", "0"}}},
      {"angles",
       {{"n", "30"}, {"N", "1000"}, {"lookahead", "200"}, {"budget", "10000000"}}},
      {"drift",
       {{"directions", "32"},
        {"accepted", "200"},
        {"u_max", "1e-4"},
        {"u_min", "1e-17"},
        {"eps1", "0.001"},
        {"n_max", "60"},
        {"lookahead", "200"},
        {"budget", "200000"}}},
      {"equidist",
       {{"n_list", "20,40,80"},
        {"theta_bins", "3"},
        {"N", "500"},
        {"lookahead", "200"},
        {"budget", "10000000"}}},
      {"weyl",
       {{"n", "100000"},
        {"burn_in", "1000"},
        {"kmax", "3"},
        {"shifts", "1"},
        {"bins", "40"},
        {"window", "20"},
        {"atoms_radius", "0.01"},
        {"atoms_threshold", "0.05"}}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random walks on the torus times a line: experiment runner"};
  app.require_subcommand(1);

  std::string config_path = "ref-sl2";
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out_root;
  int replicas = 0;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "config file path or builtin name (ref-sl2)");
  app.add_option("--seed", seed, "RNG seed (overrides the config seed)")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--out", out_root, "output root (default $TDRWALK_OUT or ./runs)");
  app.add_option("--replicas", replicas, "worker threads (default: cores)");
  app.add_option("--set", overrides, "override a subcommand parameter, key=value");

  const auto defaults = subcommand_defaults();
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, unused] : defaults) {
    (void)unused;
    subs[name] = app.add_subcommand(name);
    subs[name]->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    RunEnv env;
    env.cfg = load_config(config_path);
    env.seed = seed_given ? seed : (env.cfg.seed != 0 ? env.cfg.seed : seed);
    env.threads = replicas > 0 ? replicas : default_threads();
    env.out_root = resolve_output_root(out_root);

    std::string name;
    for (const auto& [n, sub] : subs)
      if (sub->parsed()) name = n;
    Params params(defaults.at(name));
    params.apply_overrides(overrides);

    RunDir dir(env.out_root, name, env.cfg, env.seed);
    dir.set_params_json(params.to_json());
    int rc = 0;
    if (name == "simulate")
      rc = run_simulate(env, params, dir);
    else if (name == "orbit")
      rc = run_orbit(env, params, dir);
    else if (name == "lyapunov")
      rc = run_lyapunov(env, params, dir);
    else if (name == "cartan-check")
      rc = run_cartan_check(env, params, dir);
    else if (name == "tail")
      rc = run_tail(env, params, dir);
    else if (name == "certify")
      rc = run_certify(env, params, dir);
    else if (name == "llt1d")
      rc = run_llt1d(env, params, dir);
    else if (name == "jointllt")
      rc = run_jointllt(env, params, dir);
    else if (name == "angles")
      rc = run_angles(env, params, dir);
    else if (name == "drift")
      rc = run_drift(env, params, dir);
    else if (name == "equidist")
      rc = run_equidist(env, params, dir);
    else if (name == "weyl")
      rc = run_weyl(env, params, dir);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    dir.write_manifest(wall);
    std::cout << dir.path() << "\n";
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 4;
  } catch (const GapError& e) {
    std::cerr << "singular gap missing: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}
