#include "tdr/fiber.hpp"

#include <algorithm>
#include <cmath>

#include "tdr/rng.hpp"
#include "tdr/stats.hpp"

namespace tdr {

namespace {

Word random_word(const WalkConfig& cfg, int length, Rng& rng) {
  Word w;
  w.letters.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
  return w;
}

Eigen::MatrixXd product_of(const WalkConfig& cfg, const Word& w, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  for (int i = 0; i < n; ++i)
    m = m * cfg.gen_d[static_cast<std::size_t>(w.letters[static_cast<std::size_t>(i)])];
  return m;
}

double line_angle(const Eigen::Vector2d& v) {
  double a = std::atan2(v[1], v[0]);
  if (a < 0) a += M_PI;
  if (a >= M_PI) a -= M_PI;
  return a;
}

double line_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double c = std::clamp(u.normalized().dot(v.normalized()), -1.0, 1.0);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

}  // namespace

BasePoint make_base_point(const WalkConfig& cfg, int length, std::uint64_t seed, double t0) {
  BasePoint c;
  Rng rng(seed ^ 0x6a09e667f3bcc909ULL);
  c.b_word = random_word(cfg, length, rng);
  c.z = Eigen::VectorXd::Zero(cfg.dim);
  c.sign = 1;
  Eigen::VectorXd x(cfg.dim);
  for (int i = 0; i < cfg.dim; ++i) x[i] = rng.u01();
  c.state = {TorusPoint::floating(x), t0};
  return c;
}

void WindowSpec::validate(const WalkConfig& cfg) const {
  if (static_cast<int>(U.size()) != cfg.dim - 1)
    throw PreconditionError("window U needs one interval per free Cartan coordinate");
  for (const auto& [lo, hi] : U)
    if (!(hi > lo)) throw PreconditionError("window U has empty interior");
  if (!(I.second > I.first)) throw PreconditionError("window I has empty interior");
  if (!cfg.chi_integer_valued())
    throw PreconditionError("dense chi images are unsupported; integer chi required");
  if (I.second - I.first < 1.0 + cfg.max_abs_chi())
    throw PreconditionError("window I too short: every translate must meet the chi lattice");
}

WindowSpec WindowSpec::defaults(const WalkConfig& cfg) {
  WindowSpec w;
  w.U.assign(static_cast<std::size_t>(cfg.dim - 1), {-2.5, 2.5});
  w.I = {-0.51 - cfg.max_abs_chi() / 2.0, 0.51 + cfg.max_abs_chi() / 2.0};
  return w;
}

FiberContext make_fiber_context(const WalkConfig& cfg, const BasePoint& c, int n,
                                int lookahead) {
  if (static_cast<int>(c.b_word.size()) < n + lookahead)
    throw PreconditionError("base word too short for n + lookahead");
  FiberContext ctx;
  ctx.cfg = &cfg;
  ctx.c = c;
  ctx.n = n;
  ctx.lookahead = lookahead;
  ctx.xi = lookahead_flag(cfg, c.b_word, n, lookahead);
  ctx.theta_b = iwasawa_along_word(cfg, c.b_word, n, ctx.xi);
  Word prefix;
  prefix.letters.assign(c.b_word.letters.begin(), c.b_word.letters.begin() + n);
  ctx.chi_b = chi_of_word(prefix, cfg);
  return ctx;
}

FiberSample fiber_point(const FiberContext& ctx, const Word& a, const WindowSpec& w) {
  if (static_cast<int>(a.size()) != ctx.n)
    throw PreconditionError("fiber word must have length n");
  const WalkConfig& cfg = *ctx.cfg;
  FiberSample s;
  s.a_word = a;
  try {
    const Eigen::VectorXd theta_a = iwasawa_along_word(cfg, a, ctx.n, ctx.xi);
    s.theta_shift = theta_a - ctx.theta_b;
  } catch (const NumericalError&) {
    s.valid = false;
    s.theta_shift = Eigen::VectorXd::Zero(cfg.dim);
    return s;
  }
  s.chi_shift = chi_of_word(a, cfg) - ctx.chi_b;
  bool ok = true;
  for (std::size_t i = 0; i < w.U.size(); ++i) {
    const double v = ctx.c.z[static_cast<int>(i)] + s.theta_shift[static_cast<int>(i)];
    if (v < w.U[i].first || v > w.U[i].second) ok = false;
  }
  const double t = ctx.c.state.t + s.chi_shift;
  if (t < w.I.first || t > w.I.second) ok = false;
  s.accepted = ok;
  return s;
}

ConditionalSampleResult window_conditional_sample(const FiberContext& ctx,
                                                  const WindowSpec& w, int N_target,
                                                  std::uint64_t seed, long long budget) {
  w.validate(*ctx.cfg);
  ConditionalSampleResult out;
  Rng rng(seed ^ 0xbb67ae8584caa73bULL);
  while (static_cast<int>(out.accepted.size()) < N_target && out.draws < budget) {
    ++out.draws;
    const Word a = random_word(*ctx.cfg, ctx.n, rng);
    FiberSample s = fiber_point(ctx, a, w);
    if (!s.valid) {
      ++out.invalid;
      continue;
    }
    if (s.accepted) out.accepted.push_back(std::move(s));
  }
  out.budget_exhausted = static_cast<int>(out.accepted.size()) < N_target;
  const long long hits = static_cast<long long>(out.accepted.size());
  out.acceptance_rate = out.draws > 0 ? static_cast<double>(hits) / static_cast<double>(out.draws) : 0.0;
  const Interval ci = proportion_ci95(hits, std::max<long long>(1, out.draws));
  out.rate_ci_lo = ci.lo;
  out.rate_ci_hi = ci.hi;
  return out;
}

AnglesResult law_of_angles(const WalkConfig& cfg, const BasePoint& c, int n,
                           const WindowSpec& w, int N, std::uint64_t seed,
                           int lookahead, long long budget) {
  if (cfg.dim != 2 && cfg.dim != 3)
    throw PreconditionError("law_of_angles supports d = 2 or 3");
  const FiberContext ctx = make_fiber_context(cfg, c, n, lookahead);
  AnglesResult out;
  const auto cond = window_conditional_sample(ctx, w, N, seed, budget);
  out.accepted = static_cast<long long>(cond.accepted.size());

  auto repelling_angle = [&](const Word& word) -> std::optional<double> {
    // wedge-accumulated kappa survives products whose condition number
    // exceeds the float range
    const RenormProduct p = renormalized_product(word, cfg);
    const CartanFrame& f = p.frame;
    if (f.kappa[0] - f.kappa[1] <= 1e-9) return std::nullopt;
    if (cfg.dim == 2) return line_angle(Eigen::Vector2d(f.right.col(0)));
    // d == 3: polar angle of the repelling line (its own law is compared)
    const Eigen::VectorXd v = f.right.col(0);
    return std::acos(std::clamp(std::abs(v[2]), 0.0, 1.0));
  };

  for (const auto& s : cond.accepted) {
    const auto a = repelling_angle(s.a_word);
    if (a)
      out.cond_angles.push_back(*a);
    else
      ++out.dropped;
  }
  // unconditioned comparison stream: same statistic, no window
  Rng rng(seed ^ 0x3c6ef372fe94f82bULL);
  const int n_uncond = std::max<int>(static_cast<int>(out.cond_angles.size()), N);
  for (int i = 0; i < n_uncond; ++i) {
    const Word a = random_word(cfg, n, rng);
    const auto ang = repelling_angle(a);
    if (ang)
      out.uncond_angles.push_back(*ang);
    else
      ++out.dropped;
  }
  if (cfg.dim == 2 && !out.cond_angles.empty() && !out.uncond_angles.empty())
    out.ks = ks_distance_circular(out.cond_angles, out.uncond_angles, M_PI);
  else
    out.ks = std::numeric_limits<double>::quiet_NaN();
  return out;
}

DriftDemoResult drift_demo(const WalkConfig& cfg, const BasePoint& c,
                           double u_norm_max, double u_norm_min, int directions,
                           int accepted_per_direction, const WindowSpec& w,
                           double eps1, std::uint64_t seed, int n_max, int lookahead,
                           long long budget_per_direction) {
  if (!(u_norm_max <= 1e-4))
    throw PreconditionError("u_norm must stay in the linearization regime (<= 1e-4)");
  if (!(u_norm_min > 0.0) || u_norm_min > u_norm_max)
    throw PreconditionError("need 0 < u_norm_min <= u_norm_max");
  if (static_cast<int>(c.b_word.size()) < n_max + lookahead)
    throw PreconditionError("base word too short");
  w.validate(cfg);

  DriftDemoResult out;

  // omega(theta_n(b)) and the shared tail flags for every candidate n
  std::vector<Eigen::VectorXd> theta_by_n(static_cast<std::size_t>(n_max) + 1);
  std::vector<Flag> flag_by_n;
  flag_by_n.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    flag_by_n.push_back(lookahead_flag(cfg, c.b_word, n, lookahead));
    theta_by_n[static_cast<std::size_t>(n)] =
        n == 0 ? Eigen::VectorXd::Zero(cfg.dim)
               : iwasawa_along_word(cfg, c.b_word, n, flag_by_n.back());
  }
  auto omega_theta = [&](int n) { return theta_by_n[static_cast<std::size_t>(n)][0]; };

  // calibration: 95th percentile of |log||A v|| - omega(theta_n)| over
  // window-accepted fiber words at a few pilot depths
  {
    std::vector<double> vals;
    Rng rng(seed ^ 0xa54ff53a5f1d36f1ULL);
    for (int n : {n_max / 4, n_max / 2, (3 * n_max) / 4, n_max}) {
      if (n < 2) continue;
      FiberContext ctx;
      ctx.cfg = &cfg;
      ctx.c = c;
      ctx.n = n;
      ctx.lookahead = lookahead;
      ctx.xi = flag_by_n[static_cast<std::size_t>(n)];
      ctx.theta_b = theta_by_n[static_cast<std::size_t>(n)];
      Word prefix;
      prefix.letters.assign(c.b_word.letters.begin(), c.b_word.letters.begin() + n);
      ctx.chi_b = chi_of_word(prefix, cfg);
      const auto pilot = window_conditional_sample(ctx, w, 50, rng.next(), 100000);
      for (const auto& s : pilot.accepted) {
        const Eigen::MatrixXd a = product_of(cfg, s.a_word, n);
        Eigen::VectorXd v(cfg.dim);
        for (int i = 0; i < cfg.dim; ++i) v[i] = rng.normal();
        v.normalize();
        vals.push_back(std::abs(std::log((a * v).norm()) - omega_theta(n)));
      }
    }
    if (vals.empty()) throw NumericalError("norm-control calibration produced no samples");
    out.C = std::exp(percentile(vals, 0.95));
  }
  const double log_C = std::log(out.C);

  // inverse generators as doubles
  const std::vector<Eigen::MatrixXd>& inv = cfg.gen_inv_d;

  std::vector<double> fit_x, fit_y;
  Rng dir_rng(seed ^ 0x510e527fade682d1ULL);
  for (int di = 0; di < directions; ++di) {
    const double f = directions > 1 ? static_cast<double>(di) / (directions - 1) : 0.0;
    const double u_norm = u_norm_max * std::pow(u_norm_min / u_norm_max, f);
    Eigen::VectorXd u(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) u[i] = dir_rng.normal();
    u.normalize();

    // transport u backwards along the base word as (direction, log norm),
    // stopping at the first crossing; the wrap assertion only guards the
    // steps the drift analysis actually uses (k <= n_p)
    std::vector<Eigen::VectorXd> w_dir(static_cast<std::size_t>(n_max) + 1);
    std::vector<double> w_log(static_cast<std::size_t>(n_max) + 1);
    w_dir[0] = u;
    w_log[0] = std::log(u_norm);
    bool wrapped = false;
    int n_p = -1;
    for (int k = 1; k <= n_max && n_p < 0; ++k) {
      const Eigen::VectorXd next =
          inv[static_cast<std::size_t>(c.b_word.letters[static_cast<std::size_t>(k - 1)])] *
          w_dir[static_cast<std::size_t>(k - 1)];
      w_log[static_cast<std::size_t>(k)] = w_log[static_cast<std::size_t>(k - 1)] + std::log(next.norm());
      w_dir[static_cast<std::size_t>(k)] = next.normalized();
      if (w_log[static_cast<std::size_t>(k)] >= std::log(0.25)) {
        wrapped = true;
        break;
      }
      const double s_k = std::exp(omega_theta(k) + w_log[static_cast<std::size_t>(k)] - log_C);
      if (s_k > eps1) n_p = k;
    }
    if (wrapped) {
      ++out.wrap_failures;
      continue;
    }
    if (n_p < 0) {
      ++out.skipped_directions;
      continue;
    }

    FiberContext ctx;
    ctx.cfg = &cfg;
    ctx.c = c;
    ctx.n = n_p;
    ctx.lookahead = lookahead;
    ctx.xi = flag_by_n[static_cast<std::size_t>(n_p)];
    ctx.theta_b = theta_by_n[static_cast<std::size_t>(n_p)];
    Word prefix;
    prefix.letters.assign(c.b_word.letters.begin(), c.b_word.letters.begin() + n_p);
    ctx.chi_b = chi_of_word(prefix, cfg);
    const auto cond = window_conditional_sample(
        ctx, w, accepted_per_direction, seed + 77777ULL * static_cast<std::uint64_t>(di),
        budget_per_direction);

    for (const auto& s : cond.accepted) {
      const Eigen::MatrixXd a = product_of(cfg, s.a_word, n_p);
      const Eigen::VectorXd av = a * w_dir[static_cast<std::size_t>(n_p)];
      DriftRecord rec;
      rec.direction = di;
      rec.u_norm = u_norm;
      rec.n_p = n_p;
      rec.log_ratio = std::log(av.norm()) - omega_theta(n_p);
      rec.norm_Du = std::exp(w_log[static_cast<std::size_t>(n_p)] + std::log(av.norm()));
      rec.in_window = std::abs(rec.log_ratio) <= log_C;
      try {
        const RenormProduct rp = renormalized_product(s.a_word, cfg);
        const auto dp = density_points(rp.frame, 1);
        rec.ang_dist = line_distance(av, dp.xi_plus.col(0));
      } catch (const GapError&) {
        rec.ang_dist = std::numeric_limits<double>::quiet_NaN();
      }
      if (std::isfinite(rec.ang_dist) && rec.ang_dist > 0.0) {
        fit_x.push_back(static_cast<double>(n_p));
        fit_y.push_back(std::log(std::max(rec.ang_dist, 1e-300)));
      }
      out.records.push_back(rec);
    }
  }

  long long inside = 0;
  for (const auto& r : out.records)
    if (r.in_window) ++inside;
  out.within_fraction =
      out.records.empty() ? 0.0 : static_cast<double>(inside) / static_cast<double>(out.records.size());
  const LineFit fit = fit_line(fit_x, fit_y);
  out.delta_hat = -fit.slope;
  return out;
}

EquidistResult fiber_equidistribution(const WalkConfig& cfg, const BasePoint& c,
                                      const std::vector<int>& n_list, const WindowSpec& w,
                                      int theta_bins, int N_target, std::uint64_t seed,
                                      int lookahead, long long budget) {
  if (theta_bins < 1) throw PreconditionError("need at least one theta bin");
  w.validate(cfg);
  EquidistResult out;
  out.n_list = n_list;

  // chi values reachable inside I from the base t
  std::vector<long long> chi_values;
  for (long long v = std::llround(std::ceil(w.I.first - c.state.t));
       v <= std::llround(std::floor(w.I.second - c.state.t)); ++v)
    chi_values.push_back(v);

  const double u_lo = w.U[0].first, u_hi = w.U[0].second;
  const double bin_w = (u_hi - u_lo) / theta_bins;

  std::vector<double> prev_masses;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const FiberContext ctx = make_fiber_context(cfg, c, n_list[ni], lookahead);
    const auto cond = window_conditional_sample(ctx, w, N_target,
                                                seed + 31ULL * static_cast<std::uint64_t>(ni), budget);
    std::vector<long long> counts(static_cast<std::size_t>(theta_bins) * chi_values.size(), 0);
    for (const auto& s : cond.accepted) {
      const double th = c.z[0] + s.theta_shift[0];
      int tb = static_cast<int>((th - u_lo) / bin_w);
      tb = std::clamp(tb, 0, theta_bins - 1);
      const long long cv = std::llround(s.chi_shift);
      const auto it = std::find(chi_values.begin(), chi_values.end(), cv);
      if (it == chi_values.end()) continue;
      const std::size_t ci = static_cast<std::size_t>(it - chi_values.begin());
      ++counts[static_cast<std::size_t>(tb) * chi_values.size() + ci];
    }
    const long long total = static_cast<long long>(cond.accepted.size());
    std::vector<EquidistCell> cells;
    std::vector<double> masses;
    for (int tb = 0; tb < theta_bins; ++tb)
      for (std::size_t ci = 0; ci < chi_values.size(); ++ci) {
        EquidistCell cell;
        cell.theta_bin = tb;
        cell.chi_value = chi_values[ci];
        const long long hits = counts[static_cast<std::size_t>(tb) * chi_values.size() + ci];
        cell.mass = total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
        const Interval iv = proportion_ci95(hits, std::max<long long>(1, total));
        cell.ci_lo = iv.lo;
        cell.ci_hi = iv.hi;
        cells.push_back(cell);
        masses.push_back(cell.mass);
      }
    if (!prev_masses.empty()) {
      double l1 = 0.0;
      for (std::size_t i = 0; i < masses.size(); ++i) l1 += std::abs(masses[i] - prev_masses[i]);
      out.l1_diffs.push_back(l1);
    }
    prev_masses = masses;
    out.cells_by_n.push_back(std::move(cells));
  }
  return out;
}

}  // namespace tdr
