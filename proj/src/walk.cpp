#include "tdr/walk.hpp"

#include <algorithm>
#include <cmath>

#include "tdr/parallel.hpp"
#include "tdr/rng.hpp"

namespace tdr {

namespace {

void require_integer_centered_chi(const WalkConfig& cfg) {
  if (!cfg.chi_integer_valued())
    throw PreconditionError("chi values must be integers for return-time sampling");
  double drift = 0.0;
  for (std::size_t i = 0; i < cfg.probs.size(); ++i) drift += cfg.probs[i] * cfg.chi[i];
  if (std::abs(drift) > 1e-12) throw PreconditionError("chi is not centered");
}

bool chi_identically_zero(const WalkConfig& cfg) {
  for (double c : cfg.chi)
    if (c != 0.0) return false;
  return true;
}

// Flat copies of the generator data for tight loops.
struct FlatGens {
  int dim = 0;
  int ngen = 0;
  std::vector<double> mat;     // ngen * dim * dim, row-major per generator
  std::vector<long long> chi;  // integer chi
  std::vector<double> cum;

  explicit FlatGens(const WalkConfig& cfg)
      : dim(cfg.dim), ngen(cfg.n_generators()), cum(cfg.cum_probs) {
    mat.resize(static_cast<std::size_t>(ngen) * dim * dim);
    chi.resize(static_cast<std::size_t>(ngen));
    for (int g = 0; g < ngen; ++g) {
      chi[static_cast<std::size_t>(g)] = std::llround(cfg.chi[static_cast<std::size_t>(g)]);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          mat[(static_cast<std::size_t>(g) * dim + i) * dim + j] = cfg.gen_d[static_cast<std::size_t>(g)](i, j);
    }
  }
  const double* g(int k) const { return mat.data() + static_cast<std::size_t>(k) * dim * dim; }
};

// 2x2 operator norm (largest singular value); scale out the largest entry
// first so t^2 cannot overflow for renormalized products near 1e100
double opnorm2(double a, double b, double c, double d) {
  const double s = std::max(std::max(std::abs(a), std::abs(b)),
                            std::max(std::abs(c), std::abs(d)));
  if (s == 0.0) return 0.0;
  a /= s;
  b /= s;
  c /= s;
  d /= s;
  const double t = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det * det));
  return s * std::sqrt(0.5 * (t + disc));
}

struct ReturnKernelOut {
  long long tau = 0;
  double log_norm = 0.0;
  bool censored = false;
};

// tau and (optionally) log||b_1...b_tau|| in one pass; d=2 fast path.
ReturnKernelOut sample_return_kernel(const FlatGens& fg, Rng& rng, long long cap,
                                     bool want_norm) {
  ReturnKernelOut out;
  long long chi = 0;
  if (fg.dim == 2 && want_norm) {
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    double scale = 0.0;
    for (long long step = 1; step <= cap; ++step) {
      const int l = rng.categorical(fg.cum);
      const double* g = fg.g(l);
      const double n00 = m00 * g[0] + m01 * g[2];
      const double n01 = m00 * g[1] + m01 * g[3];
      const double n10 = m10 * g[0] + m11 * g[2];
      const double n11 = m10 * g[1] + m11 * g[3];
      m00 = n00;
      m01 = n01;
      m10 = n10;
      m11 = n11;
      const double mx = std::max(std::max(std::abs(m00), std::abs(m01)),
                                 std::max(std::abs(m10), std::abs(m11)));
      if (mx > 1e100) {
        m00 /= mx;
        m01 /= mx;
        m10 /= mx;
        m11 /= mx;
        scale += std::log(mx);
      }
      chi += fg.chi[static_cast<std::size_t>(l)];
      if (chi == 0) {
        out.tau = step;
        out.log_norm = scale + std::log(opnorm2(m00, m01, m10, m11));
        return out;
      }
    }
    out.censored = true;
    out.tau = cap;
    return out;
  }
  // generic path
  const int d = fg.dim;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  double scale = 0.0;
  for (long long step = 1; step <= cap; ++step) {
    const int l = rng.categorical(fg.cum);
    if (want_norm) {
      m = m * Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                  fg.g(l), d, d);
      const double mx = m.cwiseAbs().maxCoeff();
      if (mx > 1e100) {
        m /= mx;
        scale += std::log(mx);
      }
    }
    chi += fg.chi[static_cast<std::size_t>(l)];
    if (chi == 0) {
      out.tau = step;
      out.log_norm = want_norm ? scale + std::log(m.operatorNorm()) : 0.0;
      return out;
    }
  }
  out.censored = true;
  out.tau = cap;
  return out;
}

// tau only; no matrices at all.
std::pair<long long, bool> sample_tau_kernel(const FlatGens& fg, Rng& rng, long long cap) {
  long long chi = 0;
  for (long long step = 1; step <= cap; ++step) {
    const int l = rng.categorical(fg.cum);
    chi += fg.chi[static_cast<std::size_t>(l)];
    if (chi == 0) return {step, false};
  }
  return {cap, true};
}

}  // namespace

Trajectory simulate(const WalkConfig& cfg, const StateXT& start, int n, std::uint64_t seed) {
  if (n < 0) throw PreconditionError("simulate needs n >= 0");
  if (start.x.dim() != cfg.dim) throw PreconditionError("start dimension mismatch");
  Trajectory tr;
  tr.start = start;
  tr.states.reserve(static_cast<std::size_t>(n) + 1);
  tr.states.push_back(start);
  tr.word.letters.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  StateXT cur = start;
  for (int i = 0; i < n; ++i) {
    const int l = rng.categorical(cfg.cum_probs);
    tr.word.letters.push_back(l);
    cur = apply(cfg.generators[static_cast<std::size_t>(l)], cur);
    tr.states.push_back(cur);
  }
  return tr;
}

ReturnResult first_return_sampler(const WalkConfig& cfg, std::uint64_t seed, long long cap) {
  require_integer_centered_chi(cfg);
  if (chi_identically_zero(cfg))
    throw PreconditionError("chi is identically zero; tau is trivially 1");
  ReturnResult res;
  Rng rng(seed);
  Word w;
  long long chi = 0;
  for (long long step = 1; step <= cap; ++step) {
    const int l = rng.categorical(cfg.cum_probs);
    w.letters.push_back(l);
    chi += std::llround(cfg.chi[static_cast<std::size_t>(l)]);
    if (chi == 0) {
      ReturnSample s;
      s.tau = step;
      s.word = std::move(w);
      // log operator norm of the word product, renormalized
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
      double scale = 0.0;
      for (int letter : s.word.letters) {
        m = m * cfg.gen_d[static_cast<std::size_t>(letter)];
        const double mx = m.cwiseAbs().maxCoeff();
        if (mx > 1e100) {
          m /= mx;
          scale += std::log(mx);
        }
      }
      s.log_norm = scale + std::log(m.operatorNorm());
      res.sample = std::move(s);
      return res;
    }
  }
  res.censored = Censored{cap};
  return res;
}

TailResult return_tail(const WalkConfig& cfg, long long kmax, long long N,
                       std::uint64_t seed, long long cap,
                       std::pair<long long, long long> fit_window, int threads) {
  require_integer_centered_chi(cfg);
  if (chi_identically_zero(cfg))
    throw PreconditionError("chi is identically zero; tau is trivially 1");
  if (N < 1000) throw PreconditionError("return_tail needs N >= 1000");
  if (cap <= kmax) throw PreconditionError("cap must exceed kmax");

  // log-spaced k grid (always includes 1)
  std::vector<long long> ks{1};
  for (double x = 1.0; x < static_cast<double>(kmax) * 1.0001; x *= 1.25) {
    const long long k = static_cast<long long>(std::llround(x));
    if (k > ks.back() && k <= kmax) ks.push_back(k);
  }
  if (ks.back() != kmax) ks.push_back(kmax);

  const FlatGens fg(cfg);
  std::vector<long long> ge_counts(ks.size(), 0);
  long long censored = 0;
  struct Chunk {
    std::vector<long long> counts;
    long long censored = 0;
  };
  run_chunked<Chunk>(
      N, threads, 2048,
      [&](long long lo, long long hi) {
        Chunk ck;
        ck.counts.assign(ks.size(), 0);
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
          const auto [tau, cens] = sample_tau_kernel(fg, rng, cap);
          if (cens) ++ck.censored;
          for (std::size_t i = 0; i < ks.size(); ++i)
            if (tau >= ks[i]) ++ck.counts[i];  // censored tau >= cap > kmax counts too
        }
        return ck;
      },
      [&](Chunk&& ck) {
        censored += ck.censored;
        for (std::size_t i = 0; i < ks.size(); ++i) ge_counts[i] += ck.counts[i];
      });

  TailResult out;
  out.N = N;
  out.censored = censored;
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    TailRow row;
    row.k = ks[i];
    row.p_hat = static_cast<double>(ge_counts[i]) / static_cast<double>(N);
    const Interval ci = proportion_ci95(ge_counts[i], N);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    out.rows.push_back(row);
    if (ks[i] >= fit_window.first && ks[i] <= fit_window.second && row.p_hat > 0.0) {
      fx.push_back(std::log(static_cast<double>(ks[i])));
      fy.push_back(std::log(row.p_hat));
    }
  }
  const LineFit fit = fit_line(fx, fy);
  out.slope = fit.slope;
  out.slope_stderr = fit.slope_stderr;
  return out;
}

ConservativityResult conservativity_check(const WalkConfig& cfg, const StateXT& start,
                                          double radius,
                                          const std::vector<long long>& horizons, int N,
                                          std::uint64_t seed) {
  if (radius <= 0.0) throw PreconditionError("radius must be positive");
  std::vector<long long> hs = horizons;
  std::sort(hs.begin(), hs.end());
  const long long max_h = hs.empty() ? 0 : hs.back();

  const Eigen::VectorXd x0 = start.x.to_double();
  std::vector<long long> hit_counts(hs.size(), 0);
  for (int rep = 0; rep < N; ++rep) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd x = x0;
    double t = start.t;
    long long first_hit = -1;
    for (long long step = 1; step <= max_h; ++step) {
      const int l = rng.categorical(cfg.cum_probs);
      x = cfg.gen_d[static_cast<std::size_t>(l)] * x;
      for (int i = 0; i < x.size(); ++i) x[i] -= std::floor(x[i]);
      t += cfg.chi[static_cast<std::size_t>(l)];
      const double dt = t - start.t;
      const double dx = torus_distance(x, x0);
      if (std::sqrt(dx * dx + dt * dt) <= radius) {
        first_hit = step;
        break;
      }
    }
    if (first_hit > 0)
      for (std::size_t i = 0; i < hs.size(); ++i)
        if (first_hit <= hs[i]) ++hit_counts[i];
  }
  ConservativityResult out;
  for (std::size_t i = 0; i < hs.size(); ++i)
    out.fraction_by_horizon.emplace_back(hs[i], static_cast<double>(hit_counts[i]) / N);
  return out;
}

HeavyTailResult heavy_tail_diagnostic(const WalkConfig& cfg,
                                      const std::vector<long long>& N_list,
                                      std::uint64_t seed, long long cap, int threads) {
  require_integer_centered_chi(cfg);
  if (chi_identically_zero(cfg))
    throw PreconditionError("chi is identically zero; tau is trivially 1");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw PreconditionError("N_list must be increasing");
  const long long total = N_list.back();

  const FlatGens fg(cfg);
  std::vector<double> log_norms(static_cast<std::size_t>(total), 0.0);
  std::vector<char> cens_flags(static_cast<std::size_t>(total), 0);
  struct Empty {};
  run_chunked<Empty>(
      total, threads, 256,
      [&](long long lo, long long hi) {
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
          const ReturnKernelOut o = sample_return_kernel(fg, rng, cap, true);
          log_norms[static_cast<std::size_t>(r)] = o.log_norm;
          cens_flags[static_cast<std::size_t>(r)] = o.censored ? 1 : 0;
        }
        return Empty{};
      },
      [](Empty&&) {});

  HeavyTailResult out;
  // nested prefixes: censored samples excluded from the means, counted apart
  double acc = 0.0;
  long long used = 0, idx = 0;
  for (long long N : N_list) {
    for (; idx < N; ++idx) {
      if (cens_flags[static_cast<std::size_t>(idx)]) {
        ++out.censored;
        continue;
      }
      acc += log_norms[static_cast<std::size_t>(idx)];
      ++used;
    }
    out.truncated_means.emplace_back(N, used > 0 ? acc / static_cast<double>(used) : 0.0);
  }

  // tail exponent of P(log_norm > s) over the upper range of the sample
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(total));
  for (long long i = 0; i < total; ++i)
    if (!cens_flags[static_cast<std::size_t>(i)]) vals.push_back(log_norms[static_cast<std::size_t>(i)]);
  std::sort(vals.begin(), vals.end());
  const double s_lo = percentile(vals, 0.80), s_hi = percentile(vals, 0.995);
  std::vector<double> fx, fy;
  const double n_used = static_cast<double>(vals.size());
  for (double q : {0.80, 0.85, 0.90, 0.93, 0.95, 0.97, 0.98, 0.99, 0.995}) {
    const double s = percentile(vals, q);
    if (s <= s_lo || s > s_hi) continue;
    const auto above = vals.end() - std::upper_bound(vals.begin(), vals.end(), s);
    if (above <= 0) continue;
    fx.push_back(std::log(s));
    fy.push_back(std::log(static_cast<double>(above) / n_used));
  }
  const LineFit fit = fit_line(fx, fy);
  out.tail_exponent = -fit.slope;
  return out;
}

std::vector<Eigen::VectorXd> drift_grid_points(int dim, const DriftGridSpec& grid) {
  if (grid.count < 2) throw PreconditionError("grid needs at least 2 points");
  if (!(grid.eps_min > 0.0) || grid.eps_max <= grid.eps_min || grid.eps_max > 0.5)
    throw PreconditionError("grid distances must satisfy 0 < eps_min < eps_max <= 0.5");
  std::vector<Eigen::VectorXd> pts;
  Rng rng(0x9e3779b97f4a7c15ULL);  // fixed stream: the grid itself is not an experiment input
  const double golden = 2.399963229728653;
  for (int i = 0; i < grid.count; ++i) {
    const double f = static_cast<double>(i) / (grid.count - 1);
    const double dist = grid.eps_min * std::pow(grid.eps_max / grid.eps_min, f);
    Eigen::VectorXd dir(dim);
    if (dim == 2) {
      const double ang = golden * i;
      dir << std::cos(ang), std::sin(ang);
    } else {
      for (int j = 0; j < dim; ++j) dir[j] = rng.normal();
      dir.normalize();
    }
    Eigen::VectorXd x = dist * dir;
    for (int j = 0; j < dim; ++j) x[j] -= std::floor(x[j]);
    pts.push_back(x);
  }
  return pts;
}

namespace {

// upper convex hull of (u, y) points sorted by u; returns hull indices
std::vector<int> upper_hull(const std::vector<std::pair<double, double>>& pts) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[static_cast<std::size_t>(a)].first < pts[static_cast<std::size_t>(b)].first;
  });
  std::vector<int> hull;
  for (int i : idx) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    while (hull.size() >= 2) {
      const auto& a = pts[static_cast<std::size_t>(hull[hull.size() - 2])];
      const auto& b = pts[static_cast<std::size_t>(hull[hull.size() - 1])];
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
      if (cross >= 0.0)
        hull.pop_back();  // keep the chain concave from above
      else
        break;
    }
    hull.push_back(i);
  }
  return hull;
}

}  // namespace

DriftCertificate drift_certify(const WalkConfig& cfg, double delta, int k,
                               const DriftGridSpec& grid, int N, std::uint64_t seed,
                               long long cap, int threads, double censor_tolerance) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive (u would be constant)");
  if (k < 1) throw PreconditionError("k must be >= 1");
  require_integer_centered_chi(cfg);
  if (chi_identically_zero(cfg))
    throw PreconditionError("chi is identically zero; tau is trivially 1");

  const auto pts = drift_grid_points(cfg.dim, grid);
  const FlatGens fg(cfg);
  const int d = cfg.dim;

  DriftCertificate cert;
  cert.delta = delta;
  cert.k = k;
  cert.rows.resize(pts.size());

  struct PointChunk {
    int point = 0;
    RunningStat stat;
    long long censored = 0;
  };
  const long long reps_per_point = N;
  const long long total = static_cast<long long>(pts.size()) * reps_per_point;
  std::vector<RunningStat> stats(pts.size());
  std::vector<long long> cens(pts.size(), 0);

  run_chunked<PointChunk>(
      total, threads, reps_per_point,  // one chunk per grid point
      [&](long long lo, long long hi) {
        PointChunk ck;
        ck.point = static_cast<int>(lo / reps_per_point);
        const Eigen::VectorXd& x0 = pts[static_cast<std::size_t>(ck.point)];
        std::vector<double> x(static_cast<std::size_t>(d)), nx(static_cast<std::size_t>(d));
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed + 0x1234567ULL * static_cast<std::uint64_t>(ck.point),
                                static_cast<std::uint64_t>(r - lo));
          for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = x0[i];
          long long chi = 0;
          int returns = 0;
          bool censored = true;
          for (long long step = 1; step <= cap; ++step) {
            const int l = rng.categorical(fg.cum);
            const double* g = fg.g(l);
            for (int i = 0; i < d; ++i) {
              double acc = 0.0;
              for (int j = 0; j < d; ++j) acc += g[i * d + j] * x[static_cast<std::size_t>(j)];
              nx[static_cast<std::size_t>(i)] = acc - std::floor(acc);
            }
            x.swap(nx);
            chi += fg.chi[static_cast<std::size_t>(l)];
            if (chi == 0) {
              ++returns;
              if (returns == k) {
                censored = false;
                break;
              }
            }
          }
          double dist2 = 0.0;
          for (int i = 0; i < d; ++i) {
            const double c = std::min(x[static_cast<std::size_t>(i)], 1.0 - x[static_cast<std::size_t>(i)]);
            dist2 += c * c;
          }
          const double dist = std::sqrt(dist2);
          // censored samples contribute the value at censoring time and are
          // counted; a point with too many of them is invalidated below
          ck.stat.add(std::pow(std::max(dist, 1e-15), -delta));
          if (censored) ++ck.censored;
        }
        return ck;
      },
      [&](PointChunk&& ck) {
        stats[static_cast<std::size_t>(ck.point)].merge(ck.stat);
        cens[static_cast<std::size_t>(ck.point)] += ck.censored;
      });

  std::vector<std::pair<double, double>> fit_pts;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    DriftGridRow& row = cert.rows[i];
    row.point = pts[i];
    row.u_value = std::pow(torus_distance_to_zero(pts[i]), -delta);
    row.estimate = stats[i].mean();
    row.ucb = stats[i].mean() + 1.6448536269514722 * stats[i].sem();
    row.censored = cens[i];
    row.valid = static_cast<double>(cens[i]) / static_cast<double>(N) <= censor_tolerance;
    fit_pts.emplace_back(row.u_value, row.ucb);
  }

  for (std::size_t i = 0; i < cert.rows.size(); ++i)
    if (!cert.rows[i].valid) cert.violations.push_back(static_cast<int>(i));
  if (!cert.violations.empty()) {
    cert.ok = false;
    return cert;
  }

  // The slope comes from the least-squares fit of ucb against u (the
  // pointwise min-a program is degenerate: any a works with a big enough C);
  // the intercept is then lifted along the upper convex hull so the line
  // dominates every point.  A chain that fails to contract shows up as a
  // slope at or above one.
  std::vector<double> us, ys;
  for (const auto& [u, y] : fit_pts) {
    us.push_back(u);
    ys.push_back(y);
  }
  const double a = std::max(0.0, fit_line(us, ys).slope);
  double C = 0.0;
  int lift_point = 0;
  const std::vector<int> hull = upper_hull(fit_pts);
  for (int i : hull) {
    const double c = fit_pts[static_cast<std::size_t>(i)].second -
                     a * fit_pts[static_cast<std::size_t>(i)].first;
    if (c > C) {
      C = c;
      lift_point = i;
    }
  }
  cert.a = a;
  cert.C = C;
  if (a < 1.0) {
    cert.ok = true;
  } else {
    cert.ok = false;
    cert.violations.push_back(lift_point);
    for (int i : hull)
      if (i != lift_point) cert.violations.push_back(i);
  }
  return cert;
}

}  // namespace tdr
