#include "tdr/cartan.hpp"

#include <algorithm>
#include <cmath>

#include "tdr/parallel.hpp"
#include "tdr/rng.hpp"
#include "tdr/stats.hpp"

namespace tdr {

namespace {

std::vector<std::vector<int>> k_subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// scalar renormalization threshold: keeps every wedge-level product well
// inside double range for words of any length
constexpr double kRenormHi = 1e100;
constexpr double kRenormLo = 1e-100;

void renorm_inplace(Eigen::MatrixXd& m, double& log_scale) {
  const double c = m.cwiseAbs().maxCoeff();
  if (c == 0.0 || !std::isfinite(c)) throw NumericalError("degenerate product matrix");
  if (c > kRenormHi || c < kRenormLo) {
    m /= c;
    log_scale += std::log(c);
  }
}

double top_log_sv(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return std::log(svd.singularValues()[0]);
}

}  // namespace

Eigen::MatrixXd wedge_matrix(const Eigen::MatrixXd& g, int k) {
  const int d = static_cast<int>(g.rows());
  if (k == 1) return g;
  const auto subs = k_subsets(d, k);
  const int n = static_cast<int>(subs.size());
  Eigen::MatrixXd w(n, n);
  Eigen::MatrixXd minor(k, k);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          minor(i, j) = g(subs[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)],
                          subs[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)]);
      w(a, b) = minor.determinant();
    }
  return w;
}

CartanFrame cartan_projection(const Eigen::MatrixXd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CartanFrame f;
  const auto& sv = svd.singularValues();
  f.kappa.resize(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (!(sv[i] > 0.0) || !std::isfinite(sv[i]))
      throw NumericalError("singular values left the float range; renormalize first");
    f.kappa[i] = std::log(sv[i]);
  }
  f.left = svd.matrixU();
  f.right = svd.matrixV();
  return f;
}

RenormProduct renormalized_product(const Word& w, const WalkConfig& cfg) {
  const int d = cfg.dim;
  // per-level renormalized exterior-power products
  std::vector<Eigen::MatrixXd> prod;
  std::vector<double> scale(static_cast<std::size_t>(d - 1), 0.0);
  std::vector<std::vector<Eigen::MatrixXd>> gen_wedge(static_cast<std::size_t>(d - 1));
  for (int k = 1; k < d; ++k) {
    const int n = k == 1 ? d : static_cast<int>(k_subsets(d, k).size());
    prod.push_back(Eigen::MatrixXd::Identity(n, n));
    gen_wedge[static_cast<std::size_t>(k - 1)].reserve(cfg.gen_d.size());
    for (const auto& g : cfg.gen_d)
      gen_wedge[static_cast<std::size_t>(k - 1)].push_back(wedge_matrix(g, k));
  }
  for (int letter : w.letters) {
    for (int k = 1; k < d; ++k) {
      auto& m = prod[static_cast<std::size_t>(k - 1)];
      m = m * gen_wedge[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(letter)];
      renorm_inplace(m, scale[static_cast<std::size_t>(k - 1)]);
    }
  }
  RenormProduct out;
  out.renormalized = prod[0];
  out.log_scale = scale[0];
  // kappa from the accumulated top log-norms of the exterior powers
  Eigen::VectorXd s(d + 1);
  s[0] = 0.0;
  for (int k = 1; k < d; ++k)
    s[k] = top_log_sv(prod[static_cast<std::size_t>(k - 1)]) + scale[static_cast<std::size_t>(k - 1)];
  s[d] = 0.0;  // determinant one
  out.frame.kappa.resize(d);
  for (int i = 0; i < d; ++i) out.frame.kappa[i] = s[i + 1] - s[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod[0], Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.frame.left = svd.matrixU();
  out.frame.right = svd.matrixV();
  return out;
}

LyapunovEstimate lyapunov_estimate_with_streams(const WalkConfig& cfg, int n,
                                                const std::vector<std::uint64_t>& replica_seeds) {
  if (n < 100) throw PreconditionError("lyapunov_estimate needs n >= 100");
  if (replica_seeds.size() < 30) throw PreconditionError("lyapunov_estimate needs N >= 30");
  double bound = 0.0;
  for (const auto& g : cfg.gen_d) bound = std::max(bound, g.operatorNorm());
  if (bound <= 1.0 + 1e-12)
    throw PreconditionError("semigroup image is bounded; no positive exponent to estimate");

  RunningStat stat;
  for (const auto rs : replica_seeds) {
    Rng rng(rs);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      m = m * cfg.gen_d[static_cast<std::size_t>(rng.categorical(cfg.cum_probs))];
      renorm_inplace(m, scale);
    }
    stat.add((top_log_sv(m) + scale) / static_cast<double>(n));
  }
  LyapunovEstimate e;
  e.lambda = stat.mean();
  const auto ci = mean_ci95(stat);
  e.ci_lo = ci.lo;
  e.ci_hi = ci.hi;
  e.n = n;
  e.N = static_cast<int>(replica_seeds.size());
  return e;
}

LyapunovEstimate lyapunov_estimate(const WalkConfig& cfg, int n, int N,
                                   std::uint64_t seed, int threads) {
  if (n < 100) throw PreconditionError("lyapunov_estimate needs n >= 100");
  if (N < 30) throw PreconditionError("lyapunov_estimate needs N >= 30");
  double bound = 0.0;
  for (const auto& g : cfg.gen_d) bound = std::max(bound, g.operatorNorm());
  if (bound <= 1.0 + 1e-12)
    throw PreconditionError("semigroup image is bounded; no positive exponent to estimate");

  RunningStat stat;
  run_chunked<RunningStat>(
      N, threads, std::max(1, N / 64),
      [&](long long lo, long long hi) {
        RunningStat s;
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
          Eigen::MatrixXd m = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
          double scale = 0.0;
          for (int i = 0; i < n; ++i) {
            m = m * cfg.gen_d[static_cast<std::size_t>(rng.categorical(cfg.cum_probs))];
            renorm_inplace(m, scale);
          }
          s.add((top_log_sv(m) + scale) / static_cast<double>(n));
        }
        return s;
      },
      [&](RunningStat&& s) { stat.merge(s); });
  LyapunovEstimate e;
  e.lambda = stat.mean();
  const auto ci = mean_ci95(stat);
  e.ci_lo = ci.lo;
  e.ci_hi = ci.hi;
  e.n = n;
  e.N = N;
  return e;
}

Flag Flag::standard(int d) {
  Flag f;
  f.q_ = Eigen::MatrixXd::Identity(d, d);
  return f;
}

Flag Flag::from_orthonormal(Eigen::MatrixXd q) {
  Flag f;
  f.q_ = std::move(q);
  return f;
}

Flag Flag::from_frame(const CartanFrame& f, double gap_tol) {
  const int d = static_cast<int>(f.kappa.size());
  for (int i = 0; i + 1 < d; ++i)
    if (f.kappa[i] - f.kappa[i + 1] <= gap_tol)
      throw GapError("no singular gap at level " + std::to_string(i + 1));
  return from_orthonormal(f.left);
}

Flag Flag::transported(const Eigen::MatrixXd& g) const {
  Eigen::MatrixXd t = g * q_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(t);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return from_orthonormal(std::move(q));
}

Eigen::VectorXd iwasawa_cocycle(const Eigen::MatrixXd& g, const Flag& xi) {
  const int d = static_cast<int>(g.rows());
  Eigen::VectorXd x(d);
  double s_prev = 0.0;
  const Eigen::MatrixXd image = g * xi.basis();
  for (int k = 1; k < d; ++k) {
    const Eigen::MatrixXd b = image.leftCols(k);
    const Eigen::MatrixXd gram = b.transpose() * b;
    const double det = gram.determinant();
    if (!(det > 0.0) || !std::isfinite(det))
      throw NumericalError("wedge norm underflow in iwasawa_cocycle");
    const double s_k = 0.5 * std::log(det);
    x[k - 1] = s_k - s_prev;
    s_prev = s_k;
  }
  x[d - 1] = -s_prev;  // determinant one: total log volume growth is zero
  return x;
}

DensityPoints density_points(const CartanFrame& f, int r, double gap_tol) {
  const int d = static_cast<int>(f.kappa.size());
  if (r < 1 || r >= d) throw PreconditionError("density_points needs 1 <= r < d");
  if (f.kappa[r - 1] - f.kappa[r] <= gap_tol)
    throw GapError("no singular gap at level " + std::to_string(r));
  DensityPoints p;
  p.xi_plus = f.left.leftCols(r);
  p.v_minus = f.right.rightCols(d - r);
  return p;
}

GrowthContractionReport check_growth_contraction(const Eigen::MatrixXd& g,
                                                 const Eigen::VectorXd& v,
                                                 double slack) {
  if (v.norm() == 0.0) throw PreconditionError("v must be nonzero");
  const CartanFrame f = cartan_projection(g);
  const int d = static_cast<int>(f.kappa.size());
  if (f.kappa[0] - f.kappa[1] <= 1e-9) throw GapError("no top singular gap");

  GrowthContractionReport rep;
  rep.kappa_top = f.kappa[0];
  const double vn = v.norm();
  rep.dist_v_minus = std::abs(f.right.col(0).dot(v)) / vn;
  const Eigen::VectorXd gv = g * v;
  rep.norm_gv = gv.norm();
  rep.upper = std::exp(rep.kappa_top) * vn;
  rep.lower = rep.upper * rep.dist_v_minus;
  // additive floors: projective distances and inner products carry an
  // absolute double-precision error that the theoretical bounds may undercut
  const double norm_floor = 1e-13 * rep.upper;
  rep.norm_ok = rep.lower <= rep.norm_gv * (1.0 + slack) + norm_floor &&
                rep.norm_gv <= rep.upper * (1.0 + slack) + norm_floor;

  double min_gap = f.kappa[0] - f.kappa[1];
  for (int i = 1; i + 1 < d; ++i) min_gap = std::min(min_gap, f.kappa[i] - f.kappa[i + 1]);
  const double contraction = std::exp(-min_gap);
  rep.dir_bound = rep.dist_v_minus > 0.0
                      ? contraction / rep.dist_v_minus
                      : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd gvu = gv / rep.norm_gv;
  const Eigen::VectorXd residual = gvu - f.left.col(0) * (f.left.col(0).dot(gvu));
  rep.dir_dist = residual.norm();
  rep.dir_ok = rep.dir_dist <= rep.dir_bound * (1.0 + slack) + 1e-12;
  return rep;
}

Flag lookahead_flag(const WalkConfig& cfg, const Word& w, int n, int lookahead) {
  if (static_cast<int>(w.size()) < n + lookahead)
    throw PreconditionError("word too short for requested lookahead");
  Word tail;
  tail.letters.assign(w.letters.begin() + n, w.letters.begin() + n + lookahead);
  const RenormProduct p = renormalized_product(tail, cfg);
  return Flag::from_frame(p.frame);
}

Eigen::VectorXd iwasawa_along_word(const WalkConfig& cfg, const Word& w, int n,
                                   const Flag& xi) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(cfg.dim);
  Flag cur = xi;
  for (int i = n - 1; i >= 0; --i) {
    const auto& g = cfg.gen_d[static_cast<std::size_t>(w.letters[static_cast<std::size_t>(i)])];
    acc += iwasawa_cocycle(g, cur);
    cur = cur.transported(g);
  }
  return acc;
}

Eigen::VectorXd theta_n(const WalkConfig& cfg, const Word& w, int n, int lookahead) {
  if (n == 0) return Eigen::VectorXd::Zero(cfg.dim);
  const Flag xi = lookahead_flag(cfg, w, n, lookahead);
  return iwasawa_along_word(cfg, w, n, xi);
}

double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  // sin of the largest principal angle, computed as ||(I - B B^T) A|| so
  // that nearly-equal subspaces do not lose precision to cancellation
  const Eigen::MatrixXd residual = a - b * (b.transpose() * a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return std::min(1.0, svd.singularValues().maxCoeff());
}

DensityConvergenceResult density_convergence(const WalkConfig& cfg,
                                             const std::vector<int>& n_list, int N,
                                             std::uint64_t seed, int r) {
  DensityConvergenceResult out;
  std::vector<double> xs, ys;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    std::vector<double> dists;
    int dropped = 0;
    for (int rep = 0; rep < N; ++rep) {
      Rng rng = Rng::stream(seed + static_cast<std::uint64_t>(ni) * 0x9e37ULL,
                            static_cast<std::uint64_t>(rep));
      Word w;
      w.letters.reserve(static_cast<std::size_t>(2 * n));
      for (int i = 0; i < 2 * n; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
      Word half;
      half.letters.assign(w.letters.begin(), w.letters.begin() + n);
      try {
        const auto ph = renormalized_product(half, cfg);
        const auto pf = renormalized_product(w, cfg);
        const auto dh = density_points(ph.frame, r);
        const auto df = density_points(pf.frame, r);
        dists.push_back(subspace_distance(dh.xi_plus, df.xi_plus));
      } catch (const GapError&) {
        ++dropped;
      }
    }
    DensityConvergenceRow row;
    row.n = n;
    row.median_dist = median(dists);
    row.dropped = dropped;
    out.rows.push_back(row);
    if (row.median_dist > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(row.median_dist));
    }
  }
  const LineFit fit = fit_line(xs, ys);
  out.rate = -fit.slope;
  return out;
}

}  // namespace tdr
