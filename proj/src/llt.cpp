#include "tdr/llt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdr/cartan.hpp"
#include "tdr/errors.hpp"
#include "tdr/parallel.hpp"
#include "tdr/rng.hpp"
#include "tdr/stats.hpp"

namespace tdr {

namespace {
constexpr long long kSupportGuard = 10'000'000;
}

double LatticeDist::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i)
    m += mass[i] * static_cast<double>(offset + static_cast<long long>(i));
  return m;
}

double LatticeDist::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double x = static_cast<double>(offset + static_cast<long long>(i)) - m;
    v += mass[i] * x * x;
  }
  return v;
}

void LatticeDist::validate() const {
  double s = 0.0;
  for (double m : mass) {
    if (m < 0.0) throw PreconditionError("negative lattice mass");
    s += m;
  }
  if (std::abs(s - 1.0) > 1e-12) throw PreconditionError("lattice masses do not sum to 1");
  if (rational()) {
    BigRat rs = 0;
    for (const auto& r : rmass) rs += r;
    if (rs != 1) throw PreconditionError("rational lattice masses do not sum to 1");
  }
}

LatticeDist lattice_from_rationals(long long offset, const std::vector<BigRat>& masses) {
  LatticeDist d;
  d.offset = offset;
  d.rmass = masses;
  d.mass.reserve(masses.size());
  for (const auto& r : masses) d.mass.push_back(static_cast<double>(r));
  d.validate();
  return d;
}

LatticeDist lattice_from_doubles(long long offset, const std::vector<double>& masses) {
  LatticeDist d;
  d.offset = offset;
  d.mass = masses;
  d.validate();
  return d;
}

LatticeDist chi_lattice_of(const WalkConfig& cfg) {
  if (!cfg.chi_integer_valued())
    throw PreconditionError("chi values are not integers");
  long long lo = 0, hi = 0;
  for (const auto& g : cfg.generators) {
    const long long c = std::llround(g.chi);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  std::vector<BigRat> masses(static_cast<std::size_t>(hi - lo + 1), BigRat(0));
  for (std::size_t i = 0; i < cfg.generators.size(); ++i) {
    const long long c = std::llround(cfg.generators[i].chi);
    masses[static_cast<std::size_t>(c - lo)] += BigRat(cfg.probs[i]);  // doubles are exact rationals
  }
  BigRat total = 0;
  for (const auto& m : masses) total += m;
  if (total == 1) return lattice_from_rationals(lo, masses);
  std::vector<double> dm;
  dm.reserve(masses.size());
  for (const auto& m : masses) dm.push_back(static_cast<double>(m));
  return lattice_from_doubles(lo, dm);
}

LatticeDist lattice_dp(const LatticeDist& step, long long n) {
  if (n < 0) throw PreconditionError("lattice_dp needs n >= 0");
  step.validate();
  if (n == 0) {
    LatticeDist d;
    d.offset = 0;
    d.mass = {1.0};
    if (step.rational()) d.rmass = {BigRat(1)};
    return d;
  }
  const long long width = static_cast<long long>(step.mass.size());
  const long long out_size = n * (width - 1) + 1;
  if (out_size > kSupportGuard) throw NumericalError("lattice support exceeds guard");

  if (step.rational()) {
    std::vector<BigRat> cur = {BigRat(1)};
    for (long long it = 0; it < n; ++it) {
      std::vector<BigRat> next(cur.size() + static_cast<std::size_t>(width) - 1, BigRat(0));
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (cur[i] == 0) continue;
        for (std::size_t j = 0; j < step.rmass.size(); ++j)
          next[i + j] += cur[i] * step.rmass[j];
      }
      cur.swap(next);
    }
    return lattice_from_rationals(n * step.offset, cur);
  }

  std::vector<double> cur = {1.0};
  for (long long it = 0; it < n; ++it) {
    std::vector<double> next(cur.size() + static_cast<std::size_t>(width) - 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double c = cur[i];
      if (c == 0.0) continue;
      for (std::size_t j = 0; j < step.mass.size(); ++j) next[i + j] += c * step.mass[j];
    }
    cur.swap(next);
  }
  LatticeDist d;
  d.offset = n * step.offset;
  d.mass = std::move(cur);
  return d;
}

namespace {

// First-passage decomposition: v_k = restriction to nonzero levels of the
// walk killed at 0;  f(k) = mass arriving at 0 at step k.
template <class Num>
std::vector<Num> return_dp_impl(const LatticeDist& step, int kmax,
                                const std::vector<Num>& step_mass) {
  const long long a = std::max(std::llabs(step.min()), std::llabs(step.max()));
  const long long span = a * (kmax + 1) + 1;
  const std::size_t size = static_cast<std::size_t>(2 * span + 1);
  const long long mid = span;
  std::vector<Num> v(size, Num(0)), next(size, Num(0));
  v[static_cast<std::size_t>(mid)] = Num(1);
  std::vector<Num> f(static_cast<std::size_t>(kmax + 1), Num(0));
  for (int k = 1; k <= kmax; ++k) {
    std::fill(next.begin(), next.end(), Num(0));
    Num hit0(0);
    for (std::size_t i = 0; i < size; ++i) {
      if (v[i] == Num(0)) continue;
      for (std::size_t j = 0; j < step_mass.size(); ++j) {
        const long long to = static_cast<long long>(i) + step.offset + static_cast<long long>(j);
        if (to < 0 || to >= static_cast<long long>(size)) continue;
        const Num add = v[i] * step_mass[j];
        if (to == mid)
          hit0 += add;
        else
          next[static_cast<std::size_t>(to)] += add;
      }
    }
    f[static_cast<std::size_t>(k)] = hit0;
    v.swap(next);
  }
  f.erase(f.begin());  // index from k = 1
  return f;
}

}  // namespace

std::vector<BigRat> return_time_dp_exact(const LatticeDist& step, int kmax) {
  if (!step.rational()) throw PreconditionError("exact return-time DP needs rational masses");
  if (kmax > 1000) throw PreconditionError("rational mode supports kmax <= 1000");
  if (step.mass.size() == 1 && step.offset == 0)
    throw PreconditionError("chi is identically zero; tau is trivially 1");
  return return_dp_impl<BigRat>(step, kmax, step.rmass);
}

std::vector<double> return_time_dp(const LatticeDist& step, int kmax) {
  if (step.mass.size() == 1 && step.offset == 0)
    throw PreconditionError("chi is identically zero; tau is trivially 1");
  return return_dp_impl<double>(step, kmax, step.mass);
}

std::vector<Llt1dRow> llt_1d_check(const LatticeDist& step,
                                   const std::vector<long long>& n_list) {
  step.validate();
  if (std::abs(step.mean()) > 1e-12)
    throw PreconditionError("step distribution is not centered");
  // period = gcd of support differences
  long long g = 0;
  long long first = 0;
  bool have_first = false;
  for (std::size_t i = 0; i < step.mass.size(); ++i) {
    if (step.mass[i] <= 0.0) continue;
    const long long s = step.offset + static_cast<long long>(i);
    if (!have_first) {
      first = s;
      have_first = true;
    } else {
      g = std::gcd(g, std::llabs(s - first));
    }
  }
  if (g != 1)
    throw PreconditionError("step distribution is periodic with period " + std::to_string(g));

  const double sigma2 = step.variance();
  const double limit = 1.0 / std::sqrt(2.0 * M_PI * sigma2);

  std::vector<long long> ns = n_list;
  std::sort(ns.begin(), ns.end());
  std::vector<Llt1dRow> rows;
  // incremental convolution, reading off P(S_n = 0) at each checkpoint
  LatticeDist cur;
  cur.offset = 0;
  cur.mass = {1.0};
  long long done = 0;
  for (long long n : ns) {
    for (; done < n; ++done) {
      std::vector<double> next(cur.mass.size() + step.mass.size() - 1, 0.0);
      for (std::size_t i = 0; i < cur.mass.size(); ++i) {
        const double c = cur.mass[i];
        if (c == 0.0) continue;
        for (std::size_t j = 0; j < step.mass.size(); ++j) next[i + j] += c * step.mass[j];
      }
      if (static_cast<long long>(next.size()) > kSupportGuard)
        throw NumericalError("lattice support exceeds guard");
      cur.mass = std::move(next);
      cur.offset += step.offset;
    }
    Llt1dRow row;
    row.n = n;
    row.exact = std::sqrt(static_cast<double>(n)) * cur.p(0);
    row.limit = limit;
    row.rel_err = std::abs(row.exact - limit) / limit;
    rows.push_back(row);
  }
  return rows;
}

long long period_detect(const WalkConfig& cfg, int N, int n, std::uint64_t seed) {
  if (!cfg.chi_integer_valued())
    throw PreconditionError("period_detect needs integer chi values");
  if (N < 2) return 0;
  std::vector<long long> chis;
  chis.reserve(static_cast<std::size_t>(N));
  for (int r = 0; r < N; ++r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
    long long c = 0;
    for (int i = 0; i < n; ++i)
      c += std::llround(cfg.chi[static_cast<std::size_t>(rng.categorical(cfg.cum_probs))]);
    chis.push_back(c);
  }
  long long g = 0;
  for (std::size_t i = 1; i < chis.size(); ++i) g = std::gcd(g, std::llabs(chis[i] - chis[0]));
  return g;
}

JointLltResult joint_llt_estimate(const WalkConfig& cfg,
                                  std::pair<double, double> U,
                                  std::pair<double, double> I,
                                  const std::vector<int>& n_list, long long N,
                                  std::uint64_t seed, int threads,
                                  double lambda_hat_override) {
  if (cfg.dim != 2)
    throw PreconditionError("joint LLT estimator is restricted to d = 2");
  JointLltResult out;
  out.lambda_hat = lambda_hat_override > 0.0
                       ? lambda_hat_override
                       : lyapunov_estimate(cfg, 10000, 100, seed ^ 0x5bd1e995ULL, threads).lambda;

  // reference flag: a converged direction from an auxiliary stream
  Eigen::Vector2d v0;
  {
    Rng rng(seed ^ 0x94d049bb133111ebULL);
    Word w;
    for (int i = 0; i < 300; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
    const RenormProduct p = renormalized_product(w, cfg);
    v0 = p.frame.left.col(0);
  }

  std::vector<int> ns = n_list;
  std::sort(ns.begin(), ns.end());
  const int max_n = ns.back();

  struct Chunk {
    std::vector<long long> hits;
  };
  std::vector<long long> hits(ns.size(), 0);

  run_chunked<Chunk>(
      N, threads, 4096,
      [&](long long lo, long long hi) {
        Chunk ck;
        ck.hits.assign(ns.size(), 0);
        const int ngen = cfg.n_generators();
        // flat copies of the 2x2 generators for the inner loop
        std::vector<double> g00(ngen), g01(ngen), g10(ngen), g11(ngen), gchi(ngen);
        for (int i = 0; i < ngen; ++i) {
          g00[i] = cfg.gen_d[i](0, 0);
          g01[i] = cfg.gen_d[i](0, 1);
          g10[i] = cfg.gen_d[i](1, 0);
          g11[i] = cfg.gen_d[i](1, 1);
          gchi[i] = cfg.chi[i];
        }
        for (long long r = lo; r < hi; ++r) {
          Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
          double x = v0[0], y = v0[1];
          double log_norm = 0.0, chi = 0.0;
          std::size_t next_cp = 0;
          for (int step = 1; step <= max_n; ++step) {
            const int l = rng.categorical(cfg.cum_probs);
            const double nx = g00[l] * x + g01[l] * y;
            const double ny = g10[l] * x + g11[l] * y;
            x = nx;
            y = ny;
            chi += gchi[l];
            const double n2 = x * x + y * y;
            if (n2 > 1e200 || n2 < 1e-200) {
              const double s = std::sqrt(n2);
              x /= s;
              y /= s;
              log_norm += std::log(s);
            }
            if (step == ns[next_cp]) {
              const double omega = log_norm + 0.5 * std::log(x * x + y * y);
              const double dev = omega - static_cast<double>(step) * out.lambda_hat;
              if (dev >= U.first && dev <= U.second && chi >= I.first && chi <= I.second)
                ++ck.hits[next_cp];
              ++next_cp;
              if (next_cp == ns.size()) break;
            }
          }
        }
        return ck;
      },
      [&](Chunk&& ck) {
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += ck.hits[i];
      });

  for (std::size_t i = 0; i < ns.size(); ++i) {
    JointLltRow row;
    row.n = ns[i];
    row.p_hat = static_cast<double>(hits[i]) / static_cast<double>(N);
    const double scale = static_cast<double>(ns[i]);  // n^{(l+1)/2} with l = 1
    row.scaled = scale * row.p_hat;
    const Interval ci = proportion_ci95(hits[i], N);
    row.ci_lo = scale * ci.lo;
    row.ci_hi = scale * ci.hi;
    row.wide_ci = row.scaled > 0.0 && (row.ci_hi - row.ci_lo) > row.scaled;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace tdr
