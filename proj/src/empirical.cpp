#include "tdr/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tdr {

EmpiricalMeasure EmpiricalMeasure::from_trajectory(const Trajectory& tr, int burn_in) {
  EmpiricalMeasure m;
  for (std::size_t i = static_cast<std::size_t>(std::max(0, burn_in)); i < tr.states.size(); ++i)
    m.add(tr.states[i], 1.0);
  return m;
}

EmpiricalMeasure EmpiricalMeasure::uniform_on(const std::vector<TorusPoint>& points) {
  if (points.empty()) throw PreconditionError("uniform measure on empty orbit");
  EmpiricalMeasure m;
  const double w = 1.0 / static_cast<double>(points.size());
  for (const auto& p : points) m.add({p, 0.0}, w);
  return m;
}

void EmpiricalMeasure::add(StateXT s, double w) {
  if (w <= 0.0) throw PreconditionError("weights must be positive");
  samples.emplace_back(std::move(s), w);
  total_weight += w;
}

void EmpiricalMeasure::validate() const {
  double s = 0.0;
  for (const auto& [st, w] : samples) {
    if (w <= 0.0) throw PreconditionError("weights must be positive");
    s += w;
  }
  if (std::abs(s - total_weight) > 1e-9 * std::max(1.0, std::abs(total_weight)))
    throw PreconditionError("total_weight inconsistent with samples");
}

std::complex<double> weyl_sum(const EmpiricalMeasure& m, const Eigen::VectorXi& k) {
  if (m.samples.empty()) return {0.0, 0.0};
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [s, w] : m.samples) {
    const Eigen::VectorXd x = s.x.to_double();
    double phase = 0.0;
    for (int i = 0; i < k.size(); ++i) phase += k[i] * x[i];
    acc += w * std::complex<double>(std::cos(2.0 * M_PI * phase), std::sin(2.0 * M_PI * phase));
  }
  return acc / m.total_weight;
}

std::vector<Atom> atom_detect(const EmpiricalMeasure& m, double radius, double threshold) {
  if (!(radius > 0.0)) throw PreconditionError("radius must be positive");
  std::vector<Atom> atoms;
  if (m.samples.empty()) return atoms;

  const int d = m.samples[0].first.x.dim();
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ws;
  xs.reserve(m.samples.size());
  for (const auto& [s, w] : m.samples) {
    xs.push_back(s.x.to_double());
    ws.push_back(w);
  }
  // bucket grid with wraparound so neighbor queries stay local
  const int cells = std::max(1, static_cast<int>(std::floor(1.0 / radius)));
  std::map<std::vector<int>, std::vector<int>> grid;
  auto cell_of = [&](const Eigen::VectorXd& x) {
    std::vector<int> c(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      c[static_cast<std::size_t>(i)] =
          std::min(cells - 1, static_cast<int>(std::floor(x[i] * cells)));
    return c;
  };
  for (std::size_t i = 0; i < xs.size(); ++i) grid[cell_of(xs[i])].push_back(static_cast<int>(i));

  std::vector<char> used(xs.size(), 0);
  auto neighborhood = [&](int i) {
    std::vector<int> out;
    const auto base = cell_of(xs[static_cast<std::size_t>(i)]);
    std::vector<int> offset(static_cast<std::size_t>(d), -1);
    for (;;) {
      std::vector<int> c(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j)
        c[static_cast<std::size_t>(j)] =
            ((base[static_cast<std::size_t>(j)] + offset[static_cast<std::size_t>(j)]) % cells + cells) % cells;
      const auto it = grid.find(c);
      if (it != grid.end())
        for (int cand : it->second)
          if (!used[static_cast<std::size_t>(cand)] &&
              torus_distance(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(cand)]) <= radius)
            out.push_back(cand);
      int j = 0;
      while (j < d && offset[static_cast<std::size_t>(j)] == 1) offset[static_cast<std::size_t>(j++)] = -1;
      if (j == d) break;
      ++offset[static_cast<std::size_t>(j)];
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  for (;;) {
    double best_mass = 0.0;
    int best = -1;
    std::vector<int> best_members;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (used[i]) continue;
      const auto members = neighborhood(static_cast<int>(i));
      double mass = 0.0;
      for (int j : members) mass += ws[static_cast<std::size_t>(j)];
      if (mass > best_mass) {
        best_mass = mass;
        best = static_cast<int>(i);
        best_members = members;
      }
    }
    if (best < 0 || best_mass / m.total_weight < threshold) break;
    Atom a;
    a.center = xs[static_cast<std::size_t>(best)];
    a.mass = best_mass / m.total_weight;
    atoms.push_back(a);
    for (int j : best_members) used[static_cast<std::size_t>(j)] = 1;
  }
  return atoms;
}

double real_marginal_invariance(const EmpiricalMeasure& m,
                                const std::vector<double>& shifts, int bins,
                                std::pair<double, double> window) {
  if (bins < 3) throw PreconditionError("need at least 3 bins");
  const double w0 = window.first, w1 = window.second;
  if (!(w1 > w0)) throw PreconditionError("empty histogram window");
  double smax = 0.0;
  for (double s : shifts) smax = std::max(smax, std::abs(s));
  const double h = (w1 - w0) / bins;

  auto histogram = [&](double shift) {
    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    for (const auto& [st, w] : m.samples) {
      const double t = st.t + shift;
      if (t < w0 || t >= w1) continue;
      const int b = std::min(bins - 1, static_cast<int>((t - w0) / h));
      hist[static_cast<std::size_t>(b)] += w / m.total_weight;
    }
    return hist;
  };

  const auto base = histogram(0.0);
  double worst = 0.0;
  for (double s : shifts) {
    const auto shifted = histogram(s);
    double l1 = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double lo = w0 + b * h, hi = lo + h;
      if (lo < w0 + smax || hi > w1 - smax) continue;  // edge bins excluded
      l1 += std::abs(base[static_cast<std::size_t>(b)] - shifted[static_cast<std::size_t>(b)]);
    }
    worst = std::max(worst, l1);
  }
  return worst;
}

EmpiricalMeasure pushforward_step_exact(const EmpiricalMeasure& m, const WalkConfig& cfg) {
  std::map<std::string, std::pair<TorusPoint, double>> acc;
  for (const auto& [s, w] : m.samples) {
    if (!s.x.exact()) throw PreconditionError("exact pushforward needs exact points");
    for (std::size_t gi = 0; gi < cfg.generators.size(); ++gi) {
      TorusPoint y = apply_torus(cfg.generators[gi], s.x);
      auto [it, fresh] = acc.emplace(y.key(), std::make_pair(y, 0.0));
      it->second.second += w * cfg.probs[gi];
    }
  }
  EmpiricalMeasure out;
  for (auto& [key, pw] : acc) out.add({pw.first, 0.0}, pw.second);
  return out;
}

PushforwardResult pushforward_convergence(const WalkConfig& cfg, const EmpiricalMeasure& m0,
                                          const Word& word, const std::vector<int>& checkpoints) {
  PushforwardResult out;
  out.checkpoints = checkpoints;
  std::sort(out.checkpoints.begin(), out.checkpoints.end());
  if (!out.checkpoints.empty() &&
      out.checkpoints.back() > static_cast<int>(word.size()))
    throw PreconditionError("checkpoint beyond word length");

  // dictionary: nonzero characters with entries in [-3,3], times triangular
  // bumps of unit width centered at integers -2..2
  std::vector<Eigen::VectorXi> ks;
  {
    Eigen::VectorXi k(cfg.dim);
    std::vector<int> idx(static_cast<std::size_t>(cfg.dim), -3);
    for (;;) {
      bool zero = true;
      for (int i = 0; i < cfg.dim; ++i) {
        k[i] = idx[static_cast<std::size_t>(i)];
        if (k[i] != 0) zero = false;
      }
      if (!zero) ks.push_back(k);
      int j = 0;
      while (j < cfg.dim && idx[static_cast<std::size_t>(j)] == 3) idx[static_cast<std::size_t>(j++)] = -3;
      if (j == cfg.dim) break;
      ++idx[static_cast<std::size_t>(j)];
    }
  }
  const std::vector<double> bump_centers{-2, -1, 0, 1, 2};

  auto evaluate = [&](const std::vector<std::pair<StateXT, double>>& samples, double total) {
    std::vector<double> vals;
    vals.reserve(ks.size() * bump_centers.size() * 2);
    for (const auto& k : ks) {
      for (double c : bump_centers) {
        std::complex<double> acc{0.0, 0.0};
        for (const auto& [s, w] : samples) {
          const double bump = std::max(0.0, 1.0 - std::abs(s.t - c));
          if (bump == 0.0) continue;
          const Eigen::VectorXd x = s.x.to_double();
          double phase = 0.0;
          for (int i = 0; i < k.size(); ++i) phase += k[i] * x[i];
          acc += w * bump *
                 std::complex<double>(std::cos(2.0 * M_PI * phase), std::sin(2.0 * M_PI * phase));
        }
        acc /= total;
        vals.push_back(acc.real());
        vals.push_back(acc.imag());
      }
    }
    return vals;
  };

  auto samples = m0.samples;
  int applied = 0;
  for (int cp : out.checkpoints) {
    for (; applied < cp; ++applied) {
      const auto& g = cfg.generators[static_cast<std::size_t>(word.letters[static_cast<std::size_t>(applied)])];
      for (auto& [s, w] : samples) s = apply(g, s);
    }
    out.evaluations.push_back(evaluate(samples, m0.total_weight));
  }
  for (std::size_t c = 1; c < out.evaluations.size(); ++c) {
    double worst = 0.0;
    for (std::size_t f = 0; f < out.evaluations[c].size(); ++f)
      worst = std::max(worst, std::abs(out.evaluations[c][f] - out.evaluations[c - 1][f]));
    out.cauchy.push_back(worst);
  }
  return out;
}

}  // namespace tdr
