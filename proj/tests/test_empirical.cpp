#include <doctest.h>

#include <cmath>

#include "tdr/empirical.hpp"
#include "tdr/orbits.hpp"
#include "tdr/rng.hpp"

using namespace tdr;

namespace {

EmpiricalMeasure haar_samples(int n, std::uint64_t seed, double t_span = 0.0) {
  Rng rng(seed);
  EmpiricalMeasure m;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(2);
    x << rng.u01(), rng.u01();
    const double t = t_span > 0.0 ? (rng.u01() - 0.5) * t_span : 0.0;
    m.add({TorusPoint::floating(x), t}, 1.0);
  }
  return m;
}

}  // namespace

TEST_CASE("weyl_sum") {
  SUBCASE("all mass at zero gives one") {
    const EmpiricalMeasure m = EmpiricalMeasure::uniform_on({TorusPoint::zero_exact(2)});
    Eigen::VectorXi k(2);
    k << 1, 0;
    CHECK(std::abs(weyl_sum(m, k) - std::complex<double>(1, 0)) < 1e-15);
  }
  SUBCASE("frequency zero gives exactly one on normalized measures") {
    const EmpiricalMeasure m = haar_samples(1000, 4);
    Eigen::VectorXi k(2);
    k << 0, 0;
    CHECK(weyl_sum(m, k).real() == 1.0);
    CHECK(weyl_sum(m, k).imag() == 0.0);
  }
  SUBCASE("independent uniform samples decay like 1/sqrt(N)") {
    const int N = 10000;
    const EmpiricalMeasure m = haar_samples(N, 5);
    Eigen::VectorXi k(2);
    k << 1, 0;
    CHECK(std::abs(weyl_sum(m, k)) <= 3.0 / std::sqrt(static_cast<double>(N)));
  }
}

TEST_CASE("atom_detect") {
  const WalkConfig cfg = reference_model();
  SUBCASE("uniform orbit measure shows both atoms") {
    const auto orbit = rational_orbit(TorusPoint::rational({{1, 4}, {0, 1}}), cfg);
    const EmpiricalMeasure m = EmpiricalMeasure::uniform_on(orbit);
    const auto atoms = atom_detect(m, 0.1, 0.3);
    REQUIRE(atoms.size() == 2);
    CHECK(atoms[0].mass == doctest::Approx(0.5));
    CHECK(atoms[1].mass == doctest::Approx(0.5));
  }
  SUBCASE("uniform samples have no atoms at small radius") {
    const EmpiricalMeasure m = haar_samples(10000, 6);
    CHECK(atom_detect(m, 0.01, 0.05).empty());
  }
  SUBCASE("empty measure gives an empty list") {
    EmpiricalMeasure m;
    CHECK(atom_detect(m, 0.1, 0.1).empty());
  }
  SUBCASE("masses sum to at most one") {
    const EmpiricalMeasure m = haar_samples(2000, 7);
    const auto atoms = atom_detect(m, 0.3, 0.01);
    double total = 0.0;
    for (const auto& a : atoms) total += a.mass;
    CHECK(total <= 1.0 + 1e-9);
  }
  SUBCASE("clusters straddling the torus seam are found") {
    EmpiricalMeasure m;
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd x(2);
      // tight blob wrapped around (0, 0.5)
      x << 0.99 + 0.02 * rng.u01(), 0.5 + 0.01 * rng.u01();
      m.add({TorusPoint::floating(x), 0.0}, 1.0);
    }
    const auto atoms = atom_detect(m, 0.05, 0.9);
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].mass == doctest::Approx(1.0));
  }
}

TEST_CASE("real_marginal_invariance") {
  SUBCASE("zero shift gives exactly zero") {
    const EmpiricalMeasure m = haar_samples(500, 8, 10.0);
    CHECK(real_marginal_invariance(m, {0.0}, 20, {-5, 5}) == 0.0);
  }
  SUBCASE("uniform t samples give sampling-noise discrepancy") {
    const EmpiricalMeasure m = haar_samples(20000, 9, 40.0);
    const double d = real_marginal_invariance(m, {1.0}, 20, {-10, 10});
    CHECK(d >= 0.0);
    CHECK(d < 0.1);
  }
}

TEST_CASE("pushforward_convergence") {
  const WalkConfig cfg = reference_model();
  SUBCASE("identity-like word gives a constant sequence") {
    // letters {0,1} fix the quarter point and keep chi at 0
    EmpiricalMeasure m0;
    m0.add({TorusPoint::rational({{1, 4}, {0, 1}}), 0.0}, 1.0);
    const Word w({0, 1, 0, 1, 0, 1, 0, 1});
    const auto r = pushforward_convergence(cfg, m0, w, {0, 2, 4, 6, 8});
    for (std::size_t c = 1; c < r.evaluations.size(); ++c)
      for (std::size_t f = 0; f < r.evaluations[c].size(); ++f)
        CHECK(r.evaluations[c][f] == r.evaluations[0][f]);
    for (double d : r.cauchy) CHECK(d == 0.0);
  }
  SUBCASE("orbit Dirac cycles exactly through finitely many values") {
    EmpiricalMeasure m0;
    m0.add({TorusPoint::rational({{1, 4}, {0, 1}}), 0.0}, 1.0);
    // alternating letters g1, g1^{-1}: even prefixes return to the start
    Word w;
    for (int i = 0; i < 20; ++i) w.letters.push_back(i % 2 == 0 ? 2 : 3);
    const auto r = pushforward_convergence(cfg, m0, w, {0, 2, 4, 6, 1, 3, 5});
    // checkpoints come back sorted: index == checkpoint here
    for (int c : {2, 4, 6})
      for (std::size_t f = 0; f < r.evaluations[0].size(); ++f)
        CHECK(r.evaluations[static_cast<std::size_t>(c)][f] ==
              r.evaluations[0][f]);
    for (int c : {3, 5})
      for (std::size_t f = 0; f < r.evaluations[1].size(); ++f)
        CHECK(r.evaluations[static_cast<std::size_t>(c)][f] ==
              doctest::Approx(r.evaluations[1][f]).epsilon(1e-12));
  }
  SUBCASE("uniform start stays uniform at noise scale") {
    const EmpiricalMeasure m0 = haar_samples(3000, 10, 6.0);
    Rng rng(11);
    Word w;
    for (int i = 0; i < 30; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
    const auto r = pushforward_convergence(cfg, m0, w, {0, 10, 20, 30});
    for (double d : r.cauchy) CHECK(d < 0.12);
  }
  SUBCASE("checkpoint beyond word rejected") {
    EmpiricalMeasure m0;
    m0.add({TorusPoint::zero_exact(2), 0.0}, 1.0);
    CHECK_THROWS_AS(pushforward_convergence(cfg, m0, Word({0}), {5}), PreconditionError);
  }
}
