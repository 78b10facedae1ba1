#include <doctest.h>

#include <cmath>

#include "tdr/cartan.hpp"
#include "tdr/rng.hpp"

using namespace tdr;

namespace {

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m(2, 2);
  m << a, 0, 0, b;
  return m;
}

Word random_word(const WalkConfig& cfg, int len, Rng& rng) {
  Word w;
  for (int i = 0; i < len; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
  return w;
}

}  // namespace

TEST_CASE("cartan_projection on simple matrices") {
  SUBCASE("identity") {
    const CartanFrame f = cartan_projection(Eigen::MatrixXd::Identity(3, 3));
    CHECK(f.kappa.cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("diag(2, 1/2)") {
    const CartanFrame f = cartan_projection(diag2(2.0, 0.5));
    CHECK(f.kappa[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(f.kappa[1] == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
    CHECK(std::abs(f.left(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(f.right(0, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("shear [[1,2],[0,1]]") {
    // oracle: top eigenvalue of g^T g computed from trace and determinant
    Eigen::MatrixXd g(2, 2);
    g << 1, 2, 0, 1;
    const Eigen::MatrixXd gtg = g.transpose() * g;
    const double tr = gtg.trace(), det = gtg.determinant();
    const double lam = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    const CartanFrame f = cartan_projection(g);
    CHECK(f.kappa[0] == doctest::Approx(0.5 * std::log(lam)).epsilon(1e-12));
    CHECK(f.kappa[0] == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));
    CHECK(f.kappa[0] + f.kappa[1] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("cartan frame invariants on random words") {
  const WalkConfig cfg = reference_model();
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const Word w = random_word(cfg, 1 + static_cast<int>(rng.next() % 12), rng);
    const Eigen::MatrixXd g = word_product(w, cfg).entries.to_double();
    const CartanFrame f = cartan_projection(g);
    CHECK(std::abs(f.kappa.sum()) < 1e-9);
    for (int i = 0; i + 1 < f.kappa.size(); ++i) CHECK(f.kappa[i] >= f.kappa[i + 1]);
    const Eigen::MatrixXd rec =
        f.left * f.kappa.array().exp().matrix().asDiagonal() * f.right.transpose();
    CHECK((rec - g).norm() / g.norm() < 1e-8);
    // transpose flips the bases and fixes kappa; tolerance scales with the
    // conditioning of the word product
    const CartanFrame ft = cartan_projection(g.transpose());
    CHECK((ft.kappa - f.kappa).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(subspace_distance(ft.left.col(0), f.right.col(0)) < 1e-7);
    CHECK(subspace_distance(ft.right.col(0), f.left.col(0)) < 1e-7);
  }
}

TEST_CASE("kappa subadditivity on sampled pairs") {
  const WalkConfig cfg = reference_model();
  Rng rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const Word w1 = random_word(cfg, 1 + static_cast<int>(rng.next() % 10), rng);
    const Word w2 = random_word(cfg, 1 + static_cast<int>(rng.next() % 10), rng);
    const Eigen::MatrixXd a = word_product(w1, cfg).entries.to_double();
    const Eigen::MatrixXd b = word_product(w2, cfg).entries.to_double();
    const double ka = cartan_projection(a).kappa[0];
    const double kb = cartan_projection(b).kappa[0];
    const double kab = cartan_projection(a * b).kappa[0];
    CHECK(kab <= ka + kb + 1e-9);
  }
}

TEST_CASE("renormalized_product agrees with the exact big-integer oracle") {
  const WalkConfig cfg = reference_model();
  Rng rng(31);
  SUBCASE("single letter matches cartan_projection") {
    const Word w({2});
    const RenormProduct p = renormalized_product(w, cfg);
    const CartanFrame direct = cartan_projection(cfg.gen_d[2]);
    CHECK((p.frame.kappa - direct.kappa).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.log_scale == 0.0);
  }
  SUBCASE("cancelling word") {
    const Word w({0, 1, 0, 1, 0, 1});
    const RenormProduct p = renormalized_product(w, cfg);
    CHECK(p.frame.kappa.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.log_scale == 0.0);
  }
  SUBCASE("length up to 60 vs exact product") {
    for (int len : {10, 25, 40, 60}) {
      const Word w = random_word(cfg, len, rng);
      const RenormProduct p = renormalized_product(w, cfg);
      // oracle: exact integer product; for d=2 with det 1 the top singular
      // value solves lam^2 - tr(g^T g) lam + 1 = 0
      const IntMatrix exact = word_product(w, cfg).entries;
      BigInt tr = 0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) tr += exact.at(i, j) * exact.at(i, j);
      const double trd = static_cast<double>(tr);
      const double kappa1 = 0.5 * std::log(0.5 * (trd + std::sqrt(trd * trd - 4.0)));
      CHECK(p.frame.kappa[0] == doctest::Approx(kappa1).epsilon(1e-6));
      CHECK(p.frame.kappa[1] == doctest::Approx(-kappa1).epsilon(1e-6));
    }
  }
}

TEST_CASE("renormalized_product handles words far beyond float range") {
  const WalkConfig cfg = reference_model();
  Rng rng(37);
  const Word w = random_word(cfg, 5000, rng);
  const RenormProduct p = renormalized_product(w, cfg);
  CHECK(std::isfinite(p.frame.kappa[0]));
  CHECK(p.frame.kappa[0] > 100.0);  // far past exp overflow if done naively
  CHECK(p.renormalized.cwiseAbs().maxCoeff() <= 1e100);
}

TEST_CASE("iwasawa cocycle values") {
  SUBCASE("identity gives zero") {
    const Eigen::VectorXd x = iwasawa_cocycle(Eigen::MatrixXd::Identity(2, 2), Flag::standard(2));
    CHECK(x.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("diagonal matrix at its eigenflag") {
    const Eigen::VectorXd x = iwasawa_cocycle(diag2(2.0, 0.5), Flag::standard(2));
    CHECK(x[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("shear at the e2 line") {
    Eigen::MatrixXd g(2, 2);
    g << 1, 2, 0, 1;
    Eigen::MatrixXd q(2, 2);
    q << 0, 1, 1, 0;  // flag spanned by e2
    const Eigen::VectorXd x = iwasawa_cocycle(g, Flag::from_orthonormal(q));
    CHECK(x[0] == doctest::Approx(0.5 * std::log(5.0)).epsilon(1e-14));  // ||(2,1)||
    CHECK(x[1] == doctest::Approx(-0.5 * std::log(5.0)).epsilon(1e-14));
  }
}

TEST_CASE("iwasawa cocycle identity on sampled triples") {
  const WalkConfig cfg = reference_model();
  Rng rng(41);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::MatrixXd g =
        word_product(random_word(cfg, 1 + static_cast<int>(rng.next() % 8), rng), cfg)
            .entries.to_double();
    const Eigen::MatrixXd h =
        word_product(random_word(cfg, 1 + static_cast<int>(rng.next() % 8), rng), cfg)
            .entries.to_double();
    Eigen::MatrixXd m(2, 2);
    for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = rng.normal();
    const Flag xi = Flag::standard(2).transported(m);
    const Eigen::VectorXd lhs = iwasawa_cocycle(g * h, xi);
    const Eigen::VectorXd rhs = iwasawa_cocycle(g, xi.transported(h)) + iwasawa_cocycle(h, xi);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("density points") {
  SUBCASE("diag(2,1/2)") {
    const auto dp = density_points(cartan_projection(diag2(2.0, 0.5)), 1);
    CHECK(std::abs(dp.xi_plus(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(dp.v_minus(1, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("shear: top left singular direction") {
    Eigen::MatrixXd g(2, 2);
    g << 1, 2, 0, 1;
    const auto dp = density_points(cartan_projection(g), 1);
    // oracle: eigenvector of g g^T = [[5,2],[2,1]] for eigenvalue 3+2*sqrt(2)
    const double lam = 3.0 + 2.0 * std::sqrt(2.0);
    Eigen::Vector2d v(2.0, lam - 5.0);
    v.normalize();
    CHECK(subspace_distance(dp.xi_plus, v) < 1e-10);
  }
  SUBCASE("identity has no gap") {
    CHECK_THROWS_AS(density_points(cartan_projection(Eigen::MatrixXd::Identity(2, 2)), 1),
                    GapError);
  }
}

TEST_CASE("growth and contraction bounds") {
  SUBCASE("diagonal, aligned vector: equality") {
    const auto rep = check_growth_contraction(diag2(2.0, 0.5), Eigen::Vector2d(1, 0));
    CHECK(rep.ok());
    CHECK(rep.norm_gv == doctest::Approx(2.0));
    CHECK(rep.lower == doctest::Approx(2.0));
    CHECK(rep.upper == doctest::Approx(2.0));
    CHECK(rep.dir_dist == doctest::Approx(0.0));
  }
  SUBCASE("diagonal, repelling vector: infinite direction bound") {
    const auto rep = check_growth_contraction(diag2(2.0, 0.5), Eigen::Vector2d(0, 1));
    CHECK(rep.ok());
    CHECK(rep.lower == doctest::Approx(0.0));
    CHECK(rep.norm_gv == doctest::Approx(0.5));
    CHECK(std::isinf(rep.dir_bound));
  }
  SUBCASE("random words and vectors: no violations") {
    const WalkConfig cfg = reference_model();
    Rng rng(43);
    int checked = 0;
    for (int repi = 0; repi < 500; ++repi) {
      const Word w = random_word(cfg, 1 + static_cast<int>(rng.next() % 30), rng);
      const Eigen::MatrixXd g = word_product(w, cfg).entries.to_double();
      Eigen::Vector2d v(rng.normal(), rng.normal());
      v.normalize();
      try {
        const auto rep = check_growth_contraction(g, v);
        CHECK(rep.ok());
        ++checked;
      } catch (const GapError&) {
      }
    }
    CHECK(checked > 450);
  }
}

TEST_CASE("lyapunov estimate") {
  const WalkConfig cfg = reference_model();
  SUBCASE("identical replica streams collapse the CI") {
    const std::vector<std::uint64_t> seeds(40, 12345ULL);
    const LyapunovEstimate e = lyapunov_estimate_with_streams(cfg, 200, seeds);
    CHECK(e.ci_hi - e.ci_lo == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("positive with CI excluding zero (reduced scale)") {
    const LyapunovEstimate e = lyapunov_estimate(cfg, 500, 40, 7, 2);
    CHECK(e.lambda > 0.0);
    CHECK(e.ci_lo > 0.0);
  }
  SUBCASE("bounded image rejected") {
    WalkConfig idcfg;
    idcfg.dim = 2;
    idcfg.generators.emplace_back(IntMatrix::identity(2), 0.0);
    idcfg.probs = {1.0};
    idcfg.finalize();
    CHECK_THROWS_AS(lyapunov_estimate(idcfg, 500, 40, 7), PreconditionError);
  }
}

TEST_CASE("theta_n behaviour") {
  const WalkConfig cfg = reference_model();
  Rng rng(47);
  Word w = random_word(cfg, 1300, rng);
  SUBCASE("n = 0 gives the zero vector") {
    CHECK(theta_n(cfg, w, 0, 100).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("per-step rate is consistent with the Lyapunov estimate") {
    const LyapunovEstimate e = lyapunov_estimate(cfg, 1000, 60, 3, 2);
    const Eigen::VectorXd th = theta_n(cfg, w, 1000, 200);
    const double rate = th[0] / 1000.0;
    const double width = e.ci_hi - e.ci_lo;
    CHECK(std::abs(rate - e.lambda) < 3.0 * std::max(width, 0.02));
  }
  SUBCASE("doubling the lookahead barely moves the top coordinate") {
    const Eigen::VectorXd a = theta_n(cfg, w, 1000, 100);
    const Eigen::VectorXd b = theta_n(cfg, w, 1000, 200);
    CHECK(std::abs(a[0] - b[0]) / std::abs(b[0]) < 1e-3);
  }
}

TEST_CASE("density convergence") {
  const WalkConfig cfg = reference_model();
  const DensityConvergenceResult r = density_convergence(cfg, {5, 10, 20, 40}, 200, 5);
  for (const auto& row : r.rows) {
    CHECK(row.median_dist >= 0.0);
    CHECK(row.median_dist <= 1.0);
  }
  CHECK(r.rate > 0.0);
  // distances saturate at machine scale once both subspaces have converged
  const DensityConvergenceResult deep = density_convergence(cfg, {400}, 5, 5);
  CHECK(deep.rows[0].median_dist <= 1e-12);
}
