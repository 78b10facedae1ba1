#include <doctest.h>

#include <cmath>

#include "tdr/group.hpp"
#include "tdr/rng.hpp"
#include "tdr/torus.hpp"

using namespace tdr;

namespace {

StateXT quarter_state() {
  return {TorusPoint::rational({{1, 4}, {0, 1}}), 0.0};
}

}  // namespace

TEST_CASE("reference model invariants") {
  const WalkConfig cfg = reference_model();
  CHECK(cfg.dim == 2);
  CHECK(cfg.n_generators() == 4);
  double psum = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < cfg.probs.size(); ++i) {
    psum += cfg.probs[i];
    drift += cfg.probs[i] * cfg.generators[i].chi;
    CHECK(cfg.generators[i].entries.det() == 1);
  }
  CHECK(psum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(drift == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cfg.generators[0].chi == 0.0);
  CHECK(cfg.generators[2].chi == 1.0);
  CHECK(cfg.generators[3].chi == -1.0);
}

TEST_CASE("apply: fixed point of the first generator") {
  const WalkConfig cfg = reference_model();
  const StateXT s = quarter_state();
  const StateXT r = apply(cfg.generators[0], s);  // [[1,2],[0,1]]
  CHECK(r.x == s.x);
  CHECK(r.t == 0.0);
}

TEST_CASE("apply: second generator moves the quarter point") {
  const WalkConfig cfg = reference_model();
  const StateXT s = quarter_state();
  const StateXT r = apply(cfg.generators[2], s);  // [[1,0],[2,1]], chi 1
  const TorusPoint expect = TorusPoint::rational({{1, 4}, {1, 2}});
  CHECK(r.x == expect);
  CHECK(r.t == 1.0);
}

TEST_CASE("apply: identity fixes states and dimension mismatch throws") {
  const WalkConfig cfg = reference_model();
  const GroupElement id(IntMatrix::identity(2), 0.0);
  const StateXT s = quarter_state();
  const StateXT r = apply(id, s);
  CHECK(r.x == s.x);
  CHECK(r.t == s.t);
  const StateXT bad{TorusPoint::rational({{1, 4}, {0, 1}, {0, 1}}), 0.0};
  CHECK_THROWS_AS(apply(id, bad), PreconditionError);
}

TEST_CASE("word_product basics") {
  const WalkConfig cfg = reference_model();
  SUBCASE("[g1,g1] -> [[1,0],[4,1]] with chi 2") {
    const GroupElement p = word_product(Word({2, 2}), cfg);
    CHECK(p.entries == IntMatrix::from_rows({{1, 0}, {4, 1}}));
    CHECK(p.chi == 2.0);
  }
  SUBCASE("length-1 word is the generator itself") {
    const GroupElement p = word_product(Word({0}), cfg);
    CHECK(p.entries == cfg.generators[0].entries);
    CHECK(p.chi == cfg.generators[0].chi);
  }
  SUBCASE("inverse pair gives the identity with chi 0") {
    const GroupElement p = word_product(Word({0, 1}), cfg);
    CHECK(p.entries == IntMatrix::identity(2));
    CHECK(p.chi == 0.0);
  }
  SUBCASE("empty word rejected") {
    CHECK_THROWS_AS(word_product(Word{}, cfg), PreconditionError);
  }
}

TEST_CASE("chi_of_word additivity and cancellation") {
  const WalkConfig cfg = reference_model();
  CHECK(chi_of_word(Word({2, 0, 3}), cfg) == 0.0);
  CHECK(chi_of_word(Word({2, 2}), cfg) == 2.0);

  Rng rng(7);
  Word w;
  for (int i = 0; i < 100; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
  const double c = chi_of_word(w, cfg);
  CHECK(c >= -100.0);
  CHECK(c <= 100.0);
  CHECK(c == word_product(w, cfg).chi);

  // chi(w1 ++ w2) == chi(w1) + chi(w2) exactly
  Word w1, w2;
  for (int i = 0; i < 40; ++i) w1.letters.push_back(rng.categorical(cfg.cum_probs));
  for (int i = 0; i < 60; ++i) w2.letters.push_back(rng.categorical(cfg.cum_probs));
  Word cat = w1;
  cat.letters.insert(cat.letters.end(), w2.letters.begin(), w2.letters.end());
  CHECK(chi_of_word(cat, cfg) == chi_of_word(w1, cfg) + chi_of_word(w2, cfg));
}

TEST_CASE("words keep determinant one") {
  const WalkConfig cfg = reference_model();
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Word w;
    const int len = 1 + static_cast<int>(rng.next() % 25);
    for (int i = 0; i < len; ++i) w.letters.push_back(rng.categorical(cfg.cum_probs));
    CHECK(word_product(w, cfg).entries.det() == 1);
  }
}

TEST_CASE("composition matches word products on exact points") {
  const WalkConfig cfg = reference_model();
  Rng rng(13);
  const StateXT s{TorusPoint::rational({{3, 7}, {2, 5}}), 0.25};
  for (int rep = 0; rep < 10; ++rep) {
    const int a = rng.categorical(cfg.cum_probs);
    const int b = rng.categorical(cfg.cum_probs);
    // word [a,b]: b applied first, then a (leftmost letter is the left factor)
    const StateXT lhs = apply(cfg.generators[static_cast<std::size_t>(a)],
                              apply(cfg.generators[static_cast<std::size_t>(b)], s));
    const StateXT rhs = apply(word_product(Word({a, b}), cfg), s);
    CHECK(lhs.x == rhs.x);
    CHECK(lhs.t == rhs.t);
  }
}

TEST_CASE("exact and float application agree for rational points") {
  const WalkConfig cfg = reference_model();
  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const int len = 1 + static_cast<int>(rng.next() % 20);
    StateXT ex{TorusPoint::rational({{5, 9}, {4, 11}}), 0.0};
    StateXT fl{TorusPoint::floating(ex.x.to_double()), 0.0};
    for (int i = 0; i < len; ++i) {
      const int l = rng.categorical(cfg.cum_probs);
      ex = apply(cfg.generators[static_cast<std::size_t>(l)], ex);
      fl = apply(cfg.generators[static_cast<std::size_t>(l)], fl);
    }
    const Eigen::VectorXd a = ex.x.to_double();
    const Eigen::VectorXd b = fl.x.float_coords();
    for (int i = 0; i < 2; ++i) {
      double diff = std::abs(a[i] - b[i]);
      diff = std::min(diff, 1.0 - diff);  // mod-1 alignment
      CHECK(diff < 1e-9);
    }
    CHECK(ex.t == fl.t);
  }
}

TEST_CASE("matrix action preserves the shared denominator") {
  const WalkConfig cfg = reference_model();
  StateXT s{TorusPoint::rational({{5, 12}, {7, 12}}), 0.0};
  for (int i = 0; i < 10; ++i) {
    s = apply(cfg.generators[static_cast<std::size_t>(i % 4)], s);
    CHECK(s.x.denominator() == 12);
  }
}

TEST_CASE("out-of-range word letters rejected") {
  const WalkConfig cfg = reference_model();
  CHECK_THROWS_AS(word_product(Word({7}), cfg), PreconditionError);
  CHECK_THROWS_AS(chi_of_word(Word({-1}), cfg), PreconditionError);
}

TEST_CASE("torus quotient distance") {
  Eigen::VectorXd a(2), b(2);
  a << 0.95, 0.1;
  b << 0.05, 0.1;
  CHECK(torus_distance(a, b) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(torus_distance_to_zero(a) == doctest::Approx(std::sqrt(0.05 * 0.05 + 0.1 * 0.1)));
}

TEST_CASE("config validation rejects bad input") {
  WalkConfig cfg = reference_model();
  cfg.probs = {0.5, 0.5, 0.25, 0.25};
  CHECK_THROWS_AS(cfg.finalize(), ConfigError);

  WalkConfig uncentered = reference_model();
  uncentered.generators[3] = GroupElement(uncentered.generators[3].entries, 0.5);
  CHECK_THROWS_AS(uncentered.finalize(), ConfigError);

  CHECK_THROWS_AS(GroupElement(IntMatrix::from_rows({{2, 0}, {0, 1}}), 0.0), ConfigError);
}

TEST_CASE("config JSON round trip and builtin name") {
  const WalkConfig cfg = reference_model();
  const std::string text = config_to_json_text(cfg);
  const WalkConfig back = config_from_json_text(text);
  CHECK(back.dim == cfg.dim);
  CHECK(back.n_generators() == cfg.n_generators());
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(load_config("ref-sl2").name == "ref-sl2");
  CHECK_THROWS_AS(load_config("/nonexistent/path.json"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{not json"), ConfigError);
}
