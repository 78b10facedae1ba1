#include <doctest.h>

#include <set>

#include "tdr/empirical.hpp"
#include "tdr/orbits.hpp"

using namespace tdr;

namespace {

std::set<std::string> orbit_keys(const std::vector<TorusPoint>& orbit) {
  std::set<std::string> keys;
  for (const auto& p : orbit) keys.insert(p.key());
  return keys;
}

}  // namespace

TEST_CASE("rational_orbit") {
  const WalkConfig cfg = reference_model();
  SUBCASE("quarter point has the two-element orbit") {
    const auto orbit = rational_orbit(TorusPoint::rational({{1, 4}, {0, 1}}), cfg);
    CHECK(orbit.size() == 2);
    const auto keys = orbit_keys(orbit);
    CHECK(keys.count(TorusPoint::rational({{1, 4}, {0, 1}}).key()) == 1);
    CHECK(keys.count(TorusPoint::rational({{1, 4}, {1, 2}}).key()) == 1);
  }
  SUBCASE("zero is fixed") {
    const auto orbit = rational_orbit(TorusPoint::zero_exact(2), cfg);
    CHECK(orbit.size() == 1);
  }
  SUBCASE("half point is fixed") {
    const auto orbit = rational_orbit(TorusPoint::rational({{1, 2}, {0, 1}}), cfg);
    CHECK(orbit.size() == 1);
  }
  SUBCASE("closure under every generator, size bounded by q^d") {
    const TorusPoint x = TorusPoint::rational({{2, 5}, {3, 5}});
    const auto orbit = rational_orbit(x, cfg);
    const auto keys = orbit_keys(orbit);
    CHECK(orbit.size() <= 25);
    for (const auto& p : orbit)
      for (const auto& g : cfg.generators)
        CHECK(keys.count(apply_torus(g, p).key()) == 1);
  }
  SUBCASE("float points rejected") {
    Eigen::VectorXd v(2);
    v << 0.1, 0.2;
    CHECK_THROWS_AS(rational_orbit(TorusPoint::floating(v), cfg), PreconditionError);
  }
}

TEST_CASE("block_orbit_components") {
  const WalkConfig cfg = reference_model();
  SUBCASE("parity structure of the quarter orbit, m = 2") {
    const auto comps = block_orbit_components(TorusPoint::rational({{1, 4}, {0, 1}}), cfg, 2);
    // the component containing ((1/4,0),0) is {((1/4,0),0), ((1/4,1/2),1)}
    const std::string a = TorusPoint::rational({{1, 4}, {0, 1}}).key();
    const std::string b = TorusPoint::rational({{1, 4}, {1, 2}}).key();
    bool found = false;
    for (const auto& c : comps) {
      std::set<std::pair<std::string, long long>> vs;
      for (const auto& [p, j] : c.vertices) vs.insert({p.key(), j});
      if (vs.count({a, 0})) {
        found = true;
        CHECK(vs.size() == 2);
        CHECK(vs.count({b, 1}) == 1);
      }
    }
    CHECK(found);
    CHECK(comps.size() == 2);  // the other component is {(a,1),(b,0)}
  }
  SUBCASE("m = 1 collapses to a single component") {
    const auto comps = block_orbit_components(TorusPoint::rational({{1, 4}, {0, 1}}), cfg, 1);
    CHECK(comps.size() == 1);
    CHECK(comps[0].vertices.size() == 2);
  }
  SUBCASE("zero with m = 2 joins both levels through an odd-chi fixing word") {
    const auto comps = block_orbit_components(TorusPoint::zero_exact(2), cfg, 2);
    CHECK(comps.size() == 1);
    CHECK(comps[0].vertices.size() == 2);
  }
  SUBCASE("m must be positive") {
    CHECK_THROWS_AS(block_orbit_components(TorusPoint::zero_exact(2), cfg, 0),
                    PreconditionError);
  }
}

TEST_CASE("uniform orbit measure") {
  const WalkConfig cfg = reference_model();
  SUBCASE("two points get weight one half") {
    const auto orbit = rational_orbit(TorusPoint::rational({{1, 4}, {0, 1}}), cfg);
    const EmpiricalMeasure m = EmpiricalMeasure::uniform_on(orbit);
    CHECK(m.samples.size() == 2);
    CHECK(m.samples[0].second == 0.5);
    CHECK(m.samples[1].second == 0.5);
    CHECK(m.total_weight == 1.0);
  }
  SUBCASE("one-step pushforward preserves the uniform weights exactly") {
    const auto orbit = rational_orbit(TorusPoint::rational({{1, 4}, {0, 1}}), cfg);
    const EmpiricalMeasure m = EmpiricalMeasure::uniform_on(orbit);
    const EmpiricalMeasure pushed = pushforward_step_exact(m, cfg);
    REQUIRE(pushed.samples.size() == m.samples.size());
    std::map<std::string, double> weights;
    for (const auto& [s, w] : pushed.samples) weights[s.x.key()] = w;
    for (const auto& [s, w] : m.samples) {
      REQUIRE(weights.count(s.x.key()) == 1);
      CHECK(weights[s.x.key()] == w);  // exact equality: dyadic arithmetic
    }
  }
  SUBCASE("stationarity holds for a larger orbit too") {
    const auto orbit = rational_orbit(TorusPoint::rational({{2, 5}, {3, 5}}), cfg);
    const EmpiricalMeasure m = EmpiricalMeasure::uniform_on(orbit);
    const EmpiricalMeasure pushed = pushforward_step_exact(m, cfg);
    std::map<std::string, double> weights;
    for (const auto& [s, w] : pushed.samples) weights[s.x.key()] = w;
    for (const auto& [s, w] : m.samples)
      CHECK(weights[s.x.key()] == doctest::Approx(w).epsilon(1e-14));
  }
  SUBCASE("singleton orbit is a Dirac mass") {
    const EmpiricalMeasure m = EmpiricalMeasure::uniform_on({TorusPoint::zero_exact(2)});
    CHECK(m.samples.size() == 1);
    CHECK(m.samples[0].second == 1.0);
  }
  SUBCASE("empty orbit rejected") {
    CHECK_THROWS_AS(EmpiricalMeasure::uniform_on({}), PreconditionError);
  }
}
