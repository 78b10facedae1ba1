#pragma once

#include <utility>
#include <vector>

#include "tdr/torus.hpp"

namespace tdr {

// Closure of a rational point under the configured generator set (semigroup
// orbit; supply inverse generators in the config for the group orbit).
// Exact arithmetic; terminates since the orbit lives in (1/q)Z^d / Z^d.
std::vector<TorusPoint> rational_orbit(const TorusPoint& x, const WalkConfig& cfg);

// Strongly connected components of the transition graph on orbit x Z/mZ with
// edges (y,j) -> (g y, j + chi(g) mod m).  pre: integer chi, m >= 1.
struct BlockComponent {
  std::vector<std::pair<TorusPoint, long long>> vertices;
};

std::vector<BlockComponent> block_orbit_components(const TorusPoint& x,
                                                   const WalkConfig& cfg, long long m);

}  // namespace tdr
