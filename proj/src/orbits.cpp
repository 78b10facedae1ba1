#include "tdr/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

namespace tdr {

std::vector<TorusPoint> rational_orbit(const TorusPoint& x, const WalkConfig& cfg) {
  if (!x.exact()) throw PreconditionError("rational_orbit needs an exact point");
  if (x.dim() != cfg.dim) throw PreconditionError("dimension mismatch");
  std::vector<TorusPoint> orbit;
  std::map<std::string, int> seen;
  std::deque<TorusPoint> queue;
  seen[x.key()] = 0;
  orbit.push_back(x);
  queue.push_back(x);
  while (!queue.empty()) {
    const TorusPoint p = queue.front();
    queue.pop_front();
    for (const auto& g : cfg.generators) {
      TorusPoint q = apply_torus(g, p);
      const std::string key = q.key();
      if (seen.emplace(key, static_cast<int>(orbit.size())).second) {
        orbit.push_back(q);
        queue.push_back(std::move(q));
      }
    }
  }
  return orbit;
}

std::vector<BlockComponent> block_orbit_components(const TorusPoint& x,
                                                   const WalkConfig& cfg, long long m) {
  if (m < 1) throw PreconditionError("m must be >= 1");
  if (!cfg.chi_integer_valued()) throw PreconditionError("integer chi required");
  const auto orbit = rational_orbit(x, cfg);
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < orbit.size(); ++i) index[orbit[i].key()] = static_cast<int>(i);

  const int n = static_cast<int>(orbit.size()) * static_cast<int>(m);
  auto vid = [&](int pt, long long j) { return pt * static_cast<int>(m) + static_cast<int>(j); };
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < orbit.size(); ++p) {
    for (const auto& g : cfg.generators) {
      const int q = index.at(apply_torus(g, orbit[p]).key());
      const long long c = std::llround(g.chi);
      for (long long j = 0; j < m; ++j) {
        const long long j2 = ((j + c) % m + m) % m;
        adj[static_cast<std::size_t>(vid(static_cast<int>(p), j))].push_back(vid(q, j2));
      }
    }
  }

  // Tarjan strongly connected components
  std::vector<int> low(static_cast<std::size_t>(n), -1), num(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int counter = 0;
  // iterative DFS to avoid recursion limits on large orbits
  struct Frame {
    int v;
    std::size_t edge;
  };
  for (int start = 0; start < n; ++start) {
    if (num[static_cast<std::size_t>(start)] != -1) continue;
    std::vector<Frame> call{{start, 0}};
    num[static_cast<std::size_t>(start)] = low[static_cast<std::size_t>(start)] = counter++;
    stack.push_back(start);
    on_stack[static_cast<std::size_t>(start)] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < adj[static_cast<std::size_t>(f.v)].size()) {
        const int w = adj[static_cast<std::size_t>(f.v)][f.edge++];
        if (num[static_cast<std::size_t>(w)] == -1) {
          num[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
          call.push_back({w, 0});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(f.v)] =
              std::min(low[static_cast<std::size_t>(f.v)], num[static_cast<std::size_t>(w)]);
        }
      } else {
        if (low[static_cast<std::size_t>(f.v)] == num[static_cast<std::size_t>(f.v)]) {
          std::vector<int> comp;
          for (;;) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = 0;
            comp.push_back(w);
            if (w == f.v) break;
          }
          std::sort(comp.begin(), comp.end());
          sccs.push_back(std::move(comp));
        }
        const int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[static_cast<std::size_t>(call.back().v)] =
              std::min(low[static_cast<std::size_t>(call.back().v)], low[static_cast<std::size_t>(v)]);
      }
    }
  }

  std::sort(sccs.begin(), sccs.end());
  std::vector<BlockComponent> out;
  for (const auto& comp : sccs) {
    BlockComponent bc;
    for (int v : comp)
      bc.vertices.emplace_back(orbit[static_cast<std::size_t>(v / m)], v % m);
    out.push_back(std::move(bc));
  }
  return out;
}

}  // namespace tdr
