#pragma once

#include <limits>
#include <optional>

#include "dynbaker/csp_dp.hpp"
#include "dynbaker/domination_dp.hpp"

namespace dynbaker {

struct BakerOptions {
  std::optional<int> width_cap;       // default 8k+8
  std::size_t small_component = 20;   // components up to this size skip the width cap
};

// Residual pieces with at most this many vertices are solved without a width check.
inline int baker_width_cap(const BakerOptions& o, int k) { return o.width_cap.value_or(8 * k + 8); }

namespace detail {

inline int layers_for(const Rational& eps) {
  if (!(eps > Rational(0)) || eps > Rational(1)) throw InvalidEpsilon("parameter must lie in (0, 1]");
  return static_cast<int>((Rational(1) / eps).ceil());
}

}  // namespace detail

// max_i OPT(I - V_i) over BFS layer classes V_i mod k = ceil(1/eps); (1-eps)OPT <= p <= OPT.
inline Weight baker_csp(const CspInstance& inst, const Rational& eps, const BakerOptions& opt = {}) {
  const int k = detail::layers_for(eps);
  const int cap = baker_width_cap(opt, k);
  LayerAssignment la = bfs_layers(inst.graph(), k);
  Weight best = 0;
  std::vector<char> keep(inst.graph().id_bound(), 0);
  for (int i = 0; i < k; ++i) {
    for (VertexId v : inst.vertices()) keep[v] = la.at(v) != i;
    Weight total = 0;
    for (const auto& comp : components(GraphView(inst.graph(), &keep))) {
      std::vector<char> cm = mask_of(inst.graph().id_bound(), comp);
      GraphView view(inst.graph(), &cm);
      int c = comp.size() <= opt.small_component ? std::numeric_limits<int>::max() : cap;
      Weight w = solve_csp(inst, view, csp_decomposition(inst, view, c));
      total += w;
    }
    best = std::max(best, total);
  }
  return best;
}

// max_j OPT(Clear(I; A_{4j+1} + A_{4j+2})) with layers mod 4k, k = ceil(1/delta);
// (1-delta)OPT <= p <= OPT for decent instances.
inline Cost baker_domination(const DominationInstance& inst, const Rational& delta, const BakerOptions& opt = {}) {
  const int k = detail::layers_for(delta);
  const int cap = baker_width_cap(opt, k);
  LayerAssignment la = bfs_layers(inst.graph(), 4 * k);
  Cost best = 0;
  bool first = true;
  std::vector<char> cleared(inst.graph().id_bound(), 0);
  for (int j = 0; j < k; ++j) {
    for (VertexId v : inst.vertices()) cleared[v] = la.at(v) == 4 * j + 1 || la.at(v) == 4 * j + 2;
    GraphView whole(inst.graph(), nullptr, &cleared);
    Cost total = 0;
    for (const auto& comp : components(whole)) {
      std::vector<char> cm = mask_of(inst.graph().id_bound(), comp);
      GraphView view(inst.graph(), &cm, &cleared);
      int c = comp.size() <= opt.small_component ? std::numeric_limits<int>::max() : cap;
      total += solve_domination(inst, view, heuristic_td(view, c));
    }
    if (first || best < total) best = total;
    first = false;
  }
  return best;
}

}  // namespace dynbaker
