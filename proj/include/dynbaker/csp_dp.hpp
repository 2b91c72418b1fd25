#pragma once

#include <limits>
#include <map>
#include <vector>

#include "dynbaker/csp.hpp"
#include "dynbaker/decomp.hpp"

namespace dynbaker {

// Per-vertex value restriction; kFree leaves a vertex unrestricted.
struct Pins {
  static constexpr std::int64_t kFree = -1;
  std::vector<std::int64_t> value;
  bool pinned(VertexId v) const { return v < value.size() && value[v] != kFree; }
  void set(VertexId v, Value x) {
    if (v >= value.size()) value.resize(v + 1, kFree);
    value[v] = x;
  }
};

inline constexpr Weight kNegInf = std::numeric_limits<Weight>::min();
inline constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 26;

struct ReachGroup {
  std::vector<VertexId> reach;
  std::vector<VertexId> members;  // children of u sharing this Reach set
  std::vector<Weight> w;          // Σ T[c] over members
};

struct CspTables {
  // Mixed-radix strides over reach[u] (first member least significant).
  std::vector<std::vector<std::uint64_t>> stride;
  std::vector<std::vector<Weight>> T;
  std::vector<std::vector<ReachGroup>> groups;  // N_u with W, filled on request

  std::uint64_t size_of(VertexId u) const { return T[u].size(); }
};

namespace detail {

inline std::vector<std::uint64_t> strides_for(const CspInstance& inst, const std::vector<VertexId>& set,
                                              std::uint64_t* total) {
  std::vector<std::uint64_t> s(set.size());
  std::uint64_t acc = 1;
  for (std::size_t j = 0; j < set.size(); ++j) {
    s[j] = acc;
    acc *= inst.domain_size(set[j]);
    if (acc > kMaxTableEntries) throw ParameterOverflow("valuation table too large");
  }
  *total = acc;
  return s;
}

// T for a leaf whose constraints are all projections with itself as the contracted side.
inline bool projection_leaf_table(const CspInstance& inst, const GraphView& view, VertexId u,
                                  const std::vector<VertexId>& reach, const std::vector<std::uint64_t>& strides,
                                  std::uint64_t total, std::vector<Weight>& out) {
  struct Coord {
    std::uint64_t stride;
    Value radix;
    std::uint64_t kstride;
  };
  std::vector<Coord> coords;
  bool ok = true;
  std::size_t seen = 0;
  view.for_each_incidence(u, [&](const Incidence& inc) {
    if (!ok) return;
    const Relation& r = inst.relation(inc.label);
    bool u_is_v = inst.graph().endpoints(inc.label).v == u;
    if (r.kind() != Relation::Kind::projection || r.contracted_is_v() != u_is_v) {
      ok = false;
      return;
    }
    auto it = std::lower_bound(reach.begin(), reach.end(), inc.nbr);
    coords.push_back({r.stride(), r.radix(), strides[it - reach.begin()]});
    ++seen;
  });
  if (!ok || seen != reach.size()) return false;
  const auto& rev = inst.revenue(u);
  out.assign(total, 0);
  const std::uint64_t m = rev.size() - 1;
  for (std::uint64_t e = 0; e < m; ++e) {
    std::uint64_t key = 0;
    for (const auto& c : coords) key += ((e / c.stride) % c.radix) * c.kstride;
    out[key] = std::max(out[key], rev[e + 1]);
  }
  // A coordinate read as 0 leaves that digit unconstrained.
  for (const auto& c : coords) {
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      if ((idx / c.kstride) % c.radix != 0) continue;
      Weight best = out[idx];
      for (Value a = 1; a < c.radix; ++a) best = std::max(best, out[idx + a * c.kstride]);
      out[idx] = best;
    }
  }
  return true;
}

}  // namespace detail

// Bottom-up DP: T[u][φ] = max revenue of desc[u] consistent with φ on Reach(u).
// Entries whose φ violates constraints inside Reach(u) are not zeroed here.
inline CspTables compute_tables(const CspInstance& inst, const GraphView& view, const EliminationForest& f,
                                const Pins* pins = nullptr, bool with_groups = false) {
  CspTables tb;
  const std::size_t bound = f.present.size();
  tb.stride.assign(bound, {});
  tb.T.assign(bound, {});
  if (with_groups) tb.groups.assign(bound, {});
  std::vector<std::int64_t> pos_in_reach(bound, -1);
  for (auto it = f.order.rbegin(); it != f.order.rend(); ++it) {
    const VertexId u = *it;
    const auto& R = f.reach[u];
    std::uint64_t total = 0;
    tb.stride[u] = detail::strides_for(inst, R, &total);
    const auto& S = tb.stride[u];
    const bool pinned = pins && pins->pinned(u);
    if (!pinned && f.children[u].empty() &&
        detail::projection_leaf_table(inst, view, u, R, S, total, tb.T[u]))
      continue;

    for (std::size_t j = 0; j < R.size(); ++j) pos_in_reach[R[j]] = static_cast<std::int64_t>(j);
    struct EdgeCheck {
      std::size_t pos;
      EdgeLabel label;
    };
    std::vector<EdgeCheck> checks;
    view.for_each_incidence(u, [&](const Incidence& inc) {
      if (pos_in_reach[inc.nbr] >= 0) checks.push_back({static_cast<std::size_t>(pos_in_reach[inc.nbr]), inc.label});
    });
    struct ChildMap {
      const std::vector<Weight>* table;
      std::vector<std::pair<std::size_t, std::uint64_t>> from_reach;  // (pos in R, stride in child)
      std::uint64_t u_stride = 0;
    };
    std::vector<ChildMap> cm;
    for (VertexId c : f.children[u]) {
      ChildMap m{&tb.T[c], {}, 0};
      const auto& rc = f.reach[c];
      for (std::size_t j = 0; j < rc.size(); ++j) {
        if (rc[j] == u)
          m.u_stride = tb.stride[c][j];
        else
          m.from_reach.push_back({static_cast<std::size_t>(pos_in_reach[rc[j]]), tb.stride[c][j]});
      }
      cm.push_back(std::move(m));
    }
    const Value du = inst.domain_size(u);
    const auto& rev = inst.revenue(u);
    Value lo = 0, hi = du;
    if (pinned) lo = static_cast<Value>(pins->value[u]), hi = lo + 1;

    std::vector<Value> digit(R.size(), 0);
    std::vector<Value> radix(R.size());
    for (std::size_t j = 0; j < R.size(); ++j) radix[j] = inst.domain_size(R[j]);
    std::vector<std::uint64_t> base(cm.size());
    auto& out = tb.T[u];
    out.assign(total, kNegInf);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      for (std::size_t c = 0; c < cm.size(); ++c) {
        std::uint64_t b = 0;
        for (auto [p, s] : cm[c].from_reach) b += digit[p] * s;
        base[c] = b;
      }
      Weight best = kNegInf;
      for (Value d = lo; d < hi; ++d) {
        bool good = true;
        for (const auto& ch : checks)
          if (!inst.allowed(ch.label, u, d, digit[ch.pos])) {
            good = false;
            break;
          }
        if (!good) continue;
        Weight sum = rev[d];
        for (std::size_t c = 0; c < cm.size(); ++c) {
          Weight t = (*cm[c].table)[base[c] + d * cm[c].u_stride];
          if (t == kNegInf) {
            good = false;
            break;
          }
          sum += t;
        }
        if (good) best = std::max(best, sum);
      }
      out[idx] = best;
      for (std::size_t j = 0; j < R.size(); ++j) {
        if (++digit[j] < radix[j]) break;
        digit[j] = 0;
      }
    }
    for (VertexId r : R) pos_in_reach[r] = -1;
  }
  if (with_groups) {
    for (VertexId u : f.order) {
      std::map<std::vector<VertexId>, std::size_t> where;
      for (VertexId c : f.children[u]) {
        auto [it, fresh] = where.emplace(f.reach[c], tb.groups[u].size());
        if (fresh) tb.groups[u].push_back({f.reach[c], {}, std::vector<Weight>(tb.T[c].size(), 0)});
        auto& g = tb.groups[u][it->second];
        g.members.push_back(c);
        for (std::size_t i = 0; i < g.w.size(); ++i) g.w[i] += tb.T[c][i];
      }
    }
  }
  return tb;
}

inline CspTables compute_tables(const CspInstance& inst, const EliminationForest& f) {
  return compute_tables(inst, GraphView(inst.graph()), f, nullptr, true);
}

// Vertices whose every constraint is a projection with themselves as the contracted side.
inline std::vector<char> projection_leaves(const CspInstance& inst, const GraphView& view) {
  std::vector<char> m(view.id_bound(), 0);
  for (VertexId u : view.vertices()) {
    bool all = true, any = false;
    view.for_each_incidence(u, [&](const Incidence& inc) {
      any = true;
      const Relation& r = inst.relation(inc.label);
      bool u_is_v = inst.graph().endpoints(inc.label).v == u;
      if (r.kind() != Relation::Kind::projection || r.contracted_is_v() != u_is_v) all = false;
    });
    m[u] = any && all;
  }
  return m;
}

inline Weight sum_roots(const CspTables& tb, const EliminationForest& f) {
  Weight total = 0;
  for (VertexId r : f.roots) {
    if (tb.T[r][0] == kNegInf) return kNegInf;
    total += tb.T[r][0];
  }
  return total;
}

// Optimum revenue of the instance restricted to the view.
inline Weight solve_csp(const CspInstance& inst, const GraphView& view, const TreeDecomposition& td,
                        const Pins* pins = nullptr) {
  EliminationForest f = elimination_forest_unbalanced(view, td);
  return sum_roots(compute_tables(inst, view, f, pins), f);
}

inline Weight solve_csp(const CspInstance& inst, const TreeDecomposition& td) {
  GraphView view(inst.graph());
  validate(view, td);
  return solve_csp(inst, view, td);
}

inline TreeDecomposition csp_decomposition(const CspInstance& inst, const GraphView& view,
                                           int width_cap = std::numeric_limits<int>::max()) {
  std::vector<char> first = projection_leaves(inst, view);
  return heuristic_td(view, width_cap, &first);
}

inline Weight solve_csp(const CspInstance& inst, const GraphView& view, const Pins* pins = nullptr) {
  return solve_csp(inst, view, csp_decomposition(inst, view), pins);
}

inline Weight solve_csp(const CspInstance& inst) { return solve_csp(inst, GraphView(inst.graph())); }

// An optimal valuation (indexed by VertexId) for the instance restricted to the view.
inline std::vector<Value> solve_csp_witness(const CspInstance& inst, const GraphView& view,
                                            const Pins* pins = nullptr) {
  EliminationForest f = elimination_forest_unbalanced(view, csp_decomposition(inst, view));
  CspTables tb = compute_tables(inst, view, f, pins);
  std::vector<Value> phi(view.id_bound(), 0);
  for (VertexId u : f.order) {
    const auto& R = f.reach[u];
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < R.size(); ++j) idx += phi[R[j]] * tb.stride[u][j];
    const Weight target = tb.T[u][idx];
    if (target == kNegInf) throw Error("pinned values admit no solution");
    Value lo = 0, hi = inst.domain_size(u);
    if (pins && pins->pinned(u)) lo = static_cast<Value>(pins->value[u]), hi = lo + 1;
    bool found = false;
    for (Value d = lo; d < hi && !found; ++d) {
      bool good = true;
      view.for_each_incidence(u, [&](const Incidence& inc) {
        if (std::binary_search(R.begin(), R.end(), inc.nbr) && !inst.allowed(inc.label, u, d, phi[inc.nbr]))
          good = false;
      });
      if (!good) continue;
      Weight sum = inst.revenue(u)[d];
      phi[u] = d;
      for (VertexId c : f.children[u]) {
        std::uint64_t ci = 0;
        for (std::size_t j = 0; j < f.reach[c].size(); ++j) ci += phi[f.reach[c][j]] * tb.stride[c][j];
        Weight t = tb.T[c][ci];
        if (t == kNegInf) {
          good = false;
          break;
        }
        sum += t;
      }
      if (good && sum == target) found = true;
    }
    if (!found) throw Error("witness reconstruction failed");
  }
  return phi;
}

}  // namespace dynbaker
