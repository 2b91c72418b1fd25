#pragma once

#include <array>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

#include "dynbaker/decomp.hpp"
#include "dynbaker/csp_compress.hpp"
#include "dynbaker/domination.hpp"

namespace dynbaker {

// Interaction code: 2 bits per boundary edge, in sorted-label order.
struct IKey {
  static constexpr std::size_t kMaxEdges = 128;
  std::array<std::uint64_t, 4> w{};

  std::uint8_t get(std::size_t i) const { return (w[i / 32] >> (2 * (i % 32))) & 3u; }
  void set(std::size_t i, std::uint8_t f) {
    w[i / 32] &= ~(std::uint64_t{3} << (2 * (i % 32)));
    w[i / 32] |= std::uint64_t{f & 3u} << (2 * (i % 32));
  }
  bool operator==(const IKey&) const = default;
  auto operator<=>(const IKey&) const = default;
};

struct IKeyHash {
  std::size_t operator()(const IKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto x : k.w) h = (h ^ x) * 0xbf58476d1ce4e5b9ull, h ^= h >> 31;
    return static_cast<std::size_t>(h);
  }
};

using ITable = std::unordered_map<IKey, Cost, IKeyHash>;

struct DomTables {
  std::vector<std::vector<EdgeLabel>> boundary;  // E(desc[u], Reach(u)), sorted
  std::vector<ITable> T;                          // finite entries only

  Cost at(VertexId u, const IKey& k) const {
    auto it = T[u].find(k);
    return it == T[u].end() ? Cost::inf() : it->second;
  }
  // Looks up by explicit Interaction over boundary[u].
  Cost at(VertexId u, const Interaction& x) const {
    if (x.edges != boundary[u]) throw Error("interaction is not over the boundary of u");
    IKey k;
    for (std::size_t i = 0; i < x.flags.size(); ++i) k.set(i, x.flags[i]);
    return at(u, k);
  }
};

inline Interaction to_interaction(const std::vector<EdgeLabel>& edges, const IKey& k) {
  Interaction x;
  x.edges = edges;
  for (std::size_t i = 0; i < edges.size(); ++i) x.flags.push_back(k.get(i));
  return x;
}

// T[u][x] = min cost of a locally correct valuation of desc[u] with interaction x toward Reach(u).
// The view may hide edges inside a cleared set (and relieves its vertices).
inline DomTables compute_domination_tables(const DominationInstance& inst, const GraphView& view,
                                           const EliminationForest& f) {
  DomTables tb;
  const std::size_t bound = f.present.size();
  tb.boundary.assign(bound, {});
  tb.T.assign(bound, {});
  for (auto it = f.order.rbegin(); it != f.order.rend(); ++it) {
    const VertexId u = *it;
    const auto& R = f.reach[u];
    const bool relieved = view.is_cleared(u);
    auto in_reach = [&](VertexId w) { return std::binary_search(R.begin(), R.end(), w); };
    // Own boundary edges.
    std::vector<std::pair<EdgeLabel, VertexId>> own;  // (label, -) edges from u into Reach(u)
    view.for_each_incidence(u, [&](const Incidence& inc) {
      if (in_reach(inc.nbr)) own.push_back({inc.label, inc.nbr});
    });
    auto& B = tb.boundary[u];
    for (auto [l, w] : own) B.push_back(l);
    std::vector<std::vector<EdgeLabel>> child_to_u(f.children[u].size());
    for (std::size_t ci = 0; ci < f.children[u].size(); ++ci) {
      VertexId c = f.children[u][ci];
      for (EdgeLabel l : tb.boundary[c]) {
        auto e = inst.graph().endpoints(l);
        // the endpoint outside desc[c] is the one in Reach(c)
        bool u_in = std::binary_search(f.reach[c].begin(), f.reach[c].end(), e.u);
        VertexId outside = u_in ? e.u : e.v;
        if (outside == u)
          child_to_u[ci].push_back(l);
        else
          B.push_back(l);
      }
    }
    std::sort(B.begin(), B.end());
    if (B.size() > IKey::kMaxEdges) throw ParameterOverflow("interaction boundary too large");
    auto pos = [&](EdgeLabel l) { return static_cast<std::size_t>(std::lower_bound(B.begin(), B.end(), l) - B.begin()); };

    // Child entries projected onto B, with their bits on edges to u.
    struct Entry {
      IKey key;
      Cost cost;
      std::vector<std::uint8_t> to_u;
    };
    std::vector<std::vector<Entry>> child_entries(f.children[u].size());
    std::vector<std::vector<EdgeLabel>> child_to_u_labels(f.children[u].size());
    for (std::size_t ci = 0; ci < f.children[u].size(); ++ci) {
      VertexId c = f.children[u][ci];
      const auto& Bc = tb.boundary[c];
      std::vector<std::int64_t> target(Bc.size(), -1);
      std::vector<std::size_t> to_u_idx;
      for (std::size_t j = 0; j < Bc.size(); ++j) {
        if (std::binary_search(child_to_u[ci].begin(), child_to_u[ci].end(), Bc[j])) {
          to_u_idx.push_back(j);
          child_to_u_labels[ci].push_back(Bc[j]);
        } else {
          target[j] = static_cast<std::int64_t>(pos(Bc[j]));
        }
      }
      for (const auto& [k, cost] : tb.T[c]) {
        Entry e{IKey{}, cost, {}};
        for (std::size_t j = 0; j < Bc.size(); ++j)
          if (target[j] >= 0) e.key.set(static_cast<std::size_t>(target[j]), k.get(j));
        for (auto j : to_u_idx) e.to_u.push_back(k.get(j));
        child_entries[ci].push_back(std::move(e));
      }
    }
    for (auto& v : child_to_u) std::sort(v.begin(), v.end());

    ITable result;
    const auto& st = inst.states(u);
    for (std::uint32_t d = 0; d < st.size(); ++d) {
      const State& s = st[d];
      if (!s.cost.finite()) continue;
      IKey base;
      for (auto [l, w] : own) {
        std::uint8_t fl = (s.supplies(l) ? kSupply : 0) | (!relieved && s.demands(l) ? kDemand : 0);
        base.set(pos(l), fl);
      }
      ITable partial{{base, s.cost}};
      for (std::size_t ci = 0; ci < child_entries.size() && !partial.empty(); ++ci) {
        const auto& labels = child_to_u_labels[ci];
        std::vector<char> sup(labels.size()), dem(labels.size());
        for (std::size_t j = 0; j < labels.size(); ++j) {
          sup[j] = s.supplies(labels[j]);
          dem[j] = !relieved && s.demands(labels[j]);
        }
        ITable filtered;
        for (const auto& e : child_entries[ci]) {
          bool ok = true;
          for (std::size_t j = 0; j < labels.size() && ok; ++j) {
            if ((e.to_u[j] & kDemand) && !sup[j]) ok = false;
            if (dem[j] && !(e.to_u[j] & kSupply)) ok = false;
          }
          if (!ok) continue;
          auto [it2, fresh] = filtered.emplace(e.key, e.cost);
          if (!fresh && e.cost < it2->second) it2->second = e.cost;
        }
        ITable next;
        for (const auto& [pk, pc] : partial)
          for (const auto& [ck, cc] : filtered) {
            IKey k;
            for (std::size_t w = 0; w < 4; ++w) k.w[w] = pk.w[w] | ck.w[w];
            Cost c = pc + cc;
            auto [it3, fresh] = next.emplace(k, c);
            if (!fresh && c < it3->second) it3->second = c;
          }
        partial = std::move(next);
      }
      for (const auto& [k, c] : partial) {
        auto [it4, fresh] = result.emplace(k, c);
        if (!fresh && c < it4->second) it4->second = c;
      }
    }
    tb.T[u] = std::move(result);
  }
  return tb;
}

inline DomTables compute_domination_tables(const DominationInstance& inst, const EliminationForest& f) {
  return compute_domination_tables(inst, GraphView(inst.graph()), f);
}

inline Cost sum_roots(const DomTables& tb, const EliminationForest& f) {
  Cost total = 0;
  for (VertexId r : f.roots) total += tb.at(r, IKey{});
  return total;
}

inline Cost solve_domination(const DominationInstance& inst, const GraphView& view, const TreeDecomposition& td) {
  EliminationForest f = elimination_forest_unbalanced(view, td);
  return sum_roots(compute_domination_tables(inst, view, f), f);
}

inline Cost solve_domination(const DominationInstance& inst, const TreeDecomposition& td) {
  GraphView view(inst.graph());
  validate(view, td);
  return solve_domination(inst, view, td);
}

inline Cost solve_domination(const DominationInstance& inst, const GraphView& view) {
  return solve_domination(inst, view, heuristic_td(view, std::numeric_limits<int>::max()));
}

inline Cost solve_domination(const DominationInstance& inst) {
  return solve_domination(inst, GraphView(inst.graph()));
}

// Interaction table of component C with S = N(C): finite entries over the sorted E(C, S).
using InteractionSolver =
    std::function<std::pair<std::vector<EdgeLabel>, ITable>(const DominationInstance&, const std::vector<VertexId>& C)>;

inline std::pair<std::vector<EdgeLabel>, ITable> dp_interaction_table(const DominationInstance& inst,
                                                                      const std::vector<VertexId>& C) {
  std::vector<char> inc = mask_of(inst.graph().id_bound(), C);
  GraphView inner(inst.graph(), &inc);
  EliminationForest f = elimination_forest_unbalanced(inner, heuristic_td(inner, std::numeric_limits<int>::max()));
  // Recompute Reach sets in the full graph so neighbors outside C appear as boundary.
  detail::compute_reach(GraphView(inst.graph()), f);
  if (f.roots.size() != 1) throw Error("component is not connected");
  DomTables tb = compute_domination_tables(inst, GraphView(inst.graph()), f);
  VertexId r = f.roots.front();
  return {tb.boundary[r], tb.T[r]};
}

struct KeyedDom {
  DominationInstance inst;
  KeyMap key;
};

// Adds a collapsed vertex with one listed state per finite table entry, keyed in IKey order.
// Boundary edges keep their labels and run to the same outside endpoints.
inline void add_collapsed(DominationInstance& out, const DominationInstance& src, VertexId x,
                          const std::vector<EdgeLabel>& boundary, const ITable& table,
                          const std::vector<char>& inside) {
  std::vector<std::pair<IKey, Cost>> entries(table.begin(), table.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Cost> costs;
  for (const auto& e : entries) costs.push_back(e.second);
  if (costs.empty()) costs.push_back(Cost::inf());
  out.add_vertex(x, costs, static_cast<std::uint32_t>(boundary.size()));
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    EdgeLabel l = boundary[j];
    auto e = src.graph().endpoints(l);
    VertexId s = inside[e.u] ? e.v : e.u;
    EdgeSide xs;
    for (std::uint32_t i = 0; i < entries.size(); ++i) {
      std::uint8_t f = entries[i].first.get(j);
      if (f & kSupply) xs.supply.push_back(i);
      if (f & kDemand) xs.demand.push_back(i);
    }
    out.add_edge_labeled(s, x, l, side_of(src, s, l), xs);
  }
}

// I{Y}: Y verbatim, one vertex per component of G - Y adjacent to Y, the rest in one accumulator.
inline KeyedDom compress_domination(const DominationInstance& inst, const std::vector<VertexId>& Y,
                                    const InteractionSolver& sub = dp_interaction_table) {
  KeyedDom out;
  const std::size_t bound = inst.graph().id_bound();
  std::vector<char> iny = mask_of(bound, Y);
  std::vector<char> rest(bound, 0);
  for (VertexId v : inst.vertices()) rest[v] = !iny[v];
  for (VertexId y : Y) {
    out.inst.add_vertex(y, inst.costs(y), inst.implicit_edges(y));
    out.key[y] = VertexKey::of(y);
  }
  for (EdgeLabel l : inst.graph().edge_labels()) {
    auto e = inst.graph().endpoints(l);
    if (iny[e.u] && iny[e.v]) out.inst.add_edge_labeled(e.u, e.v, l, side_of(inst, e.u, l), side_of(inst, e.v, l));
  }
  VertexId next_id = static_cast<VertexId>(bound);
  Cost detached = 0;
  for (auto& comp : components(GraphView(inst.graph(), &rest))) {
    auto [boundary, table] = sub(inst, comp);
    if (boundary.empty()) {
      detached += table.count(IKey{}) ? table.at(IKey{}) : Cost::inf();
      continue;
    }
    std::vector<char> inside = mask_of(bound, comp);
    VertexId x = next_id++;
    add_collapsed(out.inst, inst, x, boundary, table, inside);
    out.key[x] = VertexKey{VertexKey::component, comp.front(), {}};
  }
  VertexId acc = next_id++;
  out.inst.add_vertex(acc, {detached});
  out.key[acc] = VertexKey{VertexKey::accumulator, 0, {}};
  return out;
}

inline KeyMap identity_keys(const DominationInstance& inst) {
  KeyMap k;
  for (VertexId v : inst.vertices()) k[v] = VertexKey::of(v);
  return k;
}

namespace detail {

// (cost, supply, demand) of every finite state, sorted; implicit vertices list only these.
inline std::vector<std::tuple<std::vector<EdgeLabel>, std::vector<EdgeLabel>, Cost>> finite_states(
    const DominationInstance& inst, VertexId v) {
  std::vector<std::tuple<std::vector<EdgeLabel>, std::vector<EdgeLabel>, Cost>> out;
  for (const auto& s : inst.states(v))
    if (s.cost.finite()) out.emplace_back(s.supply, s.demand, s.cost);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Equality after dropping isolated all-zero vertices, matching vertices by key and edges by label.
inline bool equivalent(const DominationInstance& a, const KeyMap& ka, const DominationInstance& b,
                       const KeyMap& kb, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::map<VertexKey, VertexId> ia, ib;
  for (VertexId v : a.vertices())
    if (!a.isolated_zero(v)) ia[ka.at(v)] = v;
  for (VertexId v : b.vertices())
    if (!b.isolated_zero(v)) ib[kb.at(v)] = v;
  if (ia.size() != ib.size()) return fail("live vertex counts differ");
  std::map<VertexId, VertexId> a2b;
  for (const auto& [k, v] : ia) {
    auto it = ib.find(k);
    if (it == ib.end()) return fail("unmatched vertex " + std::to_string(v));
    VertexId w = it->second;
    a2b[v] = w;
    const bool implicit = a.implicit_edges(v) > 0 || b.implicit_edges(w) > 0;
    if (implicit) {
      if (detail::finite_states(a, v) != detail::finite_states(b, w))
        return fail("interaction table differs at vertex " + std::to_string(v));
      continue;
    }
    const auto& sa = a.states(v);
    const auto& sb = b.states(w);
    if (sa.size() != sb.size()) return fail("domain differs at vertex " + std::to_string(v));
    for (std::size_t i = 0; i < sa.size(); ++i)
      if (sa[i].cost != sb[i].cost || sa[i].supply != sb[i].supply || sa[i].demand != sb[i].demand)
        return fail("state " + std::to_string(i) + " differs at vertex " + std::to_string(v));
  }
  if (a.graph().num_edges() != b.graph().num_edges()) return fail("edge counts differ");
  for (EdgeLabel l : a.graph().edge_labels()) {
    auto e = a.graph().endpoints(l);
    auto it_u = a2b.find(e.u), it_v = a2b.find(e.v);
    if (it_u == a2b.end() || it_v == a2b.end()) return fail("edge at a dropped vertex");
    bool found = false;
    for (const auto& inc : b.graph().incident(it_u->second))
      if (inc.label == l && inc.nbr == it_v->second) found = true;
    if (!found) return fail("edge " + std::to_string(l) + " missing");
  }
  return true;
}

inline bool equivalent(const DominationInstance& a, const DominationInstance& b) {
  return equivalent(a, identity_keys(a), b, identity_keys(b));
}

}  // namespace dynbaker
