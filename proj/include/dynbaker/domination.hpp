#pragma once

#include <map>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dynbaker/graph_view.hpp"

namespace dynbaker {

struct State {
  Cost cost;
  std::vector<EdgeLabel> supply;  // sorted
  std::vector<EdgeLabel> demand;  // sorted

  bool supplies(EdgeLabel e) const { return std::binary_search(supply.begin(), supply.end(), e); }
  bool demands(EdgeLabel e) const { return std::binary_search(demand.begin(), demand.end(), e); }
};

// State indices of one endpoint that supply / demand a newly inserted edge.
struct EdgeSide {
  std::vector<std::uint32_t> supply;
  std::vector<std::uint32_t> demand;
};

// Min Weight Generalized Domination instance over a multigraph.
class DominationInstance {
 public:
  // `implicit_edges` > 0 marks an interaction domain of conceptual size 4^m whose
  // unlisted states all cost +inf.
  void add_vertex(VertexId id, const std::vector<Cost>& costs, std::uint32_t implicit_edges = 0) {
    if (costs.empty()) throw Error("empty domain");
    graph_.add_vertex(id, 0);
    if (id >= states_.size()) {
      states_.resize(id + 1);
      implicit_.resize(id + 1, 0);
    }
    states_[id].clear();
    for (Cost c : costs) states_[id].push_back({c, {}, {}});
    implicit_[id] = implicit_edges;
  }

  EdgeLabel add_edge(VertexId u, VertexId v, const EdgeSide& su, const EdgeSide& sv) {
    EdgeLabel l = graph_.next_label();
    add_edge_labeled(u, v, l, su, sv);
    return l;
  }

  void add_edge_labeled(VertexId u, VertexId v, EdgeLabel label, const EdgeSide& su, const EdgeSide& sv) {
    graph_.add_edge_labeled(u, v, label);
    attach(u, label, su);
    attach(v, label, sv);
  }

  void remove_edge(EdgeLabel label) {
    auto e = graph_.endpoints(label);
    graph_.remove_edge(label);
    detach(e.u, label);
    detach(e.v, label);
  }

  void set_costs(VertexId u, const std::vector<Cost>& costs) {
    auto& st = states_.at(u);
    if (!graph_.has_vertex(u) || costs.size() != st.size()) throw Error("cost update changes the domain");
    for (std::size_t i = 0; i < st.size(); ++i) st[i].cost = costs[i];
  }

  // demand_u(x) <- ∅ for every state.
  void relieve(VertexId u) {
    for (auto& s : states_.at(u)) s.demand.clear();
  }

  void erase_isolated_vertex(VertexId id) {
    graph_.erase_isolated_vertex(id);
    states_[id].clear();
    implicit_[id] = 0;
  }

  const DynGraph& graph() const { return graph_; }
  bool has_vertex(VertexId v) const { return graph_.has_vertex(v); }
  std::vector<VertexId> vertices() const { return graph_.vertices(); }
  std::size_t num_vertices() const { return graph_.num_vertices(); }
  const std::vector<State>& states(VertexId v) const {
    if (!graph_.has_vertex(v)) throw Error("missing vertex " + std::to_string(v));
    return states_[v];
  }
  std::vector<Cost> costs(VertexId v) const {
    std::vector<Cost> c;
    for (const auto& s : states(v)) c.push_back(s.cost);
    return c;
  }
  std::uint32_t implicit_edges(VertexId v) const { return implicit_[v]; }

  // Conceptual domain size (saturating).
  std::uint64_t domain_size(VertexId v) const {
    if (implicit_[v] == 0) return states(v).size();
    if (implicit_[v] >= 32) return std::numeric_limits<std::uint64_t>::max();
    return std::uint64_t{1} << (2 * implicit_[v]);
  }

  // Sorted labels of δ(v).
  std::vector<EdgeLabel> incident_labels(VertexId v) const {
    std::vector<EdgeLabel> out;
    for (const auto& inc : graph_.incident(v)) out.push_back(inc.label);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool isolated_zero(VertexId v) const {
    if (graph_.degree(v) != 0) return false;
    for (const auto& s : states_[v])
      if (s.cost != Cost(0)) return false;
    return true;
  }

  // Every domain has a finite state supplying all incident edges.
  bool has_full_supply_states() const {
    for (VertexId v : vertices()) {
      auto inc = incident_labels(v);
      bool ok = false;
      for (const auto& s : states_[v])
        if (s.cost.finite() && s.supply == inc) ok = true;
      if (!ok) return false;
    }
    return true;
  }

 private:
  void attach(VertexId x, EdgeLabel label, const EdgeSide& side) {
    auto& st = states_[x];
    for (auto i : side.supply) insert_sorted(st.at(i).supply, label);
    for (auto i : side.demand) insert_sorted(st.at(i).demand, label);
  }
  void detach(VertexId x, EdgeLabel label) {
    for (auto& s : states_[x]) {
      erase_sorted(s.supply, label);
      erase_sorted(s.demand, label);
    }
  }
  static void insert_sorted(std::vector<EdgeLabel>& v, EdgeLabel l) {
    auto it = std::lower_bound(v.begin(), v.end(), l);
    if (it == v.end() || *it != l) v.insert(it, l);
  }
  static void erase_sorted(std::vector<EdgeLabel>& v, EdgeLabel l) {
    auto it = std::lower_bound(v.begin(), v.end(), l);
    if (it != v.end() && *it == l) v.erase(it);
  }

  DynGraph graph_;
  std::vector<std::vector<State>> states_;
  std::vector<std::uint32_t> implicit_;
};

struct DomAddVertex {
  VertexId v;
  std::vector<Cost> costs;
  std::uint32_t implicit_edges = 0;
};
struct DomAddEdge {
  VertexId u, v;
  EdgeLabel label;
  EdgeSide su, sv;
};
struct DomRemoveEdge {
  EdgeLabel label;
};
struct DomUpdateCost {
  VertexId v;
  std::vector<Cost> costs;
};
using DomUpdate = std::variant<DomAddVertex, DomAddEdge, DomRemoveEdge, DomUpdateCost>;
using DomBatch = std::vector<DomUpdate>;

inline void apply(DominationInstance& inst, const DomUpdate& upd) {
  std::visit(
      [&](const auto& u) {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, DomAddVertex>) {
          inst.add_vertex(u.v, u.costs, u.implicit_edges);
        } else if constexpr (std::is_same_v<T, DomAddEdge>) {
          inst.add_edge_labeled(u.u, u.v, u.label, u.su, u.sv);
        } else if constexpr (std::is_same_v<T, DomRemoveEdge>) {
          inst.remove_edge(u.label);
        } else {
          inst.set_costs(u.v, u.costs);
        }
      },
      upd);
}

inline std::vector<VertexId> touched(const DominationInstance& inst, const DomUpdate& upd) {
  return std::visit(
      [&](const auto& u) -> std::vector<VertexId> {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, DomAddEdge>) {
          return {u.u, u.v};
        } else if constexpr (std::is_same_v<T, DomRemoveEdge>) {
          auto e = inst.graph().endpoints(u.label);
          return {e.u, e.v};
        } else {
          return {u.v};
        }
      },
      upd);
}

// Which states of x supply / demand edge e, as an EdgeSide.
inline EdgeSide side_of(const DominationInstance& inst, VertexId x, EdgeLabel e) {
  EdgeSide s;
  const auto& st = inst.states(x);
  for (std::uint32_t i = 0; i < st.size(); ++i) {
    if (st[i].supplies(e)) s.supply.push_back(i);
    if (st[i].demands(e)) s.demand.push_back(i);
  }
  return s;
}

// Domain N[u]: state 0 is u itself, then one state per neighbor in edge-label order.
inline DominationInstance encode_mwds(const DynGraph& g) {
  DominationInstance inst;
  for (VertexId v : g.vertices()) {
    std::vector<Cost> costs{Cost(g.weight(v))};
    costs.resize(1 + g.degree(v), Cost(0));
    inst.add_vertex(v, costs);
  }
  std::vector<std::uint32_t> next(g.id_bound(), 1);
  for (EdgeLabel l : g.edge_labels()) {
    auto e = g.endpoints(l);
    EdgeSide su{{0}, {next[e.u]++}}, sv{{0}, {next[e.v]++}};
    inst.add_edge_labeled(e.u, e.v, l, su, sv);
  }
  return inst;
}

// Dominating set with a degree bound: every vertex keeps delta+1 states. State 0 takes the
// vertex (cost w, supplies all edges); slot state j is free (cost 0) and demands edge e_j when
// an edge occupies slot j, and costs +inf otherwise.
class SlottedMwds {
 public:
  explicit SlottedMwds(std::size_t delta) : delta_(delta) {}

  std::size_t delta() const { return delta_; }
  const DominationInstance& instance() const { return inst_; }

  DomBatch add_vertex(VertexId v, Weight w) {
    std::vector<Cost> costs(delta_ + 1, Cost::inf());
    costs[0] = w;
    DomBatch out{DomAddVertex{v, costs, 0}};
    commit(out);
    return out;
  }

  // Edge first with an infinite slot, then the slots open.
  DomBatch add_edge(VertexId u, VertexId v, EdgeLabel label) {
    std::uint32_t ju = take_slot(u), jv = take_slot(v);
    slots_[label] = {ju, jv};
    DomBatch out{DomAddEdge{u, v, label, EdgeSide{{0}, {ju}}, EdgeSide{{0}, {jv}}}};
    out.push_back(set_slot(u, ju, Cost(0)));
    out.push_back(set_slot(v, jv, Cost(0)));
    commit(out);
    return out;
  }

  DomBatch remove_edge(EdgeLabel label) {
    auto e = inst_.graph().endpoints(label);
    auto [ju, jv] = slots_.at(label);
    DomBatch out{set_slot(e.u, ju, Cost::inf()), set_slot(e.v, jv, Cost::inf()), DomRemoveEdge{label}};
    used_[e.u][ju] = used_[e.v][jv] = 0;
    slots_.erase(label);
    commit(out);
    return out;
  }

  DomBatch update_weight(VertexId v, Weight w) {
    std::vector<Cost> costs = inst_.costs(v);
    costs[0] = w;
    DomBatch out{DomUpdateCost{v, costs}};
    commit(out);
    return out;
  }

  static DominationInstance encode(const DynGraph& g, std::size_t delta) {
    SlottedMwds s(delta);
    for (VertexId v : g.vertices()) s.add_vertex(v, g.weight(v));
    for (EdgeLabel l : g.edge_labels()) s.add_edge(g.endpoints(l).u, g.endpoints(l).v, l);
    return s.inst_;
  }

 private:
  std::uint32_t take_slot(VertexId v) {
    if (v >= used_.size()) used_.resize(v + 1);
    auto& u = used_[v];
    u.resize(delta_ + 1, 0);
    for (std::uint32_t j = 1; j <= delta_; ++j)
      if (!u[j]) {
        u[j] = 1;
        return j;
      }
    throw DegreeBoundExceeded("degree of vertex " + std::to_string(v) + " exceeds " + std::to_string(delta_));
  }
  DomUpdate set_slot(VertexId v, std::uint32_t j, Cost c) {
    std::vector<Cost> costs = pending_costs(v);
    costs[j] = c;
    pending_[v] = costs;
    return DomUpdateCost{v, costs};
  }
  std::vector<Cost> pending_costs(VertexId v) {
    auto it = pending_.find(v);
    return it != pending_.end() ? it->second : inst_.costs(v);
  }
  void commit(const DomBatch& b) {
    for (const auto& u : b) dynbaker::apply(inst_, u);
    pending_.clear();
  }

  std::size_t delta_;
  DominationInstance inst_;
  std::vector<std::vector<char>> used_;
  std::unordered_map<EdgeLabel, std::pair<std::uint32_t, std::uint32_t>> slots_;
  std::unordered_map<VertexId, std::vector<Cost>> pending_;
};

inline Cost evaluate(const DominationInstance& inst, const std::vector<std::uint32_t>& phi,
                     const GraphView* view = nullptr) {
  GraphView full(inst.graph());
  const GraphView& vw = view ? *view : full;
  Cost total = 0;
  for (VertexId v : vw.vertices()) {
    const State& s = inst.states(v).at(phi.at(v));
    total += s.cost;
    bool relieved = vw.is_cleared(v);
    bool ok = true;
    vw.for_each_incidence(v, [&](const Incidence& inc) {
      if (!relieved && s.demands(inc.label) && !inst.states(inc.nbr).at(phi.at(inc.nbr)).supplies(inc.label))
        ok = false;
    });
    if (!ok) return Cost::inf();
  }
  return total;
}

// Index of a state x of u with cost(x) <= cost(x1)+cost(x2), supply(x) = supply(x1) ∪ supply(x2)
// and demand(x) ⊆ demand(x1); cheapest first, then lowest index.
inline std::uint32_t combine_states(const DominationInstance& inst, VertexId u, std::uint32_t x1,
                                    std::uint32_t x2) {
  const auto& st = inst.states(u);
  const State& a = st.at(x1);
  const State& b = st.at(x2);
  std::vector<EdgeLabel> want;
  std::set_union(a.supply.begin(), a.supply.end(), b.supply.begin(), b.supply.end(), std::back_inserter(want));
  const Cost cap = a.cost + b.cost;
  std::int64_t best = -1;
  for (std::uint32_t i = 0; i < st.size(); ++i) {
    const State& x = st[i];
    if (x.cost > cap || x.supply != want) continue;
    if (!std::includes(a.demand.begin(), a.demand.end(), x.demand.begin(), x.demand.end())) continue;
    if (best < 0 || x.cost < st[best].cost) best = i;
  }
  if (best < 0) throw NoCombination("no combination at vertex " + std::to_string(u));
  return static_cast<std::uint32_t>(best);
}

namespace detail {

inline bool monotone(const DominationInstance& inst, VertexId u) {
  const auto& st = inst.states(u);
  const bool implicit = inst.implicit_edges(u) > 0;
  std::map<std::vector<EdgeLabel>, std::vector<std::uint32_t>> by_supply;
  for (std::uint32_t i = 0; i < st.size(); ++i) by_supply[st[i].supply].push_back(i);
  std::vector<EdgeLabel> want;
  for (std::uint32_t i = 0; i < st.size(); ++i)
    for (std::uint32_t j = 0; j < st.size(); ++j) {
      const State& a = st[i];
      const State& b = st[j];
      const Cost cap = a.cost + b.cost;
      // Unlisted interaction states exist at +inf for every supply/demand pattern.
      if (cap.is_inf() && implicit) continue;
      want.clear();
      std::set_union(a.supply.begin(), a.supply.end(), b.supply.begin(), b.supply.end(),
                     std::back_inserter(want));
      auto it = by_supply.find(want);
      bool found = false;
      if (it != by_supply.end())
        for (auto x : it->second)
          if (st[x].cost <= cap &&
              std::includes(a.demand.begin(), a.demand.end(), st[x].demand.begin(), st[x].demand.end())) {
            found = true;
            break;
          }
      if (!found) return false;
    }
  return true;
}

}  // namespace detail

inline bool check_decent(const DominationInstance& inst, std::uint64_t s, std::uint64_t d,
                         std::string* why = nullptr) {
  for (VertexId v : inst.vertices()) {
    if (inst.graph().degree(v) > s) {
      if (why) *why = "degree bound fails at " + std::to_string(v);
      return false;
    }
    if (inst.domain_size(v) > d) {
      if (why) *why = "domain bound fails at " + std::to_string(v);
      return false;
    }
    if (!detail::monotone(inst, v)) {
      if (why) *why = "vertex " + std::to_string(v) + " is not state-monotonous";
      return false;
    }
  }
  return true;
}

inline constexpr std::uint8_t kSupply = 1;
inline constexpr std::uint8_t kDemand = 2;

struct Interaction {
  std::vector<EdgeLabel> edges;   // E(R, S), sorted
  std::vector<std::uint8_t> flags;  // kSupply | kDemand per edge
  bool operator==(const Interaction&) const = default;
  std::uint8_t at(EdgeLabel e) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e) throw Error("edge not in interaction");
    return flags[it - edges.begin()];
  }
};

// Interaction of R with N(R) under φ (indexed by VertexId).
inline Interaction interaction(const DominationInstance& inst, const std::vector<VertexId>& R,
                               const std::vector<std::uint32_t>& phi) {
  std::vector<char> in = mask_of(inst.graph().id_bound(), R);
  std::vector<std::pair<EdgeLabel, std::uint8_t>> items;
  for (VertexId u : R)
    for (const auto& inc : inst.graph().incident(u)) {
      if (in[inc.nbr]) continue;
      const State& s = inst.states(u).at(phi.at(u));
      std::uint8_t f = (s.supplies(inc.label) ? kSupply : 0) | (s.demands(inc.label) ? kDemand : 0);
      items.push_back({inc.label, f});
    }
  std::sort(items.begin(), items.end());
  Interaction x;
  for (auto [l, f] : items) {
    x.edges.push_back(l);
    x.flags.push_back(f);
  }
  return x;
}

// Clear(I; A): edges inside A removed, every vertex of A relieved.
inline DominationInstance clear(const DominationInstance& inst, const std::vector<VertexId>& A) {
  DominationInstance out = inst;
  std::vector<char> in = mask_of(inst.graph().id_bound(), A);
  for (EdgeLabel l : inst.graph().edge_labels()) {
    auto e = inst.graph().endpoints(l);
    if (in[e.u] && in[e.v]) out.remove_edge(l);
  }
  for (VertexId a : A) out.relieve(a);
  return out;
}

}  // namespace dynbaker
