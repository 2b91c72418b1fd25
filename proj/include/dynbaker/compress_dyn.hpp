#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynbaker/csp_compress.hpp"
#include "dynbaker/domination_dp.hpp"

namespace dynbaker {

// Forest for a frozen instance: per component, the unbalanced forest when its height is
// within factor*(w+1)log2(size+1), otherwise the balanced one.
inline EliminationForest compression_forest(const GraphView& view, const TreeDecomposition& td,
                                            bool allow_balanced = true, double factor = 2.0) {
  EliminationForest fu = elimination_forest_unbalanced(view, td);
  if (!allow_balanced || fu.height == 0) return fu;
  const auto comps = components(view);
  std::vector<std::uint32_t> comp_of(view.id_bound(), 0);
  std::vector<int> hu(comps.size(), 0);
  bool any_tall = false;
  const int w = std::max(td.width(), 0);
  std::vector<char> use_balanced(comps.size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (VertexId v : comps[c]) {
      comp_of[v] = static_cast<std::uint32_t>(c);
      hu[c] = std::max(hu[c], fu.depth[v] + 1);
    }
    double bound = factor * (w + 1) * std::ceil(std::log2(static_cast<double>(comps[c].size()) + 1));
    if (hu[c] > bound) use_balanced[c] = any_tall = true;
  }
  if (!any_tall) return fu;
  EliminationForest fb = elimination_forest(view, td);
  EliminationForest g;
  const std::size_t bound = fu.present.size();
  g.present = fu.present;
  g.parent.assign(bound, kNoVertex);
  g.depth.assign(bound, -1);
  g.children.assign(bound, {});
  g.reach.assign(bound, {});
  auto pick = [&](VertexId v) -> const EliminationForest& { return use_balanced[comp_of[v]] ? fb : fu; };
  for (int side = 0; side < 2; ++side) {
    const EliminationForest& src = side ? fb : fu;
    for (VertexId v : src.order) {
      if (&pick(v) != &src) continue;
      g.parent[v] = src.parent[v];
      g.depth[v] = src.depth[v];
      g.children[v] = src.children[v];
      g.reach[v] = src.reach[v];
      g.order.push_back(v);
      if (src.parent[v] == kNoVertex) g.roots.push_back(v);
      g.height = std::max(g.height, src.depth[v] + 1);
    }
  }
  std::stable_sort(g.order.begin(), g.order.end(), [&](VertexId a, VertexId b) { return g.depth[a] < g.depth[b]; });
  return g;
}

inline DominationInstance induced(const DominationInstance& inst, const std::vector<VertexId>& keep) {
  DominationInstance out;
  std::vector<char> in = mask_of(inst.graph().id_bound(), keep);
  for (VertexId v : keep) out.add_vertex(v, inst.costs(v), inst.implicit_edges(v));
  for (EdgeLabel l : inst.graph().edge_labels()) {
    auto e = inst.graph().endpoints(l);
    if (in[e.u] && in[e.v]) out.add_edge_labeled(e.u, e.v, l, side_of(inst, e.u, l), side_of(inst, e.v, l));
  }
  return out;
}

namespace detail {

// Dense ids for the maintained compressed instance, with keys in terms of the tracked ids.
class StarIds {
 public:
  VertexId fresh(VertexKey key) {
    keys_.push_back(std::move(key));
    return static_cast<VertexId>(keys_.size() - 1);
  }
  VertexId bind(VertexId orig) {
    if (orig >= to_star_.size()) to_star_.resize(orig + 1, kNoVertex);
    return to_star_[orig] = fresh(VertexKey::of(orig));
  }
  VertexId of(VertexId orig) const {
    if (orig >= to_star_.size() || to_star_[orig] == kNoVertex) throw Error("vertex not in the stash");
    return to_star_[orig];
  }
  const VertexKey& key(VertexId star) const { return keys_[star]; }
  KeyMap key_map(const DynGraph& star) const {
    KeyMap k;
    for (VertexId v : star.vertices()) k[v] = keys_[v];
    return k;
  }

 private:
  std::vector<VertexId> to_star_;
  std::vector<VertexKey> keys_;
};

inline bool flag(const std::vector<char>& m, VertexId v) { return v < m.size() && m[v]; }
inline void set_flag(std::vector<char>& m, VertexId v) {
  if (v >= m.size()) m.resize(v + 1, 0);
  m[v] = 1;
}

}  // namespace detail

// Maintains I* equivalent to I_cur{Z} for a frozen 2CSP instance under updates.
class CspCompression {
 public:
  CspCompression() = default;

  explicit CspCompression(CspInstance inst, int width_cap = std::numeric_limits<int>::max())
      : cur_(std::move(inst)) {
    GraphView view(cur_.graph());
    init(csp_decomposition(cur_, view, width_cap), true);
  }

  // Uses the given decomposition as is (no balancing).
  CspCompression(CspInstance inst, const TreeDecomposition& td) : cur_(std::move(inst)) {
    validate(GraphView(cur_.graph()), td);
    init(td, false);
  }

 private:
  void init(const TreeDecomposition& td, bool allow_balanced) {
    GraphView view(cur_.graph());
    // Tighter than the default: 2CSP tables stay small on balanced forests.
    f_ = compression_forest(view, td, allow_balanced, 1.0);
    try {
      tb_ = compute_tables(cur_, view, f_, nullptr, true);
    } catch (const ParameterOverflow&) {
      f_ = compression_forest(view, td, false);
      tb_ = compute_tables(cur_, view, f_, nullptr, true);
    }
    in_forest_ = f_.present;
    if (!f_.roots.empty()) {
      std::vector<Weight> raw{0};
      for (VertexId r : f_.roots) raw[0] += tb_.T[r][0];
      CspBatch sink;
      open_group({}, std::move(raw), static_cast<int>(f_.roots.size()), sink);
    }
  }

 public:

  const CspInstance& current() const { return cur_; }
  const CspInstance& compressed() const { return star_; }
  const EliminationForest& forest() const { return f_; }
  bool in_stash(VertexId v) const { return detail::flag(inz_, v); }
  std::vector<VertexId> stash() const {
    std::vector<VertexId> z;
    for (VertexId v : cur_.vertices())
      if (in_stash(v)) z.push_back(v);
    return z;
  }
  VertexId star_id(VertexId v) const { return ids_.of(v); }
  KeyedCsp snapshot() const { return {star_, ids_.key_map(star_.graph())}; }
  std::size_t grow_calls() const { return grow_calls_; }

  // Adds z (whose parent is already stashed, or a root) to Z.
  CspBatch grow_stash(VertexId z) {
    if (in_stash(z) || !f_.contains(z)) throw PrefixViolation();
    if (!f_.is_root(z) && !in_stash(f_.parent[z])) throw PrefixViolation();
    CspBatch out;
    grow_one(z, out);
    return out;
  }

  CspBatch apply_update(const CspUpdate& upd) {
    CspBatch out;
    std::visit(
        [&](const auto& u) {
          using T = std::decay_t<decltype(u)>;
          if constexpr (std::is_same_v<T, CspAddVertex>) {
            if (cur_.has_vertex(u.v)) throw Error("vertex already present");
            cur_.add_vertex(u.v, u.revenue);
            detail::set_flag(inz_, u.v);
            emit(out, CspAddVertex{ids_.bind(u.v), u.revenue});
          } else if constexpr (std::is_same_v<T, CspAddEdge>) {
            ensure(u.u, out);
            ensure(u.v, out);
            cur_.add_edge_labeled(u.u, u.v, u.label, u.rel);
            EdgeLabel sl = next_label_++;
            star_label_[u.label] = sl;
            emit(out, CspAddEdge{ids_.of(u.u), ids_.of(u.v), sl, u.rel});
            remask(u.u, u.v, out);
          } else if constexpr (std::is_same_v<T, CspRemoveEdge>) {
            auto e = cur_.graph().endpoints(u.label);
            ensure(e.u, out);
            ensure(e.v, out);
            cur_.remove_edge(u.label);
            emit(out, CspRemoveEdge{star_label_.at(u.label)});
            star_label_.erase(u.label);
            remask(e.u, e.v, out);
          } else {
            ensure(u.v, out);
            cur_.set_revenue(u.v, u.revenue);
            emit(out, CspUpdateRevenue{ids_.of(u.v), u.revenue});
          }
        },
        upd);
    return out;
  }

  // Number of vertices I* would gain if the given tracked vertices were touched.
  std::size_t predict_growth(const std::vector<VertexId>& touched) const {
    std::unordered_set<VertexId> seen;
    std::size_t n = 0;
    for (VertexId t : touched) {
      if (!cur_.has_vertex(t) || !f_.contains(t)) {
        if (!in_stash(t) && seen.insert(t).second) ++n;
        continue;
      }
      for (VertexId x = t; x != kNoVertex && !in_stash(x) && seen.insert(x).second; x = f_.parent[x])
        n += 1 + tb_.groups[x].size();
    }
    return n;
  }

 private:
  struct Group {
    VertexId x;
    std::vector<Weight> raw;
    int refs;
    std::vector<EdgeLabel> star_edges;
  };

  void emit(CspBatch& out, CspUpdate u) {
    dynbaker::apply(star_, u);
    out.push_back(std::move(u));
  }

  std::vector<Weight> masked(const std::vector<VertexId>& S, const std::vector<Weight>& raw) const {
    std::vector<Weight> rev(raw.size() + 1, 0);
    if (S.size() <= 1) {
      std::copy(raw.begin(), raw.end(), rev.begin() + 1);
      return rev;
    }
    std::vector<Value> digits;
    for (std::uint64_t code = 0; code < raw.size(); ++code) {
      decode_digits(cur_, S, code, digits);
      if (consistent_inside(cur_, S, digits)) rev[code + 1] = raw[code];
    }
    return rev;
  }

  void open_group(const std::vector<VertexId>& S, std::vector<Weight> raw, int refs, CspBatch& out) {
    VertexId x = ids_.fresh(VertexKey::of_set(S));
    std::uint64_t m = raw.size();
    emit(out, CspAddVertex{x, masked(S, raw)});
    Group g{x, std::move(raw), refs, {}};
    std::uint64_t stride = 1;
    for (VertexId s : S) {
      Value ds = cur_.domain_size(s);
      EdgeLabel sl = next_label_++;
      emit(out, CspAddEdge{ids_.of(s), x, sl, projection_relation(ds, m + 1, stride)});
      g.star_edges.push_back(sl);
      stride *= ds;
      if (s >= by_member_.size()) by_member_.resize(s + 1);
      by_member_[s].push_back(S);
    }
    groups_.emplace(S, std::move(g));
  }

  void grow_one(VertexId z, CspBatch& out) {
    ++grow_calls_;
    const auto& S = f_.reach[z];
    auto it = groups_.find(S);
    if (it == groups_.end()) throw Error("appendix without aggregate vertex");
    Group& g = it->second;
    const auto& tz = tb_.T[z];
    for (std::size_t i = 0; i < g.raw.size(); ++i) g.raw[i] -= tz[i];
    if (--g.refs == 0) {
      for (EdgeLabel l : g.star_edges) emit(out, CspRemoveEdge{l});
      emit(out, CspUpdateRevenue{g.x, std::vector<Weight>(g.raw.size() + 1, 0)});
      for (VertexId s : S) {
        auto& lst = by_member_[s];
        lst.erase(std::find(lst.begin(), lst.end(), S));
      }
      groups_.erase(it);
    } else {
      emit(out, CspUpdateRevenue{g.x, masked(S, g.raw)});
    }
    detail::set_flag(inz_, z);
    VertexId sz = ids_.bind(z);
    emit(out, CspAddVertex{sz, cur_.revenue(z)});
    for (const auto& inc : cur_.graph().incident(z)) {
      if (!in_stash(inc.nbr)) continue;
      auto e = cur_.graph().endpoints(inc.label);
      EdgeLabel sl = next_label_++;
      star_label_[inc.label] = sl;
      emit(out, CspAddEdge{ids_.of(e.u), ids_.of(e.v), sl, cur_.relation(inc.label)});
    }
    for (const auto& grp : tb_.groups[z]) open_group(grp.reach, grp.w, static_cast<int>(grp.members.size()), out);
  }

  void ensure(VertexId v, CspBatch& out) {
    if (in_stash(v)) return;
    if (!detail::flag(in_forest_, v)) throw Error("vertex " + std::to_string(v) + " is not tracked");
    for (VertexId x : f_.path_to(v))
      if (!in_stash(x)) grow_one(x, out);
  }

  // Aggregates over S read 0 where the digits break a constraint inside S.
  void remask(VertexId a, VertexId b, CspBatch& out) {
    if (a >= by_member_.size()) return;
    for (const auto& S : by_member_[a]) {
      if (!std::binary_search(S.begin(), S.end(), b)) continue;
      const Group& g = groups_.at(S);
      emit(out, CspUpdateRevenue{g.x, masked(S, g.raw)});
    }
  }

  CspInstance cur_, star_;
  EliminationForest f_;
  CspTables tb_;
  std::vector<char> in_forest_, inz_;
  detail::StarIds ids_;
  std::unordered_map<EdgeLabel, EdgeLabel> star_label_;
  EdgeLabel next_label_ = 0;
  std::map<std::vector<VertexId>, Group> groups_;
  std::vector<std::vector<std::vector<VertexId>>> by_member_;
  std::size_t grow_calls_ = 0;
};

// Maintains I* equivalent to I_cur{Z} for a frozen domination instance. Edge labels of I*
// are those of I_cur.
class DomCompression {
 public:
  DomCompression() = default;

  explicit DomCompression(DominationInstance inst, int width_cap = std::numeric_limits<int>::max())
      : cur_(std::move(inst)) {
    init(heuristic_td(GraphView(cur_.graph()), width_cap), true);
  }

  DomCompression(DominationInstance inst, const TreeDecomposition& td) : cur_(std::move(inst)) {
    validate(GraphView(cur_.graph()), td);
    init(td, false);
  }

 private:
  void init(const TreeDecomposition& td, bool allow_balanced) {
    GraphView view(cur_.graph());
    f_ = compression_forest(view, td, allow_balanced);
    tb_ = compute_domination_tables(cur_, view, f_);
    in_forest_ = f_.present;
    min_desc_.assign(f_.present.size(), kNoVertex);
    for (auto it = f_.order.rbegin(); it != f_.order.rend(); ++it) {
      VertexId u = *it;
      min_desc_[u] = std::min(min_desc_[u], u);
      if (!f_.is_root(u)) min_desc_[f_.parent[u]] = std::min(min_desc_[f_.parent[u]], min_desc_[u]);
    }
    for (VertexId r : f_.roots) add_root_share(r, +1);
    eps_ = ids_.fresh(VertexKey{VertexKey::accumulator, 0, {}});
    star_.add_vertex(eps_, {eps_cost()});
  }

 public:

  const DominationInstance& current() const { return cur_; }
  const DominationInstance& compressed() const { return star_; }
  const EliminationForest& forest() const { return f_; }
  bool in_stash(VertexId v) const { return detail::flag(inz_, v); }
  std::vector<VertexId> stash() const {
    std::vector<VertexId> z;
    for (VertexId v : cur_.vertices())
      if (in_stash(v)) z.push_back(v);
    return z;
  }
  VertexId star_id(VertexId v) const { return ids_.of(v); }
  KeyedDom snapshot() const { return {star_, ids_.key_map(star_.graph())}; }
  std::size_t grow_calls() const { return grow_calls_; }
  // Largest Reach set in the forest: a bound on every component neighborhood of I_cur - Z.
  std::size_t max_reach() const {
    std::size_t t = 0;
    for (VertexId v : f_.order) t = std::max(t, f_.reach[v].size());
    return t;
  }

  DomBatch grow_stash(VertexId z) {
    if (in_stash(z) || !f_.contains(z)) throw PrefixViolation();
    if (!f_.is_root(z) && !in_stash(f_.parent[z])) throw PrefixViolation();
    DomBatch out;
    grow_one(z, out);
    return out;
  }

  DomBatch apply_update(const DomUpdate& upd) {
    DomBatch out;
    std::visit(
        [&](const auto& u) {
          using T = std::decay_t<decltype(u)>;
          if constexpr (std::is_same_v<T, DomAddVertex>) {
            if (cur_.has_vertex(u.v)) throw Error("vertex already present");
            cur_.add_vertex(u.v, u.costs, u.implicit_edges);
            detail::set_flag(inz_, u.v);
            emit(out, DomAddVertex{ids_.bind(u.v), u.costs, u.implicit_edges});
          } else if constexpr (std::is_same_v<T, DomAddEdge>) {
            ensure(u.u, out);
            ensure(u.v, out);
            cur_.add_edge_labeled(u.u, u.v, u.label, u.su, u.sv);
            emit(out, DomAddEdge{ids_.of(u.u), ids_.of(u.v), u.label, u.su, u.sv});
          } else if constexpr (std::is_same_v<T, DomRemoveEdge>) {
            auto e = cur_.graph().endpoints(u.label);
            ensure(e.u, out);
            ensure(e.v, out);
            cur_.remove_edge(u.label);
            emit(out, u);
          } else {
            ensure(u.v, out);
            cur_.set_costs(u.v, u.costs);
            emit(out, DomUpdateCost{ids_.of(u.v), u.costs});
          }
        },
        upd);
    return out;
  }

  // v stops being relieved: its edges are re-inserted with the demand sets of `full`, and its
  // edges to still-cleared vertices (absent here) are inserted. `cleared` tells which
  // neighbors remain relieved.
  template <class Cleared>
  DomBatch relieve_in_universe(VertexId v, const DominationInstance& full, Cleared&& cleared) {
    DomBatch out;
    for (const auto& inc : full.graph().incident(v)) {
      const EdgeLabel l = inc.label;
      const VertexId w = inc.nbr;
      auto e = full.graph().endpoints(l);
      EdgeSide sv = side_of(full, v, l);
      EdgeSide sw = side_of(full, w, l);
      if (cleared(w)) sw.demand.clear();
      if (cur_.graph().has_edge(l)) append(out, apply_update(DomRemoveEdge{l}));
      DomAddEdge add = e.u == v ? DomAddEdge{v, w, l, sv, sw} : DomAddEdge{w, v, l, sw, sv};
      append(out, apply_update(add));
    }
    return out;
  }

  std::size_t predict_growth(const std::vector<VertexId>& touched) const {
    std::unordered_set<VertexId> seen;
    std::size_t n = 0;
    for (VertexId t : touched) {
      if (!cur_.has_vertex(t) || !f_.contains(t)) {
        if (!in_stash(t) && seen.insert(t).second) ++n;
        continue;
      }
      for (VertexId x = t; x != kNoVertex && !in_stash(x) && seen.insert(x).second; x = f_.parent[x])
        n += 1 + f_.children[x].size();
    }
    return n;
  }

 private:
  static void append(DomBatch& a, DomBatch b) {
    for (auto& u : b) a.push_back(std::move(u));
  }

  void emit(DomBatch& out, DomUpdate u) {
    dynbaker::apply(star_, u);
    out.push_back(std::move(u));
  }

  Cost eps_cost() const { return eps_inf_ > 0 ? Cost::inf() : Cost(eps_sum_); }

  void add_root_share(VertexId r, int sign) {
    Cost c = tb_.at(r, IKey{});
    if (c.is_inf())
      eps_inf_ += sign;
    else
      eps_sum_ += sign * c.value();
  }

  void grow_one(VertexId z, DomBatch& out) {
    ++grow_calls_;
    if (f_.is_root(z)) {
      add_root_share(z, -1);
      emit(out, DomUpdateCost{eps_, {eps_cost()}});
    } else {
      VertexId x = collapsed_.at(z);
      for (const auto& inc : std::vector<Incidence>(star_.graph().incident(x))) emit(out, DomRemoveEdge{inc.label});
      emit(out, DomUpdateCost{x, std::vector<Cost>(star_.states(x).size(), Cost(0))});
      collapsed_.erase(z);
    }
    detail::set_flag(inz_, z);
    VertexId sz = ids_.bind(z);
    emit(out, DomAddVertex{sz, cur_.costs(z), cur_.implicit_edges(z)});
    for (const auto& inc : cur_.graph().incident(z)) {
      if (!in_stash(inc.nbr)) continue;
      auto e = cur_.graph().endpoints(inc.label);
      emit(out, DomAddEdge{ids_.of(e.u), ids_.of(e.v), inc.label, side_of(cur_, e.u, inc.label),
                           side_of(cur_, e.v, inc.label)});
    }
    for (VertexId c : f_.children[z]) open_collapsed(c, out);
  }

  void open_collapsed(VertexId c, DomBatch& out) {
    std::vector<std::pair<IKey, Cost>> entries(tb_.T[c].begin(), tb_.T[c].end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Cost> costs;
    for (const auto& e : entries) costs.push_back(e.second);
    if (costs.empty()) costs.push_back(Cost::inf());
    const auto& boundary = tb_.boundary[c];
    VertexId x = ids_.fresh(VertexKey{VertexKey::component, min_desc_[c], {}});
    emit(out, DomAddVertex{x, costs, static_cast<std::uint32_t>(boundary.size())});
    for (std::size_t j = 0; j < boundary.size(); ++j) {
      EdgeLabel l = boundary[j];
      auto e = cur_.graph().endpoints(l);
      VertexId s = in_stash(e.u) ? e.u : e.v;
      EdgeSide xs;
      for (std::uint32_t i = 0; i < entries.size(); ++i) {
        std::uint8_t fl = entries[i].first.get(j);
        if (fl & kSupply) xs.supply.push_back(i);
        if (fl & kDemand) xs.demand.push_back(i);
      }
      emit(out, DomAddEdge{ids_.of(s), x, l, side_of(cur_, s, l), xs});
    }
    collapsed_[c] = x;
  }

  void ensure(VertexId v, DomBatch& out) {
    if (in_stash(v)) return;
    if (!detail::flag(in_forest_, v)) throw Error("vertex " + std::to_string(v) + " is not tracked");
    for (VertexId x : f_.path_to(v))
      if (!in_stash(x)) grow_one(x, out);
  }

  DominationInstance cur_, star_;
  EliminationForest f_;
  DomTables tb_;
  std::vector<char> in_forest_, inz_;
  std::vector<VertexId> min_desc_;
  detail::StarIds ids_;
  std::unordered_map<VertexId, VertexId> collapsed_;  // appendix -> its vertex in I*
  VertexId eps_ = 0;
  Weight eps_sum_ = 0;
  int eps_inf_ = 0;
  std::size_t grow_calls_ = 0;
};

}  // namespace dynbaker
