#pragma once

#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dynbaker/dyn_graph.hpp"

namespace dynbaker {

// Binary relation on D_u x D_v containing {0} x D_v and D_u x {0}.
class Relation {
 public:
  enum class Kind { table, exclusive, projection };

  // Row-major |du| x |dv| allowance table.
  static Relation table(Value du, Value dv, std::vector<char> allowed) {
    if (allowed.size() != static_cast<std::size_t>(du) * dv) throw Error("relation table size");
    for (Value a = 0; a < du; ++a)
      if (!allowed[static_cast<std::size_t>(a) * dv]) throw Error("relation must allow value 0");
    for (Value b = 0; b < dv; ++b)
      if (!allowed[b]) throw Error("relation must allow value 0");
    Relation r(Kind::table, du, dv);
    r.table_ = std::move(allowed);
    return r;
  }

  // Only pairs with a zero side are allowed (independent-set constraint).
  static Relation exclusive(Value du, Value dv) { return Relation(Kind::exclusive, du, dv); }

  // One side is a contracted vertex whose nonzero value v encodes the tuple v-1 in mixed radix;
  // the other side's value must match the digit at `stride` whenever both are nonzero.
  static Relation projection(bool contracted_is_v, Value du, Value dv, std::uint64_t stride,
                             Value radix) {
    Relation r(Kind::projection, du, dv);
    r.contracted_is_v_ = contracted_is_v;
    r.stride_ = stride;
    r.radix_ = radix;
    if ((contracted_is_v ? du : dv) != radix) throw Error("projection radix mismatch");
    return r;
  }

  Kind kind() const { return kind_; }
  Value du() const { return du_; }
  Value dv() const { return dv_; }
  bool contracted_is_v() const { return contracted_is_v_; }
  std::uint64_t stride() const { return stride_; }
  Value radix() const { return radix_; }

  bool allowed(Value a, Value b) const {
    if (a == 0 || b == 0) return true;
    switch (kind_) {
      case Kind::table:
        return table_[static_cast<std::size_t>(a) * dv_ + b];
      case Kind::exclusive:
        return false;
      case Kind::projection: {
        Value small = contracted_is_v_ ? a : b;
        std::uint64_t big = contracted_is_v_ ? b : a;
        return ((big - 1) / stride_) % radix_ == small;
      }
    }
    return false;
  }

  Relation flipped() const {
    Relation r = *this;
    std::swap(r.du_, r.dv_);
    r.contracted_is_v_ = !contracted_is_v_;
    if (kind_ == Kind::table) {
      for (Value a = 0; a < du_; ++a)
        for (Value b = 0; b < dv_; ++b)
          r.table_[static_cast<std::size_t>(b) * du_ + a] = table_[static_cast<std::size_t>(a) * dv_ + b];
    }
    return r;
  }

  // Semantic equality; falls back to structural comparison for huge relations.
  friend bool operator==(const Relation& x, const Relation& y) {
    if (x.du_ != y.du_ || x.dv_ != y.dv_) return false;
    if (static_cast<std::uint64_t>(x.du_) * x.dv_ > (1u << 22)) {
      return x.kind_ == y.kind_ && x.contracted_is_v_ == y.contracted_is_v_ &&
             x.stride_ == y.stride_ && x.radix_ == y.radix_ && x.table_ == y.table_;
    }
    for (Value a = 1; a < x.du_; ++a)
      for (Value b = 1; b < x.dv_; ++b)
        if (x.allowed(a, b) != y.allowed(a, b)) return false;
    return true;
  }

 private:
  Relation(Kind k, Value du, Value dv) : kind_(k), du_(du), dv_(dv) {}
  Kind kind_;
  Value du_, dv_;
  std::vector<char> table_;
  bool contracted_is_v_ = false;
  std::uint64_t stride_ = 1;
  Value radix_ = 0;
};

// Max Weight Nullary 2CSP instance over a simple Gaifman graph.
class CspInstance {
 public:
  void add_vertex(VertexId id, std::vector<Weight> revenue) {
    check_revenue(revenue);
    graph_.add_vertex(id, 0);
    if (id >= revenue_.size()) revenue_.resize(id + 1);
    revenue_[id] = std::move(revenue);
  }

  EdgeLabel add_edge(VertexId u, VertexId v, Relation rel) {
    EdgeLabel l = graph_.next_label();
    add_edge_labeled(u, v, l, std::move(rel));
    return l;
  }

  void add_edge_labeled(VertexId u, VertexId v, EdgeLabel label, Relation rel) {
    if (graph_.find_edge(u, v)) throw Error("CSP Gaifman graph must stay simple");
    if (rel.du() != domain_size(u) || rel.dv() != domain_size(v)) throw Error("relation shape");
    graph_.add_edge_labeled(u, v, label);
    relation_.emplace(label, std::move(rel));
  }

  void remove_edge(EdgeLabel label) {
    graph_.remove_edge(label);
    relation_.erase(label);
  }

  void set_revenue(VertexId id, std::vector<Weight> revenue) {
    check_revenue(revenue);
    if (revenue.size() != domain_size(id)) throw Error("revenue update changes the domain");
    revenue_[id] = std::move(revenue);
  }

  void erase_isolated_vertex(VertexId id) {
    graph_.erase_isolated_vertex(id);
    revenue_[id].clear();
  }

  const DynGraph& graph() const { return graph_; }
  bool has_vertex(VertexId v) const { return graph_.has_vertex(v); }
  std::vector<VertexId> vertices() const { return graph_.vertices(); }
  std::size_t num_vertices() const { return graph_.num_vertices(); }
  Value domain_size(VertexId v) const {
    if (!graph_.has_vertex(v)) throw Error("missing vertex " + std::to_string(v));
    return static_cast<Value>(revenue_[v].size());
  }
  const std::vector<Weight>& revenue(VertexId v) const {
    if (!graph_.has_vertex(v)) throw Error("missing vertex " + std::to_string(v));
    return revenue_[v];
  }
  // Relation oriented as (endpoints(label).u, endpoints(label).v).
  const Relation& relation(EdgeLabel label) const { return relation_.at(label); }

  // Whether x=vx together with the other endpoint's value vy satisfies the constraint.
  bool allowed(EdgeLabel label, VertexId x, Value vx, Value vy) const {
    const Relation& r = relation_.at(label);
    return graph_.endpoints(label).u == x ? r.allowed(vx, vy) : r.allowed(vy, vx);
  }

  bool isolated_zero(VertexId v) const {
    if (graph_.degree(v) != 0) return false;
    for (Weight w : revenue_[v])
      if (w != 0) return false;
    return true;
  }

 private:
  static void check_revenue(const std::vector<Weight>& r) {
    if (r.empty() || r[0] != 0) throw Error("domain must contain value 0 with revenue 0");
    for (Weight w : r)
      if (w < 0) throw Error("negative revenue");
  }

  DynGraph graph_;
  std::vector<std::vector<Weight>> revenue_;
  std::unordered_map<EdgeLabel, Relation> relation_;
};

struct CspAddVertex {
  VertexId v;
  std::vector<Weight> revenue;
};
struct CspAddEdge {
  VertexId u, v;
  EdgeLabel label;
  Relation rel;  // oriented (u, v)
};
struct CspRemoveEdge {
  EdgeLabel label;
};
struct CspUpdateRevenue {
  VertexId v;
  std::vector<Weight> revenue;
};
using CspUpdate = std::variant<CspAddVertex, CspAddEdge, CspRemoveEdge, CspUpdateRevenue>;
using CspBatch = std::vector<CspUpdate>;

inline void apply(CspInstance& inst, const CspUpdate& upd) {
  std::visit(
      [&](const auto& u) {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, CspAddVertex>) {
          inst.add_vertex(u.v, u.revenue);
        } else if constexpr (std::is_same_v<T, CspAddEdge>) {
          inst.add_edge_labeled(u.u, u.v, u.label, u.rel);
        } else if constexpr (std::is_same_v<T, CspRemoveEdge>) {
          inst.remove_edge(u.label);
        } else {
          inst.set_revenue(u.v, u.revenue);
        }
      },
      upd);
}

// Vertices an update touches, in the instance it targets.
inline std::vector<VertexId> touched(const CspInstance& inst, const CspUpdate& upd) {
  return std::visit(
      [&](const auto& u) -> std::vector<VertexId> {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, CspAddEdge>) {
          return {u.u, u.v};
        } else if constexpr (std::is_same_v<T, CspRemoveEdge>) {
          auto e = inst.graph().endpoints(u.label);
          return {e.u, e.v};
        } else {
          return {u.v};
        }
      },
      upd);
}

inline CspInstance encode_mwis(const DynGraph& g) {
  CspInstance inst;
  for (VertexId v : g.vertices()) inst.add_vertex(v, {0, g.weight(v)});
  for (EdgeLabel l : g.edge_labels()) {
    auto e = g.endpoints(l);
    inst.add_edge_labeled(e.u, e.v, l, Relation::exclusive(2, 2));
  }
  return inst;
}

inline CspInstance induced(const CspInstance& inst, const std::vector<VertexId>& keep) {
  CspInstance out;
  std::vector<char> in = mask_of(inst.graph().id_bound(), keep);
  for (VertexId v : keep) out.add_vertex(v, inst.revenue(v));
  for (EdgeLabel l : inst.graph().edge_labels()) {
    auto e = inst.graph().endpoints(l);
    if (in[e.u] && in[e.v]) out.add_edge_labeled(e.u, e.v, l, inst.relation(l));
  }
  return out;
}

// Valuation as a vector indexed by VertexId. Returns nullopt when a constraint is violated.
inline std::optional<Weight> evaluate(const CspInstance& inst, const std::vector<Value>& phi) {
  Weight total = 0;
  for (VertexId v : inst.vertices()) {
    if (v >= phi.size() || phi[v] >= inst.domain_size(v)) throw Error("value out of domain");
    total += inst.revenue(v)[phi[v]];
  }
  for (EdgeLabel l : inst.graph().edge_labels()) {
    auto e = inst.graph().endpoints(l);
    if (!inst.relation(l).allowed(phi[e.u], phi[e.v])) return std::nullopt;
  }
  return total;
}

}  // namespace dynbaker
