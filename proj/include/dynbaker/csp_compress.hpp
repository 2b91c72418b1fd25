#pragma once

#include <functional>
#include <map>
#include <vector>

#include "dynbaker/csp_dp.hpp"

namespace dynbaker {

// Identity of a vertex of a compressed instance in terms of the uncompressed one.
struct VertexKey {
  enum Kind : std::uint8_t { original, contracted, component, accumulator };
  Kind kind = original;
  VertexId v = 0;              // original id, or smallest vertex of a collapsed component
  std::vector<VertexId> set;   // contracted neighborhood S
  auto operator<=>(const VertexKey&) const = default;

  static VertexKey of(VertexId id) { return {original, id, {}}; }
  static VertexKey of_set(std::vector<VertexId> s) { return {contracted, 0, std::move(s)}; }
};

using KeyMap = std::map<VertexId, VertexKey>;

struct KeyedCsp {
  CspInstance inst;
  KeyMap key;
};

// Optimum over the view with pinned values (including pinned revenue), kNegInf if infeasible.
using CspSubsolver = std::function<Weight(const CspInstance&, const GraphView&, const Pins&)>;

inline Weight dp_subsolver(const CspInstance& inst, const GraphView& view, const Pins& pins) {
  return solve_csp(inst, view, &pins);
}

// Whether the digits of `code` (over S, first member least significant) satisfy every
// constraint among members of S in `inst`.
inline bool consistent_inside(const CspInstance& inst, const std::vector<VertexId>& S,
                              const std::vector<Value>& digits) {
  for (std::size_t i = 0; i < S.size(); ++i)
    for (const auto& inc : inst.graph().incident(S[i])) {
      auto it = std::lower_bound(S.begin(), S.end(), inc.nbr);
      if (it == S.end() || *it != inc.nbr || inc.nbr < S[i]) continue;
      if (!inst.allowed(inc.label, S[i], digits[i], digits[it - S.begin()])) return false;
    }
  return true;
}

inline void decode_digits(const CspInstance& inst, const std::vector<VertexId>& S, std::uint64_t code,
                          std::vector<Value>& digits) {
  digits.resize(S.size());
  for (std::size_t j = 0; j < S.size(); ++j) {
    Value r = inst.domain_size(S[j]);
    digits[j] = static_cast<Value>(code % r);
    code /= r;
  }
}

// Projection edge between member s (at mixed-radix position with `stride`) and contracted vertex x.
inline Relation projection_relation(Value ds, std::uint64_t dx, std::uint64_t stride) {
  return Relation::projection(/*contracted_is_v=*/true, ds, static_cast<Value>(dx), stride, ds);
}

// I{Y}: Y kept verbatim, one contracted vertex per distinct component neighborhood.
inline KeyedCsp compress(const CspInstance& inst, const std::vector<VertexId>& Y,
                         const CspSubsolver& sub = dp_subsolver) {
  KeyedCsp out;
  std::vector<char> iny = mask_of(inst.graph().id_bound(), Y);
  std::vector<char> rest(inst.graph().id_bound(), 0);
  for (VertexId v : inst.vertices()) rest[v] = !iny[v];
  for (VertexId y : Y) {
    out.inst.add_vertex(y, inst.revenue(y));
    out.key[y] = VertexKey::of(y);
  }
  for (EdgeLabel l : inst.graph().edge_labels()) {
    auto e = inst.graph().endpoints(l);
    if (iny[e.u] && iny[e.v]) out.inst.add_edge_labeled(e.u, e.v, l, inst.relation(l));
  }
  std::map<std::vector<VertexId>, std::vector<std::vector<VertexId>>> groups;
  for (auto& comp : components(GraphView(inst.graph(), &rest)))
    groups[open_neighborhood(inst.graph(), comp)].push_back(std::move(comp));

  VertexId next_id = inst.graph().id_bound();
  EdgeLabel next_label = inst.graph().next_label();
  std::vector<Value> digits;
  for (const auto& [S, comps] : groups) {
    std::uint64_t m = 1;
    for (VertexId s : S) {
      m *= inst.domain_size(s);
      if (m > kMaxTableEntries) throw ParameterOverflow("contracted domain too large");
    }
    std::vector<Weight> rev(m + 1, 0);
    for (std::uint64_t code = 0; code < m; ++code) {
      decode_digits(inst, S, code, digits);
      if (!consistent_inside(inst, S, digits)) continue;
      Pins pins;
      Weight pinned_rev = 0;
      for (std::size_t j = 0; j < S.size(); ++j) {
        pins.set(S[j], digits[j]);
        pinned_rev += inst.revenue(S[j])[digits[j]];
      }
      Weight total = 0;
      bool feasible = true;
      for (const auto& comp : comps) {
        std::vector<char> keep = mask_of(inst.graph().id_bound(), sorted_union(comp, S));
        Weight r = sub(inst, GraphView(inst.graph(), &keep), pins);
        if (r == kNegInf) {
          feasible = false;
          break;
        }
        total += r - pinned_rev;
      }
      rev[code + 1] = feasible ? total : 0;
    }
    VertexId x = next_id++;
    out.inst.add_vertex(x, std::move(rev));
    out.key[x] = VertexKey::of_set(S);
    std::uint64_t stride = 1;
    for (VertexId s : S) {
      out.inst.add_edge_labeled(s, x, next_label++, projection_relation(inst.domain_size(s), m + 1, stride));
      stride *= inst.domain_size(s);
    }
  }
  return out;
}

inline KeyMap identity_keys(const CspInstance& inst) {
  KeyMap k;
  for (VertexId v : inst.vertices()) k[v] = VertexKey::of(v);
  return k;
}

// Equality after dropping isolated all-zero vertices, matching vertices by key.
inline bool equivalent(const CspInstance& a, const KeyMap& ka, const CspInstance& b, const KeyMap& kb,
                       std::string* why = nullptr) {
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
    if (a.revenue(v) != b.revenue(it->second)) return fail("revenue differs at vertex " + std::to_string(v));
    a2b[v] = it->second;
  }
  if (a.graph().num_edges() != b.graph().num_edges()) return fail("edge counts differ");
  for (EdgeLabel l : a.graph().edge_labels()) {
    auto e = a.graph().endpoints(l);
    VertexId bu = a2b.at(e.u), bv = a2b.at(e.v);
    auto lb = b.graph().find_edge(bu, bv);
    if (!lb) return fail("missing edge");
    Relation rb = b.relation(*lb);
    if (b.graph().endpoints(*lb).u != bu) rb = rb.flipped();
    if (!(a.relation(l) == rb)) return fail("relation differs");
  }
  return true;
}

inline bool equivalent(const CspInstance& a, const CspInstance& b) {
  return equivalent(a, identity_keys(a), b, identity_keys(b));
}

}  // namespace dynbaker
