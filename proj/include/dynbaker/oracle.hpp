#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynbaker/csp_compress.hpp"
#include "dynbaker/domination_dp.hpp"

namespace dynbaker {

// ---- subset enumeration ----

inline constexpr std::size_t kBruteMaxVertices = 24;
inline constexpr std::uint64_t kBruteMaxAssignments = std::uint64_t{1} << 24;

namespace detail {

inline std::vector<std::uint32_t> closed_masks(const DynGraph& g, std::vector<VertexId>& verts) {
  verts = g.vertices();
  if (verts.size() > kBruteMaxVertices) throw TooLarge("brute force limited to 24 vertices");
  std::vector<int> idx(g.id_bound(), -1);
  for (std::size_t i = 0; i < verts.size(); ++i) idx[verts[i]] = static_cast<int>(i);
  std::vector<std::uint32_t> m(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    m[i] = std::uint32_t{1} << i;
    for (VertexId w : g.neighbors(verts[i])) m[i] |= std::uint32_t{1} << idx[w];
  }
  return m;
}

}  // namespace detail

inline Weight brute_mwis(const DynGraph& g) {
  std::vector<VertexId> verts;
  auto nb = detail::closed_masks(g, verts);
  const std::size_t n = verts.size();
  Weight best = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    Weight w = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (s >> i & 1) {
        if ((nb[i] & ~(std::uint32_t{1} << i)) & s) ok = false;
        w += g.weight(verts[i]);
      }
    if (ok) best = std::max(best, w);
  }
  return best;
}

inline Cost brute_mwds(const DynGraph& g) {
  std::vector<VertexId> verts;
  auto nb = detail::closed_masks(g, verts);
  const std::size_t n = verts.size();
  const std::uint32_t all = n == 32 ? ~0u : (std::uint32_t{1} << n) - 1;
  Cost best = Cost::inf();
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    std::uint32_t dom = 0;
    Weight w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) dom |= nb[i], w += g.weight(verts[i]);
    if (dom == all && Cost(w) < best) best = Cost(w);
  }
  return best;
}

// Assignment enumeration; an optional view restricts the instance.
inline Weight brute_csp(const CspInstance& inst, const GraphView* view = nullptr, const Pins* pins = nullptr) {
  GraphView full(inst.graph());
  const GraphView& vw = view ? *view : full;
  std::vector<VertexId> verts = vw.vertices();
  std::uint64_t total = 1;
  for (VertexId v : verts) {
    total *= (pins && pins->pinned(v)) ? 1 : inst.domain_size(v);
    if (total > kBruteMaxAssignments) throw TooLarge("too many assignments");
  }
  std::vector<Value> phi(inst.graph().id_bound(), 0);
  Weight best = kNegInf;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (VertexId v : verts) {
      if (pins && pins->pinned(v)) {
        phi[v] = static_cast<Value>(pins->value[v]);
        continue;
      }
      phi[v] = static_cast<Value>(c % inst.domain_size(v));
      c /= inst.domain_size(v);
    }
    Weight w = 0;
    bool ok = true;
    for (VertexId v : verts) {
      w += inst.revenue(v)[phi[v]];
      vw.for_each_incidence(v, [&](const Incidence& inc) {
        if (v < inc.nbr && !inst.allowed(inc.label, v, phi[v], phi[inc.nbr])) ok = false;
      });
      if (!ok) break;
    }
    if (ok) best = std::max(best, w);
  }
  return best;
}

inline Weight brute_subsolver(const CspInstance& inst, const GraphView& view, const Pins& pins) {
  return brute_csp(inst, &view, &pins);
}

namespace detail {

// Enumerates valuations (listed states) of `verts`; calls f(phi) for each.
template <typename F>
void for_each_valuation(const DominationInstance& inst, const std::vector<VertexId>& verts, F&& f) {
  std::uint64_t total = 1;
  for (VertexId v : verts) {
    total *= inst.states(v).size();
    if (total > kBruteMaxAssignments) throw TooLarge("too many valuations");
  }
  std::vector<std::uint32_t> phi(inst.graph().id_bound(), 0);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (VertexId v : verts) {
      phi[v] = static_cast<std::uint32_t>(c % inst.states(v).size());
      c /= inst.states(v).size();
    }
    f(phi);
  }
}

}  // namespace detail

inline Cost brute_domination(const DominationInstance& inst) {
  Cost best = Cost::inf();
  detail::for_each_valuation(inst, inst.vertices(), [&](const std::vector<std::uint32_t>& phi) {
    Cost c = evaluate(inst, phi);
    if (c < best) best = c;
  });
  return best;
}

// Interaction table of component C by enumeration of locally correct valuations.
inline std::pair<std::vector<EdgeLabel>, ITable> brute_interaction_table(const DominationInstance& inst,
                                                                         const std::vector<VertexId>& C) {
  std::vector<char> in = mask_of(inst.graph().id_bound(), C);
  std::vector<EdgeLabel> boundary;
  for (VertexId u : C)
    for (const auto& inc : inst.graph().incident(u))
      if (!in[inc.nbr]) boundary.push_back(inc.label);
  std::sort(boundary.begin(), boundary.end());
  if (boundary.size() > IKey::kMaxEdges) throw ParameterOverflow("interaction boundary too large");
  ITable table;
  detail::for_each_valuation(inst, C, [&](const std::vector<std::uint32_t>& phi) {
    Cost total = 0;
    IKey key;
    for (VertexId u : C) {
      const State& s = inst.states(u)[phi[u]];
      total += s.cost;
      for (const auto& inc : inst.graph().incident(u)) {
        if (in[inc.nbr]) {
          if (s.demands(inc.label) && !inst.states(inc.nbr)[phi[inc.nbr]].supplies(inc.label)) return;
        } else {
          std::size_t j = std::lower_bound(boundary.begin(), boundary.end(), inc.label) - boundary.begin();
          key.set(j, (s.supplies(inc.label) ? kSupply : 0) | (s.demands(inc.label) ? kDemand : 0));
        }
      }
    }
    if (!total.finite()) return;
    auto [it, fresh] = table.emplace(key, total);
    if (!fresh && total < it->second) it->second = total;
  });
  return {boundary, table};
}

// ---- frontier dynamic programs over id order (exact for small bandwidth) ----

inline constexpr int kMaxFrontier = 12;

inline int bandwidth(const DynGraph& g) {
  int b = 0;
  for (EdgeLabel l : g.edge_labels()) {
    auto e = g.endpoints(l);
    b = std::max(b, static_cast<int>(e.u > e.v ? e.u - e.v : e.v - e.u));
  }
  return b;
}

// Requires vertex ids 0..n-1.
inline Weight frontier_mwis(const DynGraph& g) {
  const int n = static_cast<int>(g.id_bound());
  if (static_cast<int>(g.num_vertices()) != n) throw Error("frontier DP needs dense ids");
  const int b = bandwidth(g);
  if (b > kMaxFrontier) throw TooLarge("bandwidth too large for the frontier DP");
  // bit j of the state: vertex i-1-j chosen
  const std::uint32_t full = (std::uint32_t{1} << b) - 1;
  std::vector<Weight> cur(std::size_t{1} << b, kNegInf), nxt(cur.size());
  cur[0] = 0;
  for (int i = 0; i < n; ++i) {
    std::uint32_t nbmask = 0;
    for (VertexId w : g.neighbors(static_cast<VertexId>(i)))
      if (static_cast<int>(w) < i) nbmask |= std::uint32_t{1} << (i - 1 - static_cast<int>(w));
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (std::uint32_t s = 0; s < cur.size(); ++s) {
      if (cur[s] == kNegInf) continue;
      std::uint32_t out = (s << 1) & full;
      nxt[out] = std::max(nxt[out], cur[s]);
      if (!(s & nbmask)) {
        std::uint32_t in = ((s << 1) | 1) & full;
        nxt[in] = std::max(nxt[in], cur[s] + g.weight(static_cast<VertexId>(i)));
      }
    }
    std::swap(cur, nxt);
  }
  Weight best = 0;
  for (Weight w : cur) best = std::max(best, w);
  return best;
}

inline Cost frontier_mwds(const DynGraph& g) {
  const int n = static_cast<int>(g.id_bound());
  if (static_cast<int>(g.num_vertices()) != n) throw Error("frontier DP needs dense ids");
  const int b = bandwidth(g);
  if (b > kMaxFrontier) throw TooLarge("bandwidth too large for the frontier DP");
  if (n == 0) return 0;
  // digit j (base 3) describes vertex i-1-j: 0 undominated, 1 dominated, 2 chosen
  std::vector<std::uint32_t> pow3(b + 2, 1);
  for (int j = 1; j <= b + 1; ++j) pow3[j] = pow3[j - 1] * 3;
  const std::uint32_t states = pow3[b];
  std::vector<Cost> cur(states, Cost::inf()), nxt(states);
  cur[0] = 0;
  // before vertex 0 the window holds no real vertices; treat them as dominated
  {
    std::uint32_t s = 0;
    for (int j = 0; j < b; ++j) s += pow3[j];
    std::fill(cur.begin(), cur.end(), Cost::inf());
    cur[s] = 0;
  }
  auto digit = [&](std::uint32_t s, int j) { return (s / pow3[j]) % 3; };
  for (int i = 0; i < n; ++i) {
    std::vector<int> nbj;
    for (VertexId w : g.neighbors(static_cast<VertexId>(i)))
      if (static_cast<int>(w) < i) nbj.push_back(i - 1 - static_cast<int>(w));
    std::fill(nxt.begin(), nxt.end(), Cost::inf());
    for (std::uint32_t s = 0; s < states; ++s) {
      if (!cur[s].finite()) continue;
      for (int choose = 0; choose < 2; ++choose) {
        std::uint32_t t = s;
        std::uint32_t self = 0;
        if (choose) {
          self = 2;
          for (int j : nbj)
            if (digit(t, j) == 0) t += pow3[j];
        } else {
          for (int j : nbj)
            if (digit(t, j) == 2) self = 1;
        }
        // shift: the oldest window vertex leaves and must be dominated
        if (b > 0 && digit(t, b - 1) == 0) continue;
        if (b == 0 && self == 0) continue;
        std::uint32_t shifted = b > 0 ? (t % pow3[b - 1]) * 3 + self : 0;
        Cost c = cur[s] + (choose ? Cost(g.weight(static_cast<VertexId>(i))) : Cost(0));
        if (c < nxt[shifted]) nxt[shifted] = c;
      }
    }
    std::swap(cur, nxt);
  }
  Cost best = Cost::inf();
  for (std::uint32_t s = 0; s < states; ++s) {
    bool ok = true;
    for (int j = 0; j < b; ++j)
      if (digit(s, j) == 0) ok = false;
    if (ok && cur[s] < best) best = cur[s];
  }
  return best;
}

// Exact optimum: subset enumeration when small, the frontier DP otherwise.
inline Weight exact_mwis(const DynGraph& g) {
  return g.num_vertices() <= 20 ? brute_mwis(g) : frontier_mwis(g);
}
inline Cost exact_mwds(const DynGraph& g) { return g.num_vertices() <= 20 ? brute_mwds(g) : frontier_mwds(g); }

// ---- generators ----

enum class HostKind { grid, outerplanar, tree };

inline HostKind parse_host_kind(const std::string& s) {
  if (s == "grid") return HostKind::grid;
  if (s == "outerplanar") return HostKind::outerplanar;
  if (s == "tree") return HostKind::tree;
  throw Error("unknown host kind " + s);
}

// rows x cols grid with column-major ids, so every edge spans at most `rows` ids.
inline DynGraph grid_graph(int rows, int cols, const std::vector<Weight>& w) {
  DynGraph g;
  for (int i = 0; i < rows * cols; ++i) g.add_vertex(static_cast<VertexId>(i), w.at(i));
  auto id = [&](int r, int c) { return static_cast<VertexId>(c * rows + r); };
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      if (r + 1 < rows) g.add_edge(id(r, c), id(r + 1, c));
      if (c + 1 < cols) g.add_edge(id(r, c), id(r, c + 1));
    }
  return g;
}

inline int grid_rows_for(int n) {
  int r = 1;
  while ((r + 1) * (r + 1) <= n && r < 4) ++r;
  while (r > 1 && n % r != 0) --r;
  return r;
}

// Planar hosts of small id bandwidth and max degree <= 4; weights uniform in [1, max_weight].
inline DynGraph gen_host(HostKind kind, int n, std::uint64_t seed, Weight max_weight = 10) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Weight> wd(1, max_weight);
  std::vector<Weight> w(n);
  for (auto& x : w) x = wd(rng);
  if (kind == HostKind::grid) {
    int rows = grid_rows_for(n);
    return grid_graph(rows, n / rows, w);
  }
  DynGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex(static_cast<VertexId>(i), w[i]);
  if (kind == HostKind::outerplanar) {
    for (int i = 0; i + 1 < n; ++i) {
      g.add_edge(i, i + 1);
      if (i + 2 < n) g.add_edge(i, i + 2);
    }
    return g;
  }
  const int b = 4;
  for (int i = 1; i < n; ++i) {
    std::vector<VertexId> cand;
    for (int p = std::max(0, i - b); p < i; ++p)
      if (g.degree(p) < 4) cand.push_back(p);
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    g.add_edge(cand[pick(rng)], i);
  }
  return g;
}

struct StreamOp {
  enum Kind : std::uint8_t { add_edge, remove_edge, update_weight, query };
  Kind kind;
  VertexId u = 0, v = 0;
  Weight w = 0;
  bool operator==(const StreamOp&) const = default;
};

// Random updates that keep the edge set inside the host's; every update is followed by a query.
inline std::vector<StreamOp> gen_stream(const DynGraph& host, int ops, std::uint64_t seed, Weight max_weight = 10) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ull);
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (EdgeLabel l : host.edge_labels()) {
    auto e = host.endpoints(l);
    edges.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  std::vector<char> present(edges.size(), 1);
  std::vector<VertexId> verts = host.vertices();
  std::vector<StreamOp> out;
  for (int t = 0; t < ops; ++t) {
    int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    if (edges.empty() || verts.empty()) kind = 2;
    if (verts.empty()) break;
    if (kind == 2) {
      VertexId v = verts[std::uniform_int_distribution<std::size_t>(0, verts.size() - 1)(rng)];
      out.push_back({StreamOp::update_weight, v, 0, std::uniform_int_distribution<Weight>(0, max_weight)(rng)});
    } else {
      std::size_t i = std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng);
      out.push_back({present[i] ? StreamOp::remove_edge : StreamOp::add_edge, edges[i].first, edges[i].second, 0});
      present[i] ^= 1;
    }
    out.push_back({StreamOp::query, 0, 0, 0});
  }
  return out;
}

// Applies a non-query op to a plain graph (the oracle side of a replay).
inline void apply_op(DynGraph& g, const StreamOp& op) {
  switch (op.kind) {
    case StreamOp::add_edge:
      g.add_edge(op.u, op.v);
      break;
    case StreamOp::remove_edge: {
      auto l = g.find_edge(op.u, op.v);
      if (!l) throw Error("no edge " + std::to_string(op.u) + "-" + std::to_string(op.v));
      g.remove_edge(*l);
      break;
    }
    case StreamOp::update_weight:
      g.set_weight(op.u, op.w);
      break;
    case StreamOp::query:
      break;
  }
}

}  // namespace dynbaker
