#pragma once

#include <random>
#include <set>
#include <vector>

#include "dynbaker/oracle.hpp"

namespace dynbaker::testing {

inline DynGraph path_graph(std::vector<Weight> w) {
  DynGraph g;
  for (std::size_t i = 0; i < w.size(); ++i) g.add_vertex(static_cast<VertexId>(i), w[i]);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) g.add_edge(i, i + 1);
  return g;
}

inline DynGraph cycle_graph(std::vector<Weight> w) {
  DynGraph g = path_graph(w);
  if (w.size() > 2) g.add_edge(0, w.size() - 1);
  return g;
}

// Simple graph with edge probability p, weights in [0, maxw].
inline DynGraph random_graph(int n, double p, std::mt19937_64& rng, Weight maxw = 9, std::size_t max_deg = 64) {
  DynGraph g;
  std::uniform_int_distribution<Weight> wd(0, maxw);
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i) g.add_vertex(i, wd(rng));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) && g.degree(i) < max_deg && g.degree(j) < max_deg) g.add_edge(i, j);
  return g;
}

// Random sparse planar-ish graph: a host with a random subset of its edges.
inline DynGraph random_host_subgraph(HostKind kind, int n, std::mt19937_64& rng, double keep = 0.8) {
  DynGraph host = gen_host(kind, n, rng());
  std::bernoulli_distribution coin(keep);
  for (EdgeLabel l : host.edge_labels())
    if (!coin(rng)) host.remove_edge(l);
  return host;
}

inline CspInstance random_csp(int n, double p, int max_dom, std::mt19937_64& rng) {
  CspInstance inst;
  std::uniform_int_distribution<int> dd(2, max_dom);
  std::uniform_int_distribution<Weight> rd(0, 9);
  std::bernoulli_distribution coin(p), allow(0.5);
  for (int i = 0; i < n; ++i) {
    std::vector<Weight> rev(dd(rng), 0);
    for (std::size_t a = 1; a < rev.size(); ++a) rev[a] = rd(rng);
    inst.add_vertex(i, rev);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!coin(rng)) continue;
      Value du = inst.domain_size(i), dv = inst.domain_size(j);
      std::vector<char> t(static_cast<std::size_t>(du) * dv);
      for (Value a = 0; a < du; ++a)
        for (Value b = 0; b < dv; ++b) t[a * dv + b] = (a == 0 || b == 0) ? 1 : allow(rng);
      inst.add_edge(i, j, Relation::table(du, dv, t));
    }
  return inst;
}

// Random state-monotonous instance over a multigraph: state 0 supplies every incident edge,
// further states have random supply/demand, then the pair closure is added with empty demand.
inline DominationInstance random_decent_domination(int n, int m, std::size_t max_states, std::mt19937_64& rng) {
  for (;;) {
    DynGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i, 0);
    std::uniform_int_distribution<int> vd(0, n - 1);
    for (int t = 0; t < m && n > 1; ++t) {
      int a = vd(rng), b = vd(rng);
      if (a != b && g.degree(a) < 3 && g.degree(b) < 3) g.add_edge(a, b);
    }
    std::uniform_int_distribution<int> cd(0, 6);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::vector<State>> st(n);
    bool ok = true;
    for (int v = 0; v < n && ok; ++v) {
      std::vector<EdgeLabel> inc;
      for (const auto& i : g.incident(v)) inc.push_back(i.label);
      std::sort(inc.begin(), inc.end());
      std::set<std::vector<EdgeLabel>> supplies;
      st[v].push_back({Cost(cd(rng) + 3), inc, {}});
      supplies.insert(inc);
      int extra = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int x = 0; x < extra; ++x) {
        State s{Cost(cd(rng)), {}, {}};
        for (EdgeLabel l : inc) {
          if (coin(rng)) s.supply.push_back(l);
          if (coin(rng)) s.demand.push_back(l);
        }
        if (supplies.count(s.supply)) continue;
        supplies.insert(s.supply);
        st[v].push_back(s);
      }
      // pair closure: one cheapest state per supply set, demands intersected
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < st[v].size() && !changed; ++i)
          for (std::size_t j = 0; j < st[v].size() && !changed; ++j) {
            std::vector<EdgeLabel> u;
            std::set_union(st[v][i].supply.begin(), st[v][i].supply.end(), st[v][j].supply.begin(),
                           st[v][j].supply.end(), std::back_inserter(u));
            Cost cap = st[v][i].cost + st[v][j].cost;
            for (auto& x : st[v])
              if (x.supply == u) {
                if (x.cost > cap) x.cost = cap, changed = true;
                std::vector<EdgeLabel> d;
                std::set_intersection(x.demand.begin(), x.demand.end(), st[v][i].demand.begin(),
                                      st[v][i].demand.end(), std::back_inserter(d));
                if (d != x.demand) x.demand = d, changed = true;
                goto next;
              }
            st[v].push_back({cap, u, {}});
            changed = true;
          next:;
          }
      }
      if (st[v].size() > max_states) ok = false;
    }
    if (!ok) continue;
    DominationInstance inst;
    for (int v = 0; v < n; ++v) {
      std::vector<Cost> costs;
      for (const auto& s : st[v]) costs.push_back(s.cost);
      inst.add_vertex(v, costs);
    }
    for (EdgeLabel l : g.edge_labels()) {
      auto e = g.endpoints(l);
      EdgeSide su, sv;
      for (std::uint32_t i = 0; i < st[e.u].size(); ++i) {
        if (st[e.u][i].supplies(l)) su.supply.push_back(i);
        if (st[e.u][i].demands(l)) su.demand.push_back(i);
      }
      for (std::uint32_t i = 0; i < st[e.v].size(); ++i) {
        if (st[e.v][i].supplies(l)) sv.supply.push_back(i);
        if (st[e.v][i].demands(l)) sv.demand.push_back(i);
      }
      inst.add_edge_labeled(e.u, e.v, l, su, sv);
    }
    return inst;
  }
}

// Random 2CSP update: edge toggles (table relations), revenue changes and new vertices.
inline CspUpdate random_csp_update(const CspInstance& inst, std::mt19937_64& rng) {
  auto verts = inst.vertices();
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<Weight> rd(0, 9);
  std::bernoulli_distribution allow(0.5);
  int k = verts.size() < 2 ? 9 : kind(rng);
  if (k <= 5) {
    VertexId u = verts[rng() % verts.size()], v = verts[rng() % verts.size()];
    if (u != v) {
      if (auto l = inst.graph().find_edge(u, v)) return CspRemoveEdge{*l};
      Value du = inst.domain_size(u), dv = inst.domain_size(v);
      std::vector<char> t(static_cast<std::size_t>(du) * dv);
      for (Value a = 0; a < du; ++a)
        for (Value b = 0; b < dv; ++b) t[a * dv + b] = (a == 0 || b == 0) ? 1 : allow(rng);
      return CspAddEdge{u, v, inst.graph().next_label(), Relation::table(du, dv, t)};
    }
  }
  if (k <= 8 && !verts.empty()) {
    VertexId v = verts[rng() % verts.size()];
    std::vector<Weight> rev(inst.domain_size(v), 0);
    for (std::size_t a = 1; a < rev.size(); ++a) rev[a] = rd(rng);
    return CspUpdateRevenue{v, rev};
  }
  std::vector<Weight> rev{0, rd(rng)};
  if (allow(rng)) rev.push_back(rd(rng));
  return CspAddVertex{inst.graph().id_bound(), rev};
}

// Random MWDS update through the slotted encoding; keeps the degree bound and host edges.
inline DomBatch random_mwds_update(SlottedMwds& enc, const DynGraph& host, std::mt19937_64& rng) {
  const auto& g = enc.instance().graph();
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<Weight> wd(0, 9);
  auto labels = host.edge_labels();
  int k = kind(rng);
  if (k <= 6 && !labels.empty()) {
    EdgeLabel l = labels[rng() % labels.size()];
    auto e = host.endpoints(l);
    if (g.has_edge(l)) return enc.remove_edge(l);
    if (g.degree(e.u) < enc.delta() && g.degree(e.v) < enc.delta()) return enc.add_edge(e.u, e.v, l);
  }
  auto verts = g.vertices();
  return enc.update_weight(verts[rng() % verts.size()], wd(rng));
}

// Random vertex subset with probability p.
inline std::vector<VertexId> random_subset(const std::vector<VertexId>& from, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<VertexId> out;
  for (VertexId v : from)
    if (coin(rng)) out.push_back(v);
  return out;
}

// Checks the three forest properties; returns an empty string when all hold.
inline std::string forest_problems(const GraphView& view, const EliminationForest& f) {
  for (VertexId v : view.vertices()) {
    if (!f.contains(v)) return "vertex missing";
    std::string bad;
    view.for_each_incidence(v, [&](const Incidence& inc) {
      if (!f.is_ancestor(v, inc.nbr) && !f.is_ancestor(inc.nbr, v)) bad = "edge between unrelated vertices";
    });
    if (!bad.empty()) return bad;
  }
  for (VertexId u : f.order) {
    auto desc = f.descendants(u);
    std::vector<char> in = mask_of(view.id_bound(), desc);
    std::vector<VertexId> reach;
    for (VertexId x : desc)
      view.for_each_incidence(x, [&](const Incidence& inc) {
        if (!in[inc.nbr]) reach.push_back(inc.nbr);
      });
    std::sort(reach.begin(), reach.end());
    reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
    if (reach != f.reach[u]) return "reach set mismatch at " + std::to_string(u);
    for (VertexId r : reach)
      if (!f.is_ancestor(r, u)) return "reach outside ancestors";
    GraphView sub(*view.g, &in, view.cleared);
    if (components(sub).size() != 1) return "descendants not connected at " + std::to_string(u);
    if (!f.is_root(u) && !std::binary_search(reach.begin(), reach.end(), f.parent[u]))
      return "parent not in reach";
    for (VertexId r : reach)
      if (f.depth[r] > f.depth[f.parent[u]]) return "parent is not the deepest reach vertex";
  }
  return "";
}

}  // namespace dynbaker::testing
