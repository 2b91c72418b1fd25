#pragma once

#include <vector>

#include "dynbaker/dyn_graph.hpp"

namespace dynbaker {

// Read-only restriction of a graph: an optional vertex subset, and an optional
// cleared set whose internal edges are hidden.
struct GraphView {
  const DynGraph* g;
  const std::vector<char>* keep = nullptr;
  const std::vector<char>* cleared = nullptr;

  GraphView(const DynGraph& graph) : g(&graph) {}  // NOLINT: views convert implicitly
  GraphView(const DynGraph& graph, const std::vector<char>* k, const std::vector<char>* c = nullptr)
      : g(&graph), keep(k), cleared(c) {}

  static bool in(const std::vector<char>* m, VertexId v) {
    return v < m->size() && (*m)[v];
  }
  bool has(VertexId v) const { return g->has_vertex(v) && (!keep || in(keep, v)); }
  bool is_cleared(VertexId v) const { return cleared && in(cleared, v); }
  bool edge_visible(VertexId a, VertexId b) const {
    return has(a) && has(b) && !(is_cleared(a) && is_cleared(b));
  }

  template <class F>
  void for_each_incidence(VertexId v, F&& f) const {
    for (const auto& inc : g->incident(v))
      if (edge_visible(v, inc.nbr)) f(inc);
  }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    for (VertexId v : g->vertices())
      if (!keep || in(keep, v)) out.push_back(v);
    return out;
  }

  std::vector<VertexId> neighbors(VertexId v) const {
    std::vector<VertexId> out;
    for_each_incidence(v, [&](const Incidence& inc) { out.push_back(inc.nbr); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  VertexId id_bound() const { return g->id_bound(); }
};

inline std::vector<std::vector<VertexId>> components(const GraphView& view) {
  std::vector<char> seen(view.id_bound(), 0);
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> stack;
  for (VertexId s : view.vertices()) {
    if (seen[s]) continue;
    out.emplace_back();
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      out.back().push_back(x);
      view.for_each_incidence(x, [&](const Incidence& inc) {
        if (!seen[inc.nbr]) {
          seen[inc.nbr] = 1;
          stack.push_back(inc.nbr);
        }
      });
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

}  // namespace dynbaker
