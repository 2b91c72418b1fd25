#pragma once

#include <istream>
#include <ostream>
#include <sstream>

#include "dynbaker/oracle.hpp"

namespace dynbaker {

struct ParseError : Error {
  using Error::Error;
};

namespace detail {

// Next line that is neither blank nor a comment; false at end of input.
inline bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] inline void fail(std::size_t lineno, const std::string& what) {
  throw ParseError("line " + std::to_string(lineno) + ": " + what);
}

template <class... T>
void fields(const std::string& line, std::size_t lineno, T&... out) {
  std::istringstream ss(line);
  ((ss >> out), ...);
  std::string extra;
  if (!ss || (ss >> extra)) fail(lineno, "malformed line '" + line + "'");
}

}  // namespace detail

// "n m", then n lines "v id w", then m lines "e u v".
inline DynGraph read_graph(std::istream& in) {
  std::string line, tag;
  std::size_t lineno = 0;
  long long n = 0, m = 0;
  if (!detail::next_line(in, line, lineno)) detail::fail(lineno, "missing header");
  detail::fields(line, lineno, n, m);
  if (n < 0 || m < 0) detail::fail(lineno, "negative count");
  DynGraph g;
  for (long long i = 0; i < n; ++i) {
    if (!detail::next_line(in, line, lineno)) detail::fail(lineno, "missing vertex line");
    long long id = 0, w = 0;
    detail::fields(line, lineno, tag, id, w);
    if (tag != "v" || id < 0 || w < 0) detail::fail(lineno, "bad vertex line '" + line + "'");
    if (g.has_vertex(static_cast<VertexId>(id))) detail::fail(lineno, "duplicate vertex");
    g.add_vertex(static_cast<VertexId>(id), w);
  }
  for (long long i = 0; i < m; ++i) {
    if (!detail::next_line(in, line, lineno)) detail::fail(lineno, "missing edge line");
    long long u = 0, v = 0;
    detail::fields(line, lineno, tag, u, v);
    if (tag != "e" || u < 0 || v < 0 || u == v) detail::fail(lineno, "bad edge line '" + line + "'");
    if (!g.has_vertex(static_cast<VertexId>(u)) || !g.has_vertex(static_cast<VertexId>(v)))
      detail::fail(lineno, "edge with unknown endpoint");
    g.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }
  if (detail::next_line(in, line, lineno)) detail::fail(lineno, "trailing content");
  return g;
}

inline void write_graph(std::ostream& out, const DynGraph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (VertexId v : g.vertices()) out << "v " << v << ' ' << g.weight(v) << '\n';
  for (EdgeLabel l : g.edge_labels()) {
    auto e = g.endpoints(l);
    out << "e " << e.u << ' ' << e.v << '\n';
  }
}

// One op per line: "AE u v", "RE u v", "UW u w", "Q".
inline std::vector<StreamOp> read_stream(std::istream& in) {
  std::vector<StreamOp> ops;
  std::string line, tag;
  std::size_t lineno = 0;
  while (detail::next_line(in, line, lineno)) {
    std::istringstream ss(line);
    ss >> tag;
    if (tag == "Q") {
      detail::fields(line, lineno, tag);
      ops.push_back({StreamOp::query});
      continue;
    }
    long long a = 0, b = 0;
    detail::fields(line, lineno, tag, a, b);
    if (a < 0 || b < 0) detail::fail(lineno, "negative value");
    if (tag == "AE") {
      ops.push_back({StreamOp::add_edge, static_cast<VertexId>(a), static_cast<VertexId>(b), 0});
    } else if (tag == "RE") {
      ops.push_back({StreamOp::remove_edge, static_cast<VertexId>(a), static_cast<VertexId>(b), 0});
    } else if (tag == "UW") {
      ops.push_back({StreamOp::update_weight, static_cast<VertexId>(a), 0, b});
    } else {
      detail::fail(lineno, "unknown op '" + tag + "'");
    }
  }
  return ops;
}

inline void write_stream(std::ostream& out, const std::vector<StreamOp>& ops) {
  for (const auto& op : ops) {
    switch (op.kind) {
      case StreamOp::add_edge: out << "AE " << op.u << ' ' << op.v << '\n'; break;
      case StreamOp::remove_edge: out << "RE " << op.u << ' ' << op.v << '\n'; break;
      case StreamOp::update_weight: out << "UW " << op.u << ' ' << op.w << '\n'; break;
      case StreamOp::query: out << "Q\n"; break;
    }
  }
}

}  // namespace dynbaker
