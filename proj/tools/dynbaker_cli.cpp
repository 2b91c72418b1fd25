// dynbaker: replay update streams against the dynamic MWIS / MWDS structure.
#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dynbaker/hierarchy.hpp"
#include "dynbaker/io.hpp"

using namespace dynbaker;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kPromise = 3 };

struct Common {
  std::string mode = "mwis";
  std::string eps = "1/2";
  std::size_t delta_cap = 4;
  int force_L = 0;
  std::uint64_t force_tau = 0;
  bool bulk_init = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--mode", c.mode, "mwis or mwds")->check(CLI::IsMember({"mwis", "mwds"}));
  sub->add_option("--eps", c.eps, "approximation parameter p/q in (0,1)");
  sub->add_option("--delta-cap", c.delta_cap, "degree bound (mwds)");
  sub->add_option("--force-L", c.force_L, "number of levels (0 picks automatically)");
  sub->add_option("--force-tau", c.force_tau, "epoch length at every level (0 uses the default)");
  sub->add_flag("--bulk-init", c.bulk_init, "build the root in one step instead of edge by edge");
}

HierarchyConfig config_of(const Common& c) {
  HierarchyConfig cfg;
  cfg.problem = c.mode == "mwds" ? Problem::mwds : Problem::mwis;
  cfg.eps = parse_rational(c.eps);
  check_epsilon(cfg.eps);
  cfg.delta = c.delta_cap;
  if (c.force_L > 0) cfg.force_L = c.force_L;
  if (c.force_tau > 0) cfg.force_tau = c.force_tau;
  cfg.bulk_init = c.bulk_init;
  return cfg;
}

template <class F>
auto with_file(const std::string& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return f(in);
}

// Replays ops; on_query(answer, graph) is called for each Q with the printed answer.
template <class H, class Q>
void replay(H& h, const std::vector<StreamOp>& ops, Q&& on_query) {
  for (const auto& op : ops) {
    switch (op.kind) {
      case StreamOp::add_edge: h.add_edge(op.u, op.v); break;
      case StreamOp::remove_edge: h.remove_edge(op.u, op.v); break;
      case StreamOp::update_weight: h.update_weight(op.u, op.w); break;
      case StreamOp::query: on_query(h); break;
    }
  }
}

int run(const Common& c, const std::string& graph, const std::string& updates, bool verify) {
  HierarchyConfig cfg = config_of(c);
  DynGraph g = with_file(graph, read_graph);
  auto ops = with_file(updates, read_stream);
  std::size_t queries = 0, bad = 0;
  auto report = [&](const auto& value, const auto& opt, bool ok) {
    ++queries;
    std::cout << value << '\n';
    if (verify && !ok) {
      ++bad;
      std::cerr << "query " << queries << ": value " << value << " outside bounds for optimum " << opt << '\n';
    }
  };
  if (cfg.problem == Problem::mwis) {
    DynamicMwis h(g, cfg);
    replay(h, ops, [&](const DynamicMwis& s) {
      Weight p = s.query();
      Weight opt = verify ? exact_mwis(s.graph()) : 0;
      report(p, opt, !verify || (p <= opt && Rational(p) >= (Rational(1) - cfg.eps) * Rational(opt)));
    });
  } else {
    DynamicMwds h(g, cfg);
    replay(h, ops, [&](const DynamicMwds& s) {
      Rational p = s.query();
      Cost opt = verify ? exact_mwds(s.graph()) : Cost(0);
      bool ok = !verify || (opt.finite() && p >= Rational(opt.value()) &&
                            p <= (Rational(1) + cfg.eps) * Rational(opt.value()));
      report(p, opt, ok);
    });
  }
  if (verify) std::cerr << queries << " queries checked, " << bad << " violations\n";
  return bad == 0 ? kOk : kFailure;
}

int bench(const Common& c, const std::string& host, int n, int ops_count, std::uint64_t seed) {
  HierarchyConfig cfg = config_of(c);
  DynGraph g = gen_host(parse_host_kind(host), n, seed);
  auto ops = gen_stream(g, ops_count, seed);
  std::size_t updates = 0;
  for (const auto& op : ops) updates += op.kind != StreamOp::query;
  auto time_ops = [&](auto& h) {
    auto t0 = std::chrono::steady_clock::now();
    replay(h, ops, [](const auto& s) { (void)s.query(); });
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
  };
  long long ns = 0;
  if (cfg.problem == Problem::mwis) {
    DynamicMwis h(g, cfg);
    ns = time_ops(h);
  } else {
    DynamicMwds h(g, cfg);
    ns = time_ops(h);
  }
  std::cout << "n,ops,total_ns,amortized_ns\n"
            << n << ',' << updates << ',' << ns << ',' << (updates ? ns / static_cast<long long>(updates) : 0) << '\n';
  return kOk;
}

int gen(const std::string& host, int n, int ops_count, std::uint64_t seed, Weight max_weight,
        const std::string& graph_out, const std::string& updates_out) {
  DynGraph g = gen_host(parse_host_kind(host), n, seed, max_weight);
  auto write = [](const std::string& path, auto&& body) {
    if (path.empty() || path == "-") {
      body(std::cout);
      return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    body(out);
  };
  write(graph_out, [&](std::ostream& o) { write_graph(o, g); });
  if (!updates_out.empty()) write(updates_out, [&](std::ostream& o) { write_stream(o, gen_stream(g, ops_count, seed, max_weight)); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic approximate MWIS / MWDS on planar update streams"};
  app.require_subcommand(1);

  Common rc, vc, bc;
  std::string r_graph, r_updates, v_graph, v_updates;
  auto* run_cmd = app.add_subcommand("run", "replay a stream, one answer per Q");
  add_common(run_cmd, rc);
  run_cmd->add_option("--graph", r_graph)->required();
  run_cmd->add_option("--updates", r_updates)->required();

  auto* verify_cmd = app.add_subcommand("verify", "replay and check every answer against an exact solver");
  add_common(verify_cmd, vc);
  verify_cmd->add_option("--graph", v_graph)->required();
  verify_cmd->add_option("--updates", v_updates)->required();

  std::string b_host = "grid";
  int b_n = 1024, b_ops = 1000;
  std::uint64_t b_seed = 1;
  auto* bench_cmd = app.add_subcommand("bench", "time a generated stream, CSV output");
  add_common(bench_cmd, bc);
  bench_cmd->add_option("--host", b_host)->check(CLI::IsMember({"grid", "outerplanar", "tree"}));
  bench_cmd->add_option("--n", b_n)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--ops", b_ops)->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", b_seed);

  std::string g_host = "grid", g_graph, g_updates;
  int g_n = 64, g_ops = 100;
  std::uint64_t g_seed = 1;
  Weight g_maxw = 10;
  auto* gen_cmd = app.add_subcommand("gen", "write a host graph and an update stream");
  gen_cmd->add_option("--host", g_host)->check(CLI::IsMember({"grid", "outerplanar", "tree"}));
  gen_cmd->add_option("--n", g_n)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--ops", g_ops)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", g_seed);
  gen_cmd->add_option("--max-weight", g_maxw)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--graph-out", g_graph, "graph file (default stdout)");
  gen_cmd->add_option("--updates-out", g_updates, "stream file (omitted if empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*run_cmd) return run(rc, r_graph, r_updates, false);
    if (*verify_cmd) return run(vc, v_graph, v_updates, true);
    if (*bench_cmd) return bench(bc, b_host, b_n, b_ops, b_seed);
    return gen(g_host, g_n, g_ops, g_seed, g_maxw, g_graph, g_updates);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const InvalidEpsilon& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const WidthExceeded& e) {
    std::cerr << "promise violated: " << e.what() << '\n';
    return kPromise;
  } catch (const DegreeBoundExceeded& e) {
    std::cerr << "promise violated: " << e.what() << '\n';
    return kPromise;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
