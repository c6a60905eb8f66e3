// reach: symbolic reachability analysis for B-lite machines.
//
// Batch tool: parses a machine, builds its dependency matrices and runs
// explicit or symbolic (BFS / chaining) reachability with optional deadlock
// and invariant checks. Can also serve a machine over a socket endpoint, or
// run against such a server instead of a local model.
//
// Exit codes: 0 analysis clean, 1 a requested check found a violation,
// 2 usage or model errors.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "reach/bridge.hpp"
#include "reach/parser.hpp"
#include "reach/report.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw reach::ModelError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, long> parse_overrides(const std::vector<std::string>& kvs) {
  std::map<std::string, long> out;
  for (const auto& kv : kvs) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw reach::ModelError("constant override must be NAME=VALUE: " + kv);
    try {
      out[kv.substr(0, eq)] = std::stol(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw reach::ModelError("bad integer in override: " + kv);
    }
  }
  return out;
}

std::string endpoint_or_env(std::string value, const char* flag) {
  if (!value.empty()) return value;
  if (const char* env = std::getenv("REACH_ENDPOINT"); env && *env)
    return env;
  throw reach::ModelError(std::string(flag) +
                          " needs an endpoint (or set REACH_ENDPOINT)");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw reach::ModelError("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic reachability analyzer for B-lite machines"};
  app.get_formatter()->column_width(34);

  std::string model_path;
  std::vector<std::string> constant_args;
  std::string strategy_name = "bfs";
  std::string order_name = "natural";
  bool check_deadlock = false;
  bool check_invariant = false;
  bool dump_matrices = false;
  bool stats = false;
  std::string serve_ep, remote_ep;
  std::string format = "text";
  unsigned node_log2 = reach::ldd::StoreConfig{}.node_table_log2;
  unsigned cache_log2 = reach::ldd::StoreConfig{}.cache_log2;
  uint64_t any_cap = reach::ElabOptions{}.any_cap;
  uint64_t state_cap = 10'000'000;
  std::string graph_path, dot_path;

  app.add_option("model", model_path, "B-lite machine file (.blite)");
  app.add_option("-c,--constant", constant_args,
                 "constant override NAME=VALUE (repeatable)");
  app.add_option("--strategy", strategy_name, "bfs | chaining | explicit")
      ->check(CLI::IsMember({"bfs", "chaining", "explicit"}));
  app.add_option("--order", order_name, "variable order: natural | sloan")
      ->check(CLI::IsMember({"natural", "sloan"}));
  app.add_flag("--deadlock", check_deadlock, "report deadlocked states");
  app.add_flag("--invariant", check_invariant,
               "check the non-typing INVARIANT conjuncts on reachable states");
  app.add_flag("--matrices", dump_matrices,
               "print the dependency matrices and exit");
  app.add_flag("--stats", stats, "include store statistics in the report");
  app.add_option("--serve", serve_ep,
                 "serve the machine on ipc:<path> or tcp:<host>:<port>")
      ->expected(0, 1);
  app.add_option("--remote", remote_ep,
                 "run against a serving process instead of a local model")
      ->expected(0, 1);
  app.add_option("--format", format, "report format: text | machine")
      ->check(CLI::IsMember({"text", "machine"}));
  app.add_option("--node-table-log2", node_log2,
                 "log2 of the node table size (18..30)");
  app.add_option("--cache-log2", cache_log2,
                 "log2 of the operation cache size (18..30)");
  app.add_option("--any-cap", any_cap, "ANY enumeration cap per call");
  app.add_option("--state-cap", state_cap, "explicit state-count limit");
  app.add_option("--graph", graph_path,
                 "write the explicit transition graph to a file");
  app.add_option("--dot", dot_path,
                 "write the reachable-set LDD as DOT to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  using namespace reach;
  bool serving = app.count("--serve") > 0;
  bool remote = app.count("--remote") > 0;

  try {
    if (serving && remote)
      throw ModelError("--serve and --remote are mutually exclusive");
    if (serving && (app.count("--strategy") || check_deadlock ||
                    check_invariant || dump_matrices))
      throw ModelError("serve mode takes no strategy or checks");
    if (remote && !model_path.empty())
      throw ModelError("--remote takes no local model file");
    if (remote && (check_invariant || strategy_name == "explicit" ||
                   order_name != "natural" || dump_matrices))
      throw ModelError(
          "--remote supports bfs/chaining with --deadlock only; invariant "
          "checks, explicit search, matrix dumps and reordering need the "
          "model locally");
    if (!remote && model_path.empty())
      throw ModelError("a model file is required (or use --remote)");

    Strategy strategy = strategy_name == "bfs"        ? Strategy::Bfs
                        : strategy_name == "chaining" ? Strategy::Chaining
                                                      : Strategy::Explicit;
    if (!graph_path.empty() && strategy != Strategy::Explicit)
      throw ModelError("--graph needs --strategy explicit");
    if (!dot_path.empty() && strategy == Strategy::Explicit)
      throw ModelError("--dot needs a symbolic strategy");

    RunSummary summary;
    summary.order = order_name;

    if (remote) {
      std::string ep = endpoint_or_env(remote_ep, "--remote");
      RemoteProvider provider(ep);
      ldd::StoreConfig cfg{static_cast<uint32_t>(node_log2),
                           static_cast<uint32_t>(cache_log2), true};
      ldd::Store store(cfg);
      ReachReport rep = strategy == Strategy::Bfs
                            ? reach_bfs(provider, store)
                            : reach_chaining(provider, store);
      summary = summarize(provider.init(), rep);
      summary.order = order_name;
      if (check_deadlock) {
        ldd::NodeRef dead = symbolic_deadlocks(rep, store);
        summary.deadlocks = store.sat_count(dead);
        summary.deadlock_witnesses = first_witnesses(store, dead, 10);
      }
      if (stats) summary.store = store.stats();
      if (!dot_path.empty())
        write_file(dot_path, store.dot(rep.reachable, summary.info.var_names));
      std::cout << (format == "machine" ? render_json(summary).dump() + "\n"
                                        : render_text(summary));
      bool violation = summary.deadlocks.value_or(0) > 0;
      return violation ? 1 : 0;
    }

    // local model
    Machine machine = parse_machine(read_file(model_path));
    ElabOptions eopts;
    eopts.any_cap = any_cap;
    ElaboratedMachine em = elaborate(machine, parse_overrides(constant_args),
                                     eopts);
    DependencyMatrices dm = build_matrices(em);

    if (order_name == "sloan") {
      auto cm = combined_matrix(dm);
      VariableOrder vo = sloan_order(cm);
      summary.metrics_before =
          order_metrics(cm, VariableOrder::identity(em.var_count()));
      summary.metrics_after = order_metrics(cm, vo);
      std::tie(em, dm) = apply_order(em, dm, vo);
      summary.order_names = em.var_names;
    }

    if (serving) {
      std::string ep = endpoint_or_env(serve_ep, "--serve");
      Server server(em, dm, ep);
      if (server.port() != 0)
        std::cerr << "listening on tcp port " << server.port() << "\n";
      else
        std::cerr << "listening on " << ep << "\n";
      server.run();
      return 0;
    }

    if (dump_matrices) {
      std::cout << matrix_dump(em, dm);
      return 0;
    }

    if (strategy == Strategy::Explicit) {
      auto t0 = std::chrono::steady_clock::now();
      ExplicitOptions xopts;
      xopts.state_cap = state_cap;
      ExplicitReachResult res = explicit_reach(em, xopts);
      double wall = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      RunSummary ordered = summary;
      summary = summarize_explicit(model_info(em, dm), res, wall);
      summary.order_names = ordered.order_names;
      summary.metrics_before = ordered.metrics_before;
      summary.metrics_after = ordered.metrics_after;
      if (!graph_path.empty()) write_file(graph_path, graph_dump(em, res));
      if (check_deadlock) {
        summary.deadlocks = res.deadlocks.size();
        for (size_t i = 0; i < res.deadlocks.size() && i < 10; ++i)
          summary.deadlock_witnesses.push_back(res.deadlocks[i]);
      }
      if (check_invariant) {
        uint64_t count = 0;
        for (const auto& s : res.sorted_states()) {
          for (const auto& p : em.properties) {
            if (!eval_pred(em, *p, s)) {
              if (count < 10) summary.invariant_witnesses.push_back(s);
              ++count;
              break;
            }
          }
        }
        summary.invariant_violations = count;
      }
      summary.order = order_name;
      std::cout << (format == "machine" ? render_json(summary).dump() + "\n"
                                        : render_text(summary));
      bool violation = summary.deadlocks.value_or(0) > 0 ||
                       summary.invariant_violations.value_or(0) > 0;
      return violation ? 1 : 0;
    }

    LocalProvider provider(em, dm);
    ldd::StoreConfig cfg{static_cast<uint32_t>(node_log2),
                         static_cast<uint32_t>(cache_log2), true};
    ldd::Store store(cfg);
    ReachReport rep = strategy == Strategy::Bfs ? reach_bfs(provider, store)
                                                : reach_chaining(provider, store);
    std::string keep_order = summary.order;
    auto keep_names = summary.order_names;
    auto keep_before = summary.metrics_before;
    auto keep_after = summary.metrics_after;
    summary = summarize(provider.init(), rep);
    summary.order = keep_order;
    summary.order_names = keep_names;
    summary.metrics_before = keep_before;
    summary.metrics_after = keep_after;
    if (check_deadlock) {
      ldd::NodeRef dead = symbolic_deadlocks(rep, store);
      summary.deadlocks = store.sat_count(dead);
      summary.deadlock_witnesses = first_witnesses(store, dead, 10);
    }
    if (check_invariant) {
      auto viol = invariant_violations(rep, em, store);
      summary.invariant_violations = viol.size();
      for (size_t i = 0; i < viol.size() && i < 10; ++i)
        summary.invariant_witnesses.push_back(viol[i]);
    }
    if (stats) summary.store = store.stats();
    if (!dot_path.empty())
      write_file(dot_path, store.dot(rep.reachable, em.var_names));
    std::cout << (format == "machine" ? render_json(summary).dump() + "\n"
                                      : render_text(summary));
    bool violation = summary.deadlocks.value_or(0) > 0 ||
                     summary.invariant_violations.value_or(0) > 0;
    return violation ? 1 : 0;
  } catch (const reach::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
