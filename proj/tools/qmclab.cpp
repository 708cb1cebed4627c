#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qmclab/json_io.hpp"

using namespace qmclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

WeightedGraph resolve_graph(const std::string& spec, std::uint64_t seed) {
  auto count_after = [&](std::size_t colon) {
    return static_cast<std::size_t>(std::stoul(spec.substr(colon + 1)));
  };
  if (spec == "single_edge") return standard_graph(StandardKind::SingleEdge);
  if (spec.rfind("complete:", 0) == 0) return standard_graph(StandardKind::Complete, count_after(8));
  if (spec.rfind("cycle:", 0) == 0) return standard_graph(StandardKind::Cycle, count_after(5));
  if (spec.rfind("random:", 0) == 0) {
    // random:N:p
    const auto second = spec.find(':', 7);
    require(second != std::string::npos, ErrorCode::InvalidArgument, "expected random:N:p");
    return random_graph(std::stoul(spec.substr(7, second - 7)), std::stod(spec.substr(second + 1)), seed);
  }
  std::ifstream in(spec);
  require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open graph file '" + spec + "'");
  return read_graph(in);
}

Objective resolve_objective(const std::string& name) {
  if (name == "mc") return Objective::mc();
  if (name == "prod") return Objective::prod();
  if (name == "qmc") return Objective::qmc();
  throw Error(ErrorCode::InvalidArgument, "unknown objective '" + name + "'");
}

Json envelope(const std::string& command, const Globals& g, int chunk_count) {
  return Json{{"schema", kSchema}, {"command", command}, {"metadata", metadata(g.seed, chunk_count)}};
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write '" + g.out + "'");
  f << text;
}

void emit_json(const Globals& g, const Json& j) { emit(g, j.dump(2) + "\n"); }

void json_only(const Globals& g, const std::string& command) {
  require(g.format == "json", ErrorCode::InvalidArgument,
          command + " emits nested reports; csv is only available for constants");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmclab: SDP relaxations, rounding constants and Quantum Max-Cut oracles"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "64-bit RNG seed for every stochastic step")->capture_default_str();
  app.add_option("--out", g.out, "output path (default: stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  // constants
  auto* constants = app.add_subcommand("constants", "approximation ratios alpha and minimizers rho* of all families");
  RatioSearchOptions ratio_opt;
  bool curves = false;
  constants->add_option("--grid-step", ratio_opt.grid_step, "coarse grid step in rho")->capture_default_str();
  constants->add_option("--refine-tol", ratio_opt.refine_tol, "golden-section bracket tolerance")->capture_default_str();
  constants->add_flag("--curves", curves, "csv: emit the full ratio curves instead of the summary");

  // solve-sdp / round share graph and solver flags
  std::string graph_spec = "single_edge", objective_name = "mc";
  SolverOptions solver;
  bool fast = false, with_assignment = false;
  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--graph", graph_spec, "single_edge | complete:N | cycle:N | random:N:p | file")->capture_default_str();
    sub->add_option("--objective", objective_name, "mc | prod | qmc")->capture_default_str();
    sub->add_option("--rank", solver.rank, "vector dimension r (0 = |V|)")->capture_default_str();
    sub->add_flag("--fast-rank", fast, "use r = ceil(sqrt(2|V|))");
    sub->add_option("--tol", solver.tol, "stop when a sweep gains less than this")->capture_default_str();
    sub->add_option("--max-iter", solver.max_iter, "sweep cap (0 = 10|V|log(1/tol))")->capture_default_str();
    sub->add_option("--restarts", solver.restarts, "independent random starts")->capture_default_str();
  };
  auto* solve = app.add_subcommand("solve-sdp", "row-by-row ascent on the vector program");
  add_solver_flags(solve);
  solve->add_flag("--with-assignment", with_assignment, "include the optimizer rows");

  auto* round = app.add_subcommand("round", "solve, then project-round the optimizer to rank k");
  add_solver_flags(round);
  RoundingOptions rounding;
  round->add_option("--k", rounding.k, "projection rank")->capture_default_str();
  round->add_option("--trials", rounding.trials, "rounding trials (>= 30)")->capture_default_str();
  round->add_flag("--per-edge", rounding.per_edge, "report the mean rounded value of every edge");

  // exact-diag / prod-opt
  std::string method = "dense", state_csv;
  LanczosOptions lanczos;
  auto* diag = app.add_subcommand("exact-diag", "largest eigenvalue of the Quantum Max-Cut Hamiltonian");
  diag->add_option("--graph", graph_spec, "single_edge | complete:N | cycle:N | random:N:p | file")->capture_default_str();
  diag->add_option("--method", method, "dense | iterative")->check(CLI::IsMember({"dense", "iterative"}))->capture_default_str();
  diag->add_option("--tol", lanczos.tol, "iterative residual tolerance")->capture_default_str();
  diag->add_option("--state-csv", state_csv, "write the top eigenvector as index,amplitude CSV");

  int prod_restarts = 10;
  double prod_tol = 1e-12;
  auto* prod = app.add_subcommand("prod-opt", "best product state found by Bloch-sphere ascent");
  prod->add_option("--graph", graph_spec, "single_edge | complete:N | cycle:N | random:N:p | file")->capture_default_str();
  prod->add_option("--restarts", prod_restarts, "random starts")->capture_default_str();
  prod->add_option("--tol", prod_tol, "ascent tolerance")->capture_default_str();

  // gap-instance
  std::string gap_kind = "hypercube", graph_out;
  int gap_n = 4;
  double rho = -0.584;
  bool loops = false;
  GaussianGraphParams gp;
  auto* gap = app.add_subcommand("gap-instance", "noisy hypercube or discretized Gaussian graph");
  gap->add_option("--kind", gap_kind, "hypercube | gaussian")->check(CLI::IsMember({"hypercube", "gaussian"}))->capture_default_str();
  gap->add_option("--n", gap_n, "dimension")->capture_default_str();
  gap->add_option("--rho", rho, "correlation")->capture_default_str();
  gap->add_flag("--loops", loops, "keep self-loops (hypercube only)");
  gap->add_option("--net-size", gp.net_size, "gaussian: sphere net size")->capture_default_str();
  gap->add_option("--mc-samples", gp.mc_samples, "gaussian: samples (0 = 10 net^2)")->capture_default_str();
  gap->add_option("--split", gp.split, "gaussian: copies per vertex")->capture_default_str();
  gap->add_option("--chunks", gp.chunk_count, "gaussian: sampling chunks")->capture_default_str();
  gap->add_option("--graph-out", graph_out, "write the graph in qmclab-graph v1 format");

  // ug-reduce
  std::string ug_path;
  int label_all = 1;
  auto* ug = app.add_subcommand("ug-reduce", "Unique Games to product-state reduction graph");
  ug->add_option("--ug", ug_path, "qmclab-ug v1 instance file")->required();
  ug->add_option("--rho", rho, "noise correlation")->capture_default_str();
  ug->add_flag("--loops", loops, "keep x = y pairs");
  ug->add_option("--label", label_all, "label (1-based) for the dictator witness on every vertex")->capture_default_str();
  ug->add_option("--graph-out", graph_out, "write the reduction graph");

  // dictator-test
  std::string fn_kind = "dictator", table_path;
  int fn_n = 3, fn_k = 3, fn_coord = 1, fn_m = 3;
  double fn_delta = 0.1;
  auto* dict = app.add_subcommand("dictator-test", "noise stability and influences of a Boolean vector function");
  dict->add_option("--function", fn_kind, "dictator | majority | random | table")
      ->check(CLI::IsMember({"dictator", "majority", "random", "table"}))
      ->capture_default_str();
  dict->add_option("--n", fn_n, "input bits")->capture_default_str();
  dict->add_option("--k", fn_k, "output dimension")->capture_default_str();
  dict->add_option("--coord", fn_coord, "dictator coordinate (1-based)")->capture_default_str();
  dict->add_option("--table", table_path, "qmclab-boolfn v1 table file");
  dict->add_option("--rho", rho, "noise correlation")->capture_default_str();
  dict->add_option("--m", fn_m, "degree cap for influences")->capture_default_str();
  dict->add_option("--delta", fn_delta, "notable-coordinate threshold")->capture_default_str();

  // gegenbauer-check
  int geg_n = 3, dmax = 10;
  std::optional<double> geg_alpha;
  double grid_step = 1e-3;
  auto* geg = app.add_subcommand("gegenbauer-check", "nu_1 <= 0 and |nu_d| < -nu_1 on a grid");
  geg->add_option("--n", geg_n, "sphere dimension (alpha = (n-2)/2)")->capture_default_str();
  geg->add_option("--alpha", geg_alpha, "Gegenbauer index (overrides --n)");
  geg->add_option("--dmax", dmax, "largest degree")->capture_default_str();
  geg->add_option("--grid-step", grid_step, "grid spacing in t")->capture_default_str();

  // borell-check
  int bor_n = 3, bor_chunks = 8;
  long bor_samples = 1000000;
  auto* borell = app.add_subcommand("borell-check", "Gaussian noise stability of the candidate library vs x/|x|");
  borell->add_option("--n", bor_n, "dimension n = k")->capture_default_str();
  borell->add_option("--rho", rho, "correlation in (-1, 0)")->capture_default_str();
  borell->add_option("--samples", bor_samples, "Monte Carlo pairs")->capture_default_str();
  borell->add_option("--chunks", bor_chunks, "sampling chunks")->capture_default_str();

  // bh-bound
  std::size_t bh_split = 1;
  auto* bh = app.add_subcommand("bh-bound", "degree statistics and the product-state error bound");
  bh->add_option("--graph", graph_spec, "single_edge | complete:N | cycle:N | random:N:p | file")->capture_default_str();
  bh->add_option("--split", bh_split, "split every vertex into this many copies first")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*constants) {
      std::vector<RatioReport> reports;
      for (const auto& fam : shipped_families()) reports.push_back(find_alpha_rho(fam, ratio_opt));
      if (g.format == "csv") {
        std::ostringstream os;
        if (curves) {
          os << "kind,k,rho,ratio\n";
          for (const auto& r : reports)
            for (const auto& [x, y] : r.grid) os << r.kind << ',' << r.k << ',' << format_double(x) << ',' << format_double(y) << '\n';
        } else {
          os << "kind,k,alpha,rho_star\n";
          for (const auto& r : reports)
            os << r.kind << ',' << r.k << ',' << format_double(r.alpha) << ',' << format_double(r.rho_star) << '\n';
        }
        emit(g, os.str());
        return kExitOk;
      }
      Json j = envelope("constants", g, 1);
      j["grid_step"] = ratio_opt.grid_step;
      Json table = Json::array();
      const auto fams = shipped_families();
      for (std::size_t i = 0; i < reports.size(); ++i) {
        Json row = to_json(reports[i]);
        row["objective"] = fams[i].kind == RatioKind::MaxCut    ? "MC"
                           : fams[i].kind == RatioKind::Product ? "PROD"
                                                                : "QMC";
        table.push_back(std::move(row));
      }
      j["constants"] = std::move(table);
      emit_json(g, j);
      return kExitOk;
    }

    if (*solve || *round) {
      const std::string cmd = *solve ? "solve-sdp" : "round";
      json_only(g, cmd);
      const auto graph = resolve_graph(graph_spec, g.seed);
      const auto obj = resolve_objective(objective_name);
      solver.seed = g.seed;
      if (fast) solver.rank = fast_rank(graph.vertex_count());
      const auto sol = solve_vector_program(graph, obj, solver);
      Json j = envelope(cmd, g, 1);
      j["graph"] = graph_spec;
      j["objective"] = to_string(obj.kind);
      j["rank"] = sol.assignment.rank();
      j["value"] = sol.value;
      j["iterations"] = sol.iterations;
      j["residual"] = sol.residual;
      j["monotone"] = sol.monotone;
      j["restarts"] = sol.restarts;
      if (*solve) {
        if (with_assignment) j["assignment"] = to_json(sol.assignment);
      } else {
        rounding.seed = derive_seed(g.seed, 0x726f756e64ULL);
        auto rep = empirical_rounding_ratio(graph, obj, sol.assignment, rounding);
        rep.graph_id = graph_spec;
        j["rounding"] = to_json(rep);
      }
      emit_json(g, j);
      return kExitOk;
    }

    if (*diag) {
      json_only(g, "exact-diag");
      const auto graph = resolve_graph(graph_spec, g.seed);
      const auto h = build_hamiltonian(graph);
      lanczos.seed = g.seed;
      const auto res = max_energy(h, method == "dense" ? EigenMethod::Dense : EigenMethod::Iterative, lanczos);
      Json j = envelope("exact-diag", g, 1);
      j["graph"] = graph_spec;
      j["qubits"] = h.qubit_count();
      j["method"] = method;
      j["max_energy"] = res.value;
      j["residual"] = res.residual;
      j["iterations"] = res.iterations;
      j["diagonal_max"] = diagonal_max(graph);
      if (!state_csv.empty()) {
        std::ofstream f(state_csv);
        require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write '" + state_csv + "'");
        write_state_csv(f, res.state);
        j["state_csv"] = state_csv;
      }
      emit_json(g, j);
      return kExitOk;
    }

    if (*prod) {
      json_only(g, "prod-opt");
      const auto graph = resolve_graph(graph_spec, g.seed);
      const auto res = product_state_value(graph, prod_restarts, prod_tol, g.seed);
      Json j = envelope("prod-opt", g, 1);
      j["graph"] = graph_spec;
      j["product_value"] = res.value;
      j["restarts"] = res.restarts;
      j["bloch"] = to_json(res.bloch);
      emit_json(g, j);
      return kExitOk;
    }

    if (*gap) {
      json_only(g, "gap-instance");
      Json j;
      WeightedGraph graph;
      if (gap_kind == "hypercube") {
        auto inst = noisy_hypercube(gap_n, rho, loops);
        j = envelope("gap-instance", g, 1);
        j["w_loops"] = inst.w_loops;
        graph = std::move(inst.graph);
      } else {
        gp.n = gap_n;
        gp.rho = rho;
        gp.seed = g.seed;
        auto gg = discretized_gaussian_graph(gp);
        j = envelope("gap-instance", g, gg.chunk_count);
        j["w_loops"] = gg.w_loops;
        j["samples"] = gg.samples;
        j["max_weight_stderr"] = gg.max_weight_stderr;
        graph = std::move(gg.graph);
      }
      j["kind"] = gap_kind;
      j["n"] = gap_n;
      j["rho"] = rho;
      j["loops"] = loops;
      j["vertices"] = graph.vertex_count();
      j["edges"] = graph.edge_count();
      if (!graph_out.empty()) {
        std::ofstream f(graph_out);
        require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write '" + graph_out + "'");
        write_graph(f, graph);
        j["graph_out"] = graph_out;
      }
      emit_json(g, j);
      return kExitOk;
    }

    if (*ug) {
      json_only(g, "ug-reduce");
      std::ifstream in(ug_path);
      require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open UG file '" + ug_path + "'");
      const auto inst = read_ug(in);
      require(label_all >= 1 && label_all <= inst.label_count(), ErrorCode::InvalidArgument, "--label out of range");
      const auto red = ug_reduction_graph(inst, rho, loops);
      UGLabeling labeling;
      for (const auto& v : inst.left()) labeling[v] = label_all - 1;
      for (const auto& v : inst.right()) labeling[v] = label_all - 1;
      Json j = envelope("ug-reduce", g, 1);
      j["rho"] = rho;
      j["loops"] = loops;
      j["w_loops"] = red.w_loops;
      j["vertices"] = red.graph.vertex_count();
      j["edges"] = red.graph.edge_count();
      j["labeling_value"] = ug_value(inst, labeling);
      j["dictator_value"] = evaluate_assignment(red.graph, ug_dictator_assignment(inst, labeling), Objective::prod());
      if (!graph_out.empty()) {
        std::ofstream f(graph_out);
        require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write '" + graph_out + "'");
        write_graph(f, red.graph);
      }
      emit_json(g, j);
      return kExitOk;
    }

    if (*dict) {
      json_only(g, "dictator-test");
      auto f = [&]() -> BooleanVectorFunction {
        if (fn_kind == "dictator") return embedded_dictator(fn_n, fn_k, fn_coord - 1);
        if (fn_kind == "majority") return majority(fn_n, fn_k, 0);
        if (fn_kind == "random") return random_ball_function(fn_n, fn_k, g.seed);
        std::ifstream in(table_path);
        require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open table '" + table_path + "'");
        return read_boolean_table(in);
      }();
      Json j = envelope("dictator-test", g, 1);
      j["function"] = fn_kind;
      j["n"] = f.n();
      j["k"] = f.k();
      j["rho"] = rho;
      j["stab"] = stab(f, rho);
      j["hypercube_value"] = hypercube_value(f, rho);
      Json infl = Json::array();
      for (int i = 0; i < f.n(); ++i) infl.push_back(influence(f, i, fn_m));
      j["m"] = fn_m;
      j["delta"] = fn_delta;
      j["influences"] = std::move(infl);
      Json notable = Json::array();
      for (int i : notable_coordinates(f, fn_m, fn_delta)) notable.push_back(i + 1);
      j["notables"] = std::move(notable);
      emit_json(g, j);
      return kExitOk;
    }

    if (*geg) {
      json_only(g, "gegenbauer-check");
      const Zonal z = geg_alpha ? Zonal::for_alpha(*geg_alpha) : Zonal::for_dimension(geg_n);
      const auto rep = check_key_lemma(z, dmax, grid_step);
      Json j = envelope("gegenbauer-check", g, 1);
      j["alpha"] = z.alpha;
      j["chebyshev"] = z.chebyshev;
      j["dmax"] = dmax;
      j["grid_step"] = grid_step;
      j["report"] = to_json(rep);
      emit_json(g, j);
      return rep.passed ? kExitOk : kExitValidation;
    }

    if (*borell) {
      json_only(g, "borell-check");
      const auto rep =
          borell_nk_check(bor_n, rho, standard_candidates(bor_n, derive_seed(g.seed, 0xb0ULL)), bor_samples,
                          g.seed, bor_chunks);
      Json j = envelope("borell-check", g, bor_chunks);
      j["report"] = to_json(rep);
      emit_json(g, j);
      return rep.passed ? kExitOk : kExitValidation;
    }

    if (*bh) {
      json_only(g, "bh-bound");
      auto graph = resolve_graph(graph_spec, g.seed);
      if (bh_split > 1) graph = split_vertices(graph, bh_split);
      const auto stats = bh_stats(graph);
      Json j = envelope("bh-bound", g, 1);
      j["graph"] = graph_spec;
      j["split"] = bh_split;
      j["n"] = stats.n;
      j["p_max"] = stats.p_max;
      j["a_max"] = stats.a_max;
      j["error_bound"] = bh_error_bound(stats);
      emit_json(g, j);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
