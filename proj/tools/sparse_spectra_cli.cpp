// sparse-spectra: command-line front end for the sparse_spectra library.
//
// Subcommands:
//   solve        greedy / local / sswap / exact / brute on a symmetric input
//   bound        subgradient saddle-point upper bound with gap certificate
//   ssvd         sparse rank-one SVD heuristics and brute force on a
//                rectangular input
//   export-milp  emit the epsilon-accurate mixed-integer linear model (.lp)
//   check-milp   verify a solution file against an emitted model, optionally
//                shelling out to an external solver first
//   bench        reproduce the Pitprops benchmark table
//
// Every run prints a single JSON report to stdout. Exit codes: 0 success,
// 2 validation/usage error, 3 a resource limit stopped an exact run early
// (the JSON then carries the partial incumbent and the proven bound).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparse_spectra/sparse_spectra.hpp"

namespace ss = sparse_spectra;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

// Reports print numbers with 10 significant digits.
double round_sig(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double mag = std::pow(10.0, 9.0 - std::floor(std::log10(std::abs(v))));
  return std::round(v * mag) / mag;
}

ordered_json json_support(const std::vector<std::size_t>& idx) {
  ordered_json arr = ordered_json::array();
  for (auto i : idx) arr.push_back(i);
  return arr;
}

struct CommonOpts {
  std::string input;
  std::string kind = "covariance";
  bool has_header = false;
  std::string raw_mode = "covariance";
  unsigned ddof = 1;
  unsigned threads = 0;  // 0 = honor SPARSE_SPECTRA_THREADS, else 1
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_input = true) {
  if (with_input) {
    cmd->add_option("--input", c.input,
                    "input file (.csv or .mtx), or 'pitprops' for the bundled matrix")
        ->required();
    cmd->add_option("--kind", c.kind,
                    "CSV interpretation: raw|raw_observations|covariance|correlation|rectangular")
        ->check(CLI::IsMember({"raw", "raw_observations", "covariance", "correlation",
                               "rectangular"}));
    cmd->add_flag("--header", c.has_header, "CSV input has a header row of feature names");
    cmd->add_option("--raw-mode", c.raw_mode,
                    "matrix estimated from raw observations: covariance|correlation")
        ->check(CLI::IsMember({"covariance", "correlation"}));
    cmd->add_option("--ddof", c.ddof, "denominator degrees of freedom (0 or 1)")
        ->check(CLI::Range(0u, 1u));
  }
  cmd->add_option("--threads", c.threads,
                  "worker threads for candidate scans (default: SPARSE_SPECTRA_THREADS or 1)");
  cmd->add_option("--seed", c.seed,
                  "fix all randomized choices and zero timing fields for byte-identical reports");
}

struct LoadedInput {
  ss::Dataset data;
  ordered_json descriptor;  // filled except for k fields
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

LoadedInput load_input(const CommonOpts& c) {
  LoadedInput out;
  if (c.input == "pitprops") {
    out.data = ss::pitprops();
  } else if (ends_with(c.input, ".mtx")) {
    out.data = ss::load_matrix_market(c.input);
  } else {
    out.data = ss::load_csv(c.input, ss::dataset_kind_from_string(c.kind), c.has_header);
  }
  out.descriptor["source"] = c.input;
  out.descriptor["kind"] = ss::to_string(out.data.kind);
  return out;
}

// A symmetric matrix for the SPCA-side subcommands. Raw tables are reduced
// with covariance_from_raw; square symmetric rectangular inputs are promoted.
ss::SymMatrix to_sym(const LoadedInput& in, const CommonOpts& c) {
  switch (in.data.kind) {
    case ss::DatasetKind::covariance:
    case ss::DatasetKind::correlation:
      return in.data.sym();
    case ss::DatasetKind::raw_observations:
      return ss::covariance_from_raw(in.data,
                                     c.raw_mode == "correlation"
                                         ? ss::DatasetKind::correlation
                                         : ss::DatasetKind::covariance,
                                     c.ddof);
    case ss::DatasetKind::rectangular:
      if (in.data.rows() != in.data.cols())
        throw ss::ValidationError("this subcommand needs a symmetric matrix; got a " +
                                  std::to_string(in.data.rows()) + "x" +
                                  std::to_string(in.data.cols()) + " rectangular input");
      return ss::SymMatrix(in.data.values);  // validates symmetry
  }
  throw ss::ValidationError("unsupported dataset kind");
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

ordered_json report_base(const std::string& command, const CommonOpts& c) {
  ordered_json j;
  j["version"] = kVersion;
  j["command"] = command;
  if (c.seed)
    j["seed"] = *c.seed;
  else
    j["seed"] = nullptr;
  j["threads"] = c.threads;
  return j;
}

double wall_ms(const CommonOpts& c, double seconds) {
  return c.seed ? 0.0 : round_sig(seconds * 1000.0);
}

int run_solve(const CommonOpts& c, const std::string& method, std::size_t k, std::size_t s,
              std::size_t guard, std::optional<double> time_limit,
              std::optional<std::uint64_t> node_limit) {
  LoadedInput in = load_input(c);
  ss::SpcaInstance inst(to_sym(in, c), k);
  ss::HeuristicOpts hopts;
  hopts.threads = c.threads;
  ss::SolveReport rep;
  std::optional<double> bound;
  if (method == "greedy") {
    rep = ss::greedy(inst, hopts);
  } else if (method == "local") {
    rep = ss::local_search(inst, std::nullopt, hopts);
  } else if (method == "sswap") {
    rep = ss::s_swap_local_search(inst, s, std::nullopt, hopts);
  } else if (method == "exact") {
    ss::BnbOpts bopts;
    bopts.time_limit_sec = time_limit;
    bopts.node_limit = node_limit;
    bopts.threads = c.threads;
    rep = ss::solve_exact(inst, bopts);
  } else {  // brute
    rep = ss::brute_force(inst, guard, c.threads);
  }
  ordered_json j = report_base("solve", c);
  in.descriptor["n"] = inst.n();
  in.descriptor["k"] = k;
  j["instance"] = in.descriptor;
  j["method"] = ss::to_string(rep.method);
  if (rep.method == ss::Method::s_swap) j["s"] = s;
  j["value"] = round_sig(rep.value);
  j["support"] = json_support(rep.selection.support);
  j["bound"] = rep.upper_bound ? ordered_json(round_sig(*rep.upper_bound)) : ordered_json(nullptr);
  j["gap"] = rep.gap ? ordered_json(round_sig(*rep.gap)) : ordered_json(nullptr);
  j["iterations"] = rep.iterations;
  j["status"] = ss::to_string(rep.status);
  j["wall_time_ms"] = wall_ms(c, rep.wall_time_sec);
  emit(j);
  (void)bound;
  return rep.status == ss::SolveStatus::complete ? 0 : 3;
}

int run_bound(const CommonOpts& c, std::size_t k, std::uint64_t iters) {
  LoadedInput in = load_input(c);
  ss::SpcaInstance inst(to_sym(in, c), k);
  ss::SaddleOpts sopts;
  sopts.max_iters = iters;
  ss::Stopwatch sw;
  auto [bound, state] = ss::saddle_upper_bound(inst.factor(), k, sopts);
  const double elapsed = sw.seconds();
  ordered_json j = report_base("bound", c);
  in.descriptor["n"] = inst.n();
  in.descriptor["k"] = k;
  j["instance"] = in.descriptor;
  j["method"] = "saddle_bound";
  j["bound"] = round_sig(bound);
  j["factor_certificate"] = round_sig(ss::gap_certificate(inst.n(), k));
  j["iterations"] = state.iterate_count;
  j["wall_time_ms"] = wall_ms(c, elapsed);
  emit(j);
  return 0;
}

int run_ssvd(const CommonOpts& c, const std::string& method, std::size_t k1, std::size_t k2,
             std::size_t guard, bool with_bound, bool pair_swaps_only) {
  LoadedInput in = load_input(c);
  ss::SsvdInstance inst(in.data.values, k1, k2);
  ss::HeuristicOpts hopts;
  hopts.threads = c.threads;
  ss::SsvdReport rep;
  if (method == "greedy") {
    rep = ss::greedy_ssvd(inst, hopts);
  } else if (method == "local") {
    rep = ss::local_search_ssvd(inst, std::nullopt, hopts, pair_swaps_only);
  } else if (method == "trunc") {
    rep = ss::truncation_ssvd(inst);
  } else {  // brute
    rep = ss::brute_force_ssvd(in.data.values, k1, k2, guard, c.threads);
  }
  ordered_json j = report_base("ssvd", c);
  in.descriptor["m"] = in.data.rows();
  in.descriptor["n"] = in.data.cols();
  in.descriptor["k1"] = k1;
  in.descriptor["k2"] = k2;
  j["instance"] = in.descriptor;
  j["method"] = ss::to_string(rep.method);
  j["value"] = round_sig(rep.value);
  j["row_support"] = json_support(rep.rows.support);
  j["col_support"] = json_support(rep.cols.support);
  if (with_bound)
    j["bound"] = round_sig(ss::upper_bound_ssvd(inst));
  else
    j["bound"] = nullptr;
  j["iterations"] = rep.iterations;
  j["wall_time_ms"] = wall_ms(c, rep.wall_time_sec);
  emit(j);
  return 0;
}

int run_export_milp(const CommonOpts& c, std::size_t k, double eps, const std::string& out_path,
                    std::optional<long long> fixed_j_1based, std::optional<double> wl_opt,
                    std::optional<double> wu_opt) {
  LoadedInput in = load_input(c);
  ss::SpcaInstance inst(to_sym(in, c), k);
  double wl, wu;
  if (wl_opt && wu_opt) {
    wl = *wl_opt;
    wu = *wu_opt;
  } else {
    ss::HeuristicOpts hopts;
    hopts.threads = c.threads;
    wl = wl_opt ? *wl_opt : ss::local_search(inst, std::nullopt, hopts).value;
    wu = wu_opt ? *wu_opt : ss::saddle_upper_bound(inst.factor(), k).first;
  }
  if (wu <= wl) wu = wl + std::max(eps, 1e-9);  // still a valid upper bound
  std::optional<std::size_t> fixed_j;
  if (fixed_j_1based) {
    if (*fixed_j_1based < 1) throw ss::ValidationError("--fixed-j is 1-based");
    fixed_j = static_cast<std::size_t>(*fixed_j_1based - 1);
  }
  ss::MilpModel model =
      fixed_j ? ss::build_milp_fixed_j(inst.factor(), k, eps, wl, wu, *fixed_j)
              : ss::build_milp(inst.factor(), k, eps, wl, wu);
  std::ofstream out(out_path);
  if (!out) throw ss::ValidationError("cannot open '" + out_path + "' for writing");
  const std::string text = ss::write_lp(model);
  out << text;
  if (!out) throw ss::ValidationError("failed writing LP to '" + out_path + "'");
  out.close();

  std::size_t binaries = 0;
  for (const auto& v : model.variables)
    if (v.kind == ss::VarKind::binary) ++binaries;
  ordered_json j = report_base("export-milp", c);
  in.descriptor["n"] = inst.n();
  in.descriptor["k"] = k;
  j["instance"] = in.descriptor;
  j["out"] = out_path;
  j["eps"] = round_sig(eps);
  j["wl"] = round_sig(wl);
  j["wu"] = round_sig(wu);
  j["m_bits"] = model.meta.m;
  j["variables"] = model.variables.size();
  j["binaries"] = binaries;
  j["constraints"] = model.linear_constraints.size();
  j["bytes"] = text.size();
  emit(j);
  return 0;
}

int run_check_milp(const CommonOpts& c, const std::string& model_path,
                   const std::string& solution_path, const std::string& solver_cmd,
                   double slack) {
  std::ifstream min(model_path);
  if (!min) throw ss::ValidationError("cannot open model '" + model_path + "'");
  std::stringstream mbuf;
  mbuf << min.rdbuf();
  ss::MilpModel model = ss::parse_lp(mbuf.str());

  if (!solver_cmd.empty()) {
    const std::string cmd = solver_cmd + " " + model_path + " " + solution_path;
    const int rc = std::system(cmd.c_str());
    if (rc != 0)
      throw ss::ValidationError("solver command failed with status " + std::to_string(rc) +
                                ": " + cmd);
  }
  std::ifstream sin(solution_path);
  if (!sin) throw ss::ValidationError("cannot open solution '" + solution_path + "'");
  std::stringstream sbuf;
  sbuf << sin.rdbuf();
  ss::Assignment assignment = ss::read_solution(sbuf.str());
  ss::CheckResult result = ss::check_point(model, assignment, slack);

  ordered_json j = report_base("check-milp", c);
  j["model"] = model_path;
  j["solution"] = solution_path;
  j["feasible"] = result.feasible;
  j["objective"] = round_sig(result.objective);
  ordered_json viol = ordered_json::array();
  for (const auto& v : result.violations) viol.push_back(v);
  j["violations"] = viol;
  emit(j);
  return 0;
}

int run_bench(const CommonOpts& c, const std::string& dataset) {
  if (dataset != "pitprops")
    throw ss::ValidationError("unknown benchmark '" + dataset + "' (available: pitprops)");
  ss::SymMatrix a = ss::pitprops().sym();
  ordered_json j = report_base("bench", c);
  j["dataset"] = dataset;
  j["n"] = a.n();
  ordered_json rows = ordered_json::array();
  for (std::size_t k = 4; k <= 10; ++k) {
    ss::SpcaInstance inst(a, k);
    ss::HeuristicOpts hopts;
    hopts.threads = c.threads;
    ss::BnbOpts bopts;
    bopts.threads = c.threads;
    ss::BnbTrace trace;
    auto exact = ss::solve_exact(inst, bopts, &trace);
    auto gre = ss::greedy(inst, hopts);
    auto loc = ss::local_search(inst, std::nullopt, hopts);
    auto saddle = ss::saddle_upper_bound(inst.factor(), k);
    ordered_json row;
    row["k"] = k;
    row["exact"] = round_sig(exact.value);
    row["support"] = json_support(exact.selection.support);
    row["nodes"] = trace.nodes_processed;
    row["exact_time_ms"] = wall_ms(c, exact.wall_time_sec);
    row["greedy"] = round_sig(gre.value);
    row["greedy_gap_pct"] = round_sig((exact.value - gre.value) / exact.value * 100.0);
    row["local"] = round_sig(loc.value);
    row["local_gap_pct"] = round_sig((exact.value - loc.value) / exact.value * 100.0);
    row["saddle_bound"] = round_sig(saddle.first);
    rows.push_back(row);
  }
  j["rows"] = rows;
  emit(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-spectra: sparse PCA and rank-one sparse SVD toolkit"};
  app.require_subcommand(1);

  CommonOpts solve_c;
  std::string solve_method;
  std::size_t solve_k = 0, solve_s = 1, solve_guard = 25;
  std::optional<double> solve_time_limit;
  std::optional<std::uint64_t> solve_node_limit;
  auto* solve = app.add_subcommand("solve", "maximize x'Ax over unit vectors with k nonzeros");
  solve->add_option("--method", solve_method, "greedy|local|sswap|exact|brute")
      ->required()
      ->check(CLI::IsMember({"greedy", "local", "sswap", "exact", "brute"}));
  solve->add_option("--k", solve_k, "support size")->required();
  solve->add_option("--s", solve_s, "swap width for --method sswap");
  solve->add_option("--guard", solve_guard, "brute-force enumeration size guard");
  solve->add_option("--time-limit", solve_time_limit, "exact solver wall-clock limit (seconds)");
  solve->add_option("--node-limit", solve_node_limit, "exact solver node limit");
  add_common(solve, solve_c);

  CommonOpts bound_c;
  std::size_t bound_k = 0;
  std::uint64_t bound_iters = 2000;
  auto* bound = app.add_subcommand("bound", "saddle-point upper bound with gap certificate");
  bound->add_option("--k", bound_k, "support size")->required();
  bound->add_option("--iters", bound_iters, "subgradient iteration budget");
  add_common(bound, bound_c);

  CommonOpts ssvd_c;
  std::string ssvd_method;
  std::size_t ssvd_k1 = 0, ssvd_k2 = 0, ssvd_guard = 25;
  bool ssvd_with_bound = false, ssvd_pair_only = false;
  auto* ssvd = app.add_subcommand("ssvd", "rank-one sparse SVD on a rectangular input");
  ssvd->add_option("--method", ssvd_method, "greedy|local|trunc|brute")
      ->required()
      ->check(CLI::IsMember({"greedy", "local", "trunc", "brute"}));
  ssvd->add_option("--k1", ssvd_k1, "row support size")->required();
  ssvd->add_option("--k2", ssvd_k2, "column support size")->required();
  ssvd->add_option("--guard", ssvd_guard, "brute-force enumeration size guard");
  ssvd->add_flag("--with-bound", ssvd_with_bound, "also compute the saddle upper bound");
  ssvd->add_flag("--pair-swaps-only", ssvd_pair_only,
                 "local search uses simultaneous row+column swaps only");
  add_common(ssvd, ssvd_c);

  CommonOpts milp_c;
  std::size_t milp_k = 0;
  double milp_eps = 1e-4;
  std::string milp_out;
  std::optional<long long> milp_fixed_j;
  std::optional<double> milp_wl, milp_wu;
  auto* milp = app.add_subcommand("export-milp", "emit the epsilon-accurate MILP as an .lp file");
  milp->add_option("--k", milp_k, "support size")->required();
  milp->add_option("--eps", milp_eps, "accuracy of the binary expansion (default 1e-4)");
  milp->add_option("--out", milp_out, "output .lp path")->required();
  milp->add_option("--fixed-j", milp_fixed_j, "pin coordinate j (1-based, matches x_j naming)");
  milp->add_option("--wl", milp_wl, "lower bound override (default: local search value)");
  milp->add_option("--wu", milp_wu, "upper bound override (default: saddle bound)");
  add_common(milp, milp_c);

  CommonOpts check_c;
  std::string check_model, check_solution, check_solver;
  double check_slack = 1e-7;
  auto* check = app.add_subcommand("check-milp", "verify a solution file against a model");
  check->add_option("--model", check_model, "model .lp path")->required();
  check->add_option("--solution", check_solution, "solution file ('name value' lines)")
      ->required();
  check->add_option("--solver-cmd", check_solver,
                    "external solver invoked as: CMD <model.lp> <solution.out>");
  check->add_option("--slack", check_slack, "feasibility tolerance");
  add_common(check, check_c, /*with_input=*/false);

  CommonOpts bench_c;
  std::string bench_dataset;
  auto* bench = app.add_subcommand("bench", "reproduce the bundled benchmark tables");
  bench->add_option("dataset", bench_dataset, "benchmark name (pitprops)")->required();
  add_common(bench, bench_c, /*with_input=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed())
      return run_solve(solve_c, solve_method, solve_k, solve_s, solve_guard, solve_time_limit,
                       solve_node_limit);
    if (bound->parsed()) return run_bound(bound_c, bound_k, bound_iters);
    if (ssvd->parsed())
      return run_ssvd(ssvd_c, ssvd_method, ssvd_k1, ssvd_k2, ssvd_guard, ssvd_with_bound,
                      ssvd_pair_only);
    if (milp->parsed())
      return run_export_milp(milp_c, milp_k, milp_eps, milp_out, milp_fixed_j, milp_wl, milp_wu);
    if (check->parsed())
      return run_check_milp(check_c, check_model, check_solution, check_solver, check_slack);
    if (bench->parsed()) return run_bench(bench_c, bench_dataset);
  } catch (const ss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ss::GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ss::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
