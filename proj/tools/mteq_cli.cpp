// mteq: generate, analyze, solve and benchmark M-tensor equations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mteq/mteq.hpp"

namespace {

using namespace mteq;
using nlohmann::json;

enum ExitCode : int {
  kExitConverged = 0,
  kExitInput = 1,
  kExitMaxIter = 2,
  kExitInfeasible = 3,
  kExitNegativePower = 4,
  kExitSingular = 5,
};

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kExitConverged;
    case SolveStatus::MaxIterReached: return kExitMaxIter;
    case SolveStatus::InfeasibleStart: return kExitInfeasible;
    case SolveStatus::NegativePowerRHS: return kExitNegativePower;
    case SolveStatus::SingularMatrix: return kExitSingular;
  }
  return kExitInput;
}

// Where a system comes from: a generator id or a pair of files.
struct SystemSource {
  std::string problem;
  std::size_t n = 10;
  std::uint64_t seed = 0;
  std::string p1_symmetry = "averaged";
  std::string tensor_path;
  std::string rhs_path;

  void add_options(CLI::App* cmd, bool with_files) {
    cmd->add_option("--problem", problem, "Problem id: 1, 2, 3, 4, ex11, ex21, ex22");
    cmd->add_option("--n", n, "Dimension for problems 1-4")->check(CLI::Range(2, 200));
    cmd->add_option("--seed", seed, "Generator seed for problems 1 and 4");
    cmd->add_option("--p1-symmetry", p1_symmetry, "Problem 1 symmetrization")
        ->check(CLI::IsMember({"averaged", "multiset"}));
    if (with_files) {
      cmd->add_option("--tensor", tensor_path, "Tensor file");
      cmd->add_option("--rhs", rhs_path, "Right-hand side file");
    }
  }

  ProblemInstance load() const {
    if (!problem.empty()) {
      const auto id = parse_problem(problem);
      if (!id) throw Error(ErrorCode::InvalidArgument, "unknown problem id '" + problem + "'");
      if (*id == ProblemId::P1)
        return gen_problem1(n, seed, p1_symmetry == "multiset" ? P1Symmetry::PerMultiset : P1Symmetry::Averaged);
      return make_problem(*id, n, seed);
    }
    if (tensor_path.empty() || rhs_path.empty())
      throw Error(ErrorCode::InvalidArgument, "give --problem, or both --tensor and --rhs");
    DenseTensor t = io::load_tensor(tensor_path);
    Vector b = io::load_vector(rhs_path);
    detail::require_same_length(b.size(), t.dim(), "rhs length");
    ProblemInstance inst{std::move(t), std::move(b), {}, {}};
    inst.meta.n = inst.tensor.dim();
    inst.meta.scale = scale_system(inst.tensor, inst.rhs).scale;
    return inst;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// --- gen ------------------------------------------------------------------------

struct GenArgs {
  SystemSource src;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const ProblemInstance inst = a.src.load();
  const std::string prefix = a.out.empty() ? "problem" + std::string(to_string(inst.meta.problem)) : a.out;
  const io::InstancePaths p = io::save_instance(prefix, inst);
  std::cout << "tensor " << p.tensor.string() << '\n'
            << "rhs    " << p.rhs.string() << '\n'
            << "meta   " << p.meta.string() << '\n';
  return kExitConverged;
}

// --- analyze --------------------------------------------------------------------

struct AnalyzeArgs {
  SystemSource src;
  bool power = false;
  bool json_out = false;
};

// ||M||_inf ||M^{-1}||_inf and whether M^{-1} >= 0 with nonpositive off-diagonals.
json majorization_summary(const Matrix& m) {
  const std::size_t n = m.rows();
  json j = {{"norm_inf", norm_inf(m)}};
  bool z = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (i != k && m(i, k) > 0.0) z = false;
  j["z_matrix"] = z;
  try {
    const LuFactorization lu = lu_factor(m);
    Vector row_abs(n, 0.0);
    bool inverse_nonneg = true;
    for (std::size_t c = 0; c < n; ++c) {
      Vector e(n, 0.0);
      e[c] = 1.0;
      const Vector col = lu_solve(lu, e);
      for (std::size_t i = 0; i < n; ++i) {
        row_abs[i] += std::abs(col[i]);
        if (col[i] < -1e-14) inverse_nonneg = false;
      }
    }
    const double inv_norm = max_entry(row_abs);
    j["inverse_norm_inf"] = inv_norm;
    j["condition_inf"] = norm_inf(m) * inv_norm;
    j["inverse_nonnegative"] = inverse_nonneg;
    j["nonsingular_m_matrix"] = z && inverse_nonneg;
  } catch (const Error&) {
    j["singular"] = true;
    j["nonsingular_m_matrix"] = false;
  }
  return j;
}

int run_analyze(const AnalyzeArgs& a) {
  const ProblemInstance inst = a.src.load();
  const DenseTensor& t = inst.tensor;
  const MTensorCertificate cert = mtensor_certificate(t, a.power);
  json j = {{"order", t.order()},
            {"dim", t.dim()},
            {"z_tensor", is_z_tensor(t)},
            {"structured", is_structured(t)},
            {"verdict", std::string(to_string(cert.verdict))},
            {"s", cert.s},
            {"row_sum_bound", cert.row_sum_bound}};
  if (cert.row_sum_bound > 0.0) j["ratio"] = cert.s / cert.row_sum_bound;
  if (cert.power_estimate) j["power_estimate"] = *cert.power_estimate;
  if (cert.weighted_bound) j["weighted_bound"] = *cert.weighted_bound;
  j["existence"] = std::string(to_string(existence_sufficient(t, inst.rhs)));
  j["majorization"] = majorization_summary(majorization(t).values());
  if (!inst.known_solutions.empty()) {
    json sols = json::array();
    for (const auto& x : inst.known_solutions) sols.push_back({{"x", x}, {"residual_inf", norm_inf(residual(t, inst.rhs, x))}});
    j["known_solutions"] = sols;
  }
  if (a.json_out) {
    std::cout << j.dump(2) << '\n';
    return kExitConverged;
  }
  std::cout << "order           " << t.order() << "\n"
            << "dim             " << t.dim() << "\n"
            << "z_tensor        " << (j["z_tensor"].get<bool>() ? "true" : "false") << "\n"
            << "structured      " << (j["structured"].get<bool>() ? "true" : "false") << "\n"
            << "verdict         " << to_string(cert.verdict) << "\n"
            << "s               " << fmt(cert.s) << "\n"
            << "row_sum_bound   " << fmt(cert.row_sum_bound) << "\n";
  if (j.contains("ratio")) std::cout << "ratio           " << fmt(j["ratio"].get<double>()) << "\n";
  if (cert.power_estimate) std::cout << "power_estimate  " << fmt(*cert.power_estimate) << "\n";
  if (cert.weighted_bound) std::cout << "weighted_bound  " << fmt(*cert.weighted_bound) << "\n";
  std::cout << "existence       " << j["existence"].get<std::string>() << "\n";
  const json& mj = j["majorization"];
  if (mj.contains("condition_inf"))
    std::cout << "M cond_inf      " << fmt(mj["condition_inf"].get<double>()) << "\n";
  else
    std::cout << "M cond_inf      singular\n";
  std::cout << "M is M-matrix   " << (mj["nonsingular_m_matrix"].get<bool>() ? "true" : "false") << "\n";
  if (j.contains("known_solutions"))
    for (const auto& s : j["known_solutions"])
      std::cout << "known solution  " << io::format_vector(s["x"].get<Vector>()) << "  residual_inf "
                << fmt(s["residual_inf"].get<double>()) << "\n";
  return kExitConverged;
}

// --- solve ----------------------------------------------------------------------

struct SolveArgs {
  SystemSource src;
  std::string method = "anewton";
  double alpha = 1.0;
  double omega = 1.0;
  double tol = 1e-8;
  std::size_t max_iter = 3000;
  std::string x0 = "zero";
  bool no_scale = false;
  std::string trace;
  std::string out;
  std::string negative_root = "abort";
};

NegativeRootPolicy root_policy(const std::string& s) {
  return s == "real" ? NegativeRootPolicy::RealOddRoot : NegativeRootPolicy::Abort;
}

int run_solve(const SolveArgs& a) {
  const ProblemInstance inst = a.src.load();
  SolveConfig cfg;
  cfg.method = *parse_method(a.method);
  cfg.alpha = a.alpha;
  cfg.omega = a.omega;
  cfg.eta = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.scale = !a.no_scale;
  cfg.root_policy = root_policy(a.negative_root);
  const Vector x0 = io::parse_x0(a.x0, inst.tensor.dim());
  const SolveOutcome out = solve(inst.tensor, inst.rhs, x0, cfg);

  std::cout << "status          " << to_string(out.status) << "\n"
            << "method          " << to_string(cfg.method) << "\n"
            << "iterations      " << out.iterations << "\n"
            << "res2_scaled     " << fmt(out.res2_scaled) << "\n"
            << "res2_unscaled   " << fmt(out.res2_unscaled) << "\n"
            << "scale           " << fmt(out.scale) << "\n"
            << "monotone        " << (out.monotone_audited ? (out.monotone_ok ? "ok" : "violated") : "not audited")
            << "\n";
  if (cfg.method == Method::ANewton) std::cout << "eps_fallbacks   " << out.fallbacks << "\n";
  if (!out.message.empty()) std::cout << "note            " << out.message << "\n";
  if (out.x.size() <= 12) std::cout << "x               " << io::format_vector(out.x) << "\n";
  if (!a.out.empty()) io::save_vector(a.out, out.x);
  if (!a.trace.empty()) io::save_trace_csv(a.trace, out.trace);
  return exit_code(out.status);
}

// --- bench ----------------------------------------------------------------------

struct BenchArgs {
  std::string problem = "1";
  std::vector<std::size_t> ns{10};
  std::vector<double> alphas{1.0};
  std::vector<std::string> methods{"smeqm"};
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  double omega = 1.0;
  double tol = 1e-8;
  std::size_t max_iter = 3000;
  bool no_scale = false;
  unsigned jobs = 1;
  std::string csv;
  std::string negative_root = "abort";
  std::string p1_symmetry = "averaged";
};

int run_bench_cmd(const BenchArgs& a) {
  BenchSpec spec;
  const auto id = parse_problem(a.problem);
  if (!id) throw Error(ErrorCode::InvalidArgument, "unknown problem id '" + a.problem + "'");
  spec.problem = *id;
  spec.ns = a.ns;
  spec.alphas = a.alphas;
  spec.methods.clear();
  for (const auto& m : a.methods) spec.methods.push_back(*parse_method(m));
  spec.reps = a.reps;
  spec.seed = a.seed;
  spec.omega = a.omega;
  spec.tol = a.tol;
  spec.max_iter = a.max_iter;
  spec.scale = !a.no_scale;
  spec.jobs = a.jobs;
  spec.root_policy = root_policy(a.negative_root);
  spec.p1_symmetry = a.p1_symmetry == "multiset" ? P1Symmetry::PerMultiset : P1Symmetry::Averaged;

  const std::vector<BenchRow> rows = run_bench(spec);
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + a.csv);
    write_bench_csv(f, rows);
  }
  std::cout << std::left << std::setw(6) << "n" << std::setw(8) << "alpha" << std::setw(10) << "method"
            << std::setw(8) << "runs" << std::setw(11) << "converged" << std::setw(12) << "mean_iters"
            << "mean_ms\n";
  for (const auto& s : summarize(rows))
    std::cout << std::left << std::setw(6) << s.n << std::setw(8) << fmt(s.alpha) << std::setw(10)
              << to_string(s.method) << std::setw(8) << s.runs << std::setw(11) << s.converged << std::setw(12)
              << fmt(s.mean_iters) << fmt(s.mean_ms) << "\n";
  return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative solvers for M-tensor equations"};
  app.require_subcommand(1);
  const std::vector<std::string> method_names{"smeqm", "jacobi", "gs", "sor", "anewton"};

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write tensor, rhs and metadata files for a problem");
  gen.src.add_options(gen_cmd, false);
  gen_cmd->get_option("--problem")->required();
  gen_cmd->add_option("--out", gen.out, "Output prefix (files PREFIX.tensor.json, PREFIX.rhs.json, PREFIX.meta.json)");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Report Z/M-tensor structure and existence test");
  analyze.src.add_options(analyze_cmd, true);
  analyze_cmd->add_flag("--power", analyze.power, "Also run the power iteration bound");
  analyze_cmd->add_flag("--json", analyze.json_out, "Print the report as JSON");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one system");
  solve_args.src.add_options(solve_cmd, true);
  solve_cmd->add_option("--method", solve_args.method, "Iteration")->check(CLI::IsMember(method_names));
  solve_cmd->add_option("--alpha", solve_args.alpha, "Step length in (0, 2]");
  solve_cmd->add_option("--omega", solve_args.omega, "SOR relaxation in (0, 2)");
  solve_cmd->add_option("--tol", solve_args.tol, "Stop when ||F||_2 <= tol");
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "Iteration limit");
  solve_cmd->add_option("--x0", solve_args.x0, "Start: zero, a comma list, or a vector file");
  solve_cmd->add_flag("--no-scale", solve_args.no_scale, "Iterate on the unscaled system");
  solve_cmd->add_option("--trace", solve_args.trace, "Write the per-iteration CSV trace here");
  solve_cmd->add_option("--out", solve_args.out, "Write the final iterate here");
  solve_cmd->add_option("--negative-root", solve_args.negative_root, "abort, or real (odd m-1 only)")
      ->check(CLI::IsMember({"abort", "real"}));

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Seeded sweep over n, alpha and method");
  bench_cmd->add_option("--problem", bench.problem, "Problem id");
  bench_cmd->add_option("--n", bench.ns, "Dimensions")->delimiter(',');
  bench_cmd->add_option("--alpha", bench.alphas, "Step lengths")->delimiter(',');
  bench_cmd->add_option("--method", bench.methods, "Methods")->delimiter(',')->check(CLI::IsMember(method_names));
  bench_cmd->add_option("--reps", bench.reps, "Instances per (n, alpha, method)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--omega", bench.omega, "SOR relaxation");
  bench_cmd->add_option("--tol", bench.tol, "Stop when ||F||_2 <= tol");
  bench_cmd->add_option("--max-iter", bench.max_iter, "Iteration limit");
  bench_cmd->add_flag("--no-scale", bench.no_scale, "Iterate on unscaled systems");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--csv", bench.csv, "Write one row per run here");
  bench_cmd->add_option("--negative-root", bench.negative_root, "abort, or real (odd m-1 only)")
      ->check(CLI::IsMember({"abort", "real"}));
  bench_cmd->add_option("--p1-symmetry", bench.p1_symmetry, "Problem 1 symmetrization")
      ->check(CLI::IsMember({"averaged", "multiset"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*analyze_cmd) return run_analyze(analyze);
    if (*solve_cmd) return run_solve(solve_args);
    if (*bench_cmd) return run_bench_cmd(bench);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
