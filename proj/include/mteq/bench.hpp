#pragma once

// Seeded benchmark sweeps over (n, alpha, method, rep).
//
// Every rep draws its instance from derive_seed(seed, problem, n, rep), so all
// alphas and methods at one rep index see the same system and can be paired.
// Rows are stored in slots keyed by (n, alpha, method, rep); the thread count
// never changes the table apart from the wall-time column.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "mteq/error.hpp"
#include "mteq/io.hpp"
#include "mteq/problems.hpp"
#include "mteq/solvers.hpp"

namespace mteq {

struct BenchRow {
  ProblemId problem = ProblemId::P1;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Method method = Method::SMEQM;
  double alpha = 1.0;
  double omega = 1.0;
  std::size_t iters = 0;
  double res2_scaled = 0.0;
  double ms = 0.0;
  SolveStatus status = SolveStatus::MaxIterReached;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchSpec {
  ProblemId problem = ProblemId::P1;
  std::vector<std::size_t> ns{10};
  std::vector<double> alphas{1.0};
  std::vector<Method> methods{Method::SMEQM};
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  double omega = 1.0;
  double tol = 1e-8;
  std::size_t max_iter = 3000;
  bool scale = true;
  unsigned jobs = 1;
  NegativeRootPolicy root_policy = NegativeRootPolicy::Abort;
  P1Symmetry p1_symmetry = P1Symmetry::Averaged;
};

inline std::uint64_t derive_seed(std::uint64_t seed, ProblemId problem, std::size_t n, std::size_t rep) {
  return mix_key(mix_key(mix_key(splitmix64(seed), static_cast<std::uint64_t>(problem)), n), rep);
}

inline ProblemInstance bench_instance(const BenchSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.problem == ProblemId::P1) return gen_problem1(n, seed, spec.p1_symmetry);
  return make_problem(spec.problem, n, seed);
}

inline std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  if (spec.reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
  if (spec.ns.empty() || spec.alphas.empty() || spec.methods.empty())
    throw Error(ErrorCode::InvalidArgument, "empty n, alpha or method list");

  const std::size_t na = spec.alphas.size();
  const std::size_t nm = spec.methods.size();
  const std::size_t per_task = na * nm;
  const std::size_t tasks = spec.ns.size() * spec.reps;
  // Output order: n, alpha, method, rep.
  auto slot = [&](std::size_t ni, std::size_t ai, std::size_t mi, std::size_t rep) {
    return ((ni * na + ai) * nm + mi) * spec.reps + rep;
  };
  std::vector<BenchRow> rows(tasks * per_task);

  auto run_task = [&](std::size_t task) {
    const std::size_t ni = task / spec.reps;
    const std::size_t rep = task % spec.reps;
    const std::size_t n = spec.ns[ni];
    const std::uint64_t seed = derive_seed(spec.seed, spec.problem, n, rep);
    const ProblemInstance inst = bench_instance(spec, n, seed);
    const Vector x0(inst.tensor.dim(), 0.0);
    for (std::size_t ai = 0; ai < na; ++ai)
      for (std::size_t mi = 0; mi < nm; ++mi) {
        SolveConfig cfg;
        cfg.method = spec.methods[mi];
        cfg.alpha = spec.alphas[ai];
        cfg.omega = spec.omega;
        cfg.eta = spec.tol;
        cfg.max_iter = spec.max_iter;
        cfg.scale = spec.scale;
        cfg.root_policy = spec.root_policy;
        const auto start = std::chrono::steady_clock::now();
        const SolveOutcome out = solve(inst.tensor, inst.rhs, x0, cfg);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rows[slot(ni, ai, mi, rep)] = {spec.problem, n,    seed, cfg.method, cfg.alpha, cfg.omega, out.iterations,
                                       out.res2_scaled, ms, out.status};
      }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(tasks)));
  if (jobs == 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
      } catch (...) {
        errors[w] = std::current_exception();
        next = tasks;
      }
    });
  pool.clear();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

struct BenchSummary {
  std::size_t n = 0;
  double alpha = 1.0;
  Method method = Method::SMEQM;
  std::size_t runs = 0;
  std::size_t converged = 0;
  double mean_iters = 0.0;
  double mean_ms = 0.0;
};

/// Per-(n, alpha, method) means, in first-seen row order.
inline std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows) {
  std::vector<BenchSummary> out;
  std::map<std::tuple<std::size_t, double, Method>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.n, r.alpha, r.method);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.n, r.alpha, r.method});
    }
    BenchSummary& s = out[it->second];
    ++s.runs;
    if (r.status == SolveStatus::Converged) ++s.converged;
    s.mean_iters += static_cast<double>(r.iters);
    s.mean_ms += r.ms;
  }
  for (auto& s : out) {
    s.mean_iters /= static_cast<double>(s.runs);
    s.mean_ms /= static_cast<double>(s.runs);
  }
  return out;
}

inline constexpr const char* kBenchHeader = "problem,n,seed,method,alpha,omega,iters,res2_scaled,ms,status";

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchHeader << '\n';
  for (const auto& r : rows)
    out << to_string(r.problem) << ',' << r.n << ',' << r.seed << ',' << to_string(r.method) << ','
        << io::format_double(r.alpha) << ',' << io::format_double(r.omega) << ',' << r.iters << ','
        << io::format_double(r.res2_scaled) << ',' << io::format_double(r.ms) << ',' << to_string(r.status)
        << '\n';
}

namespace detail {

inline std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "not an unsigned integer: '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty bench csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBenchHeader) throw Error(ErrorCode::ParseError, "unexpected bench csv header: " + line);
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw Error(ErrorCode::ParseError, "bench csv row needs 10 fields: " + line);
    BenchRow r;
    const auto problem = parse_problem(f[0]);
    const auto method = parse_method(f[3]);
    const auto status = parse_status(f[9]);
    if (!problem || !method || !status) throw Error(ErrorCode::ParseError, "bad enum field in: " + line);
    r.problem = *problem;
    r.n = detail::parse_uint(f[1]);
    r.seed = detail::parse_uint(f[2]);
    r.method = *method;
    r.alpha = io::parse_double(f[4]);
    r.omega = io::parse_double(f[5]);
    r.iters = detail::parse_uint(f[6]);
    r.res2_scaled = io::parse_double(f[7]);
    r.ms = io::parse_double(f[8]);
    r.status = *status;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace mteq
