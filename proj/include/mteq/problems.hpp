#pragma once

// Test problems (four generated families) and the small worked fixtures.
//
// Random values come from a counter-based generator: every draw is
// splitmix64 applied to a key derived from (problem, n, seed, stream) mixed
// with the entry's linear index. Instances are therefore pure functions of
// their parameters, independent of generation order or threading.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mteq/error.hpp"
#include "mteq/tensor.hpp"

namespace mteq {

enum class ProblemId { P1, P2, P3, P4, Ex11, Ex21, Ex22 };

constexpr std::string_view to_string(ProblemId p) {
  switch (p) {
    case ProblemId::P1: return "1";
    case ProblemId::P2: return "2";
    case ProblemId::P3: return "3";
    case ProblemId::P4: return "4";
    case ProblemId::Ex11: return "ex11";
    case ProblemId::Ex21: return "ex21";
    case ProblemId::Ex22: return "ex22";
  }
  return "1";
}

inline std::optional<ProblemId> parse_problem(std::string_view s) {
  for (ProblemId p : {ProblemId::P1, ProblemId::P2, ProblemId::P3, ProblemId::P4, ProblemId::Ex11, ProblemId::Ex21,
                      ProblemId::Ex22})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

inline bool is_fixture(ProblemId p) {
  return p == ProblemId::Ex11 || p == ProblemId::Ex21 || p == ProblemId::Ex22;
}

struct ProblemMeta {
  ProblemId problem = ProblemId::P1;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// Shift s of T = s I - B used by the generator, when it has one.
  std::optional<double> shift;
  /// Factor the solver divides by when scaling is on.
  double scale = 1.0;
};

struct ProblemInstance {
  DenseTensor tensor;
  Vector rhs;
  ProblemMeta meta;
  std::vector<Vector> known_solutions;
};

// --- random numbers -----------------------------------------------------------

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix_key(std::uint64_t key, std::uint64_t value) {
  return splitmix64(key ^ splitmix64(value));
}

/// Uniform draws on the open interval (0, 1), addressed by counter.
class CounterRng {
 public:
  CounterRng(ProblemId problem, std::size_t n, std::uint64_t seed, std::uint64_t stream)
      : key_(mix_key(mix_key(mix_key(mix_key(0x6d7465712d67656eull, static_cast<std::uint64_t>(problem)), n), seed),
                     stream)) {}

  std::uint64_t bits(std::uint64_t counter) const { return splitmix64(key_ + counter * 0xD1B54A32D192ED03ull); }

  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

inline constexpr std::uint64_t kTensorStream = 0;
inline constexpr std::uint64_t kRhsStream = 1;
inline constexpr std::uint64_t kProblem2RhsSeed = 0;

namespace detail {

inline Vector uniform_rhs(ProblemId id, std::size_t n, std::uint64_t seed) {
  const CounterRng rng(id, n, seed, kRhsStream);
  Vector b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng.uniform(i);
  return b;
}

// T = s I - B with s = 1.01 max_i (B e^3)_i.
inline double shift_from_row_sums(const DenseTensor& b) {
  return 1.01 * max_entry(contract_full(b, Vector(b.dim(), 1.0)));
}

inline DenseTensor shifted(const DenseTensor& b, double s) {
  DenseTensor t(b.order(), b.dim());
  for (std::size_t lin = 0; lin < b.size(); ++lin) t.flat(lin) = -b.flat(lin);
  for (std::size_t i = 0; i < b.dim(); ++i) t.flat(t.diagonal_index(i)) += s;
  return t;
}

inline void require_n(std::size_t n, std::size_t min_n) {
  if (n < min_n) throw Error(ErrorCode::InvalidArgument, "n must be >= " + std::to_string(min_n));
}

inline ProblemInstance finish(DenseTensor t, Vector b, ProblemMeta meta) {
  meta.scale = scale_system(t, b).scale;
  return {std::move(t), std::move(b), meta, {}};
}

}  // namespace detail

enum class P1Symmetry {
  /// i.i.d. uniform draws averaged over all index permutations.
  Averaged,
  /// One uniform draw per sorted index multiset, copied to every permutation.
  PerMultiset,
};

namespace detail {

// Visits every sorted 4-index (i <= j <= k <= l) with its distinct permutations.
template <class F>
void for_each_orbit4(std::size_t n, F&& visit) {
  std::vector<std::size_t> idx(4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) {
          idx = {i, j, k, l};
          visit(idx);
        }
}

}  // namespace detail

/// Symmetric B with entries in (0, 1), T = s I - B, s = 1.01 max_i (B e^3)_i.
inline ProblemInstance gen_problem1(std::size_t n, std::uint64_t seed, P1Symmetry symmetry = P1Symmetry::Averaged) {
  detail::require_n(n, 2);
  const CounterRng rng(ProblemId::P1, n, seed, kTensorStream);
  DenseTensor b(4, n);
  std::vector<std::size_t> lins;
  detail::for_each_orbit4(n, [&](std::vector<std::size_t>& idx) {
    lins.clear();
    do {
      lins.push_back(b.linear_index(idx));
    } while (std::next_permutation(idx.begin(), idx.end()));
    double value = 0.0;
    if (symmetry == P1Symmetry::PerMultiset) {
      value = rng.uniform(lins.front());
    } else {
      for (std::size_t lin : lins) value += rng.uniform(lin);
      value /= static_cast<double>(lins.size());
    }
    for (std::size_t lin : lins) b.flat(lin) = value;
  });
  const double s = detail::shift_from_row_sums(b);
  return detail::finish(detail::shifted(b, s), detail::uniform_rhs(ProblemId::P1, n, seed),
                        {ProblemId::P1, n, seed, s});
}

/// B(i1..i4) = |sin(i1 + i2 + i3 + i4)| with 1-based indices, s = n^3. The
/// rhs uses the fixed seed kProblem2RhsSeed.
inline ProblemInstance gen_problem2(std::size_t n) {
  detail::require_n(n, 2);
  DenseTensor b(4, n);
  std::vector<std::size_t> idx(4);
  for (std::size_t lin = 0; lin < b.size(); ++lin) {
    b.unravel(lin, idx);
    const double sum = static_cast<double>(idx[0] + idx[1] + idx[2] + idx[3] + 4);
    b.flat(lin) = std::abs(std::sin(sum));
  }
  const double s = static_cast<double>(n * n * n);
  return detail::finish(detail::shifted(b, s), detail::uniform_rhs(ProblemId::P2, n, kProblem2RhsSeed),
                        {ProblemId::P2, n, kProblem2RhsSeed, s});
}

inline constexpr double kGravitationalConstant = 6.67e-11;
inline constexpr double kEarthMass = 5.98e24;
inline constexpr double kEarthRadius = 6.37e6;

/// Discretized x'' = -GM / x^2 on (0, 1) with x(0) = x(1) = 6.37e6.
inline ProblemInstance gen_problem3(std::size_t n) {
  detail::require_n(n, 3);
  DenseTensor a(4, n);
  a({0, 0, 0, 0}) = 1.0;
  a({n - 1, n - 1, n - 1, n - 1}) = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a({i, i, i, i}) = 2.0;
    for (std::size_t j : {i - 1, i + 1}) {
      a({i, j, i, i}) = -1.0 / 3.0;
      a({i, i, j, i}) = -1.0 / 3.0;
      a({i, i, i, j}) = -1.0 / 3.0;
    }
  }
  const double c0 = kEarthRadius;
  const double c1 = kEarthRadius;
  const double h2 = static_cast<double>((n - 1) * (n - 1));
  Vector b(n, kGravitationalConstant * kEarthMass / h2);
  b.front() = c0 * c0 * c0;
  b.back() = c1 * c1 * c1;
  return detail::finish(std::move(a), std::move(b), {ProblemId::P3, n, 0, std::nullopt});
}

/// Like problem 1 with i.i.d. entries and no symmetry.
inline ProblemInstance gen_problem4(std::size_t n, std::uint64_t seed) {
  detail::require_n(n, 2);
  const CounterRng rng(ProblemId::P4, n, seed, kTensorStream);
  DenseTensor b(4, n);
  for (std::size_t lin = 0; lin < b.size(); ++lin) b.flat(lin) = rng.uniform(lin);
  const double s = detail::shift_from_row_sums(b);
  return detail::finish(detail::shifted(b, s), detail::uniform_rhs(ProblemId::P4, n, seed),
                        {ProblemId::P4, n, seed, s});
}

inline ProblemInstance fixture(ProblemId id) {
  switch (id) {
    case ProblemId::Ex11: {
      // x1^2 = 1, x1^2 + x2^2 = 1, -x1^2 + x2^2 + x3^2 = -1
      DenseTensor a(3, 3);
      a({0, 0, 0}) = 1.0;
      a({1, 1, 1}) = 1.0;
      a({2, 2, 2}) = 1.0;
      a({1, 0, 0}) = 1.0;
      a({2, 1, 1}) = 1.0;
      a({2, 0, 0}) = -1.0;
      auto inst = detail::finish(std::move(a), {1.0, 1.0, -1.0}, {ProblemId::Ex11, 3, 0, std::nullopt});
      inst.known_solutions = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
      return inst;
    }
    case ProblemId::Ex21: {
      // 3 I - B with b_1122 = 3/2, b_1222 = 1/2
      DenseTensor a(4, 2);
      a({0, 0, 0, 0}) = 3.0;
      a({1, 1, 1, 1}) = 3.0;
      a({0, 0, 1, 1}) = -1.5;
      a({0, 1, 1, 1}) = -0.5;
      auto inst = detail::finish(std::move(a), {-7.0, 24.0}, {ProblemId::Ex21, 2, 0, 3.0});
      inst.known_solutions = {{1.0, 2.0}, {(std::sqrt(5.0) - 1.0) / 2.0, 2.0}};
      return inst;
    }
    case ProblemId::Ex22: {
      // I - B with b_112 = 3/2, b_122 = 1
      DenseTensor a(3, 2);
      a({0, 0, 0}) = 1.0;
      a({1, 1, 1}) = 1.0;
      a({0, 0, 1}) = -1.5;
      a({0, 1, 1}) = -1.0;
      auto inst = detail::finish(std::move(a), {-6.0, 4.0}, {ProblemId::Ex22, 2, 0, 1.0});
      inst.known_solutions = {{1.0, 2.0}, {2.0, 2.0}};
      return inst;
    }
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "not a fixture id: " + std::string(to_string(id)));
}

/// Dispatch by id; `n` and `seed` are ignored where the problem has none.
inline ProblemInstance make_problem(ProblemId id, std::size_t n, std::uint64_t seed) {
  switch (id) {
    case ProblemId::P1: return gen_problem1(n, seed);
    case ProblemId::P2: return gen_problem2(n);
    case ProblemId::P3: return gen_problem3(n);
    case ProblemId::P4: return gen_problem4(n, seed);
    default: return fixture(id);
  }
}

}  // namespace mteq
