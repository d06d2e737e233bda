#include "support.hpp"

namespace mteq {
namespace {

TEST(IsZTensor, Examples) {
  EXPECT_TRUE(is_z_tensor(fixture(ProblemId::Ex21).tensor));
  EXPECT_FALSE(is_z_tensor(fixture(ProblemId::Ex11).tensor));
  EXPECT_TRUE(is_z_tensor(identity_tensor(4, 3)));
}

TEST(Certificate, Ex21) {
  const MTensorCertificate c = mtensor_certificate(fixture(ProblemId::Ex21).tensor);
  EXPECT_EQ(c.s, 3.0);
  EXPECT_EQ(c.row_sum_bound, 2.0);
  EXPECT_EQ(c.verdict, MVerdict::StrongByRowSum);
  EXPECT_FALSE(c.power_estimate.has_value());
}

TEST(Certificate, Identity) {
  const MTensorCertificate c = mtensor_certificate(identity_tensor(4, 3), true);
  EXPECT_EQ(c.s, 1.0);
  EXPECT_EQ(c.row_sum_bound, 0.0);
  EXPECT_EQ(c.verdict, MVerdict::StrongByRowSum);
  ASSERT_TRUE(c.power_estimate.has_value());
  EXPECT_EQ(*c.power_estimate, 0.0);
}

TEST(Certificate, NotZTensor) {
  EXPECT_EQ(mtensor_certificate(fixture(ProblemId::Ex11).tensor).verdict, MVerdict::NotZTensor);
  EXPECT_EQ(mtensor_certificate(fixture(ProblemId::Ex11).tensor, true).verdict, MVerdict::NotZTensor);
}

TEST(Certificate, Problem1MarginIsOnePercentOfRowSum) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ProblemInstance p = gen_problem1(6, seed);
    const MTensorCertificate c = mtensor_certificate(p.tensor);
    EXPECT_EQ(c.verdict, MVerdict::StrongByRowSum);
    const double max_row = *p.meta.shift / 1.01;
    EXPECT_NEAR(c.margin(), 0.01 * max_row, 1e-10 * max_row);
    EXPECT_GE(c.s / c.row_sum_bound, 1.01 - 1e-12);
  }
}

TEST(Certificate, AllGeneratorsCertify) {
  std::vector<ProblemInstance> insts{gen_problem1(5, 11), gen_problem2(5), gen_problem3(6), gen_problem4(5, 12)};
  for (const auto& p : insts) {
    const MTensorCertificate c = mtensor_certificate(p.tensor, true);
    EXPECT_EQ(c.verdict, MVerdict::StrongByRowSum) << to_string(p.meta.problem);
    EXPECT_LE(*c.power_estimate, c.row_sum_bound + 1e-9);
  }
  const MTensorCertificate p2 = mtensor_certificate(gen_problem2(7).tensor);
  EXPECT_GE(p2.s - p2.row_sum_bound, 1e-9);
}

TEST(Certificate, Problem3NeedsWeightedBound) {
  const ProblemInstance p = gen_problem3(10);
  const MTensorCertificate plain = mtensor_certificate(p.tensor);
  EXPECT_EQ(plain.s, 2.0);
  EXPECT_NEAR(plain.row_sum_bound, 2.0, 1e-14);
  EXPECT_EQ(plain.verdict, MVerdict::Unknown);
  const MTensorCertificate weighted = mtensor_certificate(p.tensor, true);
  ASSERT_TRUE(weighted.weighted_bound.has_value());
  EXPECT_LT(*weighted.weighted_bound, 2.0);
  EXPECT_EQ(weighted.verdict, MVerdict::StrongByRowSum);
}

TEST(SpectralRadius, Examples) {
  EXPECT_EQ(spectral_radius_estimate(DenseTensor(4, 3), 100, 1e-12), 0.0);
  EXPECT_NEAR(spectral_radius_estimate(identity_tensor(4, 3), 100, 1e-12), 1.0, 1e-15);
  const DenseTensor b = shifted_complement(fixture(ProblemId::Ex21).tensor, 3.0);
  EXPECT_LE(spectral_radius_estimate(b, 1000, 1e-12), 2.0 + 1e-12);
  DenseTensor neg(3, 2);
  neg.flat(1) = -1.0;
  try {
    spectral_radius_estimate(neg, 10, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeEntry);
  }
}

TEST(SpectralRadius, BelowRowSumBoundOnRandomTensors) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseTensor b = testing::random_tensor(4, 4, rng, 0.0, 1.0);
    const double bound = max_entry(contract_full(b, Vector(4, 1.0)));
    EXPECT_LE(spectral_radius_estimate(b, 500, 1e-12), bound + 1e-9);
  }
}

TEST(Feasibility, Examples) {
  const ProblemInstance e = fixture(ProblemId::Ex22);
  const FeasibilityReport in = is_feasible_S(e.tensor, e.rhs, Vector{1.5, 2.0});
  EXPECT_TRUE(in.in_S);
  EXPECT_NEAR(in.residual_max, 0.0, 1e-14);
  const Vector f = residual(e.tensor, e.rhs, Vector{1.5, 2.0});
  EXPECT_NEAR(f[0], -0.25, 1e-14);
  const FeasibilityReport out = is_feasible_S(e.tensor, e.rhs, Vector{0.0, 2.0});
  EXPECT_FALSE(out.in_S);
  EXPECT_TRUE(out.is_nonneg);
  EXPECT_NEAR(out.residual_max, 2.0, 1e-14);

  const DenseTensor id = identity_tensor(3, 2);
  EXPECT_TRUE(is_feasible_S(id, Vector{0.0, 1.0}, Vector(2, 0.0)).in_S);
  EXPECT_FALSE(is_feasible_S(id, Vector{-1.0, 1.0}, Vector(2, 0.0)).in_S);
  EXPECT_FALSE(is_feasible_S(id, Vector{1.0, 1.0}, Vector{-0.5, 0.0}).is_nonneg);
}

TEST(Feasibility, JoinClosure) {
  std::mt19937_64 rng(22);
  for (ProblemId id : {ProblemId::Ex21, ProblemId::Ex22}) {
    const ProblemInstance e = fixture(id);
    std::vector<Vector> members;
    while (members.size() < 40) {
      const Vector x = testing::random_vector(2, rng, 0.0, 3.0);
      if (is_feasible_S(e.tensor, e.rhs, x).in_S) members.push_back(x);
    }
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      Vector join(2);
      for (std::size_t k = 0; k < 2; ++k) join[k] = std::max(members[i][k], members[i + 1][k]);
      EXPECT_TRUE(is_feasible_S(e.tensor, e.rhs, join).in_S);
    }
  }
}

TEST(SolveStructured, Examples) {
  const ProblemInstance e = fixture(ProblemId::Ex11);
  const Vector x = solve_structured(e.tensor, e.rhs);
  EXPECT_LE(testing::max_abs_diff(x, Vector{1.0, 0.0, 0.0}), 1e-14);
  EXPECT_EQ(solve_structured(identity_tensor(3, 2), Vector{4.0, 9.0}), (Vector{2.0, 3.0}));

  DenseTensor m2(2, 2);
  m2({0, 0}) = 2.0;
  m2({0, 1}) = -1.0;
  m2({1, 0}) = -1.0;
  m2({1, 1}) = 2.0;
  try {
    solve_structured(m2, Vector{-1.0, -1.0});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NoNonnegativeSolution);
  }
  try {
    solve_structured(fixture(ProblemId::Ex22).tensor, Vector{1.0, 1.0});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotStructured);
  }
  DenseTensor singular(3, 2);
  singular({0, 0, 0}) = 1.0;
  try {
    solve_structured(singular, Vector{1.0, 1.0});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SingularMatrix);
  }
}

TEST(SolveStructured, ResidualOnRandomStructured) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4;
    DenseTensor t(4, n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) row += (t.flat(t.major_index(i, j)) = -u(rng));
      t.flat(t.diagonal_index(i)) = -row + 0.5 + u(rng);
    }
    const Vector b = testing::random_vector(n, rng, 0.1, 1.0);
    const Vector x = solve_structured(t, b);
    EXPECT_GE(min_entry(x), 0.0);
    EXPECT_LE(norm_inf(residual(t, b, x)), 1e-10 * norm_inf(b));
  }
}

TEST(Existence, Examples) {
  const ProblemInstance e21 = fixture(ProblemId::Ex21);
  EXPECT_EQ(existence_sufficient(e21.tensor, e21.rhs), Existence::Inconclusive);
  for (const Vector& x : e21.known_solutions) EXPECT_LE(norm_inf(residual(e21.tensor, e21.rhs, x)), 1e-9);
  EXPECT_EQ(existence_sufficient(identity_tensor(4, 3), Vector{1.0, 2.0, 3.0}), Existence::PositiveExists);
  EXPECT_EQ(existence_sufficient(identity_tensor(4, 3), Vector{1.0, 0.0, 3.0}), Existence::NonnegativeExists);
  const ProblemInstance e22 = fixture(ProblemId::Ex22);
  EXPECT_EQ(lu_solve(lu_factor(majorization(e22.tensor).values()), e22.rhs), (Vector{-2.0, 4.0}));
  EXPECT_EQ(existence_sufficient(e22.tensor, e22.rhs), Existence::Inconclusive);
}

}  // namespace
}  // namespace mteq
