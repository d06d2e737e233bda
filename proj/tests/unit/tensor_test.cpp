#include "support.hpp"

namespace mteq {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;
using testing::random_vector;
using testing::rel_diff;

DenseTensor ex21() { return fixture(ProblemId::Ex21).tensor; }
DenseTensor ex22() { return fixture(ProblemId::Ex22).tensor; }

TEST(DenseTensor, ShapeAndLayout) {
  DenseTensor t(3, 2);
  EXPECT_EQ(t.size(), 8u);
  t({0, 1, 1}) = 5.0;
  EXPECT_EQ(t.flat(3), 5.0);
  EXPECT_EQ(t.major_index(0, 1), 3u);
  std::vector<std::size_t> idx(3);
  t.unravel(6, idx);
  EXPECT_EQ(idx, (std::vector<std::size_t>{1, 1, 0}));
}

TEST(DenseTensor, RejectsBadShapes) {
  EXPECT_THROW(DenseTensor(1, 3), Error);
  EXPECT_THROW(DenseTensor(3, 0), Error);
  EXPECT_THROW(DenseTensor(2, 2, {1.0, 2.0, 3.0}), Error);
  try {
    DenseTensor(2, 1, {std::nan("")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
  }
}

TEST(ContractFull, IdentityGivesPower) {
  const Vector y = contract_full(identity_tensor(3, 2), Vector{2.0, 3.0});
  EXPECT_EQ(y, (Vector{4.0, 9.0}));
  const Vector z = contract_full(identity_tensor(4, 3), Vector{1.0, -2.0, 0.5});
  EXPECT_EQ(z, (Vector{1.0, -8.0, 0.125}));
}

TEST(ContractFull, Fixtures) {
  EXPECT_LE(max_abs_diff(contract_full(ex22(), Vector{2.0, 2.0}), Vector{-6.0, 4.0}), 1e-14);
  EXPECT_LE(max_abs_diff(contract_full(ex21(), Vector{1.0, 2.0}), Vector{-7.0, 24.0}), 1e-14);
}

TEST(ContractFull, DimensionMismatch) {
  try {
    contract_full(identity_tensor(3, 2), Vector{1.0, 2.0, 3.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ContractMatrix, Examples) {
  EXPECT_EQ(contract_matrix(identity_tensor(3, 2), Vector{2.0, 3.0}), (Matrix{{2.0, 0.0}, {0.0, 3.0}}));
  // Row 1: m111 x1 + m112 x2 = 1 - 3 = -2, m121 x1 + m122 x2 = -2; row 2: (0, m222 x2) = (0, 2).
  const Matrix a = contract_matrix(ex22(), Vector{1.0, 2.0});
  EXPECT_EQ(a, (Matrix{{-2.0, -2.0}, {0.0, 2.0}}));
  EXPECT_EQ(multiply(a, Vector{1.0, 2.0}), (Vector{-6.0, 4.0}));
}

TEST(ContractMatrix, ZeroVectorGivesZeroMatrix) {
  std::mt19937_64 rng(1);
  for (std::size_t m : {3u, 4u, 5u}) {
    const Matrix a = contract_matrix(random_tensor(m, 3, rng), Vector(3, 0.0));
    for (double v : a.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Residual, Examples) {
  EXPECT_LE(norm_inf(residual(ex22(), Vector{-6.0, 4.0}, Vector{2.0, 2.0})), 1e-14);
  const Vector f = residual(ex21(), Vector{-7.0, 24.0}, Vector{0.8, 2.0});
  EXPECT_NEAR(f[0], -0.264, 1e-12);
  EXPECT_NEAR(f[1], 0.0, 1e-12);
  std::mt19937_64 rng(2);
  const DenseTensor t = random_tensor(4, 3, rng);
  const Vector b = random_vector(3, rng);
  const Vector r0 = residual(t, b, Vector(3, 0.0));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r0[i], -b[i]);
}

TEST(ElementwisePower, Examples) {
  EXPECT_EQ(elementwise_power(Vector{2.0, 3.0}, 3.0), (Vector{8.0, 27.0}));
  const Vector r = elementwise_power(Vector{0.512, 8.0}, 1.0 / 3.0);
  EXPECT_NEAR(r[0], 0.8, 1e-14);
  EXPECT_NEAR(r[1], 2.0, 1e-14);
  EXPECT_EQ(elementwise_power(Vector(4, 1.0), 0.37), Vector(4, 1.0));
  EXPECT_EQ(elementwise_power(Vector{-2.0}, 3.0), Vector{-8.0});
  try {
    elementwise_power(Vector{-1.0, 1.0}, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativePowerRHS);
  }
}

TEST(ElementwiseRoot, Examples) {
  const Vector x = elementwise_root(Vector{0.6, 8.0}, 4);
  EXPECT_NEAR(x[0], 0.843433, 5e-7);
  EXPECT_NEAR(x[1], 2.0, 1e-15);
  EXPECT_EQ(elementwise_root(Vector(3, 0.0), 5), Vector(3, 0.0));
  EXPECT_EQ(elementwise_root(Vector{-5e-15, 4.0}, 3), (Vector{0.0, 2.0}));
  try {
    elementwise_root(Vector{-1.0, 4.0}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativePowerRHS);
  }
}

TEST(Majorization, Examples) {
  EXPECT_EQ(majorization(fixture(ProblemId::Ex11).tensor).values(),
            (Matrix{{1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {-1.0, 1.0, 1.0}}));
  EXPECT_EQ(majorization(ex22()).values(), (Matrix{{1.0, -1.0}, {0.0, 1.0}}));
  EXPECT_EQ(majorization(identity_tensor(4, 3)).values(), Matrix::identity(3));
}

TEST(Majorization, ZTensorHasNonpositiveOffDiagonal) {
  std::mt19937_64 rng(3);
  const Matrix m = majorization(testing::random_strong_mtensor(4, 5, rng)).values();
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      if (i != j) {
        EXPECT_LE(m(i, j), 0.0);
      }
}

TEST(Majorization, FactorizationIsCachedAndShared) {
  MajorizationMatrix m = majorization(ex21());
  EXPECT_FALSE(m.has_factorization());
  EXPECT_THROW(static_cast<const MajorizationMatrix&>(m).factorization(), Error);
  const LuFactorization& lu = m.factorization();
  const MajorizationMatrix copy = m;
  EXPECT_EQ(&copy.factorization(), &lu);
}

TEST(SplitOffmajor, Examples) {
  DenseTensor structured(3, 2);
  structured({0, 1, 1}) = -1.0;
  structured({0, 0, 0}) = 2.0;
  structured({1, 1, 1}) = 2.0;
  const DenseTensor off_structured = split_offmajor(structured);
  for (double v : off_structured.values()) EXPECT_EQ(v, 0.0);
  const DenseTensor off_identity = split_offmajor(identity_tensor(4, 3));
  for (double v : off_identity.values()) EXPECT_EQ(v, 0.0);

  const DenseTensor off = split_offmajor(ex22());
  for (std::size_t lin = 0; lin < off.size(); ++lin) {
    const double expected = lin == off.linear_index(std::vector<std::size_t>{0, 0, 1}) ? -1.5 : 0.0;
    EXPECT_EQ(off.flat(lin), expected);
  }
}

TEST(IdentityTensor, Entries) {
  const DenseTensor t = identity_tensor(3, 2);
  EXPECT_EQ(t({0, 0, 0}), 1.0);
  EXPECT_EQ(t({1, 1, 1}), 1.0);
  double sum = 0.0;
  for (double v : t.values()) sum += v;
  EXPECT_EQ(sum, 2.0);
}

TEST(SemiSymmetrize, Ex22) {
  const DenseTensor s = semi_symmetrize(ex22());
  EXPECT_EQ(s({0, 0, 1}), -0.75);
  EXPECT_EQ(s({0, 1, 0}), -0.75);
  EXPECT_EQ(s({0, 1, 1}), -1.0);
  EXPECT_EQ(s({0, 0, 0}), 1.0);
  EXPECT_EQ(contract_full(s, Vector{2.0, 2.0}), (Vector{-6.0, 4.0}));
}

TEST(SemiSymmetrize, FixedPointAndIdempotent) {
  std::mt19937_64 rng(4);
  for (std::size_t m : {2u, 3u, 4u, 5u}) {
    const DenseTensor once = semi_symmetrize(random_tensor(m, 3, rng));
    const DenseTensor twice = semi_symmetrize(once);
    EXPECT_LE(max_abs_diff(once.values(), twice.values()), 1e-15);
  }
  EXPECT_EQ(semi_symmetrize(identity_tensor(4, 3)), identity_tensor(4, 3));
}

TEST(ScaleSystem, Examples) {
  const ProblemInstance e = fixture(ProblemId::Ex21);
  const ScaledSystem s = scale_system(e.tensor, e.rhs);
  EXPECT_EQ(s.scale, 24.0);
  EXPECT_DOUBLE_EQ(s.rhs[0], -7.0 / 24.0);
  EXPECT_EQ(s.rhs[1], 1.0);

  const ScaledSystem id = scale_system(identity_tensor(3, 2), Vector{1.0, 1.0});
  EXPECT_EQ(id.scale, 1.0);
  EXPECT_EQ(id.tensor, identity_tensor(3, 2));

  const ProblemInstance p3 = gen_problem3(10);
  const double w = scale_system(p3.tensor, p3.rhs).scale;
  EXPECT_NEAR(w / 2.58475e20, 1.0, 5e-6);
  EXPECT_DOUBLE_EQ(w, 6.37e6 * 6.37e6 * 6.37e6);
}

TEST(ScaleSystem, BoundsAndZeroInput) {
  std::mt19937_64 rng(5);
  const DenseTensor t = random_tensor(4, 3, rng, -7.0, 3.0);
  const ScaledSystem s = scale_system(t, random_vector(3, rng));
  for (double v : s.tensor.values()) EXPECT_LE(std::abs(v), 1.0);
  for (double v : s.rhs) EXPECT_LE(std::abs(v), 1.0);
  try {
    scale_system(DenseTensor(3, 2), Vector(2, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroSystem);
  }
}

// --- properties over random inputs -------------------------------------------

class RandomTensorProperty : public ::testing::TestWithParam<std::pair<std::size_t, std::size_t>> {};

TEST_P(RandomTensorProperty, Homogeneity) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(10 * m + n);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseTensor t = random_tensor(m, n, rng);
    const Vector x = random_vector(n, rng);
    const double s = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    Vector sx = x;
    for (double& v : sx) v *= s;
    Vector expected = contract_full(t, x);
    for (double& v : expected) v *= std::pow(s, static_cast<double>(m - 1));
    EXPECT_LE(rel_diff(contract_full(t, sx), expected), 1e-12);
  }
}

TEST_P(RandomTensorProperty, MajorizationConsistency) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(20 * m + n);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseTensor t = random_tensor(m, n, rng);
    DenseTensor major = t;
    const DenseTensor off = split_offmajor(t);
    for (std::size_t i = 0; i < t.size(); ++i) major.flat(i) -= off.flat(i);
    const Vector x = random_vector(n, rng);
    const Vector lhs = contract_full(major, x);
    const Vector rhs = multiply(majorization(t).values(), elementwise_power(x, static_cast<double>(m - 1)));
    EXPECT_LE(rel_diff(lhs, rhs), 1e-12);
  }
}

TEST_P(RandomTensorProperty, MatrixVectorConsistency) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(30 * m + n);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseTensor t = random_tensor(m, n, rng);
    const Vector x = random_vector(n, rng);
    EXPECT_LE(rel_diff(multiply(contract_matrix(t, x), x), contract_full(t, x)), 1e-12);
  }
}

TEST_P(RandomTensorProperty, SemiSymmetrizePreservesContraction) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(40 * m + n);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseTensor t = random_tensor(m, n, rng);
    const DenseTensor s = semi_symmetrize(t);
    const Vector x = random_vector(n, rng);
    EXPECT_LE(rel_diff(contract_full(s, x), contract_full(t, x)), 1e-12);
  }
}

TEST_P(RandomTensorProperty, JacobianMatchesFiniteDifferences) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(50 * m + n);
  const DenseTensor t = semi_symmetrize(random_tensor(m, n, rng));
  const Vector x = random_vector(n, rng, 0.5, 2.0);
  Matrix jac = contract_matrix(t, x);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) jac(i, j) *= static_cast<double>(m - 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x[j]));
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vector fp = contract_full(t, xp), fm = contract_full(t, xm);
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = (fp[i] - fm[i]) / (2.0 * h);
      EXPECT_LE(std::abs(fd - jac(i, j)), 1e-6 * std::max(1.0, std::abs(jac(i, j))));
    }
  }
}

TEST_P(RandomTensorProperty, ScalingPreservesResidualUpToFactor) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(60 * m + n);
  const DenseTensor t = random_tensor(m, n, rng, -5.0, 5.0);
  const Vector b = random_vector(n, rng, -9.0, 9.0);
  const ScaledSystem s = scale_system(t, b);
  const Vector x = random_vector(n, rng);
  Vector expected = residual(t, b, x);
  for (double& v : expected) v /= s.scale;
  EXPECT_LE(max_abs_diff(residual(s.tensor, s.rhs, x), expected), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Shapes, RandomTensorProperty,
                         ::testing::Values(std::pair<std::size_t, std::size_t>{2, 4},
                                           std::pair<std::size_t, std::size_t>{3, 3},
                                           std::pair<std::size_t, std::size_t>{4, 5},
                                           std::pair<std::size_t, std::size_t>{5, 3}));

}  // namespace
}  // namespace mteq
