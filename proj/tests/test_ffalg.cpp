#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "popdiff/ffalg.hpp"

using namespace popdiff;

// =====================================================================
// Scalars and moduli
// =====================================================================

TEST(FpScalar, RejectsTwoAndComposites) {
  EXPECT_THROW(FpScalar(1, 2), InvalidModulus);
  EXPECT_THROW(FpScalar(1, 9), InvalidModulus);
  EXPECT_THROW(FpScalar(1, 1'000'003), InvalidModulus);
  EXPECT_NO_THROW(FpScalar(1, 999'983));
}

TEST(FpScalar, ArithmeticReducesNegatives) {
  const FpScalar a(-1, 5), b(7, 5);
  EXPECT_EQ(a.value(), 4u);
  EXPECT_EQ(b.value(), 2u);
  EXPECT_EQ((a + b).value(), 1u);
  EXPECT_EQ((a * b).value(), 3u);
  EXPECT_EQ((a - b).value(), 2u);
  EXPECT_EQ((-b).value(), 3u);
  EXPECT_EQ((b * b.inverse()).value(), 1u);
  EXPECT_THROW(FpScalar(0, 5).inverse(), SingularError);
  EXPECT_THROW(FpScalar(1, 5) + FpScalar(1, 7), DimensionMismatch);
}

TEST(FpScalar, InverseLargePrime) {
  const std::uint32_t p = 999'983;
  for (Residue a : {1u, 2u, 12345u, p - 1}) {
    EXPECT_EQ(fp::mul(a, fp::inv(a, p), p), 1u);
  }
}

// =====================================================================
// Matrix inverse, rank, determinant
// =====================================================================

TEST(MatInverse, SpecExamples) {
  const auto rot = FpMatrix::from_rows({{0, 4}, {1, 0}}, 5);
  EXPECT_EQ(mat_inverse(rot), FpMatrix::from_rows({{0, 1}, {4, 0}}, 5));
  EXPECT_EQ(mat_inverse(FpMatrix::identity(2, 5)), FpMatrix::identity(2, 5));
  EXPECT_THROW(mat_inverse(FpMatrix::from_rows({{1, 1}, {2, 2}}, 5)),
               SingularError);
  EXPECT_THROW(mat_inverse(FpMatrix(2, 3, 5)), DimensionMismatch);
}

TEST(MatInverse, RandomProductsAreIdentity) {
  std::mt19937_64 rng(11);
  for (std::uint32_t p : {3u, 5u, 7u, 101u}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      for (int trial = 0; trial < 40; ++trial) {
        const auto a = oracle::random_invertible(k, p, rng);
        const auto b = mat_inverse(a);
        EXPECT_EQ(a * b, FpMatrix::identity(k, p));
        EXPECT_EQ(b * a, FpMatrix::identity(k, p));
      }
    }
  }
}

TEST(MatRank, SpecExamples) {
  EXPECT_EQ(mat_rank(FpMatrix(3, 3, 5)), 0u);
  EXPECT_EQ(mat_rank(FpMatrix::from_rows({{1, 1}, {2, 2}}, 5)), 1u);
  EXPECT_EQ(mat_rank(FpMatrix::identity(4, 3)), 4u);
}

TEST(MatRank, TransposeInvariant) {
  std::mt19937_64 rng(2024);
  for (std::uint32_t p : {3u, 5u, 7u}) {
    for (std::size_t k = 1; k <= 4; ++k) {
      for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> cols(1, 4);
        const auto a = oracle::random_matrix(k, cols(rng), p, rng);
        ASSERT_EQ(mat_rank(a), mat_rank(a.transpose()));
      }
    }
  }
}

TEST(MatDet, MatchesCofactorExpansion) {
  std::mt19937_64 rng(5);
  for (std::uint32_t p : {3u, 5u, 7u}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      for (int trial = 0; trial < 30; ++trial) {
        const auto a = oracle::random_matrix(k, k, p, rng);
        EXPECT_EQ(static_cast<std::int64_t>(mat_det(a)),
                  oracle::det_cofactor(a));
        EXPECT_EQ(is_invertible(a), mat_det(a) != 0);
      }
    }
  }
}

TEST(FpMatrix, SymmetryPredicates) {
  const auto s = FpMatrix::from_rows({{1, 2}, {2, 0}}, 5);
  const auto k = FpMatrix::from_rows({{0, 3}, {-3, 0}}, 5);
  EXPECT_TRUE(s.is_symmetric());
  EXPECT_FALSE(s.is_skew());
  EXPECT_TRUE(k.is_skew());
  EXPECT_FALSE(k.is_symmetric());
  EXPECT_EQ(hs_inner(s, s), (1 + 4 + 4) % 5u);
  EXPECT_EQ(hs_inner(s, k), 0u);
}

// =====================================================================
// Polynomials
// =====================================================================

TEST(MinPoly, SpecExamples) {
  const auto j = FpMatrix::from_rows({{0, 4}, {1, 0}}, 5);
  EXPECT_EQ(min_poly(j), FpPoly({1, 0, 1}, 5));
  EXPECT_EQ(min_poly(FpMatrix::identity(2, 5)), FpPoly({-1, 1}, 5));
  EXPECT_EQ(min_poly(FpMatrix::scalar(1, 2, 5)), FpPoly({-2, 1}, 5));
}

TEST(MinPoly, AnnihilatesAndDividesCharPoly) {
  std::mt19937_64 rng(77);
  for (std::uint32_t p : {3u, 5u, 7u}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      for (int trial = 0; trial < 40; ++trial) {
        const auto a = oracle::random_matrix(k, k, p, rng);
        const auto q = min_poly(a);
        EXPECT_EQ(q.leading(), 1u);
        EXPECT_LE(q.degree(), static_cast<int>(k));
        EXPECT_TRUE(poly_eval(q, a).is_zero());
        const auto chi = oracle::charpoly(a);
        ASSERT_EQ(chi.size(), k + 1);
        oracle::Poly qq(q.coeffs().begin(), q.coeffs().end());
        EXPECT_TRUE(oracle::rem(chi, qq, p).empty());
      }
    }
  }
}

TEST(CharPolyOracle, ConstantTermIsSignedDeterminant) {
  std::mt19937_64 rng(3);
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto a = oracle::random_matrix(k, k, 7, rng);
    const auto chi = oracle::charpoly(a);
    const std::int64_t sign = (k % 2) ? -1 : 1;
    EXPECT_EQ(chi[0], oracle::md(sign * oracle::det_cofactor(a), 7));
  }
}

TEST(PolyGcd, SpecExamples) {
  const FpPoly t2p1({1, 0, 1}, 5);
  EXPECT_EQ(poly_gcd(t2p1, t2p1), t2p1);
  EXPECT_EQ(poly_gcd(FpPoly({-2, 1}, 5), FpPoly({2, 1}, 5)), FpPoly({1}, 5));
  EXPECT_EQ(poly_gcd(FpPoly({-1, 0, 1}, 3), FpPoly({-1, 1}, 3)),
            FpPoly({-1, 1}, 3));
  EXPECT_THROW(poly_gcd(FpPoly(5), FpPoly(5)), BothZero);
  EXPECT_EQ(poly_gcd(FpPoly(5), FpPoly({2, 2}, 5)), FpPoly({1, 1}, 5));
}

TEST(PolyGcd, DividesBothInputs) {
  std::mt19937_64 rng(8);
  for (std::uint32_t p : {3u, 5u, 7u}) {
    std::uniform_int_distribution<std::int64_t> c(0, p - 1);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> common{c(rng), 1};
      std::vector<std::int64_t> a{c(rng), c(rng), 1}, b{c(rng), 1};
      const FpPoly g0(common, p);
      const FpPoly f = FpPoly(a, p) * g0, g = FpPoly(b, p) * g0;
      const FpPoly d = poly_gcd(f, g);
      EXPECT_TRUE((f % d).is_zero());
      EXPECT_TRUE((g % d).is_zero());
      EXPECT_TRUE((d % g0.monic()).is_zero());
    }
  }
}

TEST(NegateArgument, SpecExamples) {
  EXPECT_EQ(negate_argument(FpPoly({1, 0, 1}, 5)), FpPoly({1, 0, 1}, 5));
  EXPECT_EQ(negate_argument(FpPoly({-2, 1}, 5)), FpPoly({-2, -1}, 5));
  EXPECT_EQ(negate_argument(FpPoly({-2, 1}, 5)).monic(), FpPoly({2, 1}, 5));
  EXPECT_EQ(negate_argument(FpPoly({0, 0, 0, 1}, 5)).monic(),
            FpPoly({0, 0, 0, 1}, 5));
}

TEST(FpPoly, DivmodReconstructs) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::int64_t> c(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::int64_t> a(6), b(3);
    for (auto& x : a) x = c(rng);
    for (auto& x : b) x = c(rng);
    b.back() = 1;
    const FpPoly f(a, 7), g(b, 7);
    FpPoly q(7), r(7);
    f.divmod(g, q, r);
    EXPECT_EQ(q * g + r, f);
    EXPECT_LT(r.degree(), g.degree());
  }
}

TEST(FpPoly, ToString) {
  EXPECT_EQ(FpPoly({1, 0, 1}, 5).to_string(), "t^2 + 1");
  EXPECT_EQ(FpPoly({3, 1}, 5).to_string(), "t + 3");
  EXPECT_EQ(FpPoly(5).to_string(), "0");
}
