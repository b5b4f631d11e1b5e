#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "fcmi/brs_code.hpp"
#include "fcmi/field_points.hpp"

namespace fcmi {
namespace {

PointSet points_for(std::size_t n, std::uint64_t seed = 42) {
  return build_point_set(choose_field(n, 1, seed), n);
}

TEST(CodeParams, Validation) {
  EXPECT_NO_THROW(CodeParams::create(9, 6, 6));
  EXPECT_THROW(CodeParams::create(9, 6, 5), ParameterError);   // w not integral
  EXPECT_THROW(CodeParams::create(12, 9, 4), ParameterError);  // d below n/2
  EXPECT_THROW(CodeParams::create(4, 5, 3), ParameterError);   // n < k
  const CodeParams p = CodeParams::create(9, 6, 6);
  EXPECT_EQ(p.s, 3u);
  EXPECT_EQ(p.w, 4u);
  EXPECT_TRUE(p.extended_regime());  // d=6 != s+1=4
  EXPECT_FALSE(CodeParams::create(6, 3, 4).extended_regime());
}

TEST(MaskMatrix, MatchesPublishedNineSixSix) {
  const MaskMatrix m = mask_matrix(CodeParams::create(9, 6, 6));
  const int expected[9][6] = {
      {1, 1, 0, 1, 1, 0}, {1, 1, 0, 1, 1, 0}, {1, 1, 0, 1, 1, 0},
      {1, 0, 1, 1, 0, 1}, {1, 0, 1, 1, 0, 1}, {1, 0, 1, 1, 0, 1},
      {0, 1, 1, 0, 1, 1}, {0, 1, 1, 0, 1, 1}, {0, 1, 1, 0, 1, 1}};
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      EXPECT_EQ(m.at(i, j), expected[i][j]) << i << "," << j;
}

TEST(MaskMatrix, FullColumnAndCounts) {
  const MaskMatrix m21 = mask_matrix(CodeParams::create(2, 1, 2));
  EXPECT_EQ(m21.at(0, 0), 1);
  EXPECT_EQ(m21.at(1, 0), 1);

  const MaskMatrix m = mask_matrix(CodeParams::create(6, 3, 4));
  for (std::size_t j = 0; j < 3; ++j) {
    std::size_t col = 0;
    for (std::size_t i = 0; i < 6; ++i) col += m.at(i, j);
    EXPECT_EQ(col, 4u);
  }
  for (std::size_t i = 0; i < 6; ++i) {
    std::size_t row = 0;
    for (std::size_t j = 0; j < 3; ++j) row += m.at(i, j);
    EXPECT_EQ(row, 2u);
  }
}

TEST(ColumnPolynomial, VanishesExactlyOffSupport) {
  const PointSet ps = points_for(9);
  const MaskMatrix mask = mask_matrix(CodeParams::create(9, 6, 6));
  for (std::size_t col = 0; col < 6; ++col) {
    const ColumnPolynomial p = column_polynomial(col, mask, ps);
    std::vector<std::complex<double>> coeffs(p.coeffs.data(), p.coeffs.data() + p.coeffs.size());
    for (std::size_t i = 0; i < 9; ++i) {
      const double v = std::abs(horner(coeffs, ps.embedded(static_cast<Eigen::Index>(i))));
      if (mask.at(i, col))
        EXPECT_GT(v, 1e-9) << "col " << col << " point " << i;
      else
        EXPECT_LT(v, 1e-9) << "col " << col << " point " << i;
    }
    EXPECT_EQ(p.degree, 3u + p.multiplier_exponent);
  }
}

TEST(ColumnPolynomial, EmptyZeroSetIsConstant) {
  // d = n forces k = 1 for a constant polynomial; coeffs are [1].
  const PointSet ps = points_for(2);
  const MaskMatrix mask = mask_matrix(CodeParams::create(2, 1, 2));
  const ColumnPolynomial p = column_polynomial(0, mask, ps);
  EXPECT_EQ(p.degree, 0u);
  EXPECT_NEAR(std::abs(p.coeffs(0) - 1.0), 0.0, 1e-12);
}

TEST(ColumnPolynomial, StandardRegimeAllCoefficientsNonzero) {
  // d = s+1: degree k-1 exactly and every monomial coefficient nonzero.
  for (auto [n, k] : std::vector<std::pair<std::size_t, std::size_t>>{{6, 3}, {10, 5}}) {
    const CodeParams params = CodeParams::standard(n, k);
    const PointSet ps = points_for(n);
    const MaskMatrix mask = mask_matrix(params);
    for (std::size_t col = 0; col < k; ++col) {
      const ColumnPolynomial p = column_polynomial(col, mask, ps);
      EXPECT_EQ(p.degree, k - 1);
      for (Eigen::Index c = 0; c < p.coeffs.size(); ++c)
        EXPECT_GT(std::abs(p.coeffs(c)), 1e-9) << n << "," << k << " col " << col;
    }
  }
}

TEST(Generator, SupportAndFactorization) {
  for (auto [n, k, d] : std::vector<std::array<std::size_t, 3>>{
           {9, 6, 6}, {6, 3, 4}, {10, 5, 6}, {12, 8, 9}, {16, 12, 12}}) {
    const PointSet ps = points_for(n);
    const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(n, k, d)), ps);
    EXPECT_FALSE(gen.ill_conditioned) << n << "," << k << "," << d;
    EXPECT_LT((gen.G - gen.H * gen.P).norm() / gen.G.norm(), 1e-10);
    std::size_t nnz = 0;
    for (Eigen::Index i = 0; i < gen.G.rows(); ++i)
      for (Eigen::Index j = 0; j < gen.G.cols(); ++j) {
        const bool hot = std::abs(gen.G(i, j)) > 1e-9;
        EXPECT_EQ(hot, static_cast<bool>(gen.mask.at(static_cast<std::size_t>(i),
                                                     static_cast<std::size_t>(j))));
        nnz += hot;
      }
    // Lemma-2 equality chain: nnz(G) = kd = nw.
    EXPECT_EQ(nnz, k * d);
    EXPECT_EQ(nnz, n * gen.params.w);
  }
}

TEST(Generator, TrivialSingle) {
  const PointSet ps = points_for(1);
  const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(1, 1, 1)), ps);
  ASSERT_EQ(gen.G.rows(), 1);
  EXPECT_NEAR(std::abs(gen.G(0, 0)), 1.0, 1e-12);
}

TEST(RestrictedInverse, AllSubsetsNineSixSix) {
  const PointSet ps = points_for(9);
  const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(9, 6, 6)), ps);
  std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
  std::size_t count = 0;
  do {
    const CMat inv = restricted_inverse(gen, rows);
    CMat gi(6, 6);
    for (std::size_t r = 0; r < 6; ++r)
      gi.row(static_cast<Eigen::Index>(r)) = gen.G.row(static_cast<Eigen::Index>(rows[r]));
    EXPECT_LT((inv * gi - CMat::Identity(6, 6)).norm(), 1e-8);
    // matches the plain LU inverse of the slice
    EXPECT_LT((inv - lu_inverse(gi)).norm() / inv.norm(), 1e-8);
    ++count;
  } while (detail::next_combination(rows, 9));
  EXPECT_EQ(count, 84u);
}

TEST(RestrictedInverse, RandomSubsetsUpTo24x16) {
  for (auto [n, k, d] : std::vector<std::array<std::size_t, 3>>{{20, 15, 16}, {24, 16, 18}}) {
    const PointSet ps = points_for(n);
    const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(n, k, d)), ps);
    Rng rng(99);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (int trial = 0; trial < 200; ++trial) {
      for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.bounded(n - i)]);
      std::vector<std::size_t> rows(pool.begin(), pool.begin() + static_cast<long>(k));
      std::sort(rows.begin(), rows.end());
      const CMat inv = restricted_inverse(gen, rows);
      CMat gi(k, k);
      for (std::size_t r = 0; r < k; ++r)
        gi.row(static_cast<Eigen::Index>(r)) = gen.G.row(static_cast<Eigen::Index>(rows[r]));
      ASSERT_LT((inv * gi - CMat::Identity(k, k)).norm(), 1e-8)
          << n << "," << k << "," << d << " trial " << trial;
    }
  }
}

TEST(RestrictedInverse, WrongSizeRejected) {
  const PointSet ps = points_for(9);
  const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(9, 6, 6)), ps);
  EXPECT_THROW(restricted_inverse(gen, {0, 1, 2}), RecoveryThresholdNotMet);
  EXPECT_THROW(restricted_inverse(gen, {0, 0, 1, 2, 3, 4}), ParameterError);
}

TEST(VerifyMds, ExhaustiveAndNegativeControl) {
  const PointSet ps = points_for(9);
  const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(9, 6, 6)), ps);
  const MdsReport rep = verify_mds(gen);
  EXPECT_TRUE(rep.exhaustive);
  EXPECT_EQ(rep.checked, 84u);
  EXPECT_TRUE(rep.pass);

  // n = k: the single subset is G itself.
  const PointSet ps1 = points_for(4);
  const BrsGenerator id_gen = generator_matrix(mask_matrix(CodeParams::create(4, 4, 1)), ps1);
  const MdsReport rep1 = verify_mds(id_gen);
  EXPECT_EQ(rep1.checked, 1u);
  EXPECT_TRUE(rep1.pass);

  // deliberately rank-deficient: duplicate columns
  CMat bad(4, 2);
  bad << 1, 1, 2, 2, 3, 3, 4, 4;
  const MdsReport repbad = verify_mds(bad);
  EXPECT_FALSE(repbad.pass);
  EXPECT_FALSE(repbad.worst_subset.empty());
}

TEST(Generator, IdentityPatternWhenNEqualsK) {
  const PointSet ps = points_for(4);
  const BrsGenerator gen = generator_matrix(mask_matrix(CodeParams::create(4, 4, 1)), ps);
  EXPECT_LT((gen.G - CMat::Identity(4, 4)).norm(), 1e-9);
}

TEST(CyclicGenerator, SupportAndShapes) {
  // s=0: a single 1 per row (identity-like circulant).
  const FieldSpec spec4 = choose_field(4, 1, 5);
  const CMat g0 = cyclic_generator(4, 0, spec4);
  EXPECT_LT((g0 - CMat::Identity(4, 4)).norm(), 1e-12);

  // n=4, s=1: g1 = coefficients of (x - beta_1) = [-beta_1, 1]; two nonzeros
  // per row of the circulant.
  const CMat g = cyclic_generator(4, 1, spec4);
  const PointSet ps = build_point_set(spec4, 4);
  EXPECT_NEAR(std::abs(g(0, 0) + ps.embedded(0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g(1, 0) - 1.0), 0.0, 1e-12);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const long nnz = (g.row(i).cwiseAbs().array() > 1e-12).count();
    EXPECT_GE(nnz, 1);
    EXPECT_LE(nnz, 2);
  }
}

TEST(CyclicGenerator, UnbalancedAfterErasure) {
  // n=6, s=2: erasing the trailing columns leaves unequal row weights.
  const FieldSpec spec = choose_field(6, 1, 9);
  const CMat g = cyclic_generator(6, 2, spec);
  std::set<long> weights;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    weights.insert((g.row(i).cwiseAbs().array() > 1e-12).count());
  EXPECT_GT(weights.size(), 1u);  // not balanced
  EXPECT_TRUE(verify_mds(g).pass);
}

TEST(Generator, InfeasibleMaskRejected) {
  // (8,6,4) has three columns per zero set but only d-s = 2 multiplier
  // degrees; no invertible polynomial family exists over that mask.
  const PointSet ps = points_for(8);
  EXPECT_THROW(generator_matrix(mask_matrix(CodeParams::create(8, 6, 4)), ps), ParameterError);
}

}  // namespace
}  // namespace fcmi
