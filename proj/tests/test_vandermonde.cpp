#include <gtest/gtest.h>

#include "fcmi/field_points.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/rng.hpp"
#include "fcmi/vandermonde.hpp"

namespace fcmi {
namespace {

TEST(Vandermonde, SingleNode) {
  CVec nodes(1);
  nodes << std::complex<double>(1.0, 0.0);
  const CMat inv = vandermonde_inverse(nodes);
  ASSERT_EQ(inv.rows(), 1);
  EXPECT_NEAR(std::abs(inv(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(Vandermonde, TwoNodeClosedForm) {
  CVec nodes(2);
  nodes << 1.0, -1.0;
  const CMat inv = vandermonde_inverse(nodes);
  // V = [[1,1],[1,-1]], V^{-1} = 0.5*[[1,1],[1,-1]]
  CMat expected(2, 2);
  expected << 0.5, 0.5, 0.5, -0.5;
  EXPECT_NEAR((inv - expected).norm(), 0.0, 1e-14);
}

TEST(Vandermonde, MatchesLuOnUnitModulusNodes) {
  const FieldSpec spec = choose_field(8, 1, 5);
  const PointSet ps = build_point_set(spec, 8);
  const CMat v = vandermonde_matrix(ps.embedded, 8);
  const CMat inv = vandermonde_inverse(ps.embedded);
  const CMat lu = lu_inverse(v);
  EXPECT_LT((inv - lu).norm() / lu.norm(), 1e-9);
}

TEST(Vandermonde, ResidualSmallUpTo64) {
  for (std::size_t k : {16u, 32u, 64u}) {
    const FieldSpec spec = choose_field(k, 1, 11);
    const PointSet ps = build_point_set(spec, k);
    const CMat v = vandermonde_matrix(ps.embedded, k);
    const CMat inv = vandermonde_inverse(ps.embedded);
    EXPECT_LT((inv * v - CMat::Identity(k, k)).norm(), 1e-8) << "k=" << k;
  }
}

TEST(Vandermonde, LuAgreementUpTo32) {
  for (std::size_t k : {8u, 16u, 32u}) {
    const FieldSpec spec = choose_field(k, 1, 3);
    const PointSet ps = build_point_set(spec, k);
    const CMat v = vandermonde_matrix(ps.embedded, k);
    EXPECT_LT((vandermonde_inverse(ps.embedded) - lu_inverse(v)).norm() / lu_inverse(v).norm(),
              1e-9)
        << "k=" << k;
  }
}

TEST(Vandermonde, DuplicateNodesRejected) {
  CVec nodes(3);
  nodes << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0),
      std::complex<double>(1.0, 5e-13);
  EXPECT_THROW(vandermonde_inverse(nodes), SingularityError);
}

TEST(Polynomials, MasterAndHorner) {
  // (x-1)(x+1) = x^2 - 1
  std::vector<std::complex<double>> nodes{{1.0, 0.0}, {-1.0, 0.0}};
  const auto m = master_polynomial(nodes);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_NEAR(std::abs(m[0] + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m[2] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(horner(m, std::complex<double>(2.0, 0.0)) - 3.0), 0.0, 1e-15);
}

}  // namespace
}  // namespace fcmi
