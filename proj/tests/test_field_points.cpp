#include <gtest/gtest.h>

#include <set>

#include "fcmi/field_points.hpp"

namespace fcmi {
namespace {

TEST(ChooseField, SmallestPrimeAndPrimitiveRoot) {
  // n=9 -> q=11; the primitive roots mod 11 are exactly {2,6,7,8}.
  const FieldSpec spec = choose_field(9, 6, 42);
  EXPECT_EQ(spec.q, 11u);
  const std::set<std::uint64_t> roots{2, 6, 7, 8};
  EXPECT_TRUE(roots.count(spec.beta)) << spec.beta;
  EXPECT_EQ(primitive_roots(11), (std::vector<std::uint64_t>{2, 6, 7, 8}));
}

TEST(ChooseField, TinyFields) {
  const FieldSpec f2 = choose_field(2, 1, 0);
  EXPECT_EQ(f2.q, 3u);
  EXPECT_EQ(f2.beta, 2u);
  const FieldSpec f1 = choose_field(1, 1, 0);
  EXPECT_EQ(f1.q, 2u);
  EXPECT_EQ(f1.beta, 1u);
}

TEST(ChooseField, RejectsBadArguments) {
  EXPECT_THROW(choose_field(0, 1, 0), ParameterError);
  EXPECT_THROW(choose_field(3, 4, 0), ParameterError);
}

TEST(ChooseField, BetaHasFullOrder) {
  for (std::size_t n : {4u, 9u, 16u, 30u}) {
    const FieldSpec spec = choose_field(n, 1, 7);
    ASSERT_TRUE(is_prime(spec.q));
    EXPECT_EQ(pow_mod(spec.beta, spec.q - 1, spec.q), 1u);
    for (std::uint64_t p : distinct_prime_factors(spec.q - 1))
      EXPECT_NE(pow_mod(spec.beta, (spec.q - 1) / p, spec.q), 1u)
          << "beta=" << spec.beta << " q=" << spec.q << " p=" << p;
  }
}

TEST(PointSet, ExponentsByModularPower) {
  FieldSpec spec{11, 2};
  const PointSet ps = build_point_set(spec, 3);
  EXPECT_EQ(ps.exponents, (std::vector<std::uint64_t>{2, 4, 8}));
}

TEST(PointSet, DirectEmbeddingAngle) {
  // q=3, beta=2, n=1: the single point is e^{2 pi i * 2 / 3} = e^{4 pi i/3}.
  FieldSpec spec{3, 2};
  const PointSet ps = build_point_set(spec, 1);
  const std::complex<double> expected = std::polar(1.0, 4.0 * M_PI / 3.0);
  EXPECT_NEAR(std::abs(ps.embedded(0) - expected), 0.0, 1e-14);
}

TEST(PointSet, PointsDistinctAndUnitModulus) {
  for (std::size_t n : {5u, 9u, 24u, 100u}) {
    const FieldSpec spec = choose_field(n, 1, 3);
    const PointSet ps = build_point_set(spec, n);
    std::set<std::uint64_t> seen(ps.exponents.begin(), ps.exponents.end());
    EXPECT_EQ(seen.size(), n);
    for (Eigen::Index i = 0; i < ps.embedded.size(); ++i)
      EXPECT_NEAR(std::abs(ps.embedded(i)), 1.0, 1e-12);
    double min_dist = 2.0;
    for (Eigen::Index i = 0; i < ps.embedded.size(); ++i)
      for (Eigen::Index j = i + 1; j < ps.embedded.size(); ++j)
        min_dist = std::min(min_dist, std::abs(ps.embedded(i) - ps.embedded(j)));
    EXPECT_GT(min_dist, 1e-9);
  }
}

TEST(PointSet, RejectsCollidingSize) {
  FieldSpec spec{11, 2};
  EXPECT_THROW(build_point_set(spec, 11), ParameterError);
}

TEST(EtaMultiset, MembershipAndDeterminism) {
  FieldSpec spec{11, 2};
  const EtaMultiset eta = sample_eta(spec, 5, 7);
  ASSERT_EQ(eta.size(), 5u);
  for (Eigen::Index i = 0; i < eta.values.size(); ++i) {
    EXPECT_NEAR(std::abs(eta.values(i)), 1.0, 1e-12);
    // must be one of the 10 embedded nonzero elements
    bool member = false;
    for (std::uint64_t m = 1; m <= 10; ++m) {
      const CLD z = unit_point_ld(m, 11);
      if (std::abs(eta.values(i) - std::complex<double>(static_cast<double>(z.real()),
                                                        static_cast<double>(z.imag()))) < 1e-12)
        member = true;
    }
    EXPECT_TRUE(member);
  }
  const EtaMultiset again = sample_eta(spec, 5, 7);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(eta.values(i), again.values(i));
}

TEST(FieldPoints, JsonShape) {
  const FieldSpec spec = choose_field(9, 6, 42);
  const PointSet ps = build_point_set(spec, 9);
  const auto j = to_json(ps);
  EXPECT_EQ(j.at("q"), 11);
  EXPECT_EQ(j.at("exponents").size(), 9u);
}

}  // namespace
}  // namespace fcmi
