#include <gtest/gtest.h>

#include "conic/periods.hpp"

using namespace conic;

namespace {

std::vector<cplx> quintic() { return {0.0, -1.0, 0.0, 0.0, 0.0, 1.0}; }
std::vector<cplx> sextic() { return {-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}; }

}  // namespace

TEST(Homology, LoopsClose) {
  const auto c = validate_curve(sextic());
  const auto hb = build_homology_basis(c);
  EXPECT_EQ(hb.a.size(), 2u);
  EXPECT_EQ(hb.b.size(), 2u);
  for (const auto& l : hb.loops) EXPECT_TRUE(l.closed(1e-12));
  EXPECT_TRUE(is_canonical(hb));
}

TEST(Homology, Deterministic) {
  const auto c = validate_curve(quintic());
  const auto h1 = build_homology_basis(c);
  const auto h2 = build_homology_basis(c);
  ASSERT_EQ(h1.loops.size(), h2.loops.size());
  for (std::size_t k = 0; k < h1.loops.size(); ++k) {
    ASSERT_EQ(h1.loops[k].x, h2.loops[k].x);
    ASSERT_EQ(h1.loops[k].y, h2.loops[k].y);
  }
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(h1.a[i], h2.a[i]);
    EXPECT_EQ(h1.b[i], h2.b[i]);
  }
}

class PeriodsOnCurve : public ::testing::TestWithParam<std::vector<cplx>> {};

TEST_P(PeriodsOnCurve, RiemannMatrixProperties) {
  const auto c = validate_curve(GetParam());
  const auto hb = build_homology_basis(c);
  const auto pd = period_matrix(c, hb);
  const auto d = check_periods(c, hb, pd);
  EXPECT_LT(d.symmetry, 1e-8);
  EXPECT_GT(d.min_im_eigenvalue, 0.0);
  EXPECT_LT(d.normalization, 1e-8);
}

TEST_P(PeriodsOnCurve, ToleranceStable) {
  const auto c = validate_curve(GetParam());
  const auto hb = build_homology_basis(c);
  const auto p1 = period_matrix(c, hb, 1e-10);
  const auto p2 = period_matrix(c, hb, 1e-13);
  EXPECT_LT((p1.riemann - p2.riemann).cwiseAbs().maxCoeff(), 1e-6);
}

TEST_P(PeriodsOnCurve, AlternateBasisIsCanonical) {
  const auto c = validate_curve(GetParam());
  const auto hb = alternate_basis(c);
  EXPECT_TRUE(is_canonical(hb));
  const auto pd = period_matrix(c, hb);
  const auto d = check_periods(c, hb, pd);
  EXPECT_LT(d.symmetry, 1e-8);
  EXPECT_GT(d.min_im_eigenvalue, 0.0);
}

INSTANTIATE_TEST_SUITE_P(TestCurves, PeriodsOnCurve, ::testing::Values(quintic(), sextic()));
