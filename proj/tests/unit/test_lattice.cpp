#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "conic/lattice.hpp"

using namespace conic;

namespace {

// Cycle lengths of the commutator v^-1 h^-1 v h: one vertex per cycle, angle 2 pi k.
std::vector<int> commutator_cycles(const std::vector<int>& h, const std::vector<int>& v) {
  const int n = static_cast<int>(h.size());
  std::vector<int> hi(n), vi(n), c(n);
  for (int i = 0; i < n; ++i) hi[h[i]] = i, vi[v[i]] = i;
  for (int i = 0; i < n; ++i) c[i] = vi[hi[v[h[i]]]];
  std::vector<int> out;
  std::vector<char> seen(n, 0);
  for (int i = 0; i < n; ++i) {
    int len = 0;
    for (int j = i; !seen[j]; j = c[j]) seen[j] = 1, ++len;
    if (len) out.push_back(len);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> cone_multiplicities(const SquareTiledSurface& s) {
  std::vector<int> out(s.vertices, 1);
  for (const auto& c : s.cones) out[c.vertex_class] = c.corners / 4;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Lattice, ParsePermutation) {
  EXPECT_EQ(parse_permutation("(12)(34)", 4), (std::vector<int>{1, 0, 3, 2}));
  EXPECT_EQ(parse_permutation("(1 2)(3 4)", 4), (std::vector<int>{1, 0, 3, 2}));
  EXPECT_EQ(parse_permutation("(1,3,2)", 4), (std::vector<int>{2, 0, 1, 3}));
  EXPECT_EQ(parse_permutation("()", 3), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(permutation_cycles({2, 0, 1, 3}), "(1 3 2)");
  for (const char* bad : {"(12", "(15)", "(121)", "12", "(1a)"}) EXPECT_THROW(parse_permutation(bad, 4), Error) << bad;
}

TEST(Lattice, TorusExampleMatchesEuler) {
  const auto s = build_surface("(12)(34)", "(13)(24)", 4);
  const auto cyc = commutator_cycles(s.h, s.v);
  EXPECT_EQ(s.vertices, static_cast<int>(cyc.size()));
  EXPECT_EQ(s.genus, (2 - (static_cast<int>(cyc.size()) - 2 * 4 + 4)) / 2);
  EXPECT_EQ(s.genus, 1);
  EXPECT_TRUE(s.cones.empty());
  EXPECT_LT(s.gauss_bonnet_defect, 1e-12);
}

TEST(Lattice, Genus2Origami) {
  const auto s = genus2_origami();
  EXPECT_EQ(s.genus, 2);
  ASSERT_EQ(s.cones.size(), 2u);
  for (const auto& c : s.cones) EXPECT_NEAR(c.angle, 4.0 * kPi, 1e-12);
  EXPECT_EQ(commutator_cycles(s.h, s.v), (std::vector<int>{2, 2}));
}

TEST(Lattice, RandomSurfacesAgreeWithCommutator) {
  std::mt19937_64 rng(3);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + static_cast<int>(rng() % 6);
    std::vector<int> h(N), v(N);
    std::iota(h.begin(), h.end(), 0);
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(h.begin(), h.end(), rng);
    std::shuffle(v.begin(), v.end(), rng);
    SquareTiledSurface s;
    try {
      s = build_surface(h, v);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotConnected);
      continue;
    }
    ++tested;
    EXPECT_EQ(cone_multiplicities(s), commutator_cycles(h, v));
    EXPECT_LT(s.gauss_bonnet_defect, 1e-10);
  }
  EXPECT_GT(tested, 50);
}

TEST(Lattice, NotConnected) {
  try {
    build_surface("(12)", "(12)", 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotConnected);
  }
}

TEST(Lattice, AssembleShapeAndConstants) {
  const auto s = genus2_origami();
  for (int n : {4, 6, 8}) {
    const auto d = assemble_D(s, n);
    EXPECT_EQ(d.D.rows(), s.N * n * n);
    EXPECT_EQ(d.D.cols(), s.N * n * n + 2 - 2 * s.genus);
    const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(d.vertices);
    EXPECT_EQ((d.D * one).cwiseAbs().maxCoeff(), 0.0);
  }
  try {
    assemble_D(s, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResolutionTooLow);
  }
}

TEST(Lattice, StencilIsDz) {
  const auto s = genus2_origami();
  const int n = 8;
  const auto d = assemble_D(s, n);
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(d.vertices), zb = z;
  for (int b = 1; b < n; ++b)
    for (int a = 1; a < n; ++a) {
      const cplx p(a * d.h, b * d.h);
      z[d.vertex(1, a, b)] = p;
      zb[d.vertex(1, a, b)] = std::conj(p);
    }
  const Eigen::VectorXcd dz = d.D * z, dzb = d.D * zb;
  for (int b = 1; b + 1 < n; ++b)
    for (int a = 1; a + 1 < n; ++a) {
      EXPECT_NEAR(std::abs(dz[d.cell(1, a, b)] - 1.0), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(dzb[d.cell(1, a, b)]), 0.0, 1e-12);
    }
}

TEST(Lattice, CheckerboardInKernel) {
  const auto s = genus2_origami();
  const int n = 8;
  const auto d = assemble_D(s, n);
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d.vertices);
  for (int i = 0; i < s.N; ++i)
    for (int b = 0; b <= n; ++b)
      for (int a = 0; a <= n; ++a) u[d.vertex(i, a, b)] = (a + b) % 2 ? -1.0 : 1.0;
  EXPECT_EQ((d.D * u).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(u.real().minCoeff(), -1.0);
  EXPECT_EQ(u.real().maxCoeff(), 1.0);
}

TEST(Lattice, SpectraIsospectral) {
  const auto s = genus2_origami();
  const auto sp = spectra(assemble_D(s, 8));
  EXPECT_TRUE(sp.same_count);
  EXPECT_LT(sp.max_relative_mismatch, 1e-10);
  EXPECT_NEAR(sp.log_product_DstarD, sp.log_product_DDstar, 1e-9 * std::abs(sp.log_product_DstarD));
  EXPECT_EQ(sp.index_defect(), 0);
  EXPECT_EQ(sp.ker_D, 2);
  EXPECT_EQ(sp.ker_Dstar, sp.ker_D + 2 * s.genus - 2);
  EXPECT_LT(sp.DstarD.front(), 1e-10 * sp.norm2);
  for (const auto& k : sp.sweep) EXPECT_EQ(k.ker_D, sp.ker_D) << k.threshold;
}

TEST(Lattice, RelabelingKeepsSpectrum) {
  const auto s = genus2_origami();
  const auto r = relabeled(s, {2, 0, 3, 1});
  EXPECT_NE(r.h, s.h);
  const auto a = spectra(assemble_D(s, 8)), b = spectra(assemble_D(r, 8));
  ASSERT_EQ(a.nonzero_DstarD.size(), b.nonzero_DstarD.size());
  for (std::size_t i = 0; i < a.nonzero_DstarD.size(); ++i)
    EXPECT_NEAR(a.nonzero_DstarD[i], b.nonzero_DstarD[i], 1e-10 * a.nonzero_DstarD[i]);
}

TEST(Lattice, FlatTorusApproachesContinuum) {
  // 2 x 2 torus: lowest nonzero eigenvalue of the Laplacian is pi^2.
  const auto s = build_surface("(12)(34)", "(13)(24)", 4);
  const auto st = convergence_study(s, {4, 8, 16}, 1);
  const auto& row = st.rows[0];
  const double e8 = std::abs(row.values[1] - kPi * kPi), e16 = std::abs(row.values[2] - kPi * kPi);
  EXPECT_LT(e16, 0.05);
  EXPECT_LT(e16, e8);
  EXPECT_NEAR(row.limit, kPi * kPi, 0.2 * e16);
  EXPECT_GT(row.ratio, 3.0);
  EXPECT_LT(row.ratio, 5.0);
}
