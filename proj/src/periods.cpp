#include "conic/periods.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace conic {

Eigen::VectorXcd combine_loops(const Eigen::MatrixXcd& per_loop, const Eigen::VectorXi& cycle) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(per_loop.cols());
  for (int k = 0; k < cycle.size(); ++k)
    if (cycle[k] != 0) out += static_cast<double>(cycle[k]) * per_loop.row(k).transpose();
  return out;
}

PeriodData period_matrix(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance) {
  const int g = c.genus();
  PeriodData pd;
  pd.loop_periods.resize(basis.loops.size(), g);
  const auto integrand = raw_holomorphic_integrand(g);
  QuadratureOptions opt;
  opt.tolerance = tolerance;
  for (std::size_t k = 0; k < basis.loops.size(); ++k) {
    const auto r = integrate_path(c, basis.loops[k], integrand, g, opt);
    for (int j = 0; j < g; ++j) pd.loop_periods(k, j) = r.value[j];
    pd.error += r.error;
  }
  finish_periods(c, basis, pd);
  return pd;
}

void finish_periods(const HyperellipticCurve& c, const HomologyBasis& basis, PeriodData& pd) {
  const int g = c.genus();
  pd.A.resize(g, g);
  pd.Bm.resize(g, g);
  for (int i = 0; i < g; ++i) {
    pd.A.row(i) = combine_loops(pd.loop_periods, basis.a[i]).transpose();
    pd.Bm.row(i) = combine_loops(pd.loop_periods, basis.b[i]).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pd.A);
  const auto& s = svd.singularValues();
  pd.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(pd.condition <= c.tolerances().max_condition))
    throw Error(ErrorKind::SingularPeriodMatrix, "a-period matrix condition number " + std::to_string(pd.condition));
  pd.C = pd.A.inverse();
  pd.riemann = pd.Bm * pd.C;
  const Eigen::MatrixXd im = pd.riemann.imag();
  pd.im_inverse = (0.5 * (im + im.transpose())).inverse();
}

Eigen::VectorXcd v_numerators(const PeriodData& pd, cplx x) {
  const int g = static_cast<int>(pd.C.rows());
  Eigen::VectorXcd pw(g);
  cplx p = 1.0;
  for (int l = 0; l < g; ++l) {
    pw(l) = p;
    p *= x;
  }
  return pd.C.transpose() * pw;
}

Eigen::VectorXcd v_x(const PeriodData& pd, cplx x, cplx y) { return v_numerators(pd, x) / y; }

PeriodDiagnostics check_periods(const HyperellipticCurve& c, const HomologyBasis& basis, const PeriodData& pd,
                                double tolerance) {
  PeriodDiagnostics d;
  d.symmetry = (pd.riemann - pd.riemann.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (pd.riemann.imag() + pd.riemann.imag().transpose()));
  d.min_im_eigenvalue = es.eigenvalues().minCoeff();

  // Integrate the normalized v_j directly along every loop and recombine.
  const int g = c.genus();
  Integrand f = [&pd](cplx x, cplx y, std::span<cplx> out) {
    const auto v = v_x(pd, x, y);
    for (int j = 0; j < v.size(); ++j) out[j] = v(j);
  };
  QuadratureOptions opt;
  opt.tolerance = tolerance;
  Eigen::MatrixXcd per_loop(basis.loops.size(), g);
  for (std::size_t k = 0; k < basis.loops.size(); ++k) {
    const auto r = integrate_path(c, basis.loops[k], f, g, opt);
    for (int j = 0; j < g; ++j) per_loop(k, j) = r.value[j];
  }
  for (int i = 0; i < g; ++i) {
    const auto row = combine_loops(per_loop, basis.a[i]);
    for (int j = 0; j < g; ++j) d.normalization = std::max(d.normalization, std::abs(row(j) - (i == j ? 1.0 : 0.0)));
  }
  return d;
}

}  // namespace conic
