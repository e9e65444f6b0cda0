#include "conic/jobs.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conic/acceptance.hpp"
#include "conic/harmonic.hpp"
#include "conic/integrals.hpp"
#include "conic/lattice.hpp"
#include "conic/smatrix.hpp"

namespace conic {

namespace {

std::string hexfloat(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

struct Settings {
  std::uint64_t seed = 0;
  std::size_t budget = 250000;
  bool budget_given = false;
  int workers = 1;
  double scale = 1.0;  // multiplies every check tolerance
  double quadrature = 1e-13;
  double rank_threshold = 1e-6;
  Tolerances tol;
  std::string cache_dir;
};

Settings settings(const ConfigNode& cfg, const JobOptions& opt) {
  Settings s;
  s.seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(cfg.integer_or("seed", 0));
  s.budget_given = opt.budget || cfg.has("budget");
  if (opt.budget) {
    s.budget = *opt.budget;
  } else if (cfg.has("budget")) {
    const auto b = cfg.at("budget").integer();
    if (b <= 0) cfg.at("budget").fail("must be > 0");
    s.budget = static_cast<std::size_t>(b);
  }
  s.workers = opt.workers ? *opt.workers : static_cast<int>(cfg.integer_or("workers", 1));
  if (s.workers < 1) throw Error(ErrorKind::ConfigInvalid, "at /workers: must be >= 1");
  s.scale = opt.tolerance_scale;
  if (!(s.scale > 0.0)) throw Error(ErrorKind::ConfigInvalid, "--tolerance-scale must be > 0");
  if (cfg.has("tolerances")) {
    const auto t = cfg.at("tolerances");
    t.only({"period", "root", "root_separation", "max_condition", "quadrature", "rank_threshold"});
    s.tol.period = t.positive_or("period", s.tol.period);
    s.tol.root = t.positive_or("root", s.tol.root);
    s.tol.root_separation = t.positive_or("root_separation", s.tol.root_separation);
    s.tol.max_condition = t.positive_or("max_condition", s.tol.max_condition);
    s.quadrature = t.positive_or("quadrature", s.quadrature);
    s.rank_threshold = t.positive_or("rank_threshold", s.rank_threshold);
  }
  s.cache_dir = opt.cache_dir;
  return s;
}

json settings_json(const Settings& s) {
  return json{{"seed", s.seed},
              {"budget", s.budget},
              {"workers", s.workers},
              {"tolerance_scale", s.scale},
              {"tolerances",
               {{"period", s.tol.period},
                {"root", s.tol.root},
                {"root_separation", s.tol.root_separation},
                {"max_condition", s.tol.max_condition},
                {"quadrature", s.quadrature},
                {"rank_threshold", s.rank_threshold}}}};
}

HyperellipticCurve read_curve(const ConfigNode& cfg, const Settings& s) {
  const auto node = cfg.at("curve");
  node.only({"f"});
  const auto f = node.at("f");
  const auto coeffs = f.complex_list();
  try {
    return validate_curve(coeffs, s.tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegreeTooLow || e.kind() == ErrorKind::RepeatedRoot || e.kind() == ErrorKind::InvalidArgument)
      f.fail(e.what());
    throw;
  }
}

SurfacePoint read_point(const HyperellipticCurve& c, const ConfigNode& p) {
  p.only({"x", "y", "sheet", "branch", "infinity"});
  if (p.has("branch")) {
    const auto idx = p.at("branch").integer();
    if (idx < 0 || idx >= static_cast<std::int64_t>(c.branch_points().size())) p.at("branch").fail("no such branch point");
    return branch_point(c, static_cast<int>(idx));
  }
  const auto sheet = p.integer_or("sheet", 1);
  if (sheet != 1 && sheet != -1) p.at("sheet").fail("sheet must be 1 or -1");
  if (p.boolean_or("infinity", false)) return infinity_point(c, static_cast<int>(sheet));
  const cplx x = p.at("x").complex();
  if (p.has("y")) return make_point(c, x, p.at("y").complex());
  try {
    return point_on_sheet(c, x, static_cast<int>(sheet));
  } catch (const Error& e) {
    p.at("x").fail(e.what());
  }
}

json point_json(const SurfacePoint& p) {
  if (p.at_infinity) return json{{"infinity", true}, {"sheet", p.sheet}};
  json j{{"x", to_json(p.x)}, {"y", to_json(p.y)}};
  if (p.is_branch()) j["branch"] = p.branch_index;
  return j;
}

std::vector<SurfacePoint> read_points(const HyperellipticCurve& c, const ConfigNode& list) {
  std::vector<SurfacePoint> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(read_point(c, list.at(i)));
  return out;
}

ConicalDivisor read_divisor(const HyperellipticCurve& c, const ConfigNode& cfg) {
  if (cfg.has("omega")) {
    const auto node = cfg.at("omega");
    const auto omega = node.complex_list();
    if (static_cast<int>(omega.size()) != c.genus()) node.fail("needs genus = " + std::to_string(c.genus()) + " coefficients");
    try {
      return divisor_from_omega(c, omega);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotASimpleZero || e.kind() == ErrorKind::CoincidentPoints) node.fail(e.what());
      throw;
    }
  }
  const auto pts_node = cfg.at("points");
  const auto pts = read_points(c, pts_node);
  std::vector<FrameJet> frames;
  if (cfg.has("frames")) {
    const auto fr = cfg.at("frames");
    if (fr.size() != pts.size()) fr.fail("one frame per point");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto f = fr.at(i);
      if (f.raw().is_null()) {
        frames.push_back(chart_frame(c, pts[i]));
        continue;
      }
      f.only({"a1", "a2", "a3"});
      const cplx a1 = f.at("a1").complex();
      if (a1 == 0.0) f.at("a1").fail("must be nonzero");
      frames.push_back(user_frame(c, pts[i], a1, f.has("a2") ? f.at("a2").complex() : 0.0,
                                  f.has("a3") ? f.at("a3").complex() : 0.0));
    }
  }
  try {
    return divisor_with_frames(c, pts, frames);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::CoincidentPoints) pts_node.fail(e.what());
    throw;
  }
}

json divisor_json(const ConicalDivisor& d) {
  json pts = json::array();
  for (const auto& p : d.points) pts.push_back(point_json(p));
  json frames = json::array();
  for (const auto& f : d.frames)
    frames.push_back({{"chart", std::string(to_string(f.chart))},
                      {"distinguished", f.distinguished},
                      {"jet", json::array({to_json(f.jet(1)), to_json(f.jet(2)), to_json(f.jet(3))})}});
  json j{{"holonomy", d.holonomy == Holonomy::Trivial ? "trivial" : "external"}, {"points", pts}, {"frames", frames}};
  if (!d.omega.empty()) j["omega"] = to_json(d.omega);
  return j;
}

struct Job {
  json results = json::object();
  std::vector<Check> checks;
  std::string csv;
  std::string cache = "off";
};

KernelContext context_for(const HyperellipticCurve& c, const Settings& s, Job& job,
                          const HomologyBasis* basis = nullptr) {
  bool hit = false;
  auto ctx = cached_kernel_context(c, basis ? *basis : build_homology_basis(c), s.quadrature, s.seed, s.cache_dir, &hit);
  job.cache = s.cache_dir.empty() ? "off" : (hit ? "hit" : "miss");
  return ctx;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Job job_periods(const ConfigNode& cfg, const Settings& s) {
  Job job;
  const auto c = read_curve(cfg, s);
  const auto basis = build_homology_basis(c);
  const auto ctx = context_for(c, s, job, &basis);
  const auto& pd = ctx.periods;
  const auto d = check_periods(c, basis, pd, s.quadrature);
  job.results = {{"genus", c.genus()},
                 {"branch_points", to_json(c.branch_points())},
                 {"A", to_json(pd.A)},
                 {"B_periods", to_json(pd.Bm)},
                 {"riemann_matrix", to_json(pd.riemann)},
                 {"quadrature_error", pd.error},
                 {"condition", pd.condition},
                 {"symmetry_defect", d.symmetry},
                 {"min_im_eigenvalue", d.min_im_eigenvalue},
                 {"normalization_defect", d.normalization}};
  job.checks.push_back(check_le("riemann_symmetric", d.symmetry, 1e-8 * s.scale));
  job.checks.push_back(check_ge("im_riemann_positive", d.min_im_eigenvalue, 0.0));
  job.checks.push_back(check_le("a_normalization", d.normalization, 1e-8 * s.scale));
  return job;
}

Job job_kernels(const ConfigNode& cfg, const Settings& s) {
  Job job;
  const auto c = read_curve(cfg, s);
  const auto ctx = context_for(c, s, job);
  std::vector<std::pair<SurfacePoint, SurfacePoint>> pairs;
  if (cfg.has("pairs")) {
    const auto node = cfg.at("pairs");
    for (std::size_t i = 0; i < node.size(); ++i) {
      const auto pair = node.at(i);
      if (pair.size() != 2) pair.fail("a pair has two points");
      pairs.emplace_back(read_point(c, pair.at(0)), read_point(c, pair.at(1)));
    }
  } else {
    pairs.emplace_back(point_on_sheet(c, cplx(0.3, 0.2), 1), point_on_sheet(c, cplx(-0.4, 0.7), -1));
  }
  const auto probe = cfg.has("probe") ? read_point(c, cfg.at("probe")) : point_on_sheet(c, cplx(0.23, 0.41), -1);

  json rows = json::array();
  for (const auto& [p, q] : pairs) {
    const auto fp = chart_frame(c, p), fq = chart_frame(c, q);
    const auto sb = bergman_proj_connection(ctx, fp);
    const auto ss = schiffer_proj_connection(ctx, fp);
    rows.push_back({{"P", point_json(p)},
                    {"Q", point_json(q)},
                    {"chart_P", std::string(to_string(fp.chart))},
                    {"chart_Q", std::string(to_string(fq.chart))},
                    {"W", to_json(W_frame(ctx, fp, fq))},
                    {"bergman", to_json(bergman_kernel(ctx, fp, fq))},
                    {"schiffer", to_json(schiffer_kernel(ctx, fp, fq))},
                    {"v_P", to_json(v_frame(ctx, fp))},
                    {"S_B_P", to_json(sb.value)},
                    {"S_B_P_error", sb.error},
                    {"S_Sch_P", to_json(ss.value)},
                    {"S_Sch_P_error", ss.error}});
  }
  const auto w = check_W(ctx, probe);
  job.results["pairs"] = rows;
  job.results["probe"] = point_json(probe);
  job.results["a_period_defect"] = w.a_period;
  job.results["b_period_defect"] = w.b_period;
  job.results["symmetry_defect"] = w.symmetry;
  job.results["normalization_asymmetry"] = w.correction_asymmetry;
  job.checks.push_back(check_le("W_a_periods", w.a_period, 1e-6 * s.scale));
  job.checks.push_back(check_le("W_b_periods_relative", w.b_period, 1e-5 * s.scale));
  job.checks.push_back(check_le("W_symmetry", w.symmetry, 1e-8 * s.scale));
  return job;
}

json bergman_json(const BergmanMatrix& bm, const CanonicalVerdict& v) {
  return json{{"matrix", to_json(bm.matrix)},
              {"singular_values", std::vector<double>(bm.singular_values.data(),
                                                      bm.singular_values.data() + bm.singular_values.size())},
              {"rank", bm.rank},
              {"hermitian_defect", bm.hermitian_defect},
              {"canonical", v.canonical},
              {"margin", v.margin},
              {"threshold", v.threshold}};
}

Job job_smatrix(const ConfigNode& cfg, const Settings& s) {
  Job job;
  const auto c = read_curve(cfg, s);
  const auto ctx = context_for(c, s, job);
  const auto d = read_divisor(c, cfg);
  const auto sz = s_zero(ctx, d);
  const auto bm = bergman_matrix(ctx, d, s.rank_threshold);
  const auto v = canonical_divisor_test(bm, c.genus(), s.rank_threshold);
  const double scale = std::max(max_abs(sz.S_aa), max_abs(sz.S_ah));
  job.results["divisor"] = divisor_json(d);
  job.results["S_aa"] = to_json(sz.S_aa);
  job.results["S_ah"] = to_json(sz.S_ah);
  job.results["S_aa_diagonal_error"] = std::vector<double>(sz.diagonal_error.data(), sz.diagonal_error.data() + sz.diagonal_error.size());
  job.results["T0"] = to_json(sz.T());
  job.results["bergman"] = bergman_json(bm, v);
  const double sym = max_abs(sz.S_aa - sz.S_aa.transpose()), herm = max_abs(sz.S_ah - sz.S_ah.adjoint());
  job.results["S_aa_symmetry_defect"] = sym;
  job.results["S_ah_hermitian_defect"] = herm;
  job.checks.push_back(check_le("S_aa_symmetric", sym, 1e-10 * s.scale * std::max(1.0, scale)));
  job.checks.push_back(check_le("S_ah_hermitian", herm, 1e-8 * s.scale * std::max(1.0, scale)));
  if (d.holonomy == Holonomy::Trivial) job.checks.push_back(check_true("omega_divisor_canonical", v.canonical));
  return job;
}

Job job_canonical(const ConfigNode& cfg, const Settings& s) {
  Job job;
  const auto c = read_curve(cfg, s);
  const auto ctx = context_for(c, s, job);
  const auto pts_node = cfg.at("points");
  const auto pts = read_points(c, pts_node);
  ConicalDivisor d;
  try {
    d = divisor_with_frames(c, pts);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::CoincidentPoints) pts_node.fail(e.what());
    throw;
  }
  const auto bm = bergman_matrix(ctx, d, s.rank_threshold);
  const auto v = canonical_divisor_test(bm, c.genus(), s.rank_threshold);
  job.results["divisor"] = divisor_json(d);
  job.results["bergman"] = bergman_json(bm, v);
  job.results["special_divisor_det"] = c.genus() == static_cast<int>(d.frames.size())
                                           ? to_json(special_divisor_det(ctx, d.frames))
                                           : json(nullptr);
  if (c.genus() == 2) {
    const bool oracle = genus2_canonical_oracle(c, pts[0], pts[1]);
    job.results["oracle"] = oracle;
    job.checks.push_back(check_true("agrees_with_fiber_oracle", oracle == v.canonical));
  }
  if (cfg.has("expect_canonical"))
    job.checks.push_back(check_true("expected_verdict", cfg.at("expect_canonical").boolean() == v.canonical));
  return job;
}

Job job_harmonic(const ConfigNode& cfg, const Settings& s) {
  Job job;
  const auto c = read_curve(cfg, s);
  const auto ctx = context_for(c, s, job);
  const auto d = read_divisor(c, cfg);
  const double r = cfg.positive_or("fit_radius", 1e-2);
  const auto cc = prop1_crosscheck(ctx, d, r);
  json rows = json::array();
  bool all = true;
  double worst = 0.0;
  for (const auto& e : cc.entries) {
    const double tol = e.tolerance * s.scale;
    const bool pass = e.abs_diff <= tol;
    all = all && pass;
    worst = std::max(worst, e.abs_diff / tol);
    rows.push_back({{"k", e.k + 1},
                    {"j", e.j + 1},
                    {"quantity", e.quantity},
                    {"kernel", to_json(e.kernel)},
                    {"fitted", to_json(e.fitted)},
                    {"abs_diff", e.abs_diff},
                    {"rel_diff", e.rel_diff},
                    {"tolerance", tol},
                    {"pass", pass}});
  }
  json fits = json::array();
  for (const auto& f : cc.fits)
    fits.push_back({{"j", f.j + 1}, {"pole_ratio_min", f.pole_ratio_min}, {"pole_ratio_max", f.pole_ratio_max}, {"closure", f.closure}});
  job.results["divisor"] = divisor_json(d);
  job.results["fit_radius"] = r;
  job.results["scale"] = cc.scale;
  job.results["max_real_period"] = cc.max_real_period;
  job.results["table"] = rows;
  job.results["fits"] = fits;
  job.results["conventions"] = {{"b", "b_kj = -Schiffer(P_k, P_j), b_kk = -S_Sch(xi_k)/6"}, {"c", "c_kj = -pi Bergman(P_k, P_j)"}};
  job.checks.push_back(check_le("worst_diff_over_tolerance", worst, 1.0));
  job.checks.push_back(check_true("all_entries_pass", all));
  return job;
}

Job job_c2(const ConfigNode& cfg, const Settings& s) {
  Job job;
  const auto c = read_curve(cfg, s);
  const auto ctx = context_for(c, s, job);
  const auto node = cfg.at("omega");
  const auto omega = node.complex_list();
  if (static_cast<int>(omega.size()) != c.genus()) node.fail("needs genus = " + std::to_string(c.genus()) + " coefficients");
  const auto r = universal_C2(ctx, omega, s.budget, s.workers);
  const double tnorm = max_abs(r.Tprime);
  job.results["C2"] = to_json(r.C2);
  job.results["err"] = r.error;
  job.results["detT0"] = to_json(r.detT0);
  job.results["detT0_relative"] = r.detT0_relative;
  job.results["T"] = to_json(r.T);
  job.results["Tprime"] = to_json(r.Tprime);
  job.results["Tprime_err"] = r.Tprime_error;
  job.results["Tprime_hermitian_defect"] = r.hermitian_defect;
  job.results["Tprime_min_eigenvalue"] = r.min_eigenvalue;
  job.results["area"] = r.area;
  job.results["area_err"] = r.area_error;
  job.results["max_mean_residual"] = r.max_mean_residual;
  job.results["holomorphic_gram_err"] = r.gram_error;
  job.results["level"] = r.level;
  job.results["nodes"] = r.nodes;
  job.results["divisor"] = divisor_json(r.divisor);
  job.results["conventions"] = {{"Tprime", "int calH_k conj(calH_j) dS"}, {"N3_bar_on", "H_k"}, {"lemma_bar_on", "none"}};
  job.checks.push_back(check_le("calH_mean_free", r.max_mean_residual, 1e-4 * s.scale));
  job.checks.push_back(check_le("Tprime_hermitian", r.hermitian_defect / tnorm, 1e-3 * s.scale));
  job.checks.push_back(check_ge("Tprime_psd", r.min_eigenvalue / tnorm, -1e-3 * s.scale));
  job.checks.push_back(check_le("detT0_relative", r.detT0_relative, 1e-6 * s.scale));
  return job;
}

Job job_lattice(const ConfigNode& cfg, const Settings& s) {
  Job job;
  SquareTiledSurface surf;
  if (cfg.has("h") || cfg.has("v")) {
    const auto squares = cfg.at("squares");
    const auto n = squares.integer();
    if (n < 1) squares.fail("must be >= 1");
    std::vector<int> h, v;
    try {
      h = parse_permutation(cfg.at("h").string(), static_cast<int>(n));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) cfg.at("h").fail(e.what());
      throw;
    }
    try {
      v = parse_permutation(cfg.at("v").string(), static_cast<int>(n));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) cfg.at("v").fail(e.what());
      throw;
    }
    surf = build_surface(h, v);
  } else {
    surf = genus2_origami();
  }
  std::vector<int> res = {8, 16, 32};
  if (cfg.has("resolutions")) {
    res = cfg.at("resolutions").int_list();
    if (res.size() < 3) cfg.at("resolutions").fail("needs at least three resolutions");
    for (std::size_t i = 0; i < res.size(); ++i)
      if (res[i] < 4) cfg.at("resolutions").at(i).fail("must be >= 4");
  }
  const int m = static_cast<int>(cfg.integer_or("eigenvalues", 5));
  if (m < 1) cfg.at("eigenvalues").fail("must be >= 1");
  const double ratio_lo = cfg.number_or("ratio_min", 2.0), ratio_hi = cfg.number_or("ratio_max", 6.0);

  const auto st = convergence_study(surf, res, m);
  json cones = json::array();
  for (const auto& c : surf.cones) cones.push_back({{"vertex_class", c.vertex_class}, {"corners", c.corners}, {"angle", c.angle}});
  job.results["surface"] = {{"squares", surf.N},
                            {"h", permutation_cycles(surf.h)},
                            {"v", permutation_cycles(surf.v)},
                            {"vertices", surf.vertices},
                            {"edges", surf.edges},
                            {"faces", surf.faces},
                            {"genus", surf.genus},
                            {"cones", cones},
                            {"angle_excess", surf.angle_excess},
                            {"gauss_bonnet_defect", surf.gauss_bonnet_defect}};
  job.checks.push_back(check_le("gauss_bonnet", surf.gauss_bonnet_defect, 1e-12 * s.scale));
  json levels = json::array();
  std::vector<std::vector<double>> csv_rows;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& sp = st.spectra[i];
    json sweep = json::array();
    for (const auto& k : sp.sweep) sweep.push_back({{"threshold", k.threshold}, {"ker_D", k.ker_D}, {"ker_Dstar", k.ker_Dstar}});
    const double lp_diff = std::abs(sp.log_product_DstarD - sp.log_product_DDstar);
    levels.push_back({{"n", res[i]},
                      {"cells", sp.cells},
                      {"vertices", sp.vertices},
                      {"norm_D_squared", sp.norm2},
                      {"kernel_threshold", sp.threshold},
                      {"ker_D", sp.ker_D},
                      {"ker_Dstar", sp.ker_Dstar},
                      {"index", sp.ker_Dstar - sp.ker_D},
                      {"cells_minus_vertices", sp.cells - sp.vertices},
                      {"continuum_index_1_minus_g", 1 - surf.genus},
                      {"threshold_sweep", sweep},
                      {"nonzero_count_DstarD", sp.nonzero_DstarD.size()},
                      {"nonzero_count_DDstar", sp.nonzero_DDstar.size()},
                      {"max_relative_mismatch", sp.max_relative_mismatch},
                      {"log_product_DstarD", sp.log_product_DstarD},
                      {"log_product_DDstar", sp.log_product_DDstar},
                      {"log_product_diff", lp_diff}});
    const std::string tag = "n" + std::to_string(res[i]) + "_";
    job.checks.push_back(check_true(tag + "same_nonzero_count", sp.same_count));
    job.checks.push_back(check_le(tag + "isospectral_relative", sp.max_relative_mismatch, 1e-10 * s.scale));
    job.checks.push_back(check_le(tag + "log_product_relative", lp_diff / std::abs(sp.log_product_DstarD), 1e-9 * s.scale));
    job.checks.push_back(check_true(tag + "rank_nullity", sp.index_defect() == 0));
    for (std::size_t k = 0; k < std::max(sp.DstarD.size(), sp.DDstar.size()); ++k)
      csv_rows.push_back({static_cast<double>(res[i]), static_cast<double>(k),
                          k < sp.DstarD.size() ? sp.DstarD[k] : std::nan(""),
                          k < sp.DDstar.size() ? sp.DDstar[k] : std::nan("")});
  }
  json rows = json::array();
  for (const auto& r : st.rows) {
    rows.push_back({{"index", r.index},
                    {"four_lambda", r.values},
                    {"limit", r.limit},
                    {"limit_err", r.error},
                    {"ratio", r.ratio},
                    {"order", r.order},
                    {"monotone", r.monotone}});
    job.checks.push_back(check_ge("ratio_lower_" + std::to_string(r.index), r.ratio, ratio_lo / s.scale));
    job.checks.push_back(check_le("ratio_upper_" + std::to_string(r.index), r.ratio, ratio_hi * s.scale));
  }
  job.results["levels"] = levels;
  job.results["convergence"] = rows;
  job.csv = to_csv({"n", "k", "eig_DstarD", "eig_DDstar"}, csv_rows);
  return job;
}

Job job_suite(const ConfigNode& cfg, const Settings& s) {
  Job job;
  SuiteOptions so;
  so.quick = cfg.string_or("suite", "quick") == "quick";
  if (cfg.has("suite") && !so.quick && cfg.at("suite").string() != "full") cfg.at("suite").fail("expected \"quick\" or \"full\"");
  so.seed = s.seed;
  so.c2_budget = so.quick || s.budget_given ? s.budget : 1000000;
  so.workers = s.workers;
  so.tolerance_scale = s.scale;
  so.cache_dir = s.cache_dir;
  std::vector<int> which = all_criteria();
  if (cfg.has("criteria")) {
    which = cfg.at("criteria").int_list();
    for (std::size_t i = 0; i < which.size(); ++i)
      if (which[i] < 1 || which[i] > 9) cfg.at("criteria").at(i).fail("criteria are numbered 1..9");
  }
  json rows = json::array();
  for (int id : which) {
    const auto r = run_criterion(id, so);
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    rows.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"checks", checks}, {"detail", r.detail}});
    job.checks.push_back(check_true("criterion_" + std::to_string(r.id), r.pass));
  }
  job.results["mode"] = so.quick ? "quick" : "full";
  job.results["criteria"] = rows;
  return job;
}

}  // namespace

std::string period_cache_key(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance) {
  std::ostringstream os;
  os << "v1";
  for (const auto& z : c.coefficients()) os << ' ' << hexfloat(z.real()) << ' ' << hexfloat(z.imag());
  const auto& t = c.tolerances();
  os << " tol " << hexfloat(t.period) << ' ' << hexfloat(t.root) << ' ' << hexfloat(t.root_separation) << ' '
     << hexfloat(t.max_condition) << " quad " << hexfloat(tolerance) << " loops " << hexfloat(basis.options.width) << ' '
     << hexfloat(basis.options.phase) << ' ' << basis.options.vertices;
  return fnv1a_hex(os.str());
}

KernelContext cached_kernel_context(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance,
                                    std::uint64_t seed, const std::string& cache_dir, bool* hit) {
  if (hit) *hit = false;
  if (cache_dir.empty()) return make_kernel_context(c, basis, tolerance, seed);
  namespace fs = std::filesystem;
  const fs::path file = fs::path(cache_dir) / ("periods-" + period_cache_key(c, basis, tolerance) + ".json");
  KernelContext ctx;
  ctx.curve = c;
  ctx.basis = basis;
  ctx.quadrature_tolerance = tolerance;
  bool loaded = false;
  if (fs::exists(file)) {
    try {
      std::ifstream in(file);
      const auto j = json::parse(in);
      const auto& loops = j.at("loop_periods");
      const auto g = c.genus();
      PeriodData pd;
      pd.loop_periods.resize(static_cast<Eigen::Index>(loops.size()), g);
      for (std::size_t k = 0; k < loops.size(); ++k)
        for (int i = 0; i < g; ++i)
          pd.loop_periods(static_cast<Eigen::Index>(k), i) =
              cplx(std::strtod(loops[k][i][0].get<std::string>().c_str(), nullptr),
                   std::strtod(loops[k][i][1].get<std::string>().c_str(), nullptr));
      pd.error = std::strtod(j.at("error").get<std::string>().c_str(), nullptr);
      if (pd.loop_periods.rows() == static_cast<Eigen::Index>(basis.loops.size())) {
        finish_periods(c, basis, pd);
        ctx.periods = pd;
        loaded = true;
      }
    } catch (const json::exception&) {
      loaded = false;  // unreadable entry: recompute and overwrite
    }
  }
  if (!loaded) {
    ctx.periods = period_matrix(c, basis, tolerance);
    json loops = json::array();
    for (Eigen::Index k = 0; k < ctx.periods.loop_periods.rows(); ++k) {
      json row = json::array();
      for (Eigen::Index i = 0; i < ctx.periods.loop_periods.cols(); ++i)
        row.push_back({hexfloat(ctx.periods.loop_periods(k, i).real()), hexfloat(ctx.periods.loop_periods(k, i).imag())});
      loops.push_back(row);
    }
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    const fs::path tmp = file.string() + ".tmp";
    std::ofstream(tmp) << json{{"loop_periods", loops}, {"error", hexfloat(ctx.periods.error)}}.dump();
    fs::rename(tmp, file, ec);
  }
  if (hit) *hit = loaded;
  normalize_W(ctx, seed);
  return ctx;
}

JobOutput run_job(const json& config, const JobOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const ConfigNode cfg(config);
  const std::string command = cfg.at("command").string();
  const Settings s = settings(cfg, opt);
  Job job;
  if (command == "periods") {
    cfg.only({"command", "curve", "tolerances", "seed", "budget", "workers", "output"});
    job = job_periods(cfg, s);
  } else if (command == "kernels") {
    cfg.only({"command", "curve", "pairs", "probe", "tolerances", "seed", "budget", "workers", "output"});
    job = job_kernels(cfg, s);
  } else if (command == "smatrix") {
    cfg.only({"command", "curve", "omega", "points", "frames", "tolerances", "seed", "budget", "workers", "output"});
    job = job_smatrix(cfg, s);
  } else if (command == "canonical-test") {
    cfg.only({"command", "curve", "points", "expect_canonical", "tolerances", "seed", "budget", "workers", "output"});
    job = job_canonical(cfg, s);
  } else if (command == "harmonic-check") {
    cfg.only({"command", "curve", "omega", "points", "frames", "fit_radius", "tolerances", "seed", "budget", "workers",
              "output"});
    job = job_harmonic(cfg, s);
  } else if (command == "c2") {
    cfg.only({"command", "curve", "omega", "tolerances", "seed", "budget", "workers", "output"});
    job = job_c2(cfg, s);
  } else if (command == "lattice") {
    cfg.only({"command", "h", "v", "squares", "resolutions", "eigenvalues", "ratio_min", "ratio_max", "seed", "budget",
              "workers", "output"});
    job = job_lattice(cfg, s);
  } else if (command == "suite") {
    cfg.only({"command", "suite", "criteria", "tolerances", "seed", "budget", "workers", "output"});
    job = job_suite(cfg, s);
  } else {
    cfg.at("command").fail("unknown command \"" + command + "\"");
  }

  JobOutput out;
  bool pass = true;
  json checks = json::array();
  for (const auto& c : job.checks) {
    pass = pass && c.pass;
    checks.push_back(to_json(c));
  }
  json inputs = config;
  inputs["resolved"] = settings_json(s);
  out.report.payload = json{{"command", command},
                            {"version", kVersion},
                            {"version_hash", kVersionHash},
                            {"inputs", inputs},
                            {"results", job.results},
                            {"checks", checks},
                            {"pass", pass}};
  out.report.pass = pass;
  out.report.period_cache = job.cache;
  out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.csv = std::move(job.csv);
  return out;
}

}  // namespace conic
