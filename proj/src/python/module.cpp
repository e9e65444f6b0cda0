#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conic/integrals.hpp"
#include "conic/jobs.hpp"
#include "conic/lattice.hpp"
#include "conic/smatrix.hpp"

namespace py = pybind11;
using namespace conic;

namespace {

KernelContext context(const std::vector<cplx>& f) {
  const auto c = validate_curve(f);
  return make_kernel_context(c, build_homology_basis(c));
}

std::string run(const std::string& config, std::optional<std::uint64_t> seed, std::optional<std::size_t> budget,
                std::optional<int> workers, double tolerance_scale) {
  JobOptions opt;
  opt.seed = seed;
  opt.budget = budget;
  opt.workers = workers;
  opt.tolerance_scale = tolerance_scale;
  const auto out = run_job(parse_config(config, "config"), opt);
  return out.report.document().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral invariants of flat conical metrics on hyperelliptic curves";
  m.attr("__version__") = kVersion;
  m.attr("version_hash") = kVersionHash;

  py::register_exception<Error>(m, "ConicError", PyExc_RuntimeError);

  m.def("run_job", &run, py::arg("config"), py::arg("seed") = py::none(), py::arg("budget") = py::none(),
        py::arg("workers") = py::none(), py::arg("tolerance_scale") = 1.0,
        "Runs a JSON job and returns the JSON report.");

  m.def("riemann_matrix", [](const std::vector<cplx>& f) { return context(f).periods.riemann; }, py::arg("f"));

  m.def(
      "canonical_test",
      [](const std::vector<cplx>& f, const std::vector<std::pair<cplx, int>>& points) {
        const auto ctx = context(f);
        std::vector<SurfacePoint> pts;
        for (const auto& [x, sheet] : points) pts.push_back(point_on_sheet(ctx.curve, x, sheet));
        const auto v = canonical_divisor_test(bergman_matrix(ctx, divisor_with_frames(ctx.curve, pts)), ctx.curve.genus());
        return py::make_tuple(v.canonical, v.margin);
      },
      py::arg("f"), py::arg("points"));

  m.def(
      "universal_c2",
      [](const std::vector<cplx>& f, const std::vector<cplx>& omega, std::size_t budget, int workers) {
        const auto r = universal_C2(context(f), omega, budget, workers);
        return py::make_tuple(r.C2, r.error);
      },
      py::arg("f"), py::arg("omega"), py::arg("budget") = 250000, py::arg("workers") = 1);

  m.def(
      "lattice_spectra",
      [](const std::string& h, const std::string& v, int squares, int n) {
        const auto sp = spectra(assemble_D(build_surface(h, v, squares), n));
        py::dict out;
        out["DstarD"] = sp.DstarD;
        out["DDstar"] = sp.DDstar;
        out["ker_D"] = sp.ker_D;
        out["ker_Dstar"] = sp.ker_Dstar;
        out["max_relative_mismatch"] = sp.max_relative_mismatch;
        return out;
      },
      py::arg("h"), py::arg("v"), py::arg("squares"), py::arg("n"));
}
