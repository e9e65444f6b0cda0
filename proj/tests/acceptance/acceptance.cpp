#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>

#include "conic/acceptance.hpp"

using namespace conic;

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one line per criterion"};
  SuiteOptions opt;
  opt.quick = false;
  opt.c2_budget = 1000000;
  std::vector<int> which = all_criteria();
  bool quick = false;
  app.add_flag("--quick", quick, "smaller C2 budget");
  app.add_option("--budget", opt.c2_budget, "C2 quadrature node budget");
  app.add_option("--seed", opt.seed, "seed");
  app.add_option("--workers", opt.workers, "worker threads");
  app.add_option("criteria", which, "criteria to run (default all)");
  CLI11_PARSE(app, argc, argv);
  if (quick) {
    opt.quick = true;
    opt.c2_budget = std::min<std::size_t>(opt.c2_budget, 250000);
  }
  if (const char* cache = std::getenv("CONIC_SPECTRA_CACHE")) opt.cache_dir = cache;

  int failed = 0;
  for (int id : which) {
    const auto r = run_criterion(id, opt);
    failed += !r.pass;
    std::printf("criterion %d %-42s %s (%.1f s)\n", r.id, r.title.c_str(), r.pass ? "PASS" : "FAIL", r.wall_time);
    for (const auto& c : r.checks)
      if (!c.pass)
        std::printf("    failed %s: %.6g %s %.6g\n", c.name.c_str(), c.value, c.relation.c_str(), c.tolerance);
    if (r.detail.contains("error")) std::printf("    %s\n", r.detail["error"].get<std::string>().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", which.size(), failed);
  return failed ? 1 : 0;
}
