#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "conic/kernels.hpp"
#include "conic/report.hpp"

namespace conic {

inline constexpr const char* kVersion = CONIC_VERSION;
inline constexpr const char* kVersionHash = CONIC_GIT_HASH;

/// Command-line overrides; unset fields fall back to the config, then to defaults.
struct JobOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<int> workers;
  double tolerance_scale = 1.0;
  std::string cache_dir;  // CONIC_SPECTRA_CACHE
};

struct JobOutput {
  Report report;
  std::string csv;  // spectra mirror, lattice only
};

/// Validates `config` (ConfigInvalid names the field) and dispatches on "command".
JobOutput run_job(const json& config, const JobOptions& opt = {});

/// Kernel context whose raw loop periods come from `cache_dir` when present.
/// The key hashes the coefficients, tolerances, loop options and quadrature tolerance.
KernelContext cached_kernel_context(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance,
                                    std::uint64_t seed, const std::string& cache_dir, bool* hit = nullptr);
std::string period_cache_key(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance);

}  // namespace conic
