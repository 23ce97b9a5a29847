#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubeslice/densities.hpp"
#include "cubeslice/io.hpp"

namespace cubeslice {

struct SuiteOptions {
  std::uint64_t seed = 42;
  unsigned workers = 1;
  bool timing = true;  // include runtime_ms in reports
};

struct SuiteResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  json report;
};

SuiteResult suite_ball_integral(const SuiteOptions& opt);      // 1
SuiteResult suite_cube_sections(const SuiteOptions& opt);      // 2
SuiteResult suite_sharpness(const SuiteOptions& opt);          // 3
SuiteResult suite_main_theorem(const SuiteOptions& opt);       // 4
SuiteResult suite_box_bounds(const SuiteOptions& opt);         // 5
SuiteResult suite_rogozin(const SuiteOptions& opt);            // 6
SuiteResult suite_average(const SuiteOptions& opt);            // 7
SuiteResult suite_grinberg(const SuiteOptions& opt);           // 8
SuiteResult suite_brascamp_lieb(const SuiteOptions& opt);      // 9
SuiteResult suite_projection_lemma(const SuiteOptions& opt);   // 10
SuiteResult suite_small_ball(const SuiteOptions& opt);         // 11

using SuiteFn = SuiteResult (*)(const SuiteOptions&);

struct SuiteEntry {
  int criterion;
  const char* name;
  SuiteFn run;
};

/// Criteria 1 to 11 in order.
const std::vector<SuiteEntry>& suite_table();

/// Criterion 12: reruns every suite at worker counts 1 and `other_workers`
/// and compares the reports byte for byte (timing removed).
SuiteResult suite_determinism(const SuiteOptions& opt, unsigned other_workers = 8);

/// Random member of the unit class: normalized factors with sup norm <= 1.
ProductDensity random_unit_product(Rng& rng, int n, int max_pieces = 4);

struct VerifyConfig {
  int n = 4;
  int k = 2;
  int trials = 500;
  double tol = 1e-4;
  std::vector<ProductDensity> densities;  // cycled through when nonempty
};

/// Main-bound campaign on Haar subspaces: {params, seed, trials, records,
/// failures, max_slack[, runtime_ms]}.
SuiteResult verify_campaign(const VerifyConfig& cfg, const SuiteOptions& opt);

}  // namespace cubeslice
