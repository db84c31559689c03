#pragma once
// Bundled acceptance suite: criteria 1-7 as a deterministic JSON report
// (no timings, so equal seeds give byte-identical output).

#include <cstdint>
#include <string>
#include <vector>

#include "omaxcones/serialize.hpp"

namespace omaxcones {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  io::Json details;
};

struct SelftestOptions {
  std::uint64_t seed = 0;
  bool quick = false;  // smaller sample counts, same checks
};

CriterionResult criterion_eb_ground_truth(const SelftestOptions& opt);
CriterionResult criterion_flat_adjoint(const SelftestOptions& opt);
CriterionResult criterion_duality(const SelftestOptions& opt);
CriterionResult criterion_diagonal_collapse(const SelftestOptions& opt);
CriterionResult criterion_norm_chain(const SelftestOptions& opt);
CriterionResult criterion_separable_soundness(const SelftestOptions& opt);
CriterionResult criterion_arch(const SelftestOptions& opt);

std::vector<CriterionResult> run_selftest(const SelftestOptions& opt);
io::Json selftest_report(const std::vector<CriterionResult>& results, const SelftestOptions& opt);

}  // namespace omaxcones
