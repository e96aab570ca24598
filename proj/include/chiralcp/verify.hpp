#pragma once

#include <string>
#include <vector>

#include "chiralcp/scan.hpp"

namespace chiralcp {

/// Outcome of one verification claim.
struct ClaimResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Names of all registered claims, in run order:
///   table1, eq5, phase-formula, single-profile, order-cp5, order-cp9,
///   fig4-ordering, fig5-ordering, optimizer-eq15
std::vector<std::string> claim_names();

/// Run the named claims (throws on an unknown name). jobs <= 0 uses the
/// OpenMP default.
std::vector<ClaimResult> run_claims(const std::vector<std::string>& names,
                                    int jobs = 0);

}  // namespace chiralcp
