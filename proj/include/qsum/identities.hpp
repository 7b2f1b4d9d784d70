#pragma once

#include <string>
#include <vector>

namespace qsum {

struct IdentityFamily {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> failed;  // first few failing instances
};

struct IdentityReport {
  std::vector<IdentityFamily> families;
  bool all_pass() const {
    for (const auto& f : families)
      if (f.failures) return false;
    return true;
  }
};

// Exact rational checks over q in {3/2, 2}:
//   Borel and Laplace monomial laws and the convolution law for m, n <= 12,
//   the base-change identity for [m]_{q^n} for m <= 6, n <= 4,
//   the operator identities on t^k for k <= 8, n <= 5.
IdentityReport run_identity_suite();

}  // namespace qsum
