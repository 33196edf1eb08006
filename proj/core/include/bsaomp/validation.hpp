#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bsaomp {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick self-checks of the model identities and estimator contracts on small
/// random instances. Used by `bsaomp validate`.
std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed);

}  // namespace bsaomp
