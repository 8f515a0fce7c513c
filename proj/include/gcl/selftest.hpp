#pragma once

#include <ostream>

namespace gcl {

// Fast built-in sanity checks (gradients, samplers, augmentation invariants,
// one optimizer step). Prints one line per check; returns false if any fails.
bool run_selftest(std::ostream& out);

}  // namespace gcl
