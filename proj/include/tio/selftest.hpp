#pragma once

#include <iosfwd>

namespace tio {

// Runs the built-in oracle suite (kernels vs reference loops, geometry
// round-trips, gradient checks, matched-filter sweep, evaluator cases) and
// prints one line per check. Returns the number of failed checks.
int run_selftest(std::ostream& out);

}  // namespace tio
