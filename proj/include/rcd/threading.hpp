#pragma once

namespace rcd {

// Worker count for the parallel kernels. REACH_CODESIGN_THREADS > 0 pins the
// count; unset or 0 means use the OpenMP default. Always >= 1. Serial builds
// (no OpenMP) return 1.
int max_threads();

}  // namespace rcd
