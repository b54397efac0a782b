#include "rcd/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rcd {

int max_threads() {
  static const int resolved = [] {
    if (const char* env = std::getenv("REACH_CODESIGN_THREADS")) {
      try {
        int n = std::stoi(env);
        if (n > 0) return n;
      } catch (...) {
        // fall through to the default on unparsable values
      }
    }
#ifdef _OPENMP
    return omp_get_max_threads() > 0 ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
  }();
  return resolved;
}

}  // namespace rcd
