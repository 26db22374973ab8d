#include "isc/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace isc {

int thread_count() {
  if (const char* env = std::getenv("ISC_CALIB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace isc
