#pragma once

namespace isc {

/// Thread budget for the OpenMP kernels: ISC_CALIB_THREADS when set to a
/// positive integer, otherwise the OpenMP default.
int thread_count();

}  // namespace isc
