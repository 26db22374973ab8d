#pragma once

#include <string>
#include <vector>

#include "isc/isc_optimizer.hpp"
#include "isc/synth_sim.hpp"

namespace isc {

struct ErrorRow {
  std::string device;  ///< "camera", "projector" or "extrinsics"
  std::string name;
  double truth = 0.0;
  double estimate = 0.0;
  double error = 0.0;  ///< percent, or degrees for the rotation row
  std::string unit;
};

/// Calibration error report: relative errors in percent, 100 (est - true) / true,
/// for the ten intrinsics, plus the rotation angle of R_est R_true^T (degrees)
/// and the relative translation error (percent of ||T_true||).
struct ErrorReport {
  std::vector<ErrorRow> rows;

  const ErrorRow& row(const std::string& device, const std::string& name) const;
  std::string format() const;
};

ErrorReport evaluate_against_truth(const CalibResult& result, const SceneTruth& truth);
/// Same report from the raw calibrated quantities.
ErrorReport evaluate_against_truth(const Intrinsics& k_c, const Decomposition& projector,
                                   const SceneTruth& truth);

}  // namespace isc
