#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "isc/geom.hpp"
#include "isc/projector_dlt.hpp"

namespace isc {

/// One sphere as seen by the rig: its silhouette conic and the decoded
/// camera-pixel to projector-pixel correspondences on its surface.
struct SphereObservation {
  Conic conic;
  std::vector<Vec2> x_c;
  std::vector<Vec2> x_p;
  double radius = 1.0;
};

/// Two-sphere calibration problem. Immutable once built by make_problem.
struct IscProblem {
  std::array<SphereObservation, 2> obs;
  PolePolarPair constraint;
  double mu = 0.0;  ///< penalty weight on the squared pole-polar residual
  int cam_w = 0;
  int cam_h = 0;
  /// Evaluation order of the two observations. The objective is symmetric in
  /// the spheres, so both are processed in a canonical order derived from the
  /// conics; this makes swapped inputs bit-identical.
  std::array<int, 2> order{0, 1};

  size_t total_points() const { return obs[0].x_c.size() + obs[1].x_c.size(); }
};

inline constexpr double kPenaltyPerPoint = 1e4;
inline constexpr double kInfeasibleBarrier = 1e12;
inline constexpr size_t kMinCorrespondences = 10;

/// Validates and assembles a problem; computes (l, v) with a bootstrap camera
/// (focal = image width, centered principal point). `mu` defaults to
/// 1e4 (N1 + N2); 0 disables the constraint. Throws InvalidInput or the
/// constraint_pair errors (CoincidentConics, NonRealSelection).
IscProblem make_problem(SphereObservation first, SphereObservation second, int cam_w, int cam_h,
                        std::optional<double> mu = std::nullopt);

struct ObjectiveValue {
  /// Sum of unsquared reprojection distances + mu * c(K).
  double value = 0.0;
  double residual_sum = 0.0;
  double squared_sum = 0.0;
  /// c(K) = ||unit(l) x unit(w v)||^2.
  double constraint = 0.0;
  std::array<double, 2> sphere_sum{};
  std::array<double, 2> sphere_squared{};
  ProjMatrix m_p;
};

/// Objective for a candidate camera: recover both spheres, lift every
/// correspondence, fit one shared projector matrix, sum the residuals.
/// Throws InfeasibleCandidate when a sphere cannot be recovered or the DLT
/// breaks down.
ObjectiveValue isc_objective(const Intrinsics& k, const IscProblem& problem);

/// Residual vector minimized by the search: 2 (N1 + N2) reprojection
/// components followed by sqrt(mu) times the 3-vector pole-polar residual.
Eigen::VectorXd isc_residuals(const Intrinsics& k, const IscProblem& problem);

struct CalibOptions {
  std::optional<double> mu;  ///< overrides the default penalty weight
  int max_iters = 200;
  double f_scan_min = 0.3;  ///< times camera width
  double f_scan_max = 5.0;
  int f_scan_samples = 40;
  double rel_decrease_tol = 1e-10;
  double step_tol = 1e-8;
  double fd_step = 1e-5;
};

struct CalibResult {
  Intrinsics k_c;
  ProjMatrix m_p;
  Decomposition projector;
  double objective = 0.0;            ///< unsquared residual sum
  double constraint_residual = 0.0;  ///< ||unit(l) x unit(w v)||
  bool constraint_checked = true;    ///< false when mu == 0
  double mu = 0.0;
  std::array<size_t, 2> counts{};
  std::array<double, 2> sphere_mean_residual{};
  std::array<double, 2> sphere_rms_residual{};
  int iterations = 0;
  bool converged = false;
  double initial_focal = 0.0;
  std::vector<double> cost_history;  ///< accepted internal costs
};

/// Focal scan for the start point, then damped Gauss-Newton (Levenberg-
/// Marquardt) on the five intrinsics with central-difference Jacobians.
/// Throws NoFeasibleStart; hitting max_iters returns the best point with
/// converged = false.
CalibResult calibrate(const IscProblem& problem, const CalibOptions& opts = {});

}  // namespace isc
