#pragma once

#include <span>

#include <Eigen/Core>

#include "isc/geom.hpp"

namespace isc {

/// 3x4 projection matrix in a fixed gauge: the first three entries of the
/// third row form a unit vector and the left 3x3 block has positive
/// determinant. In this gauge M = K [R | T] exactly.
class ProjMatrix {
 public:
  ProjMatrix() = default;
  /// Applies the gauge. Throws SingularBlock if the left block is singular.
  explicit ProjMatrix(const Mat34& m);

  static ProjMatrix compose(const Intrinsics& k, const Mat3& r, const Vec3& t);

  const Mat34& matrix() const { return m_; }
  Vec3 apply(const Vec3& x) const { return m_ * homogeneous(x); }
  /// Dehomogenized projection; throws PointAtInfinity.
  Vec2 project(const Vec3& x) const;
  /// Optical center in the source frame.
  Vec3 center() const;

 private:
  Mat34 m_ = Mat34::Zero();
};

/// Projector pixel / 3D point pair (the camera pixel is kept for bookkeeping).
struct Correspondence {
  Vec2 x_c;
  Vec2 x_p;
  Vec3 X;
};

/// Normalized DLT on (x_p, X) pairs. Throws TooFewPoints (n < 6) or
/// DegenerateConfiguration (null space ambiguous).
ProjMatrix dlt_estimate(std::span<const Vec2> xp, std::span<const Vec3> X);
ProjMatrix dlt_estimate(std::span<const Correspondence> corrs);

/// Euclidean image residual ||x_p - dehom(M X)|| per point, input order.
Eigen::VectorXd reprojection_residuals(const ProjMatrix& m, std::span<const Correspondence> corrs);

struct Decomposition {
  Intrinsics k;
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

/// RQ decomposition with a positive diagonal of K and det R = +1.
Decomposition decompose(const ProjMatrix& m);

}  // namespace isc
