#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

namespace isc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Homogeneous 2D point or line (3-vector, defined up to scale).
using HomPoint2 = Eigen::Vector3d;
/// Homogeneous 3D point (4-vector, defined up to scale).
using HomPoint3 = Eigen::Vector4d;

inline HomPoint2 homogeneous(const Vec2& p) { return {p.x(), p.y(), 1.0}; }
inline HomPoint3 homogeneous(const Vec3& p) { return {p.x(), p.y(), p.z(), 1.0}; }

/// Unit-normalizes a homogeneous vector. The zero vector is returned as is.
Vec3 unit(const Vec3& v);

/// Distance between two homogeneous vectors after unit normalization,
/// minimized over the sign gauge.
double distance_up_to_scale(const Vec3& a, const Vec3& b);

/// Five-parameter pinhole intrinsics, all in pixels.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double skew = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;

  Mat3 matrix() const;
  Mat3 inverse() const;
  /// Image of the absolute conic, K^-T K^-1.
  Mat3 iac() const;
  bool valid() const { return fx > 0.0 && fy > 0.0; }

  /// Reads an upper-triangular K, dividing out K(2,2).
  static Intrinsics from_matrix(const Mat3& k);
  /// Principal point at the image center, zero skew, square pixels.
  static Intrinsics centered(double focal, int width, int height);

  bool operator==(const Intrinsics&) const = default;
};

/// Symmetric 3x3 conic, defined up to scale. A pixel x lies on the conic iff
/// x^T C x = 0.
class Conic {
 public:
  Conic() = default;
  /// Symmetrizes the input; only the upper triangle is really consulted.
  explicit Conic(const Mat3& m);
  /// From the six unique entries [c11, c12, c13, c22, c23, c33].
  static Conic from_coefficients(const std::array<double, 6>& c);

  const Mat3& matrix() const { return m_; }
  std::array<double, 6> coefficients() const;

  /// Unit Frobenius norm with c11 >= 0 (for a real ellipse this makes the
  /// top-left block positive definite and the interior negative).
  Conic normalized() const;

  /// Algebraic value x^T C x of a pixel.
  double evaluate(const Vec2& p) const;
  /// First-order (Sampson) distance of a pixel to the curve, in pixels.
  double sampson_distance(const Vec2& p) const;
  /// Non-empty real ellipse test.
  bool is_real_ellipse() const;
  /// Center of the conic (pole of the line at infinity).
  Vec2 center() const;
  /// Axis-aligned bounding box {xmin, ymin, xmax, ymax} of an ellipse.
  std::array<double, 4> bounding_box() const;

 private:
  Mat3 m_ = Mat3::Zero();
};

/// Least-squares algebraic conic fit on Hartley-normalized coordinates.
/// Throws TooFewPoints (n < 6) or DegenerateConic.
Conic fit_conic(std::span<const Vec2> points);

/// Transpose of the cofactor matrix; adj(C) C = det(C) I.
Mat3 adjugate(const Mat3& c);
inline Conic adjugate(const Conic& c) { return Conic(adjugate(c.matrix())); }

/// Vanishing line / vanishing point pair extracted from two sphere images.
struct PolePolarPair {
  Vec3 line;   ///< l, unit norm
  Vec3 point;  ///< v, unit norm
};

/// Pole-polar residual || unit(l) x unit(w v) || for w = K^-T K^-1. Zero iff
/// l is proportional to w v. Scale and sign free.
double pole_polar_residual(const PolePolarPair& lv, const Intrinsics& k);
/// Same residual, as the cross-product vector (used as a penalty residual).
Vec3 pole_polar_vector(const PolePolarPair& lv, const Intrinsics& k);

/// Eigen-structure of C2 adj(C1): l is one eigenvector and v is the cross
/// product of the other two. The admissible choice is the one with the
/// smallest pole-polar residual under the rough bootstrap intrinsics.
/// Throws CoincidentConics or NonRealSelection.
PolePolarPair constraint_pair(const Conic& c1, const Conic& c2, const Intrinsics& bootstrap);

}  // namespace isc
