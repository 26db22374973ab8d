#include "isc/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "isc/error.hpp"

namespace isc {

Vec3 unit(const Vec3& v) {
  const double n = v.norm();
  return n > 0.0 ? Vec3(v / n) : v;
}

double distance_up_to_scale(const Vec3& a, const Vec3& b) {
  const Vec3 ua = unit(a);
  const Vec3 ub = unit(b);
  return std::min((ua - ub).norm(), (ua + ub).norm());
}

// ---------------------------------------------------------------------------
// Intrinsics

Mat3 Intrinsics::matrix() const {
  Mat3 k;
  k << fx, skew, u0, 0.0, fy, v0, 0.0, 0.0, 1.0;
  return k;
}

Mat3 Intrinsics::inverse() const {
  // closed form of the upper-triangular inverse
  Mat3 ki;
  ki << 1.0 / fx, -skew / (fx * fy), (skew * v0 - u0 * fy) / (fx * fy),
      0.0, 1.0 / fy, -v0 / fy,
      0.0, 0.0, 1.0;
  return ki;
}

Mat3 Intrinsics::iac() const {
  const Mat3 ki = inverse();
  return ki.transpose() * ki;
}

Intrinsics Intrinsics::from_matrix(const Mat3& k) {
  const Mat3 n = k / k(2, 2);
  return {n(0, 0), n(1, 1), n(0, 1), n(0, 2), n(1, 2)};
}

Intrinsics Intrinsics::centered(double focal, int width, int height) {
  return {focal, focal, 0.0, 0.5 * width, 0.5 * height};
}

// ---------------------------------------------------------------------------
// Conic

Conic::Conic(const Mat3& m) : m_(0.5 * (m + m.transpose())) {}

Conic Conic::from_coefficients(const std::array<double, 6>& c) {
  Mat3 m;
  m << c[0], c[1], c[2], c[1], c[3], c[4], c[2], c[4], c[5];
  return Conic(m);
}

std::array<double, 6> Conic::coefficients() const {
  return {m_(0, 0), m_(0, 1), m_(0, 2), m_(1, 1), m_(1, 2), m_(2, 2)};
}

Conic Conic::normalized() const {
  const double n = m_.norm();
  if (n == 0.0) return *this;
  Mat3 m = m_ / n;
  // c11 fixes the sign; for circles c11 = c22 > 0 already, for degenerate
  // leading entries fall back to the first nonzero coefficient.
  double pivot = m(0, 0);
  if (std::abs(pivot) < 1e-15) pivot = m(1, 1);
  if (std::abs(pivot) < 1e-15) pivot = m(2, 2);
  if (pivot < 0.0) m = -m;
  return Conic(m);
}

double Conic::evaluate(const Vec2& p) const {
  const Vec3 x = homogeneous(p);
  return x.dot(m_ * x);
}

double Conic::sampson_distance(const Vec2& p) const {
  const Vec3 x = homogeneous(p);
  const Vec3 cx = m_ * x;
  const double g = 2.0 * cx.head<2>().norm();
  return g > 0.0 ? std::abs(x.dot(cx)) / g : std::numeric_limits<double>::infinity();
}

bool Conic::is_real_ellipse() const {
  const double det2 = m_(0, 0) * m_(1, 1) - m_(0, 1) * m_(0, 1);
  return det2 > 0.0 && m_.determinant() * m_(0, 0) < 0.0;
}

Vec2 Conic::center() const {
  const Eigen::Matrix2d a = m_.topLeftCorner<2, 2>();
  return a.inverse() * (-m_.topRightCorner<2, 1>());
}

std::array<double, 4> Conic::bounding_box() const {
  // Tangent lines x = t satisfy l^T adj(C) l = 0 with l = (1, 0, -t).
  const Mat3 d = adjugate(m_);
  auto extent = [&](int i) {
    const double a = d(2, 2), b = d(i, 2), c = d(i, i);
    const double disc = std::sqrt(std::max(0.0, b * b - a * c));
    const double t0 = (b - disc) / a, t1 = (b + disc) / a;
    return std::pair{std::min(t0, t1), std::max(t0, t1)};
  };
  const auto [x0, x1] = extent(0);
  const auto [y0, y1] = extent(1);
  return {x0, y0, x1, y1};
}

// ---------------------------------------------------------------------------

Conic fit_conic(std::span<const Vec2> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 6) throw Error(ErrorCode::TooFewPoints, "conic fit needs at least 6 points");

  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);
  double ms = 0.0;
  for (const auto& p : points) ms += (p - mean).squaredNorm();
  ms /= static_cast<double>(n);
  if (ms <= 0.0) throw Error(ErrorCode::DegenerateConic, "all points coincide");
  const double s = std::sqrt(2.0 / ms);

  Eigen::Matrix<double, Eigen::Dynamic, 6> design(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 q = s * (points[static_cast<size_t>(i)] - mean);
    design.row(i) << q.x() * q.x(), q.x() * q.y(), q.y() * q.y(), q.x(), q.y(), 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(4) - sv(5) <= 1e-12 * sv(0)) {
    throw Error(ErrorCode::DegenerateConic, "conic null space is not one-dimensional");
  }
  const Eigen::Matrix<double, 6, 1> c = svd.matrixV().col(5);
  Mat3 cn;
  cn << c(0), 0.5 * c(1), 0.5 * c(3),
      0.5 * c(1), c(2), 0.5 * c(4),
      0.5 * c(3), 0.5 * c(4), c(5);
  Mat3 t;
  t << s, 0.0, -s * mean.x(), 0.0, s, -s * mean.y(), 0.0, 0.0, 1.0;
  return Conic(t.transpose() * cn * t).normalized();
}

Mat3 adjugate(const Mat3& c) {
  Mat3 a;
  a(0, 0) = c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1);
  a(0, 1) = c(0, 2) * c(2, 1) - c(0, 1) * c(2, 2);
  a(0, 2) = c(0, 1) * c(1, 2) - c(0, 2) * c(1, 1);
  a(1, 0) = c(1, 2) * c(2, 0) - c(1, 0) * c(2, 2);
  a(1, 1) = c(0, 0) * c(2, 2) - c(0, 2) * c(2, 0);
  a(1, 2) = c(0, 2) * c(1, 0) - c(0, 0) * c(1, 2);
  a(2, 0) = c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0);
  a(2, 1) = c(0, 1) * c(2, 0) - c(0, 0) * c(2, 1);
  a(2, 2) = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
  return a;
}

Vec3 pole_polar_vector(const PolePolarPair& lv, const Intrinsics& k) {
  return unit(lv.line).cross(unit(k.iac() * lv.point));
}

double pole_polar_residual(const PolePolarPair& lv, const Intrinsics& k) {
  return pole_polar_vector(lv, k).norm();
}

PolePolarPair constraint_pair(const Conic& c1, const Conic& c2, const Intrinsics& bootstrap) {
  // Work in a frame centered between the ellipses with unit-sized extent;
  // pixel units leave the eigenvectors badly conditioned.
  const Vec2 p1 = c1.center();
  const Vec2 p2 = c2.center();
  const auto b1 = c1.bounding_box();
  const auto b2 = c2.bounding_box();
  const double extent = std::max({b1[2] - b1[0], b1[3] - b1[1], b2[2] - b2[0], b2[3] - b2[1], (p1 - p2).norm()});
  if (!std::isfinite(extent) || !(extent > 0.0) || !p1.allFinite() || !p2.allFinite()) {
    throw Error(ErrorCode::DegenerateConic, "conics are not bounded ellipses");
  }
  const Vec2 mid = 0.5 * (p1 + p2);
  const double s = 2.0 / extent;
  Mat3 t;  // normalized = t * pixel
  t << s, 0.0, -s * mid.x(), 0.0, s, -s * mid.y(), 0.0, 0.0, 1.0;
  const Mat3 tinv = t.inverse();
  auto to_frame = [&](const Conic& c) {
    const Mat3 m = tinv.transpose() * c.matrix() * tinv;
    return Conic(m).normalized().matrix();
  };
  const Mat3 m1 = to_frame(c1);
  const Mat3 m2 = to_frame(c2);
  const Mat3 a = m2 * adjugate(m1);

  const double scalar = a.trace() / 3.0;
  if ((a - scalar * Mat3::Identity()).norm() <= 1e-10 * a.norm()) {
    throw Error(ErrorCode::CoincidentConics, "C2 adj(C1) is a multiple of the identity");
  }

  Eigen::EigenSolver<Mat3> es(a);
  const Eigen::Vector3cd values = es.eigenvalues();
  const Eigen::Matrix3cd vectors = es.eigenvectors();
  const double scale = values.cwiseAbs().maxCoeff();

  std::vector<PolePolarPair> candidates;
  std::array<bool, 3> real{};
  for (int i = 0; i < 3; ++i) real[i] = std::abs(values(i).imag()) <= 1e-12 * scale;

  if (real[0] && real[1] && real[2]) {
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      const Vec3 l = vectors.col(i).real();
      const Vec3 v = vectors.col(j).real().cross(vectors.col(k).real());
      candidates.push_back({unit(l), unit(v)});
    }
  } else {
    // one real eigenvector; the conjugate pair spans a real invariant plane
    int r = -1, c = -1;
    for (int i = 0; i < 3; ++i) (real[i] ? r : c) = i;
    if (r >= 0 && c >= 0) {
      const Vec3 l = vectors.col(r).real();
      const Vec3 v = Vec3(vectors.col(c).real()).cross(Vec3(vectors.col(c).imag()));
      candidates.push_back({unit(l), unit(v)});
    }
  }

  // The mirror-plane line crosses both silhouettes; the other two sides of the
  // self-polar triangle separate the harmonic pair and miss at least one.
  const Mat3 d1 = adjugate(m1);
  const Mat3 d2 = adjugate(m2);
  std::optional<PolePolarPair> best;
  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates) {
    if (!cand.line.allFinite() || !cand.point.allFinite() || cand.point.norm() < 0.5) continue;
    const Vec3& l = cand.line;
    if (l.dot(d1 * l) >= 0.0 || l.dot(d2 * l) >= 0.0) continue;
    const PolePolarPair pixel{unit(t.transpose() * l), unit(tinv * cand.point)};
    const double res = pole_polar_residual(pixel, bootstrap);
    if (res < best_residual) {
      best_residual = res;
      best = pixel;
    }
  }
  if (!best) throw Error(ErrorCode::NonRealSelection, "no eigenvector line crosses both conics");
  return *best;
}

}  // namespace isc
