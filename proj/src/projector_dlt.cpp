#include "isc/projector_dlt.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "isc/error.hpp"

namespace isc {

ProjMatrix::ProjMatrix(const Mat34& m) {
  const Mat3 left = m.leftCols<3>();
  const double scale = left.row(2).norm();
  const double det = left.determinant();
  if (!(scale > 0.0) || !(std::abs(det) > 1e-14 * std::pow(left.norm(), 3))) {
    throw Error(ErrorCode::SingularBlock, "left 3x3 block of the projection matrix is singular");
  }
  m_ = m / scale;
  if (det < 0.0) m_ = -m_;
}

ProjMatrix ProjMatrix::compose(const Intrinsics& k, const Mat3& r, const Vec3& t) {
  Mat34 rt;
  rt << r, t;
  return ProjMatrix(k.matrix() * rt);
}

Vec2 ProjMatrix::project(const Vec3& x) const {
  const Vec4 xh = homogeneous(x);
  const Vec3 h = m_ * xh;
  if (!(std::abs(h.z()) >= 1e-12 * m_.norm() * xh.norm())) {
    throw Error(ErrorCode::PointAtInfinity, "point projects to infinity");
  }
  return h.head<2>() / h.z();
}

Vec3 ProjMatrix::center() const {
  const Mat3 left = m_.leftCols<3>();
  return -left.partialPivLu().solve(m_.col(3));
}

namespace {

template <typename V>
std::pair<V, double> centroid_scale(std::span<const V> pts, double target_rms) {
  V mean = V::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double ms = 0.0;
  for (const auto& p : pts) ms += (p - mean).squaredNorm();
  ms /= static_cast<double>(pts.size());
  if (!(ms > 0.0)) throw Error(ErrorCode::DegenerateConfiguration, "all points coincide");
  return {mean, target_rms / std::sqrt(ms)};
}

}  // namespace

ProjMatrix dlt_estimate(std::span<const Vec2> xp, std::span<const Vec3> X) {
  if (xp.size() != X.size()) throw Error(ErrorCode::DimensionMismatch, "x_p and X lengths differ");
  if (xp.size() < 6) throw Error(ErrorCode::TooFewPoints, "DLT needs at least 6 correspondences");

  const auto [m2, s2] = centroid_scale<Vec2>(xp, std::sqrt(2.0));
  const auto [m3, s3] = centroid_scale<Vec3>(X, std::sqrt(3.0));

  const auto n = static_cast<Eigen::Index>(xp.size());
  Eigen::Matrix<double, Eigen::Dynamic, 12> a = Eigen::Matrix<double, Eigen::Dynamic, 12>::Zero(2 * n, 12);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<size_t>(i);
    const Vec2 x = s2 * (xp[idx] - m2);
    Vec4 q;
    q << s3 * (X[idx] - m3), 1.0;
    a.block<1, 4>(2 * i, 0) = q.transpose();
    a.block<1, 4>(2 * i, 8) = -x.x() * q.transpose();
    a.block<1, 4>(2 * i + 1, 4) = q.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -x.y() * q.transpose();
  }

  // QR first so the SVD runs on a 12x12 triangle instead of the tall matrix.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Matrix<double, 12, 12> r =
      qr.matrixQR().topRows<12>().triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::Matrix<double, 12, 12>> svd(r, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(10) < 1e-12 * sv(0) || sv(11) / sv(10) > 0.99) {
    throw Error(ErrorCode::DegenerateConfiguration, "DLT null space is ambiguous");
  }
  const Eigen::Matrix<double, 12, 1> p = svd.matrixV().col(11);
  Mat34 mn;
  mn << p.segment<4>(0).transpose(), p.segment<4>(4).transpose(), p.segment<4>(8).transpose();

  Mat3 t2inv;
  t2inv << 1.0 / s2, 0.0, m2.x(), 0.0, 1.0 / s2, m2.y(), 0.0, 0.0, 1.0;
  Eigen::Matrix4d t3 = Eigen::Matrix4d::Identity();
  t3.topLeftCorner<3, 3>() *= s3;
  t3.topRightCorner<3, 1>() = -s3 * m3;
  return ProjMatrix(t2inv * mn * t3);
}

ProjMatrix dlt_estimate(std::span<const Correspondence> corrs) {
  std::vector<Vec2> xp;
  std::vector<Vec3> X;
  xp.reserve(corrs.size());
  X.reserve(corrs.size());
  for (const auto& c : corrs) {
    xp.push_back(c.x_p);
    X.push_back(c.X);
  }
  return dlt_estimate(xp, X);
}

Eigen::VectorXd reprojection_residuals(const ProjMatrix& m, std::span<const Correspondence> corrs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(corrs.size()));
  for (size_t i = 0; i < corrs.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = (corrs[i].x_p - m.project(corrs[i].X)).norm();
  }
  return out;
}

Decomposition decompose(const ProjMatrix& m) {
  const Mat3 a = m.matrix().leftCols<3>();
  // RQ through QR of the row-reversed transpose.
  Mat3 flip;
  flip << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  Eigen::HouseholderQR<Mat3> qr((flip * a).transpose());
  const Mat3 q = qr.householderQ();
  const Mat3 rt = qr.matrixQR().triangularView<Eigen::Upper>();
  Mat3 k = flip * rt.transpose() * flip;
  Mat3 r = flip * q.transpose();

  const Mat3 d = Vec3(k.diagonal().array().sign()).asDiagonal();
  k = k * d;
  r = d * r;
  if (r.determinant() < 0.0) {
    throw Error(ErrorCode::SingularBlock, "projection matrix has a reflected rotation");
  }
  const Vec3 t = k.triangularView<Eigen::Upper>().solve(Vec3(m.matrix().col(3)));
  return {Intrinsics::from_matrix(k), r, t};
}

}  // namespace isc
