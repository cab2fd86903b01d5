#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "dfvo/errors.hpp"

namespace dfvo {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;

using Pixel = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
  Matrix3<Scalar> m;
  m << Scalar(0), -v.z(), v.y(),
       v.z(), Scalar(0), -v.x(),
       -v.y(), v.x(), Scalar(0);
  return m;
}

template <typename Scalar>
Scalar orthonormality_error(const Matrix3<Scalar>& r) {
  return (r.transpose() * r - Matrix3<Scalar>::Identity()).norm();
}

// Nearest rotation in Frobenius norm (polar factor, determinant forced to +1).
template <typename Scalar>
Matrix3<Scalar> nearest_rotation(const Matrix3<Scalar>& m) {
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3<Scalar> r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < Scalar(0)) {
    Matrix3<Scalar> flip = Matrix3<Scalar>::Identity();
    flip(2, 2) = Scalar(-1);
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

// Rigid body transform T = [R|t]. The pose convention used throughout:
// the frame-to-frame estimate maps points of frame i into frame i-1
// (X_{i-1} = R X_i + t), and absolute poses are camera-to-world, so
// chaining is T_i = T_{i-1} * rel_i.
template <typename Scalar>
class RigidTransform {
 public:
  RigidTransform() : rotation_(Matrix3<Scalar>::Identity()), translation_(Vector3<Scalar>::Zero()) {}

  // Validates orthonormality of the rotation to 1e-9 in Frobenius norm.
  RigidTransform(const Matrix3<Scalar>& rotation, const Vector3<Scalar>& translation)
      : rotation_(rotation), translation_(translation) {
    const Scalar err = orthonormality_error(rotation);
    if (!(err < Scalar(1e-9)) || rotation.determinant() < Scalar(0)) {
      fail(ErrorCode::NonRotation, "rotation fails orthonormality check, |R'R - I| = " + std::to_string(double(err)));
    }
  }

  // Accepts an approximate rotation and projects it onto SO(3).
  static RigidTransform from_matrix_projected(const Matrix3<Scalar>& rotation, const Vector3<Scalar>& translation) {
    return RigidTransform(Unchecked{}, nearest_rotation(rotation), translation);
  }

  const Matrix3<Scalar>& rotation() const { return rotation_; }
  const Vector3<Scalar>& translation() const { return translation_; }

  // Point action: X -> R X + t.
  Vector3<Scalar> operator*(const Vector3<Scalar>& x) const { return rotation_ * x + translation_; }

  template <typename S>
  friend RigidTransform<S> compose(const RigidTransform<S>&, const RigidTransform<S>&);
  template <typename S>
  friend RigidTransform<S> inverse(const RigidTransform<S>&);
  template <typename S>
  friend RigidTransform<S> exp_se3(const Vector6<S>&);

 private:
  struct Unchecked {};
  RigidTransform(Unchecked, const Matrix3<Scalar>& rotation, const Vector3<Scalar>& translation)
      : rotation_(rotation), translation_(translation) {}

  Matrix3<Scalar> rotation_;
  Vector3<Scalar> translation_;
};

using RigidTransformd = RigidTransform<double>;

// Group composition. Re-orthonormalizes when accumulated round-off in long
// chains drifts past 1e-7.
template <typename Scalar>
RigidTransform<Scalar> compose(const RigidTransform<Scalar>& a, const RigidTransform<Scalar>& b) {
  Matrix3<Scalar> r = a.rotation_ * b.rotation_;
  if (orthonormality_error(r) > Scalar(1e-7)) r = nearest_rotation(r);
  return RigidTransform<Scalar>(typename RigidTransform<Scalar>::Unchecked{}, r,
                                a.rotation_ * b.translation_ + a.translation_);
}

template <typename Scalar>
RigidTransform<Scalar> operator*(const RigidTransform<Scalar>& a, const RigidTransform<Scalar>& b) {
  return compose(a, b);
}

template <typename Scalar>
RigidTransform<Scalar> inverse(const RigidTransform<Scalar>& t) {
  Matrix3<Scalar> rt = t.rotation_.transpose();
  return RigidTransform<Scalar>(typename RigidTransform<Scalar>::Unchecked{}, rt, -(rt * t.translation_));
}

// Rodrigues formula with a Taylor fallback near zero.
template <typename Scalar>
Matrix3<Scalar> exp_so3(const Vector3<Scalar>& w) {
  const Scalar theta2 = w.squaredNorm();
  const Matrix3<Scalar> wx = skew(w);
  if (theta2 < Scalar(1e-16)) {
    return Matrix3<Scalar>::Identity() + wx + Scalar(0.5) * wx * wx;
  }
  const Scalar theta = std::sqrt(theta2);
  return Matrix3<Scalar>::Identity() + (std::sin(theta) / theta) * wx +
         ((Scalar(1) - std::cos(theta)) / theta2) * wx * wx;
}

// xi = [v, w]: translational part first, rotational part second.
template <typename Scalar>
RigidTransform<Scalar> exp_se3(const Vector6<Scalar>& xi) {
  const Vector3<Scalar> v = xi.template head<3>();
  const Vector3<Scalar> w = xi.template tail<3>();
  const Scalar theta2 = w.squaredNorm();
  const Matrix3<Scalar> wx = skew(w);
  Matrix3<Scalar> rot, jac;
  if (theta2 < Scalar(1e-16)) {
    rot = Matrix3<Scalar>::Identity() + wx + Scalar(0.5) * wx * wx;
    jac = Matrix3<Scalar>::Identity() + Scalar(0.5) * wx + (Scalar(1) / Scalar(6)) * wx * wx;
  } else {
    const Scalar theta = std::sqrt(theta2);
    rot = Matrix3<Scalar>::Identity() + (std::sin(theta) / theta) * wx +
          ((Scalar(1) - std::cos(theta)) / theta2) * wx * wx;
    jac = Matrix3<Scalar>::Identity() + ((Scalar(1) - std::cos(theta)) / theta2) * wx +
          ((theta - std::sin(theta)) / (theta2 * theta)) * wx * wx;
  }
  return RigidTransform<Scalar>(typename RigidTransform<Scalar>::Unchecked{}, rot, jac * v);
}

// Geodesic rotation angle. Angles are radians internally, degrees at API
// boundaries that report errors.
template <typename Scalar>
Scalar rotation_angle_rad(const Matrix3<Scalar>& r) {
  const Scalar c = std::clamp((r.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
  return std::acos(c);
}

template <typename Scalar>
Scalar rotation_angle_deg(const Matrix3<Scalar>& r) {
  return rotation_angle_rad(r) * Scalar(180) / Scalar(EIGEN_PI);
}

// Pinhole camera, no distortion.
template <typename Scalar>
struct CameraIntrinsics {
  Scalar fx, fy, cx, cy;
  int width, height;

  CameraIntrinsics(Scalar fx_, Scalar fy_, Scalar cx_, Scalar cy_, int width_, int height_)
      : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
    if (!(fx > Scalar(0)) || !(fy > Scalar(0))) fail(ErrorCode::BadCalibration, "focal lengths must be positive");
    if (!(cx >= Scalar(0)) || !(cx < Scalar(width)) || !(cy >= Scalar(0)) || !(cy < Scalar(height))) {
      fail(ErrorCode::BadCalibration, "principal point outside image");
    }
  }

  Matrix3<Scalar> matrix() const {
    Matrix3<Scalar> k = Matrix3<Scalar>::Identity();
    k(0, 0) = fx;
    k(1, 1) = fy;
    k(0, 2) = cx;
    k(1, 2) = cy;
    return k;
  }

  // Bounds check for continuous pixel coordinates; the upper limit is
  // width-1 / height-1 so a bilinear footprint stays inside the raster.
  bool contains(const Vector2<Scalar>& p) const {
    return p.x() >= Scalar(0) && p.x() <= Scalar(width - 1) && p.y() >= Scalar(0) && p.y() <= Scalar(height - 1);
  }
};

using CameraIntrinsicsd = CameraIntrinsics<double>;

template <typename Scalar>
Vector2<Scalar> project(const CameraIntrinsics<Scalar>& k, const Vector3<Scalar>& x) {
  if (!(x.z() > Scalar(1e-9))) fail(ErrorCode::DegenerateDepth, "projection of point with non-positive depth");
  return {k.fx * x.x() / x.z() + k.cx, k.fy * x.y() / x.z() + k.cy};
}

template <typename Scalar>
Vector3<Scalar> backproject(const CameraIntrinsics<Scalar>& k, const Vector2<Scalar>& p, Scalar depth) {
  if (!(depth > Scalar(0))) fail(ErrorCode::DegenerateDepth, "backprojection with non-positive depth");
  return {depth * (p.x() - k.cx) / k.fx, depth * (p.y() - k.cy) / k.fy, depth};
}

// K^{-1} applied to the homogeneous pixel, first two coordinates.
template <typename Scalar>
Vector2<Scalar> normalize(const CameraIntrinsics<Scalar>& k, const Vector2<Scalar>& p) {
  return {(p.x() - k.cx) / k.fx, (p.y() - k.cy) / k.fy};
}

}  // namespace dfvo
