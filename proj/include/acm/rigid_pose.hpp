// Copyright 2026 The ACM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>

#include "acm/common.hpp"

namespace acm {

/// Rotation plus translation. Composes like a homogeneous transform:
/// (a * b).apply(x) == a.apply(b.apply(x)).
template <typename Scalar>
struct RigidPoseT {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  static RigidPoseT identity() { return {}; }

  static RigidPoseT from_matrix(const Matrix4<Scalar>& h) {
    return {h.template topLeftCorner<3, 3>(), h.template topRightCorner<3, 1>()};
  }

  Matrix4<Scalar> matrix() const {
    Matrix4<Scalar> h = Matrix4<Scalar>::Identity();
    h.template topLeftCorner<3, 3>() = rotation;
    h.template topRightCorner<3, 1>() = translation;
    return h;
  }

  Vector3<Scalar> apply(const Vector3<Scalar>& point) const {
    return rotation * point + translation;
  }

  RigidPoseT inverse() const {
    Matrix3<Scalar> rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  RigidPoseT operator*(const RigidPoseT& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  template <typename Other>
  RigidPoseT<Other> cast() const {
    return {rotation.template cast<Other>(), translation.template cast<Other>()};
  }
};

using RigidPose = RigidPoseT<double>;

template <typename Scalar>
Matrix3<Scalar> rot_x(const Scalar& angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(angle), s = sin(angle);
  Matrix3<Scalar> r;
  r << Scalar(1), Scalar(0), Scalar(0),  //
      Scalar(0), c, -s,                  //
      Scalar(0), s, c;
  return r;
}

template <typename Scalar>
Matrix3<Scalar> rot_y(const Scalar& angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(angle), s = sin(angle);
  Matrix3<Scalar> r;
  r << c, Scalar(0), s,                 //
      Scalar(0), Scalar(1), Scalar(0),  //
      -s, Scalar(0), c;
  return r;
}

template <typename Scalar>
Matrix3<Scalar> rot_z(const Scalar& angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(angle), s = sin(angle);
  Matrix3<Scalar> r;
  r << c, -s, Scalar(0),  //
      s, c, Scalar(0),    //
      Scalar(0), Scalar(0), Scalar(1);
  return r;
}

/// Z-Y-X (yaw-pitch-roll) Euler angles [roll, pitch, yaw] to a body-to-world
/// rotation R = Rz(yaw) Ry(pitch) Rx(roll).
template <typename Scalar>
Matrix3<Scalar> rotation_from_euler_zyx(const Vector3<Scalar>& rpy) {
  return rot_z<Scalar>(rpy(2)) * rot_y<Scalar>(rpy(1)) * rot_x<Scalar>(rpy(0));
}

/// Inverse of rotation_from_euler_zyx. Pitch is in [-pi/2, pi/2].
template <typename Scalar>
Vector3<Scalar> euler_zyx_from_rotation(const Matrix3<Scalar>& r) {
  using std::asin;
  using std::atan2;
  Scalar sp = -r(2, 0);
  if (sp > Scalar(1)) sp = Scalar(1);
  if (sp < Scalar(-1)) sp = Scalar(-1);
  return {atan2(r(2, 1), r(2, 2)), asin(sp), atan2(r(1, 0), r(0, 0))};
}

/// Body-rate matrix W with omega_body = W(rpy) * d(rpy)/dt for Z-Y-X angles.
template <typename Scalar>
Matrix3<Scalar> euler_rate_to_body_rate(const Vector3<Scalar>& rpy) {
  using std::cos;
  using std::sin;
  const Scalar cr = cos(rpy(0)), sr = sin(rpy(0));
  const Scalar cp = cos(rpy(1)), sp = sin(rpy(1));
  Matrix3<Scalar> w;
  w << Scalar(1), Scalar(0), -sp,  //
      Scalar(0), cr, sr * cp,      //
      Scalar(0), -sr, cr * cp;
  return w;
}

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
  Matrix3<Scalar> s;
  s << Scalar(0), -v(2), v(1),  //
      v(2), Scalar(0), -v(0),   //
      -v(1), v(0), Scalar(0);
  return s;
}

/// Axial vector of the skew-symmetric part of m.
template <typename Scalar>
Vector3<Scalar> vee(const Matrix3<Scalar>& m) {
  return Scalar(0.5) *
         Vector3<Scalar>(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

/// Geodesic angle between two rotations, radians in [0, pi].
inline double rotation_angle_between(const Matrix3d& a, const Matrix3d& b) {
  const Matrix3d rel = a.transpose() * b;
  // atan2 form keeps precision near zero where acos((tr - 1) / 2) does not.
  const double s = vee(rel).norm();
  const double c = 0.5 * (rel.trace() - 1.0);
  return std::atan2(s, c);
}

inline double orthonormality_residual(const Matrix3d& r) {
  return (r.transpose() * r - Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_valid_rotation(const Matrix3d& r, double tol = 1e-9) {
  return orthonormality_residual(r) <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace acm
