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
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace acm {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::Vector4d;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ACM_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

ACM_DEFINE_ERROR(InvalidArgument);
ACM_DEFINE_ERROR(UnreachablePointError);
ACM_DEFINE_ERROR(InfeasibleConfigError);
ACM_DEFINE_ERROR(InconsistentActuationError);
ACM_DEFINE_ERROR(SingularConfigurationError);
ACM_DEFINE_ERROR(GimbalLockError);
ACM_DEFINE_ERROR(SingularMassMatrixError);
ACM_DEFINE_ERROR(NumericalFault);
ACM_DEFINE_ERROR(ZeroThrustError);
ACM_DEFINE_ERROR(UnreachableAttitudeError);
ACM_DEFINE_ERROR(InfeasibleTensionError);
ACM_DEFINE_ERROR(InconsistentMeasurementError);
ACM_DEFINE_ERROR(ConfigError);
ACM_DEFINE_ERROR(IoError);
/// A module fault raised inside a scenario run, tagged with the sim time.
ACM_DEFINE_ERROR(ScenarioFault);

#undef ACM_DEFINE_ERROR

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

}  // namespace acm
