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

#include "acm/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>

namespace acm {
namespace {

SystemState random_state(const PlantModel& model, std::mt19937_64& rng, double speed = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), a(0.0, 1.2), b(-kPi, kPi);
  SystemState s = SystemState::zero(model);
  for (int i = 0; i < 3; ++i) s.q(i) = u(rng);
  for (int i = 3; i < 6; ++i) s.q(i) = 0.6 * u(rng);
  for (int k = 0; k < model.segments(); ++k) s.set_segment(k, a(rng), b(rng));
  for (int i = 0; i < model.dof(); ++i) s.qdot(i) = speed * u(rng);
  return s;
}

// Kinetic energy from finite differences of body poses along q', without
// using the mass matrix.
double kinetic_energy_oracle(const SystemState& state, const PlantModel& model) {
  const double h = 1e-6;
  SystemState plus = state, minus = state;
  plus.q += h * state.qdot;
  minus.q -= h * state.qdot;
  const auto p1 = body_poses(plus, model);
  const auto p0 = body_poses(minus, model);
  const auto pc = body_poses(state, model);
  std::vector<double> masses = {model.inertia.uav_mass};
  std::vector<Matrix3d> inertias = {model.inertia.uav_inertia};
  for (int s = 0; s < model.segments(); ++s) {
    masses.push_back(model.inertia.segment_masses[s]);
    inertias.push_back(model.segment_inertia(s));
  }
  masses.push_back(model.inertia.tool_mass + model.inertia.tip_mass);
  inertias.push_back(Matrix3d::Zero());
  double t = 0.0;
  for (std::size_t b = 0; b < masses.size(); ++b) {
    const Vector3d v = (p1[b].translation - p0[b].translation) / (2 * h);
    const Matrix3d rdot = (p1[b].rotation - p0[b].rotation) / (2 * h);
    const Vector3d w_body = vee<double>(pc[b].rotation.transpose() * rdot);
    t += 0.5 * masses[b] * v.squaredNorm() + 0.5 * w_body.dot(inertias[b] * w_body);
  }
  return t;
}

double total_energy(const SystemState& s, const PlantModel& m) {
  return kinetic_energy(s, m) + potential_energy(s, m);
}

TEST(KineticEnergy, ZeroAtRest) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  s.set_segment(2, 0.5, 1.0);
  EXPECT_EQ(kinetic_energy(s, model), 0.0);
}

TEST(KineticEnergy, RigidTranslationOfTotalMass) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  s.qdot(0) = 1.0;
  EXPECT_NEAR(kinetic_energy(s, model), 0.5 * model.inertia.total_mass(), 1e-14);
}

TEST(KineticEnergy, MatchesPoseDifferenceOracle) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const SystemState s = random_state(model, rng);
    const double t = kinetic_energy(s, model);
    EXPECT_GT(t, 0.0);
    EXPECT_NEAR(t, kinetic_energy_oracle(s, model), 1e-8 * std::max(1.0, t));
  }
}

TEST(PotentialEnergy, Datum) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  // The datum is z = 0: the UAV sits on it and the hanging arm is below.
  double expected = 0.0;
  const auto poses = body_poses(s, model);
  expected += model.inertia.uav_mass * model.inertia.gravity * poses[0].translation.z();
  for (int k = 0; k < model.segments(); ++k) {
    expected += model.inertia.segment_masses[k] * model.inertia.gravity * poses[k + 1].translation.z();
  }
  expected += model.inertia.tool_mass * model.inertia.gravity * poses.back().translation.z();
  EXPECT_NEAR(potential_energy(s, model), expected, 1e-15);
  EXPECT_LT(expected, 0.0);
}

TEST(PotentialEnergy, RaisingUavByOneMetre) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  const double v0 = potential_energy(s, model);
  s.q(2) += 1.0;
  EXPECT_NEAR(potential_energy(s, model) - v0, model.inertia.total_mass() * 9.81, 1e-12);
}

TEST(PotentialEnergy, SpringTermOfOneBentSegment) {
  PlantModel model = default_plant();
  model.inertia.gravity = 0.0;
  model.inertia.spring_stiffness = 0.1;
  model.finalize();
  SystemState s = SystemState::zero(model);
  s.set_segment(1, 0.5, -0.4);
  EXPECT_NEAR(potential_energy(s, model), 0.5 * 4 * 0.1 * 0.25, 1e-15);
}

TEST(SpringForces, StraightArmIsZero) {
  const PlantModel model = default_plant();
  for (const auto& f : spring_forces(SystemState::zero(model), model)) EXPECT_TRUE(f.isZero(0.0));
}

TEST(SpringForces, RestoringMagnitude) {
  PlantModel model = default_plant();
  model.inertia.spring_stiffness = 0.1;
  model.finalize();
  SystemState s = SystemState::zero(model);
  s.set_segment(3, 0.5, 2.0);
  const auto f = spring_forces(s, model);
  EXPECT_NEAR(f[3](0), -0.2, 1e-15);
  EXPECT_EQ(f[3](1), 0.0);
}

TEST(SpringForces, NegativeGradientOfPotential) {
  PlantModel model = default_plant();
  model.inertia.spring_stiffness = 0.1;
  model.inertia.gravity = 0.0;
  model.finalize();
  SystemState s = SystemState::zero(model);
  const double alpha = 0.5, beta = 0.9, h = 1e-6;
  s.set_segment(0, alpha, beta);
  SystemState plus = s, minus = s;
  plus.set_segment(0, alpha + h, beta);
  minus.set_segment(0, alpha - h, beta);
  const double fd = -(potential_energy(plus, model) - potential_energy(minus, model)) / (2 * h);
  EXPECT_NEAR(spring_forces(s, model)[0](0), fd, 1e-6);
  // On the bending vector, S equals the gradient of the spring energy.
  const VectorXd sv = spring_vector(s, model);
  for (int i = kUavDof; i < model.dof(); ++i) {
    SystemState p = s, m = s;
    p.q(i) += h;
    m.q(i) -= h;
    EXPECT_NEAR(sv(i), (spring_potential(p, model) - spring_potential(m, model)) / (2 * h), 1e-9);
  }
}

TEST(MassMatrix, SymmetricPositiveDefinite) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const MatrixXd m = mass_matrix(random_state(model, rng), model);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(MassMatrix, TranslationalBlockOfStraightArm) {
  const PlantModel model = default_plant();
  const MatrixXd m = mass_matrix(SystemState::zero(model), model);
  EXPECT_LT((m.topLeftCorner<3, 3>() - model.inertia.total_mass() * Matrix3d::Identity())
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
}

TEST(MassMatrix, QuadraticFormIsKineticEnergyHessian) {
  // M_jk = d^2 T / dq'_j dq'_k using the pose-difference oracle.
  const PlantModel model = default_plant();
  std::mt19937_64 rng(3);
  SystemState s = random_state(model, rng);
  const MatrixXd m = mass_matrix(s, model);
  const int j = 1, k = 9;
  auto t_at = [&](double dj, double dk) {
    SystemState x = s;
    x.qdot.setZero();
    x.qdot(j) += dj;
    x.qdot(k) += dk;
    return kinetic_energy_oracle(x, model);
  };
  const double cross = t_at(1, 1) - t_at(1, 0) - t_at(0, 1) + t_at(0, 0);
  EXPECT_NEAR(cross, m(j, k), 1e-8);
  EXPECT_NEAR(2 * t_at(1, 0), m(j, j), 1e-8);
}

TEST(Coriolis, PassivitySkewSymmetry) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const SystemState s = random_state(model, rng);
    const double h = 1e-6;
    SystemState plus = s, minus = s;
    plus.q += h * s.qdot;
    minus.q -= h * s.qdot;
    const MatrixXd mdot = (mass_matrix(plus, model) - mass_matrix(minus, model)) / (2 * h);
    const MatrixXd c = coriolis_matrix(s, model);
    EXPECT_LT(std::abs(s.qdot.dot((mdot - 2 * c) * s.qdot)), 1e-6);
  }
}

TEST(Coriolis, ChristoffelAgreesWithBodyAccelerations) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const SystemState s = random_state(model, rng);
    const VectorXd a = coriolis_matrix(s, model) * s.qdot;
    const VectorXd b = velocity_product_forces(s, model);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-7 * std::max(1.0, b.cwiseAbs().maxCoeff()));
  }
}

TEST(Gravity, MatchesPotentialGradient) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const SystemState s = random_state(model, rng);
    const VectorXd g = gravity_vector(s, model);
    const double h = 1e-6;
    for (int j = 0; j < model.dof(); ++j) {
      SystemState p = s, m = s;
      p.q(j) += h;
      m.q(j) -= h;
      const double fd = (gravity_potential(p, model) - gravity_potential(m, model)) / (2 * h);
      EXPECT_NEAR(g(j), fd, 1e-6) << "coordinate " << j;
    }
  }
}

TEST(ForwardDynamics, HoverEquilibrium) {
  const PlantModel model = default_plant();
  const SystemState s = SystemState::zero(model);
  GeneralizedForces f = GeneralizedForces::zero(model);
  f.tau = uav_generalized_forces(s, model, model.inertia.total_mass() * 9.81, Vector3d::Zero());
  EXPECT_LT(forward_dynamics(s, f, model).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ForwardDynamics, FreeFall) {
  const PlantModel model = default_plant();
  const VectorXd qdd =
      forward_dynamics(SystemState::zero(model), GeneralizedForces::zero(model), model);
  EXPECT_NEAR(qdd(2), -9.81, 1e-12);
  EXPECT_LT(qdd.head<2>().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(qdd.tail(model.dof() - 3).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ForwardDynamics, EnergyRateVanishesWithoutInputs) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const SystemState s = random_state(model, rng);
    const VectorXd qdd = forward_dynamics(s, GeneralizedForces::zero(model), model);
    const double h = 1e-6;
    SystemState p{s.q + h * s.qdot, s.qdot + h * qdd};
    SystemState m{s.q - h * s.qdot, s.qdot - h * qdd};
    const double rate = (total_energy(p, model) - total_energy(m, model)) / (2 * h);
    EXPECT_LT(std::abs(rate), 1e-6);
  }
}

TEST(ForwardDynamics, TendonPowerEqualsEnergyRate) {
  // With tendon forces only, dE/dt equals the power of the tendon forces.
  PlantModel model = default_plant();
  model.inertia.gravity = 0.0;
  model.finalize();
  std::mt19937_64 rng(8);
  const SystemState s = random_state(model, rng);
  GeneralizedForces f = GeneralizedForces::zero(model);
  f.tau = tendon_generalized_forces(model, Vector4d(3.0, 1.0, 0.5, 2.0));
  const VectorXd qdd = forward_dynamics(s, f, model);
  const double h = 1e-6;
  const double rate = (total_energy({s.q + h * s.qdot, s.qdot + h * qdd}, model) -
                       total_energy({s.q - h * s.qdot, s.qdot - h * qdd}, model)) /
                      (2 * h);
  EXPECT_NEAR(rate, f.tau.dot(s.qdot), 1e-6);
}

TEST(ForwardDynamics, GimbalLockGuard) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  s.q(4) = 86.0 * kPi / 180.0;
  EXPECT_THROW(forward_dynamics(s, GeneralizedForces::zero(model), model), GimbalLockError);
}

TEST(Step, RestWithoutGravityIsUnchanged) {
  PlantModel model = default_plant();
  model.inertia.gravity = 0.0;
  model.finalize();
  const SystemState s = SystemState::zero(model);
  const SystemState next = step(s, GeneralizedForces::zero(model), model, 1e-3);
  EXPECT_EQ(next.q, s.q);
  EXPECT_EQ(next.qdot, s.qdot);
}

TEST(Step, BallisticUav) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  s.qdot(0) = 0.5;
  s.qdot(2) = 2.0;
  const double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) s = step(s, GeneralizedForces::zero(model), model, dt);
  // Quadratic trajectory: RK4 is exact up to rounding.
  EXPECT_NEAR(s.q(2), 2.0 - 0.5 * 9.81, 1e-10);
  EXPECT_NEAR(s.q(0), 0.5, 1e-12);
  EXPECT_LT(s.q.tail(model.dof() - 3).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Step, FourthOrderConvergence) {
  // Richardson: successive differences of h, h/2, h/4 runs shrink by 2^4.
  const PlantModel model = default_plant();
  std::mt19937_64 rng(9);
  const SystemState s0 = random_state(model, rng, 0.3);
  auto run = [&](double dt) {
    SystemState s = s0;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) s = step(s, GeneralizedForces::zero(model), model, dt);
    return s.q;
  };
  const VectorXd q1 = run(1e-3), q2 = run(5e-4), q4 = run(2.5e-4);
  const double ratio = (q1 - q2).norm() / (q2 - q4).norm();
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Step, BitIdenticalRepeats) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(10);
  const SystemState s0 = random_state(model, rng);
  SystemState a = s0, b = s0;
  for (int i = 0; i < 50; ++i) {
    a = step(a, GeneralizedForces::zero(model), model, 1e-3);
    b = step(b, GeneralizedForces::zero(model), model, 1e-3);
  }
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.qdot, b.qdot);
}

TEST(Step, RejectsBadInputs) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  EXPECT_THROW(step(s, GeneralizedForces::zero(model), model, 0.0), InvalidArgument);
  s.qdot(0) = std::nan("");
  EXPECT_THROW(step(s, GeneralizedForces::zero(model), model, 1e-3), NumericalFault);
}

TEST(Step, ShortConservativeRunKeepsEnergy) {
  PlantModel model = default_plant();
  model.inertia.gravity = 0.0;
  model.finalize();
  std::mt19937_64 rng(11);
  SystemState s = random_state(model, rng, 0.5);
  const double e0 = total_energy(s, model);
  for (int i = 0; i < 1000; ++i) s = step(s, GeneralizedForces::zero(model), model, 1e-3);
  EXPECT_LT(std::abs(total_energy(s, model) - e0) / e0, 1e-3);
}

TEST(TendonForces, CoContractionProducesNoForce) {
  const PlantModel model = default_plant();
  EXPECT_LT(tendon_generalized_forces(model, Vector4d::Constant(7.5)).norm(), 1e-15);
}

TEST(TendonForces, PullingTendonOneBendsTowardIt) {
  const PlantModel model = default_plant();
  const VectorXd tau = tendon_generalized_forces(model, Vector4d(2.0, 0.0, 0.0, 0.0));
  // Tendon 1 at azimuth 0 shortens for beta = 0 bends.
  EXPECT_NEAR(tau(kUavDof), 0.02 * 2.0, 1e-15);
  EXPECT_NEAR(tau(kUavDof + 1), 0.0, 1e-15);
}

TEST(UavForces, VirtualPowerMatchesPhysicalPower) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    const SystemState s = random_state(model, rng);
    const Vector3d torque(0.1, -0.3, 0.2);
    const VectorXd tau = uav_generalized_forces(s, model, 12.0, torque);
    const double physical =
        12.0 * s.uav_rotation().col(2).dot(s.velocity()) + torque.dot(s.body_rates());
    EXPECT_NEAR(tau.dot(s.qdot), physical, 1e-12);
  }
}

TEST(TipJacobian, MatchesFiniteDifferences) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(13);
  const SystemState s = random_state(model, rng);
  const MatrixXd j = tip_position_jacobian(s, model);
  const double h = 1e-6;
  for (int c = 0; c < model.dof(); ++c) {
    SystemState p = s, m = s;
    p.q(c) += h;
    m.q(c) -= h;
    const Vector3d fd =
        (tip_world_pose(p, model).translation - tip_world_pose(m, model).translation) / (2 * h);
    EXPECT_LT((j.col(c) - fd).norm(), 1e-8);
  }
  const Vector3d force(0.3, -0.1, 2.0);
  EXPECT_LT((tip_force_generalized(s, model, force) - j.transpose() * force).norm(), 1e-15);
}

TEST(Task, JacobianAndDriftMatchFiniteDifferences) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(14);
  SystemState s = random_state(model, rng);
  for (TaskKind kind :
       {TaskKind::kTipPosition, TaskKind::kTipOrientation, TaskKind::kTipHorizontal}) {
    const TaskKinematics t = evaluate_task(s, model, kind);
    const double h = 1e-6;
    SystemState p = s, m = s;
    p.q += h * s.qdot;
    m.q -= h * s.qdot;
    const TaskKinematics tp = evaluate_task(p, model, kind);
    const TaskKinematics tm = evaluate_task(m, model, kind);
    EXPECT_LT(((tp.value - tm.value) / (2 * h) - t.jacobian * s.qdot).norm(), 1e-7);
    const VectorXd jdot_qdot = (tp.jacobian - tm.jacobian) * s.qdot / (2 * h);
    EXPECT_LT((jdot_qdot - t.drift).norm(), 1e-6);
  }
}

TEST(Task, OrientationOfHangingArmIsLevel) {
  const PlantModel model = default_plant();
  SystemState s = SystemState::zero(model);
  const TaskKinematics t = evaluate_task(s, model, TaskKind::kTipOrientation);
  EXPECT_LT(t.value.norm(), 1e-15);
  // Bending every segment about x in the arm frame pitches the tip.
  for (int k = 0; k < model.segments(); ++k) s.set_segment(k, 0.1, 0.0);
  EXPECT_NEAR(evaluate_task(s, model, TaskKind::kTipOrientation).value(1), 0.5, 1e-12);
}

TEST(Task, HorizontalIsHeadOfTipPosition) {
  const PlantModel model = default_plant();
  std::mt19937_64 rng(15);
  const SystemState s = random_state(model, rng);
  const TaskKinematics p = evaluate_task(s, model, TaskKind::kTipPosition);
  const TaskKinematics h = evaluate_task(s, model, TaskKind::kTipHorizontal);
  EXPECT_EQ(task_dimension(TaskKind::kTipHorizontal), 2);
  EXPECT_EQ(h.value, p.value.head<2>());
  EXPECT_EQ(h.jacobian, p.jacobian.topRows<2>());
  EXPECT_EQ(h.drift, p.drift.head<2>());
}

TEST(PlantModel, ValidatesParameters) {
  PlantModel model;
  model.inertia.segment_masses = {0.01};
  EXPECT_THROW(model.finalize(), InvalidArgument);
  model = PlantModel{};
  model.inertia.spring_stiffness = -1.0;
  EXPECT_THROW(model.finalize(), InvalidArgument);
  model = PlantModel{};
  model.inertia.uav_inertia(0, 1) = 0.5;
  EXPECT_THROW(model.finalize(), InvalidArgument);
}

}  // namespace
}  // namespace acm
