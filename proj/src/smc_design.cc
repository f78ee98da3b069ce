#include "atmd/smc_design.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "atmd/errors.h"

namespace atmd {
namespace {

double conjugate_tolerance(const Complex& z) {
  return 1e-9 * std::max(1.0, std::abs(z));
}

}  // namespace

PoleSpec PoleSpec::from_dominant(double zeta, double omega_n) {
  PoleSpec p;
  p.zeta = zeta;
  p.omega_n = omega_n;
  p.lambda3 = -3.0 * zeta * omega_n;
  p.lambda4 = -10.0 * zeta * omega_n;
  return p;
}

Complex PoleSpec::lambda1() const {
  return {-zeta * omega_n, -omega_n * std::sqrt(1.0 - zeta * zeta)};
}

Complex PoleSpec::lambda2() const { return std::conj(lambda1()); }

std::array<Complex, 3> PoleSpec::sliding_poles() const {
  return {lambda1(), lambda2(), Complex(lambda3, 0.0)};
}

std::array<Complex, 4> PoleSpec::all_poles() const {
  return {lambda1(), lambda2(), Complex(lambda3, 0.0), Complex(lambda4, 0.0)};
}

void PoleSpec::validate() const {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw ValidationError("damping ratio zeta must lie in (0, 1)");
  }
  if (!(omega_n > 0.0)) {
    throw ValidationError("natural frequency omega_n must be positive");
  }
  if (!(lambda3 < 0.0) || !(lambda4 < 0.0)) {
    throw ValidationError("real poles lambda3 and lambda4 must be negative");
  }
}

Eigen::MatrixXd matrix_polynomial(const Eigen::MatrixXd& A,
                                  std::span<const Complex> roots) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd P = I;
  std::vector<bool> used(roots.size(), false);

  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const Complex r = roots[i];
    used[i] = true;
    if (std::abs(r.imag()) <= conjugate_tolerance(r)) {
      P = P * (A - r.real() * I);
      continue;
    }
    std::size_t partner = roots.size();
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - std::conj(r)) <= conjugate_tolerance(r)) {
        partner = j;
        break;
      }
    }
    if (partner == roots.size()) {
      std::ostringstream msg;
      msg << "pole set is not closed under conjugation: " << r
          << " has no conjugate partner";
      throw ValidationError(msg.str());
    }
    used[partner] = true;
    P = P * (A * A - 2.0 * r.real() * A + std::norm(r) * I);
  }
  return P;
}

Eigen::RowVector4d ackermann_selector(const Eigen::Matrix4d& A,
                                      const Eigen::Vector4d& B) {
  const double rcond = controllability_rcond(A, B);
  if (!(rcond > kControllabilityTolerance)) {
    std::ostringstream msg;
    msg << "pair (A, B) is not controllable (rcond = " << rcond << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::Matrix4d ctrb = controllability_matrix(A, B);
  const Eigen::Vector4d e =
      ctrb.transpose().fullPivLu().solve(Eigen::Vector4d::UnitW());
  return e.transpose();
}

Eigen::RowVector4d ackermann_selector(const PlantStateSpace& plant) {
  return ackermann_selector(plant.A, plant.B);
}

Eigen::RowVector4d ackermann_gain(const Eigen::Matrix4d& A,
                                  const Eigen::Vector4d& B,
                                  std::span<const Complex> poles) {
  if (poles.size() != 4) {
    throw ValidationError("ackermann_gain needs exactly four poles");
  }
  const Eigen::RowVector4d e = ackermann_selector(A, B);
  const Eigen::MatrixXd P = matrix_polynomial(A, poles);
  return e * P;
}

Eigen::RowVector4d ackermann_gain(const PlantStateSpace& plant,
                                  std::span<const Complex> poles) {
  return ackermann_gain(plant.A, plant.B, poles);
}

Eigen::RowVector4d sliding_vector(const PlantStateSpace& plant,
                                  std::span<const Complex> sliding_poles) {
  if (sliding_poles.size() != 3) {
    throw ValidationError("sliding_vector needs exactly three poles");
  }
  const Eigen::RowVector4d e = ackermann_selector(plant);
  const Eigen::MatrixXd P1 = matrix_polynomial(plant.A, sliding_poles);
  return e * P1;
}

ReducedDynamics reduced_dynamics(const PlantStateSpace& plant,
                                 const Eigen::RowVector4d& eta,
                                 const Eigen::RowVector4d& k_gain,
                                 double lambda4) {
  // det(T) = eta4.
  if (std::abs(eta(3)) <= 1e-13 * eta.cwiseAbs().maxCoeff()) {
    throw InfeasibleDesign(
        "state transformation T is singular (eta4 vanishes)");
  }

  ReducedDynamics r;
  r.T.setIdentity();
  r.T.row(3) = eta;
  const Eigen::Matrix4d T_inv = r.T.inverse();

  const Eigen::Matrix4d closed = plant.A - plant.B * k_gain;
  const Eigen::Matrix4d transformed = r.T * closed * T_inv;
  r.A1 = transformed.topLeftCorner<3, 3>();

  const double beta0 = plant.beta0;
  r.alpha1 = beta0 * (eta(3) - eta(2)) + eta(2);
  r.alpha2 = (beta0 - 1.0) + r.alpha1 * (plant.m0 + plant.m_d) /
                                 (plant.m0 * plant.m_d);
  r.B1 = Eigen::Vector3d(0.0, 0.0, r.alpha2);

  Eigen::RowVector4d nu = -eta * plant.A * T_inv;
  nu(3) += lambda4;
  r.nu1 = nu.head<3>();
  return r;
}

SlidingDesign design_sliding_mode(const PlantStateSpace& plant,
                                  const PoleSpec& poles, double epsilon) {
  poles.validate();
  if (!(epsilon > 0.0)) {
    throw ValidationError("boundary layer epsilon must be positive");
  }
  SlidingDesign d;
  d.poles = poles;
  d.epsilon = epsilon;
  const auto sliding = poles.sliding_poles();
  const auto all = poles.all_poles();
  d.eta = sliding_vector(plant, sliding);
  d.k_gain = ackermann_gain(plant, all);
  d.reduced = reduced_dynamics(plant, d.eta, d.k_gain, poles.lambda4);
  return d;
}

double switching_gain(double chi, double varpi, double varsigma) {
  if (!(chi >= 0.0) || !(varpi >= 0.0) || !(varsigma > 0.0)) {
    throw ValidationError(
        "switching gain needs chi >= 0, varpi >= 0 and varsigma > 0");
  }
  return varpi + chi + varsigma;
}

double control_force(double sigma, double M0, double epsilon) {
  if (sigma > epsilon) return -M0;
  if (sigma < -epsilon) return M0;
  return -M0 * sigma / epsilon;
}

}  // namespace atmd
