#pragma once

#include <array>
#include <complex>
#include <span>

#include <Eigen/Dense>

#include "atmd/structural_model.h"

namespace atmd {

using Complex = std::complex<double>;

/// Desired closed-loop poles. The dominant pair is
/// lambda_{1,2} = -zeta omega_n -/+ j omega_n sqrt(1 - zeta^2); lambda3 and
/// lambda4 are real and negative. lambda4 only enters the equivalent
/// state-feedback gain, never the sliding surface.
struct PoleSpec {
  double zeta = 0.5;
  double omega_n = 1.0;
  double lambda3 = -1.5;
  double lambda4 = -5.0;

  /// lambda3 = -3 zeta omega_n, lambda4 = -10 zeta omega_n.
  static PoleSpec from_dominant(double zeta, double omega_n);

  Complex lambda1() const;
  Complex lambda2() const;
  std::array<Complex, 3> sliding_poles() const;
  std::array<Complex, 4> all_poles() const;
  void validate() const;
};

/// Third-order dynamics on the surface sigma = 0, in w = T z coordinates:
///   dz*/dt = A1 z* + B1 xg_dd,   u = nu1 z* + alpha1 xg_dd.
struct ReducedDynamics {
  Eigen::Matrix3d A1;
  Eigen::Vector3d B1;
  Eigen::Matrix4d T;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Eigen::RowVector3d nu1;
};

struct SlidingDesign {
  PoleSpec poles;
  Eigen::RowVector4d eta;
  Eigen::RowVector4d k_gain;
  ReducedDynamics reduced;
  double M0 = 0.0;
  double epsilon = 0.05;
};

inline constexpr double kDefaultEpsilon = 0.05;
inline constexpr double kDefaultVarsigma = 0.5;

/// Evaluates the real matrix polynomial prod_i (A - lambda_i I). Complex roots
/// must come in conjugate pairs; each pair is applied as the real quadratic
/// A^2 - 2 Re(lambda) A + |lambda|^2 I.
Eigen::MatrixXd matrix_polynomial(const Eigen::MatrixXd& A,
                                  std::span<const Complex> roots);

/// Last row of the inverse controllability matrix.
Eigen::RowVector4d ackermann_selector(const PlantStateSpace& plant);
Eigen::RowVector4d ackermann_selector(const Eigen::Matrix4d& A,
                                      const Eigen::Vector4d& B);

/// Full-state gain placing eig(A - B k^T) at `poles` (Ackermann's formula).
Eigen::RowVector4d ackermann_gain(const PlantStateSpace& plant,
                                  std::span<const Complex> poles);
Eigen::RowVector4d ackermann_gain(const Eigen::Matrix4d& A,
                                  const Eigen::Vector4d& B,
                                  std::span<const Complex> poles);

/// eta^T = e^T P1(A) with P1 the polynomial with roots lambda1..lambda3.
Eigen::RowVector4d sliding_vector(const PlantStateSpace& plant,
                                  std::span<const Complex> sliding_poles);

ReducedDynamics reduced_dynamics(const PlantStateSpace& plant,
                                 const Eigen::RowVector4d& eta,
                                 const Eigen::RowVector4d& k_gain,
                                 double lambda4);

/// Eta, gain and reduced dynamics for the given poles. M0 is left at zero;
/// the tuner fills it in.
SlidingDesign design_sliding_mode(const PlantStateSpace& plant,
                                  const PoleSpec& poles,
                                  double epsilon = kDefaultEpsilon);

/// M0 = varpi + chi + varsigma.
double switching_gain(double chi, double varpi,
                      double varsigma = kDefaultVarsigma);

/// Boundary-layer saturation of -M0 sign(sigma).
double control_force(double sigma, double M0,
                     double epsilon = kDefaultEpsilon);

}  // namespace atmd
