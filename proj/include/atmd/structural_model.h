#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace atmd {

/// Rayleigh damping calibrated at selected modes. Mode indices are 1-based.
struct RayleighDamping {
  std::vector<int> modes;
  std::vector<double> ratios;
};

/// Explicit N x N damping matrix (symmetric tridiagonal).
struct ExplicitDamping {
  Eigen::MatrixXd matrix;
};

using DampingSpec = std::variant<RayleighDamping, ExplicitDamping>;

/// N-story shear building with the ATMD on the top floor.
struct BuildingModel {
  Eigen::VectorXd floor_masses;           // kg
  Eigen::VectorXd interstory_stiffnesses; // N/m
  DampingSpec damping_spec;
  Eigen::MatrixXd M;
  Eigen::MatrixXd C;
  Eigen::MatrixXd K;

  int stories() const { return static_cast<int>(floor_masses.size()); }
};

struct AtmdParams {
  double m_d = 0.0;   // kg
  double k_d = 0.0;   // N/m
  double c_d = 0.0;   // N s/m
  double mu_d = 0.0;  // Coulomb friction level, N
};

/// Bounds on the ground acceleration (m/s^2) and the friction force (N).
struct ExcitationBounds {
  double delta = 0.0;
  double varpi = 0.0;
};

/// Dominant first-mode quantities. phi0 is scaled so its top entry is 1.
struct ModalModel {
  Eigen::VectorXd phi0;
  double m0 = 0.0;
  double c0 = 0.0;
  double k0 = 0.0;
  double beta0 = 0.0;
  double omega0 = 0.0;
};

/// Coupled building + ATMD model, state z = [x_d, x_N, dx_d, dx_N]:
///   dz/dt = A z + B (u - f(z3)) + D xg_dd
struct PlantStateSpace {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
  Eigen::Vector4d D;
  ExcitationBounds bounds;
  // Parameters the sliding-mode design reads back.
  double m0 = 0.0;
  double m_d = 0.0;
  double beta0 = 0.0;
  double omega0 = 0.0;
};

struct RayleighCoefficients {
  Eigen::MatrixXd C;
  double a0 = 0.0;  // mass-proportional
  double a1 = 0.0;  // stiffness-proportional
};

/// Generalized eigenpairs of (K, M), ascending. Columns of `modes` are
/// M-orthonormal.
struct ModalBasis {
  Eigen::VectorXd omegas;  // rad/s
  Eigen::MatrixXd modes;
};

BuildingModel build_shear_building(const Eigen::VectorXd& masses,
                                   const Eigen::VectorXd& stiffnesses,
                                   const DampingSpec& damping);

/// Mass and stiffness matrices of a shear building (no validation of the
/// damping part).
Eigen::MatrixXd shear_stiffness_matrix(const Eigen::VectorXd& stiffnesses);

ModalBasis natural_modes(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K);

/// C = a0 M + a1 K matching the damping ratios at the two given modes. A
/// single (mode, ratio) pair is accepted only for one-story buildings and
/// gives C = 2 zeta omega1 M.
RayleighCoefficients rayleigh_damping(const Eigen::MatrixXd& M,
                                      const Eigen::MatrixXd& K,
                                      const RayleighDamping& spec);

ModalModel modal_reduce(const BuildingModel& building);

PlantStateSpace assemble_plant(const ModalModel& modal, const AtmdParams& atmd,
                               const ExcitationBounds& bounds);

/// [B, AB, A^2 B, A^3 B]
Eigen::Matrix4d controllability_matrix(const Eigen::Matrix4d& A,
                                       const Eigen::Vector4d& B);

/// Reciprocal 2-norm condition number of the controllability matrix.
double controllability_rcond(const Eigen::Matrix4d& A,
                             const Eigen::Vector4d& B);

inline constexpr double kControllabilityTolerance = 1e-12;

}  // namespace atmd
