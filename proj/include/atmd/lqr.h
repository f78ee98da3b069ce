#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "atmd/structural_model.h"

namespace atmd {

/// Largest acceptable magnitudes of the states and the control force.
struct LqrMaxima {
  double z1 = 0.0;  // m
  double z2 = 0.0;  // m
  double z3 = 0.0;  // m/s
  double z4 = 0.0;  // m/s
  double u = 0.0;   // N
};

struct LqrSpec {
  LqrMaxima maxima;
  Eigen::Matrix4d Q;
  double r = 1.0;
};

struct LqrResult {
  Eigen::Matrix4d P;
  Eigen::RowVector4d k;
  std::array<std::complex<double>, 4> closed_loop_eigs;
  double residual = 0.0;  // Frobenius norm of the Riccati residual
  int iterations = 0;
};

struct EquivalentPoles {
  double zeta = 0.0;
  double omega_n = 0.0;
  double omega_ratio = 0.0;  // omega_n / omega0
};

/// Bryson's rule: q_ii = 1 / max(z_i)^2, r = 1 / max(u)^2.
LqrSpec bryson_weights(const LqrMaxima& maxima);

/// Stabilizing solution of A^T P + P A - P B B^T P / r + Q = 0 and the gain
/// k = B^T P / r, by Newton-Kleinman iteration from a pole-placement gain.
LqrResult solve_lqr(const Eigen::Matrix4d& A, const Eigen::Vector4d& B,
                    const Eigen::Matrix4d& Q, double r);
LqrResult solve_lqr(const PlantStateSpace& plant, const LqrSpec& spec);

double riccati_residual(const Eigen::Matrix4d& A, const Eigen::Vector4d& B,
                        const Eigen::Matrix4d& Q, double r,
                        const Eigen::Matrix4d& P);

/// Solves A^T X + X A + W = 0 for X (A Hurwitz).
Eigen::Matrix4d solve_lyapunov(const Eigen::Matrix4d& A,
                               const Eigen::Matrix4d& W);

/// Damping ratio and natural frequency of the least damped complex pair.
EquivalentPoles lqr_equivalent_polespec(const LqrResult& result, double omega0);

}  // namespace atmd
