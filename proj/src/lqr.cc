#include "atmd/lqr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "atmd/errors.h"
#include "atmd/smc_design.h"

namespace atmd {
namespace {

constexpr int kMaxIterations = 200;

std::array<std::complex<double>, 4> eigenvalues(const Eigen::Matrix4d& M) {
  const Eigen::EigenSolver<Eigen::Matrix4d> solver(M, false);
  std::array<std::complex<double>, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = solver.eigenvalues()(i);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return std::make_pair(a.real(), a.imag()) <
           std::make_pair(b.real(), b.imag());
  });
  return out;
}

bool hurwitz(const Eigen::Matrix4d& M) {
  for (const auto& e : eigenvalues(M)) {
    if (!(e.real() < 0.0)) return false;
  }
  return true;
}

// Mirrors the open-loop spectrum into the left half-plane with a margin; the
// result is a conjugate-closed set, so Ackermann yields a real gain.
Eigen::RowVector4d stabilizing_gain(const Eigen::Matrix4d& A,
                                    const Eigen::Vector4d& B) {
  const auto open = eigenvalues(A);
  double scale = 1.0;
  for (const auto& e : open) scale = std::max(scale, std::abs(e));
  std::array<Complex, 4> poles;
  for (int i = 0; i < 4; ++i) {
    const double im = std::abs(open[i].imag()) < 1e-12 * scale ? 0.0
                                                               : open[i].imag();
    poles[i] = {-std::abs(open[i].real()) - 0.5 * scale, im};
  }
  return ackermann_gain(A, B, poles);
}

}  // namespace

LqrSpec bryson_weights(const LqrMaxima& m) {
  for (double v : {m.z1, m.z2, m.z3, m.z4, m.u}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("Bryson maxima must be positive and finite");
    }
  }
  LqrSpec spec;
  spec.maxima = m;
  spec.Q.setZero();
  spec.Q.diagonal() << 1.0 / (m.z1 * m.z1), 1.0 / (m.z2 * m.z2),
      1.0 / (m.z3 * m.z3), 1.0 / (m.z4 * m.z4);
  spec.r = 1.0 / (m.u * m.u);
  return spec;
}

Eigen::Matrix4d solve_lyapunov(const Eigen::Matrix4d& A,
                               const Eigen::Matrix4d& W) {
  // vec(A^T X + X A) = (I kron A^T + A^T kron I) vec(X)
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d At = A.transpose();
  Eigen::Matrix<double, 16, 16> L;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      L.block<4, 4>(4 * i, 4 * j) = I(i, j) * At + At(i, j) * I;
    }
  }
  const Eigen::Matrix<double, 16, 1> w =
      Eigen::Map<const Eigen::Matrix<double, 16, 1>>(W.data());
  const Eigen::Matrix<double, 16, 1> x = L.fullPivLu().solve(-w);
  Eigen::Matrix4d X = Eigen::Map<const Eigen::Matrix4d>(x.data());
  return 0.5 * (X + X.transpose());
}

double riccati_residual(const Eigen::Matrix4d& A, const Eigen::Vector4d& B,
                        const Eigen::Matrix4d& Q, double r,
                        const Eigen::Matrix4d& P) {
  const Eigen::Matrix4d R = A.transpose() * P + P * A -
                            P * B * B.transpose() * P / r + Q;
  return R.norm();
}

LqrResult solve_lqr(const Eigen::Matrix4d& A, const Eigen::Vector4d& B,
                    const Eigen::Matrix4d& Q, double r) {
  if (!(r > 0.0)) throw ValidationError("LQR weight r must be positive");
  if ((Q - Q.transpose()).norm() > 1e-12 * std::max(1.0, Q.norm())) {
    throw ValidationError("LQR weight Q must be symmetric");
  }

  Eigen::RowVector4d k = stabilizing_gain(A, B);
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
  LqrResult out;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Eigen::Matrix4d closed = A - B * k;
    if (!hurwitz(closed)) {
      throw NumericalError("Newton-Kleinman iterate lost stability");
    }
    P = solve_lyapunov(closed, Q + k.transpose() * k * r);
    const Eigen::RowVector4d next = B.transpose() * P / r;
    const double change = (next - k).norm() / std::max(1.0, next.norm());
    k = next;
    out.iterations = it;
    if (!P.allFinite()) break;
    // Quadratic convergence: stop once the step stops shrinking near
    // round-off.
    if (change < 1e-15 || (change < 1e-12 && change >= previous)) break;
    previous = change;
  }
  if (!P.allFinite() || !k.allFinite()) {
    throw NumericalError("Riccati iteration diverged");
  }

  out.P = 0.5 * (P + P.transpose());
  out.k = B.transpose() * out.P / r;
  out.residual = riccati_residual(A, B, Q, r, out.P);
  const Eigen::LLT<Eigen::Matrix4d> llt(out.P);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Riccati solution is not positive definite");
  }
  const Eigen::Matrix4d closed = A - B * out.k;
  out.closed_loop_eigs = eigenvalues(closed);
  if (!hurwitz(closed)) {
    throw NumericalError("LQR closed loop is not stable");
  }
  const double tolerance = 1e-8 * std::max(1.0, Q.norm());
  if (!(out.residual <= tolerance)) {
    std::ostringstream msg;
    msg << "Riccati iteration did not converge (residual " << out.residual
        << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

LqrResult solve_lqr(const PlantStateSpace& plant, const LqrSpec& spec) {
  return solve_lqr(plant.A, plant.B, spec.Q, spec.r);
}

EquivalentPoles lqr_equivalent_polespec(const LqrResult& result,
                                        double omega0) {
  if (!(omega0 > 0.0)) throw ValidationError("omega0 must be positive");
  bool found = false;
  EquivalentPoles best;
  for (const auto& e : result.closed_loop_eigs) {
    if (std::abs(e.imag()) <= 1e-9 * std::abs(e)) continue;
    const double wn = std::abs(e);
    const double zeta = -e.real() / wn;
    if (!found || zeta < best.zeta) {
      best = {zeta, wn, wn / omega0};
      found = true;
    }
  }
  if (!found) {
    throw ValidationError("closed loop has no complex pole pair");
  }
  return best;
}

}  // namespace atmd
