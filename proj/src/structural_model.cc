#include "atmd/structural_model.h"

#include <cmath>
#include <sstream>
#include <string>

#include "atmd/errors.h"

namespace atmd {
namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

void validate_explicit_damping(const Eigen::MatrixXd& C, int n) {
  require(C.rows() == n && C.cols() == n,
          "damping matrix must be " + std::to_string(n) + "x" +
              std::to_string(n));
  require(C.allFinite(), "damping matrix has non-finite entries");
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  require((C - C.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "damping matrix must be symmetric");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(i - j) > 1) {
        require(C(i, j) == 0.0, "damping matrix must be tridiagonal");
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd shear_stiffness_matrix(const Eigen::VectorXd& k) {
  const Eigen::Index n = k.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = k(i) + (i + 1 < n ? k(i + 1) : 0.0);
    if (i + 1 < n) {
      K(i, i + 1) = -k(i + 1);
      K(i + 1, i) = -k(i + 1);
    }
  }
  return K;
}

BuildingModel build_shear_building(const Eigen::VectorXd& masses,
                                   const Eigen::VectorXd& stiffnesses,
                                   const DampingSpec& damping) {
  require(masses.size() >= 1, "building needs at least one story");
  require(masses.size() == stiffnesses.size(),
          "floor mass and stiffness lists differ in length (" +
              std::to_string(masses.size()) + " vs " +
              std::to_string(stiffnesses.size()) + ")");
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    require(std::isfinite(masses(i)) && masses(i) > 0.0,
            "floor " + std::to_string(i + 1) + ": mass must be positive");
    require(std::isfinite(stiffnesses(i)) && stiffnesses(i) > 0.0,
            "floor " + std::to_string(i + 1) + ": stiffness must be positive");
  }

  BuildingModel b;
  b.floor_masses = masses;
  b.interstory_stiffnesses = stiffnesses;
  b.damping_spec = damping;
  b.M = masses.asDiagonal();
  b.K = shear_stiffness_matrix(stiffnesses);

  if (const auto* rayleigh = std::get_if<RayleighDamping>(&damping)) {
    b.C = rayleigh_damping(b.M, b.K, *rayleigh).C;
  } else {
    const auto& explicit_c = std::get<ExplicitDamping>(damping).matrix;
    validate_explicit_damping(explicit_c, b.stories());
    b.C = explicit_c;
  }
  return b;
}

ModalBasis natural_modes(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K) {
  // M is diagonal positive, so the Cholesky reduction to a standard symmetric
  // problem is exact and the spectrum is real.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      K, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("generalized eigen-solver failed on (K, M)");
  }
  const Eigen::VectorXd& lambdas = solver.eigenvalues();
  if (lambdas.minCoeff() <= 0.0) {
    throw NumericalError("stiffness matrix is not positive definite");
  }
  return {lambdas.cwiseSqrt(), solver.eigenvectors()};
}

RayleighCoefficients rayleigh_damping(const Eigen::MatrixXd& M,
                                      const Eigen::MatrixXd& K,
                                      const RayleighDamping& spec) {
  const int n = static_cast<int>(M.rows());
  require(spec.modes.size() == spec.ratios.size(),
          "rayleigh damping: modes and ratios differ in length");
  require(spec.modes.size() == 1 || spec.modes.size() == 2,
          "rayleigh damping needs one or two (mode, ratio) pairs");
  require(spec.modes.size() == 2 || n == 1,
          "rayleigh damping with a single pair is only defined for one story");
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    require(spec.modes[i] >= 1 && spec.modes[i] <= n,
            "rayleigh damping: mode index " + std::to_string(spec.modes[i]) +
                " out of range [1, " + std::to_string(n) + "]");
    require(spec.ratios[i] > 0.0 && spec.ratios[i] < 1.0,
            "rayleigh damping: ratio must lie in (0, 1)");
  }

  const ModalBasis basis = natural_modes(M, K);
  RayleighCoefficients out;
  if (spec.modes.size() == 1) {
    const double w = basis.omegas(spec.modes[0] - 1);
    out.a0 = 2.0 * spec.ratios[0] * w;
    out.a1 = 0.0;
  } else {
    const double w1 = basis.omegas(spec.modes[0] - 1);
    const double w2 = basis.omegas(spec.modes[1] - 1);
    // zeta_i = (a0 / w_i + a1 w_i) / 2
    Eigen::Matrix2d S;
    S << 1.0 / w1, w1, 1.0 / w2, w2;
    S *= 0.5;
    const double det = S.determinant();
    if (std::abs(det) <= 1e-12 * S.cwiseAbs().maxCoeff() *
                             S.cwiseAbs().maxCoeff()) {
      throw NumericalError(
          "rayleigh damping: coincident modal frequencies make the "
          "calibration singular");
    }
    const Eigen::Vector2d a =
        S.partialPivLu().solve(Eigen::Vector2d(spec.ratios[0], spec.ratios[1]));
    out.a0 = a(0);
    out.a1 = a(1);
  }
  out.C = out.a0 * M + out.a1 * K;
  return out;
}

ModalModel modal_reduce(const BuildingModel& building) {
  const ModalBasis basis = natural_modes(building.M, building.K);
  Eigen::VectorXd phi = basis.modes.col(0);
  const double top = phi(phi.size() - 1);
  if (std::abs(top) <= 1e-12 * phi.cwiseAbs().maxCoeff()) {
    throw NumericalError(
        "first mode has a zero top-floor component and cannot be scaled");
  }
  phi /= top;
  phi(phi.size() - 1) = 1.0;

  ModalModel m;
  m.phi0 = phi;
  m.m0 = phi.dot(building.M * phi);
  m.c0 = phi.dot(building.C * phi);
  m.k0 = phi.dot(building.K * phi);
  m.beta0 = phi.dot(building.M * Eigen::VectorXd::Ones(phi.size())) / m.m0;
  m.omega0 = std::sqrt(m.k0 / m.m0);
  return m;
}

Eigen::Matrix4d controllability_matrix(const Eigen::Matrix4d& A,
                                       const Eigen::Vector4d& B) {
  Eigen::Matrix4d ctrb;
  ctrb.col(0) = B;
  for (int i = 1; i < 4; ++i) ctrb.col(i) = A * ctrb.col(i - 1);
  return ctrb;
}

double controllability_rcond(const Eigen::Matrix4d& A,
                             const Eigen::Vector4d& B) {
  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(controllability_matrix(A, B));
  const auto& s = svd.singularValues();
  return s(0) > 0.0 ? s(3) / s(0) : 0.0;
}

PlantStateSpace assemble_plant(const ModalModel& modal, const AtmdParams& atmd,
                               const ExcitationBounds& bounds) {
  require(modal.m0 > 0.0 && modal.k0 > 0.0,
          "modal mass and stiffness must be positive");
  require(modal.c0 >= 0.0, "modal damping must be non-negative");
  require(std::isfinite(modal.beta0), "participation factor must be finite");
  require(atmd.m_d > 0.0, "atmd mass must be positive");
  require(atmd.k_d >= 0.0, "atmd stiffness must be non-negative");
  require(atmd.c_d >= 0.0, "atmd damping must be non-negative");
  require(atmd.mu_d >= 0.0, "atmd friction level must be non-negative");
  require(bounds.delta > 0.0, "ground acceleration bound delta must be positive");
  require(bounds.varpi >= 0.0, "friction bound varpi must be non-negative");

  const double m0 = modal.m0, md = atmd.m_d;
  const double s = (m0 + md) / (m0 * md);

  PlantStateSpace p;
  p.A << 0.0, 0.0, 1.0, 0.0,
         0.0, 0.0, 0.0, 1.0,
         -atmd.k_d * s, modal.k0 / m0, -atmd.c_d * s, modal.c0 / m0,
         atmd.k_d / m0, -modal.k0 / m0, atmd.c_d / m0, -modal.c0 / m0;
  p.B << 0.0, 0.0, s, -1.0 / m0;
  p.D << 0.0, 0.0, modal.beta0 - 1.0, -modal.beta0;
  p.bounds = bounds;
  p.m0 = m0;
  p.m_d = md;
  p.beta0 = modal.beta0;
  p.omega0 = modal.omega0 > 0.0 ? modal.omega0 : std::sqrt(modal.k0 / m0);

  const double rcond = controllability_rcond(p.A, p.B);
  if (!(rcond > kControllabilityTolerance)) {
    std::ostringstream msg;
    msg << "plant (A, B) is not controllable (rcond = " << rcond << ")";
    throw NumericalError(msg.str());
  }
  return p;
}

}  // namespace atmd
