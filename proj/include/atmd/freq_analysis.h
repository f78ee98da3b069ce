#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atmd/smc_design.h"

namespace atmd {

/// G(s) = gain * num(s) / den(s); coefficients in descending powers of s.
struct RationalTf {
  Eigen::VectorXd numerator;
  Eigen::VectorXd denominator;
  double gain = 1.0;

  std::complex<double> evaluate(std::complex<double> s) const;
  std::complex<double> at_frequency(double omega) const {
    return evaluate({0.0, omega});
  }
};

/// Evaluates a real polynomial (descending coefficients) at s.
std::complex<double> polyval(const Eigen::VectorXd& coefficients,
                             std::complex<double> s);

/// Ground acceleration to z1, z2, z3 and u while sliding on sigma = 0.
struct SlidingTransferFunctions {
  RationalTf G1;
  RationalTf G2;
  RationalTf G3;
  RationalTf Gu;
  double psi1 = 0.0;  // zero of G1 and G3, -eta2/eta4
  double psi2 = 0.0;  // zero of G2, -eta1/eta3
};

/// Uniform linear grid of `samples` points covering [low, high] inclusive.
struct FrequencyBand {
  double low = 2.0 * std::numbers::pi;   // rad/s (1 Hz)
  double high = 40.0 * std::numbers::pi; // rad/s (20 Hz)
  int samples = 2000;

  void validate() const;
  double omega(int k) const;
};

struct BandMetrics {
  double kappa1 = 0.0;  // m
  double kappa2 = 0.0;  // m
  double kappa3 = 0.0;  // m/s
  double kappa_u = 0.0; // N
  double chi = 0.0;     // N, peak of |delta Gu|
  FrequencyBand band;
};

/// Zeros psi1 = -eta2/eta4 and psi2 = -eta1/eta3. Throws InfeasibleDesign
/// when eta3 or eta4 vanishes.
std::pair<double, double> sliding_zeros(const Eigen::RowVector4d& eta);

SlidingTransferFunctions build_transfer_functions(const SlidingDesign& design);

/// C (sI - A1)^{-1} B1 (+ feedthrough) evaluated directly from the reduced
/// state-space realization.
std::complex<double> evaluate_state_space(const ReducedDynamics& reduced,
                                          const Eigen::RowVector3d& C,
                                          double feedthrough,
                                          std::complex<double> s);

/// RMS of |delta G(j w_k)| over the band grid.
double band_rms(const RationalTf& tf, double delta, const FrequencyBand& band);

/// Max of |delta G(j w_k)| over the same grid as band_rms.
double band_peak(const RationalTf& tf, double delta, const FrequencyBand& band);

BandMetrics band_metrics(const SlidingTransferFunctions& tfs, double delta,
                         const FrequencyBand& band);

/// Same as band_metrics but skips chi (the tuner only needs chi for the
/// optimum).
BandMetrics band_rms_metrics(const SlidingTransferFunctions& tfs, double delta,
                             const FrequencyBand& band);

/// CSV with columns omega,H1,H2,H3,Hu (magnitudes of delta * G).
std::string frequency_response_csv(const SlidingTransferFunctions& tfs,
                                   double delta, const FrequencyBand& band);
void write_frequency_response(const std::string& path,
                              const SlidingTransferFunctions& tfs,
                              double delta, const FrequencyBand& band);

}  // namespace atmd
