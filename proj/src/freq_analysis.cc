#include "atmd/freq_analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "atmd/errors.h"
#include "atmd/number_format.h"

namespace atmd {
namespace {

// Descending coefficients of (s - a)(s - b) style products.
Eigen::VectorXd poly_multiply(const Eigen::VectorXd& p,
                              const Eigen::VectorXd& q) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(p.size() + q.size() - 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index j = 0; j < q.size(); ++j) r(i + j) += p(i) * q(j);
  }
  return r;
}

// Adds q into p aligned at the constant term.
Eigen::VectorXd poly_add(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const Eigen::Index n = std::max(p.size(), q.size());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r.tail(p.size()) += p;
  r.tail(q.size()) += q;
  return r;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(values.size());
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

std::complex<double> polyval(const Eigen::VectorXd& c,
                             std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) acc = acc * s + c(i);
  return acc;
}

std::complex<double> RationalTf::evaluate(std::complex<double> s) const {
  return gain * polyval(numerator, s) / polyval(denominator, s);
}

void FrequencyBand::validate() const {
  if (!(low > 0.0) || !(high > low)) {
    throw ValidationError("frequency band must satisfy 0 < low < high");
  }
  if (samples < 2) {
    throw ValidationError("frequency band needs at least two samples");
  }
}

double FrequencyBand::omega(int k) const {
  if (k == samples - 1) return high;
  return low + (high - low) * static_cast<double>(k) /
                   static_cast<double>(samples - 1);
}

std::pair<double, double> sliding_zeros(const Eigen::RowVector4d& eta) {
  const double scale = eta.cwiseAbs().maxCoeff();
  if (std::abs(eta(3)) <= 1e-13 * scale || std::abs(eta(2)) <= 1e-13 * scale) {
    throw InfeasibleDesign(
        "sliding zeros undefined: eta3 or eta4 vanishes");
  }
  return {-eta(1) / eta(3), -eta(0) / eta(2)};
}

SlidingTransferFunctions build_transfer_functions(const SlidingDesign& design) {
  const auto [psi1, psi2] = sliding_zeros(design.eta);
  const double zeta = design.poles.zeta;
  const double wn = design.poles.omega_n;
  const double l3 = design.poles.lambda3;
  const double alpha1 = design.reduced.alpha1;
  const double alpha2 = design.reduced.alpha2;
  const double eta3 = design.eta(2), eta4 = design.eta(3);

  const Eigen::VectorXd den =
      poly_multiply(vec({1.0, -l3}), vec({1.0, 2.0 * zeta * wn, wn * wn}));

  SlidingTransferFunctions t;
  t.psi1 = psi1;
  t.psi2 = psi2;
  t.G1 = {vec({1.0, -psi1}), den, alpha2};
  t.G2 = {vec({1.0, -psi2}), den, -alpha2 * eta3 / eta4};
  t.G3 = {vec({1.0, -psi1, 0.0}), den, alpha2};

  // Gu = nu1 (sI - A1)^{-1} B1 + alpha1 = sum_i nu1_i G_i + alpha1.
  const Eigen::RowVector3d& nu1 = design.reduced.nu1;
  Eigen::VectorXd num = alpha1 * den;
  num = poly_add(num, nu1(0) * t.G1.gain * t.G1.numerator);
  num = poly_add(num, nu1(1) * t.G2.gain * t.G2.numerator);
  num = poly_add(num, nu1(2) * t.G3.gain * t.G3.numerator);
  t.Gu = {num, den, 1.0};
  return t;
}

std::complex<double> evaluate_state_space(const ReducedDynamics& reduced,
                                          const Eigen::RowVector3d& C,
                                          double feedthrough,
                                          std::complex<double> s) {
  const Eigen::Matrix3cd M =
      s * Eigen::Matrix3cd::Identity() - reduced.A1.cast<std::complex<double>>();
  const Eigen::Vector3cd x =
      M.partialPivLu().solve(reduced.B1.cast<std::complex<double>>());
  return (C.cast<std::complex<double>>() * x)(0) + feedthrough;
}

double band_rms(const RationalTf& tf, double delta, const FrequencyBand& band) {
  band.validate();
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  double sum = 0.0;
  for (int k = 0; k < band.samples; ++k) {
    sum += std::norm(tf.at_frequency(band.omega(k)));
  }
  return delta * std::sqrt(sum / band.samples);
}

double band_peak(const RationalTf& tf, double delta, const FrequencyBand& band) {
  band.validate();
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  double peak = 0.0;
  for (int k = 0; k < band.samples; ++k) {
    peak = std::max(peak, std::abs(tf.at_frequency(band.omega(k))));
  }
  return delta * peak;
}

BandMetrics band_rms_metrics(const SlidingTransferFunctions& tfs, double delta,
                             const FrequencyBand& band) {
  BandMetrics m;
  m.band = band;
  m.kappa1 = band_rms(tfs.G1, delta, band);
  m.kappa2 = band_rms(tfs.G2, delta, band);
  m.kappa3 = band_rms(tfs.G3, delta, band);
  m.kappa_u = band_rms(tfs.Gu, delta, band);
  return m;
}

BandMetrics band_metrics(const SlidingTransferFunctions& tfs, double delta,
                         const FrequencyBand& band) {
  BandMetrics m = band_rms_metrics(tfs, delta, band);
  m.chi = band_peak(tfs.Gu, delta, band);
  return m;
}

std::string frequency_response_csv(const SlidingTransferFunctions& tfs,
                                   double delta, const FrequencyBand& band) {
  band.validate();
  std::ostringstream out;
  out << "omega,H1,H2,H3,Hu\n";
  for (int k = 0; k < band.samples; ++k) {
    const double w = band.omega(k);
    out << format_double(w) << ','
        << format_double(delta * std::abs(tfs.G1.at_frequency(w))) << ','
        << format_double(delta * std::abs(tfs.G2.at_frequency(w))) << ','
        << format_double(delta * std::abs(tfs.G3.at_frequency(w))) << ','
        << format_double(delta * std::abs(tfs.Gu.at_frequency(w))) << '\n';
  }
  return out.str();
}

void write_frequency_response(const std::string& path,
                              const SlidingTransferFunctions& tfs,
                              double delta, const FrequencyBand& band) {
  const std::string text = frequency_response_csv(tfs, delta, band);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace atmd
