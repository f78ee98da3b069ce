#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "atmd/smc_design.h"
#include "atmd/structural_model.h"

namespace atmd {

/// Uniformly sampled ground acceleration, m/s^2.
struct Accelerogram {
  double dt = 0.0;
  std::vector<double> samples;
  std::string label;

  double duration() const {
    return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
  }
  double peak() const;
  /// Linear interpolation; zero outside the record.
  double at(double t) const;
};

enum class AmplitudeScaling { kFactor, kPeak };

struct AccelerogramOptions {
  AmplitudeScaling scaling = AmplitudeScaling::kFactor;
  /// Multiplier (kFactor) or target peak |accel| in m/s^2 (kPeak).
  double scale = 1.0;
  /// Time stamps are multiplied by this factor before resampling (< 1
  /// compresses the record).
  double time_scale = 1.0;
  double resample_dt = 1e-3;
  std::string label;
};

/// Reads a two-column CSV `t,accel` (optional header line) or a
/// single-column file whose first line is `dt=<seconds>`.
Accelerogram load_accelerogram(const std::string& path,
                               const AccelerogramOptions& options = {});

/// Builds an accelerogram from (t, a) knots with the same scaling and
/// resampling rules as load_accelerogram.
Accelerogram make_accelerogram(const std::vector<double>& times,
                               const std::vector<double>& values,
                               const AccelerogramOptions& options);

struct SmcController {
  Eigen::RowVector4d eta;
  double M0 = 0.0;
  double epsilon = kDefaultEpsilon;
};

/// u = -k z
struct StateFeedbackController {
  Eigen::RowVector4d k;
};

struct PassiveController {};

using Controller =
    std::variant<SmcController, StateFeedbackController, PassiveController>;

SmcController smc_controller(const SlidingDesign& design);
std::string controller_name(const Controller& controller);

struct SimulationOptions {
  /// Seconds; values <= 0 run to the end of the record.
  double t_end = 0.0;
  /// Coulomb friction level mu_d (N); zero disables friction.
  double friction = 0.0;
  Eigen::Vector4d initial_state = Eigen::Vector4d::Zero();
};

struct ChannelSummary {
  double rms = 0.0;
  double peak = 0.0;
};

struct TraceSummary {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
  ChannelSummary z1, z2, z3, z4, u, sigma;
};

struct SimulationTrace {
  std::string controller;
  std::vector<double> t, z1, z2, z3, z4, u, sigma, xg_dd;

  std::size_t size() const { return t.size(); }
};

/// Fixed-step RK4 at the record's sample interval. The control force is
/// computed from the sampled state and held over each step; the excitation is
/// interpolated linearly inside the step.
SimulationTrace simulate(const PlantStateSpace& plant,
                         const Controller& controller,
                         const Accelerogram& quake,
                         const SimulationOptions& options = {});

/// RMS and peak per channel over samples with t in [t_begin, t_end].
TraceSummary summarize(const SimulationTrace& trace, double t_begin,
                       double t_end);
TraceSummary summarize(const SimulationTrace& trace);

struct ReachingReport {
  double fraction_in_layer = 0.0;
  std::size_t samples_outside = 0;
  /// Samples outside the layer where sigma_k (sigma_{k+1} - sigma_k) >= 0.
  std::size_t reaching_violations = 0;
};

ReachingReport reaching_check(const SimulationTrace& trace, double epsilon);

/// CSV `t,z1,z2,z3,z4,u,sigma,xg_dd`.
std::string trace_csv(const SimulationTrace& trace);
void write_trace_csv(const SimulationTrace& trace, const std::string& path);

}  // namespace atmd
