#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atmd/freq_analysis.h"
#include "atmd/smc_design.h"
#include "atmd/structural_model.h"

namespace atmd {

enum class PerformanceIndex { kTopFloorDisplacement, kControlForce };

/// "jz2" / "ju"
PerformanceIndex parse_performance_index(const std::string& name);
std::string to_string(PerformanceIndex index);

struct KappaBounds {
  double kappa1 = 0.2;   // m
  double kappa2 = 0.01;  // m
  double kappa3 = 0.7;   // m/s
  double kappa_u = 12.0; // N
};

/// Grid-search setup. omega_n limits and step are multiples of omega0.
struct TuningConfig {
  double zeta_lower = 0.5;
  double zeta_upper = 0.9;
  double zeta_step = 0.01;
  double omega_lower = 0.5;
  double omega_upper = 0.8;
  double omega_step = 0.01;
  double gamma1 = 5.0;
  double gamma2 = 1.0;
  KappaBounds kappa_bars;
  PerformanceIndex index = PerformanceIndex::kTopFloorDisplacement;
  FrequencyBand band;
  double varsigma = kDefaultVarsigma;
  double epsilon = kDefaultEpsilon;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
  std::vector<double> zeta_grid() const;
  std::vector<double> omega_ratio_grid() const;
};

/// One feasible grid point.
struct TuningTuple {
  double zeta = 0.0;
  double omega_n = 0.0;          // rad/s
  double omega_ratio = 0.0;      // omega_n / omega0
  Eigen::RowVector4d eta;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa_u = 0.0;
  Complex lambda1;
  Complex lambda2;
  double lambda3 = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct FeasibleRegion {
  Interval zeta;
  Interval omega_ratio;
};

struct TuningResult {
  bool feasible = false;
  std::string message;
  PerformanceIndex index = PerformanceIndex::kTopFloorDisplacement;
  double omega0 = 0.0;
  std::size_t grid_points = 0;
  /// Feasible tuples in scan order (zeta outer, omega_n inner).
  std::vector<TuningTuple> tuples;
  std::size_t best_index = 0;
  std::optional<TuningTuple> best;
  double chi = 0.0;
  double M0 = 0.0;
  /// Full design of the optimum (eta, k, reduced dynamics, M0, epsilon).
  std::optional<SlidingDesign> design;

  std::size_t feasible_count() const { return tuples.size(); }
};

inline constexpr const char* kInfeasibleMessage =
    "It is not possible to find eta and M0 with this initialization";

/// Evaluates one grid point. Returns nullopt when a zero-distance or kappa
/// constraint fails.
std::optional<TuningTuple> evaluate_grid_point(const PlantStateSpace& plant,
                                               const TuningConfig& config,
                                               double zeta,
                                               double omega_ratio);

/// Exhaustive feasibility-filtered scan over (zeta, omega_n).
TuningResult tune(const PlantStateSpace& plant, const TuningConfig& config);

/// Extent of the feasible tuples. Throws ValidationError on an empty set.
FeasibleRegion feasible_region(const TuningResult& result);

/// CSV `zeta,omega_n_over_omega0,kappa1,kappa2,kappa3,kappa_u`, one row per
/// feasible tuple, then a `# argmin,...` comment row for the optimum.
std::string mesh_csv(const TuningResult& result);
void export_mesh(const TuningResult& result, const std::string& path);

}  // namespace atmd
