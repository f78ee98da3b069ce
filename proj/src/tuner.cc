#include "atmd/tuner.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>
#include <tuple>

#include "atmd/errors.h"
#include "atmd/number_format.h"

namespace atmd {
namespace {

std::vector<double> inclusive_grid(double lower, double upper, double step) {
  const auto count =
      static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lower + static_cast<double>(i) * step;
  }
  return grid;
}

double index_value(const TuningTuple& t, PerformanceIndex index) {
  return index == PerformanceIndex::kTopFloorDisplacement ? t.kappa2
                                                          : t.kappa_u;
}

}  // namespace

PerformanceIndex parse_performance_index(const std::string& name) {
  if (name == "jz2") return PerformanceIndex::kTopFloorDisplacement;
  if (name == "ju") return PerformanceIndex::kControlForce;
  throw ValidationError("unknown performance index '" + name +
                        "' (expected jz2 or ju)");
}

std::string to_string(PerformanceIndex index) {
  return index == PerformanceIndex::kTopFloorDisplacement ? "jz2" : "ju";
}

void TuningConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
  };
  require(zeta_lower > 0.0 && zeta_lower < zeta_upper && zeta_upper < 1.0,
          "tuning: need 0 < zeta_lower < zeta_upper < 1");
  require(omega_lower > 0.0 && omega_lower < omega_upper,
          "tuning: need 0 < omega_lower < omega_upper");
  require(zeta_step > 0.0 && omega_step > 0.0,
          "tuning: grid increments must be positive");
  require(gamma1 >= 0.0 && gamma2 >= 0.0,
          "tuning: zero-distance factors must be non-negative");
  require(kappa_bars.kappa1 > 0.0 && kappa_bars.kappa2 > 0.0 &&
              kappa_bars.kappa3 > 0.0 && kappa_bars.kappa_u > 0.0,
          "tuning: kappa bounds must be positive");
  require(varsigma > 0.0, "tuning: varsigma must be positive");
  require(epsilon > 0.0, "tuning: epsilon must be positive");
  band.validate();
}

std::vector<double> TuningConfig::zeta_grid() const {
  return inclusive_grid(zeta_lower, zeta_upper, zeta_step);
}

std::vector<double> TuningConfig::omega_ratio_grid() const {
  return inclusive_grid(omega_lower, omega_upper, omega_step);
}

std::optional<TuningTuple> evaluate_grid_point(const PlantStateSpace& plant,
                                               const TuningConfig& config,
                                               double zeta,
                                               double omega_ratio) {
  const double omega_n = omega_ratio * plant.omega0;
  const PoleSpec poles = PoleSpec::from_dominant(zeta, omega_n);
  const double decay = zeta * omega_n;

  SlidingDesign design;
  SlidingTransferFunctions tfs;
  try {
    const Eigen::RowVector4d eta = sliding_vector(plant, poles.sliding_poles());
    const auto [psi1, psi2] = sliding_zeros(eta);
    if (std::abs(psi1) / decay < config.gamma1 ||
        std::abs(psi2) / decay < config.gamma2) {
      return std::nullopt;
    }
    design = design_sliding_mode(plant, poles, config.epsilon);
    tfs = build_transfer_functions(design);
  } catch (const InfeasibleDesign&) {
    return std::nullopt;
  }

  const BandMetrics m =
      band_rms_metrics(tfs, plant.bounds.delta, config.band);
  const KappaBounds& bar = config.kappa_bars;
  if (m.kappa1 > bar.kappa1 || m.kappa2 > bar.kappa2 ||
      m.kappa3 > bar.kappa3 || m.kappa_u + plant.bounds.varpi > bar.kappa_u) {
    return std::nullopt;
  }

  TuningTuple t;
  t.zeta = zeta;
  t.omega_n = omega_n;
  t.omega_ratio = omega_ratio;
  t.eta = design.eta;
  t.kappa1 = m.kappa1;
  t.kappa2 = m.kappa2;
  t.kappa3 = m.kappa3;
  t.kappa_u = m.kappa_u;
  t.lambda1 = poles.lambda1();
  t.lambda2 = poles.lambda2();
  t.lambda3 = poles.lambda3;
  t.psi1 = tfs.psi1;
  t.psi2 = tfs.psi2;
  return t;
}

TuningResult tune(const PlantStateSpace& plant, const TuningConfig& config) {
  config.validate();
  const std::vector<double> zetas = config.zeta_grid();
  const std::vector<double> ratios = config.omega_ratio_grid();
  const std::size_t total = zetas.size() * ratios.size();

  // Each slot is written by exactly one worker; the collection order below
  // is fixed by the grid, so the result does not depend on scheduling.
  std::vector<std::optional<TuningTuple>> slots(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      slots[i] = evaluate_grid_point(plant, config, zetas[i / ratios.size()],
                                     ratios[i % ratios.size()]);
    }
  };
  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  TuningResult result;
  result.index = config.index;
  result.omega0 = plant.omega0;
  result.grid_points = total;
  for (auto& slot : slots) {
    if (slot) result.tuples.push_back(std::move(*slot));
  }
  if (result.tuples.empty()) {
    result.feasible = false;
    result.message = kInfeasibleMessage;
    return result;
  }

  auto key = [&](const TuningTuple& t) {
    return std::make_tuple(index_value(t, config.index), t.omega_ratio, t.zeta);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.tuples.size(); ++i) {
    if (key(result.tuples[i]) < key(result.tuples[best])) best = i;
  }
  result.feasible = true;
  result.best_index = best;
  result.best = result.tuples[best];

  SlidingDesign design = design_sliding_mode(
      plant, PoleSpec::from_dominant(result.best->zeta, result.best->omega_n),
      config.epsilon);
  const SlidingTransferFunctions tfs = build_transfer_functions(design);
  result.chi = band_peak(tfs.Gu, plant.bounds.delta, config.band);
  result.M0 = switching_gain(result.chi, plant.bounds.varpi, config.varsigma);
  design.M0 = result.M0;
  result.design = design;
  return result;
}

FeasibleRegion feasible_region(const TuningResult& result) {
  if (result.tuples.empty()) {
    throw ValidationError("feasible region of an empty tuple set");
  }
  FeasibleRegion r;
  const TuningTuple& first = result.tuples.front();
  r.zeta = {first.zeta, first.zeta};
  r.omega_ratio = {first.omega_ratio, first.omega_ratio};
  for (const TuningTuple& t : result.tuples) {
    r.zeta.lower = std::min(r.zeta.lower, t.zeta);
    r.zeta.upper = std::max(r.zeta.upper, t.zeta);
    r.omega_ratio.lower = std::min(r.omega_ratio.lower, t.omega_ratio);
    r.omega_ratio.upper = std::max(r.omega_ratio.upper, t.omega_ratio);
  }
  return r;
}

std::string mesh_csv(const TuningResult& result) {
  if (result.tuples.empty()) {
    throw ValidationError("cannot export the mesh of an empty tuple set");
  }
  auto row = [](const TuningTuple& t) {
    return format_double(t.zeta) + ',' + format_double(t.omega_ratio) + ',' +
           format_double(t.kappa1) + ',' + format_double(t.kappa2) + ',' +
           format_double(t.kappa3) + ',' + format_double(t.kappa_u);
  };
  std::string out = "zeta,omega_n_over_omega0,kappa1,kappa2,kappa3,kappa_u\n";
  for (const TuningTuple& t : result.tuples) out += row(t) + '\n';
  out += "# argmin," + row(result.tuples[result.best_index]) + '\n';
  return out;
}

void export_mesh(const TuningResult& result, const std::string& path) {
  const std::string text = mesh_csv(result);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace atmd
