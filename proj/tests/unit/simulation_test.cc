#include "atmd/simulation.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "atmd/errors.h"
#include "atmd/tuner.h"
#include "test_support.h"

namespace atmd {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("atmd_sim_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

 private:
  fs::path path_;
};

struct FiveStory {
  ProjectConfig cfg = testing::five_story();
  PlantStateSpace plant = make_plant(cfg.building).plant;
  Accelerogram quake = load_accelerogram(cfg.excitation->path.string(),
                                         cfg.excitation->options);
  SimulationOptions options() const {
    SimulationOptions o;
    o.t_end = cfg.excitation->t_end;
    o.friction = cfg.building.atmd.mu_d;
    return o;
  }
  SlidingDesign design(PerformanceIndex index) const {
    TuningConfig tc = cfg.tuning;
    tc.index = index;
    return *tune(plant, tc).design;
  }
};

const FiveStory& five_story() {
  static const FiveStory f;
  return f;
}

Accelerogram constant_record(double value, double duration, double dt = 1e-3) {
  AccelerogramOptions o;
  o.resample_dt = dt;
  return make_accelerogram({0.0, duration}, {value, value}, o);
}

TEST(Accelerogram, ZeroRecordStaysZero) {
  for (AmplitudeScaling mode : {AmplitudeScaling::kFactor, AmplitudeScaling::kPeak}) {
    AccelerogramOptions o;
    o.scaling = mode;
    o.scale = 3.0;
    const Accelerogram a = make_accelerogram({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0}, o);
    EXPECT_EQ(a.samples.size(), 1001u);
    EXPECT_EQ(a.peak(), 0.0);
  }
}

TEST(Accelerogram, PeakScaling) {
  AccelerogramOptions o;
  o.scaling = AmplitudeScaling::kPeak;
  o.scale = 0.5;
  const Accelerogram a =
      make_accelerogram({0.0, 0.02, 0.04, 0.06}, {1.0, -3.417, 2.0, 0.0}, o);
  EXPECT_NEAR(a.peak(), 0.5, 1e-9);
}

TEST(Accelerogram, FactorScaling) {
  AccelerogramOptions o;
  o.scale = 2.0;
  const Accelerogram a = make_accelerogram({0.0, 0.01}, {1.0, -1.5}, o);
  EXPECT_DOUBLE_EQ(a.samples.front(), 2.0);
  EXPECT_DOUBLE_EQ(a.samples.back(), -3.0);
}

TEST(Accelerogram, ResamplingPreservesKnots) {
  std::vector<double> t, v;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.02 * i);
    v.push_back(std::sin(0.37 * i) + 0.1 * (i % 3));
  }
  const Accelerogram a = make_accelerogram(t, v, AccelerogramOptions{});
  EXPECT_DOUBLE_EQ(a.dt, 1e-3);
  for (int i = 0; i <= 200; ++i) {
    EXPECT_EQ(a.samples[static_cast<std::size_t>(20 * i)], v[static_cast<std::size_t>(i)]);
  }
  // Midpoints are linear interpolants.
  EXPECT_NEAR(a.samples[10], 0.5 * (v[0] + v[1]), 1e-12);
}

TEST(Accelerogram, TimeScaleCompressesRecord) {
  AccelerogramOptions o;
  o.time_scale = 0.5;
  const Accelerogram a = make_accelerogram({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}, o);
  EXPECT_NEAR(a.duration(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(a.samples[500], 1.0);
}

TEST(Accelerogram, RejectsNonMonotoneTime) {
  EXPECT_THROW(make_accelerogram({0.0, 0.2, 0.1}, {0.0, 1.0, 2.0}, {}),
               ValidationError);
  EXPECT_THROW(make_accelerogram({0.0}, {1.0}, {}), ValidationError);
}

TEST(Accelerogram, FileFormats) {
  TempDir dir;
  const std::string two = dir.write("two.csv", "t,accel\n0,0\n0.01,1\n0.02,0\n");
  const Accelerogram a = load_accelerogram(two);
  EXPECT_EQ(a.samples.size(), 21u);
  EXPECT_DOUBLE_EQ(a.samples[10], 1.0);

  const std::string ws = dir.write("ws.txt", "0.0 0.0\n0.01 2.0\n");
  EXPECT_DOUBLE_EQ(load_accelerogram(ws).samples.back(), 2.0);

  const std::string single = dir.write("single.txt", "dt=0.005\n1\n2\n3\n");
  const Accelerogram s = load_accelerogram(single);
  EXPECT_NEAR(s.duration(), 0.01, 1e-12);
  EXPECT_DOUBLE_EQ(s.samples[5], 2.0);
}

TEST(Accelerogram, MalformedFileReportsLine) {
  TempDir dir;
  const std::string bad = dir.write("bad.csv", "t,accel\n0,0\n0.01,abc\n");
  try {
    load_accelerogram(bad);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  const std::string back = dir.write("back.csv", "0,0\n0.02,1\n0.01,2\n");
  EXPECT_THROW(load_accelerogram(back), ValidationError);
  EXPECT_THROW(load_accelerogram((fs::temp_directory_path() / "no_such_record.csv").string()),
               ValidationError);
}

TEST(Accelerogram, BundledRecord) {
  const FiveStory& f = five_story();
  EXPECT_NEAR(f.quake.peak(), 0.5, 1e-9);
  EXPECT_DOUBLE_EQ(f.quake.dt, 1e-3);
  EXPECT_GE(f.quake.duration(), 30.0);
}

TEST(Simulate, ZeroExcitationIsEquilibrium) {
  const FiveStory& f = five_story();
  const Accelerogram quiet = constant_record(0.0, 2.0);
  const SlidingDesign d = f.design(PerformanceIndex::kTopFloorDisplacement);
  for (const Controller& c : {Controller{PassiveController{}},
                              Controller{smc_controller(d)},
                              Controller{StateFeedbackController{d.k_gain}}}) {
    SimulationOptions o;
    o.friction = 0.35;
    const SimulationTrace tr = simulate(f.plant, c, quiet, o);
    const TraceSummary s = summarize(tr);
    EXPECT_EQ(s.z1.peak + s.z2.peak + s.z3.peak + s.z4.peak + s.u.peak, 0.0);
    EXPECT_EQ(tr.size(), 2001u);
    const ReachingReport r = reaching_check(tr, d.epsilon);
    EXPECT_EQ(r.fraction_in_layer, 1.0);
  }
}

TEST(Simulate, PassiveResponseOrderOfMagnitude) {
  const FiveStory& f = five_story();
  const SimulationTrace tr =
      simulate(f.plant, PassiveController{}, f.quake, f.options());
  const TraceSummary s = summarize(tr, 0.0, 30.0);
  // Same order as the published TMD row: 2.67 mm rms, 9.33 mm peak.
  EXPECT_GT(s.z2.rms, 0.5 * 2.67e-3);
  EXPECT_LT(s.z2.rms, 2.0 * 2.67e-3);
  EXPECT_GT(s.z2.peak, 0.5 * 9.33e-3);
  EXPECT_LT(s.z2.peak, 2.0 * 9.33e-3);
  EXPECT_EQ(s.u.peak, 0.0);
}

TEST(Simulate, SlidingModeAttenuatesPeakThreefold) {
  const FiveStory& f = five_story();
  const auto passive = summarize(simulate(f.plant, PassiveController{}, f.quake, f.options()));
  const SlidingDesign d = f.design(PerformanceIndex::kTopFloorDisplacement);
  const SimulationTrace tr = simulate(f.plant, smc_controller(d), f.quake, f.options());
  const auto smc = summarize(tr);
  EXPECT_LT(smc.z2.peak, passive.z2.peak / 3.0);
  for (double u : tr.u) EXPECT_LE(std::abs(u), d.M0);
  const ReachingReport r = reaching_check(tr, d.epsilon);
  EXPECT_GT(r.fraction_in_layer, 0.95);
}

TEST(Simulate, KappaToRmsBand) {
  const FiveStory& f = five_story();
  TuningConfig tc = f.cfg.tuning;
  tc.index = PerformanceIndex::kControlForce;
  const TuningResult r = tune(f.plant, tc);
  const auto s = summarize(simulate(f.plant, smc_controller(*r.design), f.quake, f.options()));
  const double ratios[] = {r.best->kappa1 / s.z1.rms, r.best->kappa2 / s.z2.rms,
                           r.best->kappa3 / s.z3.rms, r.best->kappa_u / s.u.rms};
  for (double q : ratios) {
    EXPECT_GE(q, 1.5);
    EXPECT_LE(q, 2.65);
  }
}

TEST(Simulate, ControlIndexUsesLessForce) {
  const FiveStory& f = five_story();
  const auto run = [&](PerformanceIndex index) {
    return summarize(simulate(f.plant, smc_controller(f.design(index)), f.quake, f.options()));
  };
  EXPECT_LT(run(PerformanceIndex::kControlForce).u.rms,
            run(PerformanceIndex::kTopFloorDisplacement).u.rms);
}

TEST(Simulate, LinearityWithoutFrictionOrSaturation) {
  const FiveStory& f = five_story();
  const SlidingDesign d = f.design(PerformanceIndex::kTopFloorDisplacement);
  AccelerogramOptions o = f.cfg.excitation->options;
  const Accelerogram one = load_accelerogram(f.cfg.excitation->path.string(), o);
  o.scale *= 2.0;
  const Accelerogram two = load_accelerogram(f.cfg.excitation->path.string(), o);
  SimulationOptions so;
  so.t_end = 10.0;
  const StateFeedbackController c{d.k_gain};
  const SimulationTrace a = simulate(f.plant, c, one, so);
  const SimulationTrace b = simulate(f.plant, c, two, so);
  const TraceSummary sa = summarize(a);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(b.z1[i], 2.0 * a.z1[i], 1e-9 * sa.z1.peak);
    EXPECT_NEAR(b.z2[i], 2.0 * a.z2[i], 1e-9 * sa.z2.peak);
    EXPECT_NEAR(b.z3[i], 2.0 * a.z3[i], 1e-9 * sa.z3.peak);
    EXPECT_NEAR(b.z4[i], 2.0 * a.z4[i], 1e-9 * sa.z4.peak);
    EXPECT_NEAR(b.u[i], 2.0 * a.u[i], 1e-9 * sa.u.peak);
  }
}

TEST(Simulate, StepHalvingConverges) {
  const FiveStory& f = five_story();
  AccelerogramOptions o = f.cfg.excitation->options;
  o.resample_dt = 5e-4;
  const Accelerogram fine = load_accelerogram(f.cfg.excitation->path.string(), o);
  const SlidingDesign d = f.design(PerformanceIndex::kTopFloorDisplacement);
  for (const Controller& c : {Controller{PassiveController{}}, Controller{smc_controller(d)}}) {
    const double coarse_rms = summarize(simulate(f.plant, c, f.quake, f.options())).z2.rms;
    const double fine_rms = summarize(simulate(f.plant, c, fine, f.options())).z2.rms;
    EXPECT_LT(testing::rel(coarse_rms, fine_rms), 5e-3);
  }
}

TEST(Simulate, PassiveEnergyDecaysAfterExcitation) {
  const FiveStory& f = five_story();
  const double te = 3.0;
  std::vector<double> t, v;
  for (int i = 0; i <= 600; ++i) {
    t.push_back(0.01 * i);
    v.push_back(i * 0.01 <= te ? std::sin(9.0 * 0.01 * i) : 0.0);
  }
  const Accelerogram quake = make_accelerogram(t, v, AccelerogramOptions{});
  const SimulationTrace tr = simulate(f.plant, PassiveController{}, quake, {});
  const double m0 = f.plant.m0, md = f.plant.m_d;
  const double k0 = -f.plant.A(3, 1) * m0, kd = f.plant.A(3, 0) * m0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double vd = tr.z3[i], vn = tr.z4[i];
    const double energy = 0.5 * m0 * vn * vn + 0.5 * md * (vd + vn) * (vd + vn) +
                          0.5 * k0 * tr.z2[i] * tr.z2[i] +
                          0.5 * kd * tr.z1[i] * tr.z1[i];
    if (tr.t[i] > te + 0.01) {
      EXPECT_LE(energy, previous * (1.0 + 1e-12)) << "t = " << tr.t[i];
    }
    previous = energy;
  }
}

TEST(Simulate, ReachingWithoutFriction) {
  const FiveStory& f = five_story();
  const SlidingDesign d = f.design(PerformanceIndex::kTopFloorDisplacement);
  SimulationOptions o;
  o.initial_state = 0.5 * f.plant.B;  // sigma(0) = 0.5 = 10 epsilon
  const SimulationTrace tr =
      simulate(f.plant, smc_controller(d), constant_record(0.0, 3.0), o);
  EXPECT_NEAR(tr.sigma.front(), 0.5, 1e-12);
  const ReachingReport r = reaching_check(tr, d.epsilon);
  EXPECT_GT(r.samples_outside, 0u);
  EXPECT_EQ(r.reaching_violations, 0u);
  EXPECT_LE(std::abs(tr.sigma.back()), d.epsilon);
}

TEST(Simulate, RejectsBadRequests) {
  const FiveStory& f = five_story();
  SimulationOptions o;
  o.t_end = 100.0;
  EXPECT_THROW(simulate(f.plant, PassiveController{}, f.quake, o), ValidationError);
  o.t_end = 1.0;
  o.friction = -1.0;
  EXPECT_THROW(simulate(f.plant, PassiveController{}, f.quake, o), ValidationError);
}

TEST(Simulate, DivergenceIsReported) {
  const FiveStory& f = five_story();
  // Strong positive feedback on the device velocity blows the state up.
  const StateFeedbackController c{Eigen::RowVector4d(0.0, 0.0, -1e6, 0.0)};
  SimulationOptions o;
  o.t_end = 20.0;
  EXPECT_THROW(simulate(f.plant, c, f.quake, o), NumericalError);
}

TEST(Summarize, HandArithmetic) {
  SimulationTrace tr;
  tr.t = {0.0, 1.0, 2.0};
  tr.z1 = {3.0, -4.0, 0.0};
  tr.z2 = tr.z3 = tr.z4 = tr.sigma = tr.xg_dd = {2.0, 2.0, 2.0};
  tr.u = {-2.0, -2.0, -2.0};
  const TraceSummary s = summarize(tr);
  EXPECT_DOUBLE_EQ(s.z1.rms, std::sqrt(25.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.z1.peak, 4.0);
  EXPECT_DOUBLE_EQ(s.z2.rms, 2.0);
  EXPECT_DOUBLE_EQ(s.u.peak, 2.0);
  EXPECT_DOUBLE_EQ(s.u.rms, 2.0);
  EXPECT_EQ(s.samples, 3u);
  EXPECT_THROW(summarize(tr, 5.0, 6.0), ValidationError);
  EXPECT_THROW(summarize(tr, 2.0, 1.0), ValidationError);
}

TEST(Summarize, WindowSampleCount) {
  const ProjectConfig cfg = testing::quanser();
  const PlantStateSpace plant = make_plant(cfg.building).plant;
  const Accelerogram quake = load_accelerogram(cfg.excitation->path.string(),
                                               cfg.excitation->options);
  SimulationOptions o;
  o.t_end = 8.0;
  const SimulationTrace tr = simulate(plant, PassiveController{}, quake, o);
  const TraceSummary s = summarize(tr, cfg.summary_window->first, cfg.summary_window->second);
  EXPECT_EQ(s.samples, 4001u);
  EXPECT_EQ(s.t_begin, 2.0);
  EXPECT_EQ(s.t_end, 6.0);
}

TEST(TraceCsv, Layout) {
  const FiveStory& f = five_story();
  SimulationOptions o;
  o.t_end = 0.01;
  const std::string csv = trace_csv(simulate(f.plant, PassiveController{}, f.quake, o));
  EXPECT_EQ(csv.rfind("t,z1,z2,z3,z4,u,sigma,xg_dd\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
}

}  // namespace
}  // namespace atmd
