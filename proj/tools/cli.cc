#include "cli.h"

#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "atmd/config.h"
#include "atmd/errors.h"
#include "atmd/freq_analysis.h"
#include "atmd/lqr.h"
#include "atmd/report.h"
#include "atmd/simulation.h"
#include "atmd/tuner.h"

namespace atmd::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string tuning;
  std::string maxima;
  std::string out;
  std::string index;
  std::string controller = "smc";
  std::string window;
  double pga = -1.0;
  double time_scale = -1.0;
  double t_end = -1.0;
  unsigned threads = 0;
};

// Files are buffered and written only after every computation succeeded.
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }
  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }
  void commit(std::ostream& out) const {
    if (!enabled()) return;
    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      const std::string path = (fs::path(dir_) / name).string();
      write_text_file(path, content);
      out << "wrote " << path << '\n';
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

ProjectConfig load(const Options& o) {
  ProjectConfig cfg = load_project_config(o.config);
  if (!o.tuning.empty()) cfg.tuning = parse_tuning(read_json_file(o.tuning));
  if (!o.maxima.empty()) cfg.lqr_maxima = parse_lqr_maxima(read_json_file(o.maxima));
  if (!o.index.empty()) cfg.tuning.index = parse_performance_index(o.index);
  if (o.threads > 0) cfg.tuning.threads = o.threads;
  if (cfg.excitation) {
    if (o.pga >= 0.0) {
      cfg.excitation->options.scaling = AmplitudeScaling::kPeak;
      cfg.excitation->options.scale = o.pga;
    }
    if (o.time_scale > 0.0) cfg.excitation->options.time_scale = o.time_scale;
    if (o.t_end > 0.0) cfg.excitation->t_end = o.t_end;
  }
  if (!o.window.empty()) {
    std::vector<double> w;
    std::stringstream ss(o.window);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        w.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        throw ValidationError("--window expects two numbers 'a,b'");
      }
    }
    if (w.size() != 2) throw ValidationError("--window expects 'a,b'");
    cfg.summary_window = std::make_pair(w[0], w[1]);
  }
  return cfg;
}

TuningResult run_tuning(const ProjectConfig& cfg, const PlantStateSpace& plant,
                        PerformanceIndex index) {
  TuningConfig tc = cfg.tuning;
  tc.index = index;
  TuningResult r = tune(plant, tc);
  if (!r.feasible) throw InfeasibleDesign(r.message);
  return r;
}

LqrResult run_lqr(const ProjectConfig& cfg, const PlantStateSpace& plant) {
  const LqrMaxima maxima = cfg.lqr_maxima
                               ? *cfg.lqr_maxima
                               : maxima_from_kappa_bars(cfg.tuning.kappa_bars);
  return solve_lqr(plant, bryson_weights(maxima));
}

Accelerogram load_quake(const ProjectConfig& cfg) {
  if (!cfg.excitation) {
    throw ValidationError(cfg.source.string() +
                          ": no 'excitation' section for simulation");
  }
  const ExcitationConfig& e = *cfg.excitation;
  if (!fs::exists(e.path)) {
    throw ValidationError("accelerogram not found: " + e.path.string());
  }
  return load_accelerogram(e.path.string(), e.options);
}

TraceSummary summary_of(const ProjectConfig& cfg, const SimulationTrace& tr) {
  if (cfg.summary_window) {
    return summarize(tr, cfg.summary_window->first, cfg.summary_window->second);
  }
  return summarize(tr);
}

SimulationOptions sim_options(const ProjectConfig& cfg) {
  SimulationOptions so;
  so.t_end = cfg.excitation ? cfg.excitation->t_end : 0.0;
  so.friction = cfg.building.atmd.mu_d;
  return so;
}

int cmd_model(const Options& o, std::ostream& out) {
  const ProjectConfig cfg = load(o);
  const PlantModel pm = make_plant(cfg.building);
  Outputs files(o.out);
  nlohmann::json j = {{"name", cfg.name},
                      {"modal", to_json(pm.modal)},
                      {"plant", to_json(pm.plant)}};
  files.add("model.json", dump(j));
  out << modal_report(pm.modal, pm.plant);
  files.commit(out);
  return kExitOk;
}

int cmd_tune(const Options& o, std::ostream& out) {
  const ProjectConfig cfg = load(o);
  const PlantModel pm = make_plant(cfg.building);
  const TuningResult r = run_tuning(cfg, pm.plant, cfg.tuning.index);
  Outputs files(o.out);
  files.add("result.json", dump(to_json(r)));
  files.add("mesh.csv", mesh_csv(r));
  const FeasibleRegion region = feasible_region(r);
  out << tuning_table({{to_string(r.index), r}});
  out << "feasible tuples: " << r.feasible_count() << " of " << r.grid_points
      << ", zeta in [" << region.zeta.lower << ", " << region.zeta.upper
      << "], omega_n/omega0 in [" << region.omega_ratio.lower << ", "
      << region.omega_ratio.upper << "]\n";
  files.commit(out);
  return kExitOk;
}

int cmd_lqr(const Options& o, std::ostream& out) {
  const ProjectConfig cfg = load(o);
  const PlantModel pm = make_plant(cfg.building);
  const LqrResult r = run_lqr(cfg, pm.plant);
  const EquivalentPoles eq = lqr_equivalent_polespec(r, pm.plant.omega0);
  Outputs files(o.out);
  nlohmann::json j = to_json(r);
  j["equivalent"] = {{"zeta", eq.zeta},
                     {"omega_n", eq.omega_n},
                     {"omega_ratio", eq.omega_ratio}};
  files.add("lqr.json", dump(j));
  out << lqr_report(r, eq);
  files.commit(out);
  return kExitOk;
}

int cmd_freq(const Options& o, std::ostream& out) {
  const ProjectConfig cfg = load(o);
  const PlantModel pm = make_plant(cfg.building);
  const TuningResult r = run_tuning(cfg, pm.plant, cfg.tuning.index);
  const SlidingTransferFunctions tfs = build_transfer_functions(*r.design);
  const BandMetrics m = band_metrics(tfs, pm.plant.bounds.delta, cfg.tuning.band);
  Outputs files(o.out);
  files.add("freq.csv",
            frequency_response_csv(tfs, pm.plant.bounds.delta, cfg.tuning.band));
  out << "index " << to_string(r.index) << ": zeta = " << r.best->zeta
      << ", omega_n/omega0 = " << r.best->omega_ratio << '\n'
      << "kappa1 = " << m.kappa1 << " m, kappa2 = " << m.kappa2
      << " m, kappa3 = " << m.kappa3 << " m/s, kappa_u = " << m.kappa_u
      << " N, chi = " << m.chi << " N\n";
  files.commit(out);
  return kExitOk;
}

Controller make_controller(const std::string& name, const ProjectConfig& cfg,
                           const PlantStateSpace& plant) {
  if (name == "passive") return PassiveController{};
  if (name == "lqr") return StateFeedbackController{run_lqr(cfg, plant).k};
  if (name == "smc") {
    const TuningResult r = run_tuning(cfg, plant, cfg.tuning.index);
    return smc_controller(*r.design);
  }
  throw ValidationError("unknown controller '" + name + "'");
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const ProjectConfig cfg = load(o);
  const PlantModel pm = make_plant(cfg.building);
  const Accelerogram quake = load_quake(cfg);
  const Controller controller = make_controller(o.controller, cfg, pm.plant);
  const SimulationTrace tr = simulate(pm.plant, controller, quake, sim_options(cfg));
  const TraceSummary s = summary_of(cfg, tr);
  std::string label = o.controller;
  if (o.controller == "smc") label += "-" + to_string(cfg.tuning.index);
  Outputs files(o.out);
  files.add("trace.csv", trace_csv(tr));
  nlohmann::json j = {{"controller", label}, {"summary", to_json(s)}};
  files.add("summary.json", dump(j));
  out << comparison_table({{label, s}});
  files.commit(out);
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const ProjectConfig cfg = load(o);
  const PlantModel pm = make_plant(cfg.building);
  const Accelerogram quake = load_quake(cfg);
  const SimulationOptions so = sim_options(cfg);

  const TuningResult jz2 =
      run_tuning(cfg, pm.plant, PerformanceIndex::kTopFloorDisplacement);
  const TuningResult ju = run_tuning(cfg, pm.plant, PerformanceIndex::kControlForce);
  const LqrResult lqr = run_lqr(cfg, pm.plant);

  const std::vector<std::pair<std::string, Controller>> controllers = {
      {"passive", PassiveController{}},
      {"smc-jz2", smc_controller(*jz2.design)},
      {"smc-ju", smc_controller(*ju.design)},
      {"lqr", StateFeedbackController{lqr.k}}};

  std::vector<NamedSummary> rows;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [name, c] : controllers) {
    const TraceSummary s = summary_of(cfg, simulate(pm.plant, c, quake, so));
    rows.push_back({name, s});
    j.push_back({{"controller", name}, {"summary", to_json(s)}});
  }
  Outputs files(o.out);
  const std::string table = comparison_table(rows);
  files.add("comparison.json", dump(j));
  files.add("comparison.txt", table);
  out << tuning_table({{"jz2", jz2}, {"ju", ju}}) << '\n' << table;
  files.commit(out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sliding-mode ATMD design, tuning and simulation"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Project JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
  };
  auto add_tuning = [&](CLI::App* sub) {
    sub->add_option("--tuning", o.tuning, "Tuning JSON overriding the project")
        ->check(CLI::ExistingFile);
    sub->add_option("--index", o.index, "Performance index")
        ->check(CLI::IsMember({"jz2", "ju"}));
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--window", o.window, "Summary window 'a,b' in seconds");
    sub->add_option("--pga", o.pga, "Peak ground acceleration, m/s^2")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--time-scale", o.time_scale, "Record time compression")
        ->check(CLI::PositiveNumber);
    sub->add_option("--t-end", o.t_end, "Simulation length, s")
        ->check(CLI::PositiveNumber);
  };
  auto add_maxima = [&](CLI::App* sub) {
    sub->add_option("--maxima", o.maxima, "LQR maxima JSON")
        ->check(CLI::ExistingFile);
  };

  CLI::App* model = app.add_subcommand("model", "Modal reduction and plant");
  add_common(model);
  CLI::App* tune_cmd = app.add_subcommand("tune", "Grid-search tuning");
  add_common(tune_cmd);
  add_tuning(tune_cmd);
  CLI::App* lqr = app.add_subcommand("lqr", "LQR baseline");
  add_common(lqr);
  add_tuning(lqr);
  add_maxima(lqr);
  CLI::App* freq = app.add_subcommand("freq", "Frequency response of the optimum");
  add_common(freq);
  add_tuning(freq);
  CLI::App* sim = app.add_subcommand("simulate", "Time history for one controller");
  add_common(sim);
  add_tuning(sim);
  add_maxima(sim);
  add_sim(sim);
  sim->add_option("--controller", o.controller, "Controller")
      ->check(CLI::IsMember({"passive", "smc", "lqr"}));
  CLI::App* compare = app.add_subcommand("compare", "All controllers side by side");
  add_common(compare);
  add_tuning(compare);
  add_maxima(compare);
  add_sim(compare);

  std::vector<const char*> argv = {"atmd"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (model->parsed()) return cmd_model(o, out);
    if (tune_cmd->parsed()) return cmd_tune(o, out);
    if (lqr->parsed()) return cmd_lqr(o, out);
    if (freq->parsed()) return cmd_freq(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleDesign& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace atmd::cli
