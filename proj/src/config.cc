#include "atmd/config.h"

#include <fstream>
#include <sstream>

#include "atmd/errors.h"

namespace atmd {
namespace {

using nlohmann::json;

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number()) {
    throw ValidationError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

const json& object(const json& j, const std::string& key,
                   const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_object()) {
    throw ValidationError(where + ": missing object '" + key + "'");
  }
  return j.at(key);
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where + ": matrix must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw ValidationError(where + ": matrix must be square");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw ValidationError(where + ": matrix entries must be numbers");
      }
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

DampingSpec parse_damping(const json& j) {
  const std::string where = "damping";
  if (j.contains("rayleigh")) {
    const json& r = j.at("rayleigh");
    RayleighDamping spec;
    try {
      spec.modes = r.at("modes").get<std::vector<int>>();
      spec.ratios = r.at("ratios").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ValidationError(
          "damping.rayleigh: expected integer 'modes' and numeric 'ratios' "
          "arrays");
    }
    return spec;
  }
  if (j.contains("matrix")) {
    return ExplicitDamping{parse_matrix(j.at("matrix"), "damping.matrix")};
  }
  throw ValidationError(where + ": expected 'rayleigh' or 'matrix'");
}

}  // namespace

nlohmann::json parse_json_text(const std::string& text,
                               const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << col << ": invalid JSON";
    const std::string detail = e.what();
    const auto pos = detail.find("syntax error");
    if (pos != std::string::npos) msg << " (" << detail.substr(pos) << ")";
    throw ValidationError(msg.str());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path.string());
}

BuildingConfig parse_building(const json& j) {
  if (!j.is_object()) throw ValidationError("building config must be an object");
  if (!j.contains("floors") || !j.at("floors").is_array() ||
      j.at("floors").empty()) {
    throw ValidationError("building: 'floors' must be a non-empty array");
  }
  const json& floors = j.at("floors");
  Eigen::VectorXd masses(floors.size()), stiffnesses(floors.size());
  for (std::size_t i = 0; i < floors.size(); ++i) {
    const std::string where = "floors[" + std::to_string(i) + "]";
    masses(static_cast<Eigen::Index>(i)) = number(floors[i], "mass", where);
    stiffnesses(static_cast<Eigen::Index>(i)) =
        number(floors[i], "stiffness", where);
  }

  BuildingConfig cfg;
  cfg.building = build_shear_building(masses, stiffnesses,
                                      parse_damping(object(j, "damping", "building")));
  const json& atmd = object(j, "atmd", "building");
  cfg.atmd.m_d = number(atmd, "m_d", "atmd");
  cfg.atmd.k_d = number(atmd, "k_d", "atmd");
  cfg.atmd.c_d = number(atmd, "c_d", "atmd");
  cfg.atmd.mu_d = number_or(atmd, "mu_d", 0.0, "atmd");
  const json& bounds = object(j, "bounds", "building");
  cfg.bounds.delta = number(bounds, "delta", "bounds");
  cfg.bounds.varpi = number(bounds, "varpi", "bounds");
  if (j.contains("design_beta0")) {
    cfg.design_beta0 = number(j, "design_beta0", "building");
  }
  return cfg;
}

TuningConfig parse_tuning(const json& j) {
  TuningConfig c;
  if (!j.is_object()) throw ValidationError("tuning config must be an object");
  if (j.contains("zeta")) {
    const json& z = j.at("zeta");
    c.zeta_lower = number_or(z, "lower", c.zeta_lower, "tuning.zeta");
    c.zeta_upper = number_or(z, "upper", c.zeta_upper, "tuning.zeta");
    c.zeta_step = number_or(z, "step", c.zeta_step, "tuning.zeta");
  }
  if (j.contains("omega_n")) {
    const json& w = j.at("omega_n");
    c.omega_lower = number_or(w, "lower", c.omega_lower, "tuning.omega_n");
    c.omega_upper = number_or(w, "upper", c.omega_upper, "tuning.omega_n");
    c.omega_step = number_or(w, "step", c.omega_step, "tuning.omega_n");
  }
  c.gamma1 = number_or(j, "gamma1", c.gamma1, "tuning");
  c.gamma2 = number_or(j, "gamma2", c.gamma2, "tuning");
  if (j.contains("kappa_bars")) {
    const json& k = j.at("kappa_bars");
    c.kappa_bars.kappa1 = number(k, "kappa1", "tuning.kappa_bars");
    c.kappa_bars.kappa2 = number(k, "kappa2", "tuning.kappa_bars");
    c.kappa_bars.kappa3 = number(k, "kappa3", "tuning.kappa_bars");
    c.kappa_bars.kappa_u = number(k, "kappa_u", "tuning.kappa_bars");
  }
  if (j.contains("index")) {
    if (!j.at("index").is_string()) {
      throw ValidationError("tuning: 'index' must be \"jz2\" or \"ju\"");
    }
    c.index = parse_performance_index(j.at("index").get<std::string>());
  }
  if (j.contains("band")) {
    const json& b = j.at("band");
    c.band.low = number_or(b, "low", c.band.low, "tuning.band");
    c.band.high = number_or(b, "high", c.band.high, "tuning.band");
    c.band.samples = static_cast<int>(
        number_or(b, "samples", c.band.samples, "tuning.band"));
  }
  c.varsigma = number_or(j, "varsigma", c.varsigma, "tuning");
  c.epsilon = number_or(j, "epsilon", c.epsilon, "tuning");
  c.threads = static_cast<unsigned>(number_or(j, "threads", 0.0, "tuning"));
  c.validate();
  return c;
}

LqrMaxima parse_lqr_maxima(const json& j) {
  LqrMaxima m;
  m.z1 = number(j, "z1", "lqr_maxima");
  m.z2 = number(j, "z2", "lqr_maxima");
  m.z3 = number(j, "z3", "lqr_maxima");
  m.z4 = number(j, "z4", "lqr_maxima");
  m.u = number(j, "u", "lqr_maxima");
  bryson_weights(m);  // validates
  return m;
}

ExcitationConfig parse_excitation(const json& j,
                                  const std::filesystem::path& base_dir) {
  ExcitationConfig e;
  if (!j.contains("path") || !j.at("path").is_string()) {
    throw ValidationError("excitation: missing string field 'path'");
  }
  e.path = j.at("path").get<std::string>();
  if (e.path.is_relative()) e.path = base_dir / e.path;
  const std::string scaling =
      j.contains("scaling") ? j.at("scaling").get<std::string>() : "factor";
  if (scaling == "pga") {
    e.options.scaling = AmplitudeScaling::kPeak;
  } else if (scaling == "factor") {
    e.options.scaling = AmplitudeScaling::kFactor;
  } else {
    throw ValidationError("excitation: scaling must be 'pga' or 'factor'");
  }
  e.options.scale = number_or(j, "scale", 1.0, "excitation");
  e.options.time_scale = number_or(j, "time_scale", 1.0, "excitation");
  e.options.resample_dt = number_or(j, "resample_dt", 1e-3, "excitation");
  e.options.label = j.contains("label") ? j.at("label").get<std::string>()
                                        : e.path.filename().string();
  e.t_end = number_or(j, "t_end", 0.0, "excitation");
  return e;
}

ProjectConfig load_project_config(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  ProjectConfig cfg;
  cfg.source = path;
  try {
    cfg.name = j.contains("name") ? j.at("name").get<std::string>()
                                  : path.stem().string();
    cfg.building = parse_building(j);
    if (j.contains("tuning")) cfg.tuning = parse_tuning(j.at("tuning"));
    if (j.contains("lqr_maxima")) {
      cfg.lqr_maxima = parse_lqr_maxima(j.at("lqr_maxima"));
    }
    if (j.contains("excitation")) {
      cfg.excitation = parse_excitation(j.at("excitation"), path.parent_path());
    }
    if (j.contains("summary_window")) {
      const auto w = j.at("summary_window").get<std::vector<double>>();
      if (w.size() != 2) {
        throw ValidationError("summary_window must be [t_begin, t_end]");
      }
      cfg.summary_window = std::make_pair(w[0], w[1]);
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return cfg;
}

PlantModel make_plant(const BuildingConfig& config) {
  PlantModel out;
  out.modal = modal_reduce(config.building);
  ModalModel design_modal = out.modal;
  if (config.design_beta0) design_modal.beta0 = *config.design_beta0;
  out.plant = assemble_plant(design_modal, config.atmd, config.bounds);
  return out;
}

LqrMaxima maxima_from_kappa_bars(const KappaBounds& bars, double z4_max) {
  return {bars.kappa1, bars.kappa2, bars.kappa3, z4_max, bars.kappa_u};
}

}  // namespace atmd
