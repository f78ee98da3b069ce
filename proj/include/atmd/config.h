#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "atmd/lqr.h"
#include "atmd/simulation.h"
#include "atmd/structural_model.h"
#include "atmd/tuner.h"

namespace atmd {

struct BuildingConfig {
  BuildingModel building;
  AtmdParams atmd;
  ExcitationBounds bounds;
  /// Participation factor used for the plant instead of the modal value.
  std::optional<double> design_beta0;
};

struct ExcitationConfig {
  std::filesystem::path path;
  AccelerogramOptions options;
  double t_end = 0.0;
};

struct ProjectConfig {
  std::string name;
  std::filesystem::path source;
  BuildingConfig building;
  TuningConfig tuning;
  std::optional<LqrMaxima> lqr_maxima;
  std::optional<ExcitationConfig> excitation;
  std::optional<std::pair<double, double>> summary_window;
};

/// Modal reduction plus assembled plant for a building config.
struct PlantModel {
  ModalModel modal;
  PlantStateSpace plant;
};

/// Parses JSON text; syntax errors are reported as `<origin>:<line>:<col>`.
nlohmann::json parse_json_text(const std::string& text,
                               const std::string& origin);
nlohmann::json read_json_file(const std::filesystem::path& path);

BuildingConfig parse_building(const nlohmann::json& j);
TuningConfig parse_tuning(const nlohmann::json& j);
LqrMaxima parse_lqr_maxima(const nlohmann::json& j);
ExcitationConfig parse_excitation(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir);

/// Reads a project file: building fields at top level plus optional
/// `tuning`, `lqr_maxima`, `excitation` and `summary_window` sections.
ProjectConfig load_project_config(const std::filesystem::path& path);

PlantModel make_plant(const BuildingConfig& config);

/// Bryson maxima derived from the tuning bounds: kappa bars for z1, z2, z3
/// and u, `z4_max` for the floor velocity.
LqrMaxima maxima_from_kappa_bars(const KappaBounds& bars, double z4_max = 0.1);

}  // namespace atmd
