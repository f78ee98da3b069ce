#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "atmd/lqr.h"
#include "atmd/simulation.h"
#include "atmd/structural_model.h"
#include "atmd/tuner.h"

namespace atmd {

// JSON documents. Every to_json has a matching from_json that restores the
// same values bit for bit.

nlohmann::json to_json(const ModalModel& modal);
ModalModel modal_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PlantStateSpace& plant);
PlantStateSpace plant_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SlidingDesign& design);
SlidingDesign design_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TuningResult& result);
TuningResult tuning_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LqrResult& result);
LqrResult lqr_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TraceSummary& summary);
TraceSummary summary_from_json(const nlohmann::json& j);

/// Pretty-printed with a trailing newline.
std::string dump(const nlohmann::json& j);

/// Writes `text` to `path`, throwing on I/O failure.
void write_text_file(const std::string& path, const std::string& text);

// Human-readable tables. Displacements in cm (z1) and mm (z2), velocity in
// cm/s, force in N.

std::string modal_report(const ModalModel& modal, const PlantStateSpace& plant);

struct NamedTuning {
  std::string name;
  TuningResult result;
};
std::string tuning_table(const std::vector<NamedTuning>& rows);

struct NamedSummary {
  std::string name;
  TraceSummary summary;
};
/// RMS and peak of z1, z2, z3 and u, one row per controller.
std::string comparison_table(const std::vector<NamedSummary>& rows);

std::string lqr_report(const LqrResult& result, const EquivalentPoles& poles);

}  // namespace atmd
