#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "gaitkb/grf.hpp"

namespace gaitkb {

// Trial documents are JSON; see docs/formats.md. All parse failures raise
// Error(InvalidTrial) or Error(InvalidPatientMeta).

RawTrial parse_trial(std::string_view text);
RawTrial trial_from_json(const nlohmann::json& doc);
nlohmann::json trial_to_json(const RawTrial& trial);

nlohmann::json patient_meta_to_json(const PatientMeta& meta);
PatientMeta patient_meta_from_json(const nlohmann::json& doc);

RawTrial read_trial_file(const std::filesystem::path& path);
void write_trial_file(const RawTrial& trial, const std::filesystem::path& path);

}  // namespace gaitkb
