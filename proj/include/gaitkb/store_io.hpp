#pragma once

#include <filesystem>
#include <string_view>

#include "json.hpp"

#include "gaitkb/eks.hpp"

namespace gaitkb {

nlohmann::json store_to_json(const KnowledgeStore& store);
/// Throws PersistenceError on schema violations, VersionError on a foreign schema_version.
KnowledgeStore store_from_json(const nlohmann::json& doc);
KnowledgeStore parse_store(std::string_view text);

nlohmann::json patient_record_to_json(const PatientRecord& record);
PatientRecord patient_record_from_json(const nlohmann::json& doc);

nlohmann::json stp_vector_to_json(const StpVector& stps);
StpVector stp_vector_from_json(const nlohmann::json& doc);

/// Writes to a sibling temporary file and renames it over `destination`.
void save_store(const KnowledgeStore& store, const std::filesystem::path& destination);
KnowledgeStore load_store(const std::filesystem::path& source);

}  // namespace gaitkb
