#include "gaitkb/store_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "gaitkb/error.hpp"
#include "gaitkb/trial_io.hpp"

namespace gaitkb {

using nlohmann::json;

namespace {

[[noreturn]] void corrupt(const std::string& message) { throw Error(ErrorCode::PersistenceError, message); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& v, const std::string& where) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) corrupt(where + ": expected number or null");
  const double x = v.get<double>();
  if (!std::isfinite(x)) corrupt(where + ": non-finite number");
  return x;
}

json category_to_json(const GaitCategory& c) {
  json patients = json::array();
  for (const auto& p : c.patients) patients.push_back(patient_record_to_json(p));
  json ranges = json::array();
  for (const auto& r : c.ranges) {
    ranges.push_back({{"stp_id", r.stp_id},
                      {"min", r.bounds ? json(r.bounds->min) : json(nullptr)},
                      {"max", r.bounds ? json(r.bounds->max) : json(nullptr)},
                      {"manual", r.manual}});
  }
  return json{{"id", c.id}, {"name", c.name}, {"patients", std::move(patients)}, {"ranges", std::move(ranges)}};
}

GaitCategory category_from_json(const json& doc) {
  GaitCategory c(doc.at("id").get<std::string>(), doc.at("name").get<std::string>());
  const std::string where = "category '" + c.id + "'";
  std::set<std::string> seen;
  for (const auto& p : doc.at("patients")) {
    auto record = patient_record_from_json(p);
    if (!seen.insert(record.meta.id).second) corrupt(where + ": duplicate patient '" + record.meta.id + "'");
    c.patients.push_back(std::move(record));
  }
  const auto& ranges = doc.at("ranges");
  if (!ranges.is_array() || ranges.size() != kStpCount) corrupt(where + ": expected 16 ranges");
  std::set<int> ids;
  for (const auto& r : ranges) {
    const int id = r.at("stp_id").get<int>();
    if (!is_valid_stp_id(id) || !ids.insert(id).second) corrupt(where + ": bad stp_id " + std::to_string(id));
    auto& range = c.range(id);
    const auto lo = read_optional_number(r.at("min"), where + " range min");
    const auto hi = read_optional_number(r.at("max"), where + " range max");
    if (lo.has_value() != hi.has_value()) corrupt(where + ": half-open range");
    if (lo) {
      if (*lo > *hi) corrupt(where + ": range min > max");
      range.bounds = Bounds{*lo, *hi};
    }
    range.manual = r.at("manual").get<bool>();
  }
  return c;
}

}  // namespace

json stp_vector_to_json(const StpVector& stps) {
  json out = json::array();
  for (const auto& e : stps.entries()) out.push_back({{"stp_id", e.stp_id}, {"value", optional_number(e.value)}});
  return out;
}

StpVector stp_vector_from_json(const json& doc) {
  if (!doc.is_array() || doc.size() != kStpCount) corrupt("stps: expected 16 entries");
  StpVector stps;
  std::set<int> ids;
  for (const auto& e : doc) {
    const int id = e.at("stp_id").get<int>();
    if (!is_valid_stp_id(id) || !ids.insert(id).second) corrupt("stps: bad stp_id " + std::to_string(id));
    stps.set(id, read_optional_number(e.at("value"), "stp " + std::to_string(id)));
  }
  return stps;
}

json patient_record_to_json(const PatientRecord& record) {
  return json{{"patient", patient_meta_to_json(record.meta)},
              {"stps", stp_vector_to_json(record.stps)},
              {"added_at", record.added_at}};
}

PatientRecord patient_record_from_json(const json& doc) {
  PatientRecord record;
  try {
    record.meta = patient_meta_from_json(doc.at("patient"));
  } catch (const Error& e) {
    corrupt(std::string("patient: ") + e.what());
  }
  record.stps = stp_vector_from_json(doc.at("stps"));
  record.added_at = doc.at("added_at").get<std::int64_t>();
  return record;
}

json store_to_json(const KnowledgeStore& store) {
  json pathologies = json::array();
  for (const auto& c : store.pathology_categories) pathologies.push_back(category_to_json(c));
  return json{{"schema_version", store.schema_version},
              {"norm_category", category_to_json(store.norm_category)},
              {"pathology_categories", std::move(pathologies)}};
}

KnowledgeStore store_from_json(const json& doc) {
  if (!doc.is_object()) corrupt("store document must be an object");
  auto version = doc.find("schema_version");
  if (version == doc.end() || !version->is_number_integer()) corrupt("missing schema_version");
  if (version->get<int>() != kStoreSchemaVersion)
    throw Error(ErrorCode::VersionError, "schema_version " + std::to_string(version->get<int>()) +
                                             " (expected " + std::to_string(kStoreSchemaVersion) + ")");
  KnowledgeStore store;
  try {
    store.norm_category = category_from_json(doc.at("norm_category"));
    for (const auto& c : doc.at("pathology_categories")) store.pathology_categories.push_back(category_from_json(c));
  } catch (const json::exception& e) {
    corrupt(std::string("schema violation: ") + e.what());
  }
  std::set<std::string> ids;
  for (const auto* c : store.categories())
    if (!ids.insert(c->id).second) corrupt("duplicate category id '" + c->id + "'");
  return store;
}

KnowledgeStore parse_store(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    corrupt("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  } catch (const json::exception& e) {
    corrupt(std::string("parse error: ") + e.what());
  }
  return store_from_json(doc);
}

void save_store(const KnowledgeStore& store, const std::filesystem::path& destination) {
  const std::string text = store_to_json(store).dump(1) + "\n";
  auto temp = destination;
  temp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) corrupt("cannot open " + temp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      corrupt("write failed for " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, destination, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(temp, ignored);
    corrupt("cannot rename onto " + destination.string() + ": " + ec.message());
  }
}

KnowledgeStore load_store(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) corrupt("cannot open " + source.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_store(buffer.str());
}

}  // namespace gaitkb
