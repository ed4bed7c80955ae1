#include "gaitkb/trial_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gaitkb/error.hpp"

namespace gaitkb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::InvalidTrial, message); }

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail("missing field '" + where + key + "'");
  return *it;
}

double finite_number(const json& value, const std::string& what) {
  if (!value.is_number()) fail("'" + what + "' must be a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) fail("'" + what + "' must be finite");
  return v;
}

std::vector<double> number_array(const json& value, const std::string& what) {
  if (!value.is_array()) fail("'" + what + "' must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    out.push_back(finite_number(value[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

void per_foot(const json& spatial, const char* key, SpatialMeta& meta,
              std::vector<double> FootSpatial::*member) {
  auto it = spatial.find(key);
  if (it == spatial.end()) return;
  if (!it->is_object()) fail(std::string("'spatial.") + key + "' must be an object {left, right}");
  if (auto l = it->find("left"); l != it->end())
    meta.left.*member = number_array(*l, std::string("spatial.") + key + ".left");
  if (auto r = it->find("right"); r != it->end())
    meta.right.*member = number_array(*r, std::string("spatial.") + key + ".right");
}

}  // namespace

PatientMeta patient_meta_from_json(const json& doc) {
  if (!doc.is_object()) fail("'patient' must be an object");
  PatientMeta meta;
  const auto& id = require(doc, "id", "patient.");
  if (id.is_string()) {
    meta.id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    meta.id = std::to_string(id.get<long long>());
  } else {
    fail("'patient.id' must be a string");
  }
  if (meta.id.empty()) fail("'patient.id' must not be empty");
  meta.age = finite_number(require(doc, "age", "patient."), "patient.age");
  meta.body_mass = finite_number(require(doc, "body_mass_kg", "patient."), "patient.body_mass_kg");
  meta.body_height = finite_number(require(doc, "body_height_cm", "patient."), "patient.body_height_cm");
  const auto& gender = require(doc, "gender", "patient.");
  if (!gender.is_string()) fail("'patient.gender' must be a string");
  auto parsed = parse_gender(gender.get<std::string>());
  if (!parsed) fail("unknown gender '" + gender.get<std::string>() + "'");
  meta.gender = *parsed;
  validate(meta);
  return meta;
}

json patient_meta_to_json(const PatientMeta& meta) {
  return json{{"id", meta.id},
              {"age", meta.age},
              {"body_mass_kg", meta.body_mass},
              {"body_height_cm", meta.body_height},
              {"gender", std::string(to_string(meta.gender))}};
}

RawTrial trial_from_json(const json& doc) {
  if (!doc.is_object()) fail("trial document must be an object");
  RawTrial trial;
  trial.patient = patient_meta_from_json(require(doc, "patient", ""));
  trial.sample_rate = finite_number(require(doc, "sample_rate_hz", ""), "sample_rate_hz");
  trial.left_samples = number_array(require(doc, "left_fv_newton", ""), "left_fv_newton");
  trial.right_samples = number_array(require(doc, "right_fv_newton", ""), "right_fv_newton");
  if (auto it = doc.find("spatial"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) fail("'spatial' must be an object");
    SpatialMeta meta;
    per_foot(*it, "step_length_m", meta, &FootSpatial::step_length_m);
    per_foot(*it, "stride_length_m", meta, &FootSpatial::stride_length_m);
    if (auto w = it->find("walkway_distance_m"); w != it->end())
      meta.walkway_distance_m = finite_number(*w, "spatial.walkway_distance_m");
    trial.spatial = std::move(meta);
  }
  validate(trial);
  return trial;
}

RawTrial parse_trial(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed document at byte ") + std::to_string(e.byte) + ": " + e.what());
  } catch (const json::exception& e) {
    fail(std::string("malformed document: ") + e.what());
  }
  return trial_from_json(doc);
}

json trial_to_json(const RawTrial& trial) {
  json doc{{"patient", patient_meta_to_json(trial.patient)},
           {"sample_rate_hz", trial.sample_rate},
           {"left_fv_newton", trial.left_samples},
           {"right_fv_newton", trial.right_samples}};
  if (trial.spatial) {
    const auto& s = *trial.spatial;
    json spatial{{"step_length_m", {{"left", s.left.step_length_m}, {"right", s.right.step_length_m}}},
                 {"stride_length_m", {{"left", s.left.stride_length_m}, {"right", s.right.stride_length_m}}}};
    if (s.walkway_distance_m) spatial["walkway_distance_m"] = *s.walkway_distance_m;
    doc["spatial"] = std::move(spatial);
  }
  return doc;
}

RawTrial read_trial_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PersistenceError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trial(buffer.str());
}

void write_trial_file(const RawTrial& trial, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::PersistenceError, "cannot write " + path.string());
  out << trial_to_json(trial).dump() << '\n';
  if (!out) throw Error(ErrorCode::PersistenceError, "write failed for " + path.string());
}

}  // namespace gaitkb
