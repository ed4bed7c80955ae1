#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "gaitkb/error.hpp"
#include "gaitkb/trial_io.hpp"

using namespace gaitkb;

namespace {

const char* kTrial = R"({
  "patient": {"id": "A-17", "age": 52, "body_mass_kg": 81.5, "body_height_cm": 178, "gender": "male"},
  "sample_rate_hz": 1000,
  "left_fv_newton": [0, 10, 500, 620.5, 0],
  "right_fv_newton": [0, 0, 0, 300, 400],
  "spatial": {
    "step_length_m": {"left": [0.7, 0.71], "right": [0.69]},
    "stride_length_m": {"left": [1.4], "right": [1.39, 1.41]},
    "walkway_distance_m": 10
  }
})";

ErrorCode code_of(const std::string& text) {
  try {
    parse_trial(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::NotFound;
}

}  // namespace

TEST_SUITE("trial_io") {

TEST_CASE("parses the documented trial schema") {
  const auto t = parse_trial(kTrial);
  CHECK(t.patient.id == "A-17");
  CHECK(t.patient.gender == Gender::Male);
  CHECK(t.patient.body_mass == 81.5);
  CHECK(t.sample_rate == 1000.0);
  CHECK(t.left_samples == std::vector<double>{0, 10, 500, 620.5, 0});
  REQUIRE(t.spatial);
  CHECK(t.spatial->left.step_length_m == std::vector<double>{0.7, 0.71});
  CHECK(t.spatial->right.stride_length_m == std::vector<double>{1.39, 1.41});
  CHECK(t.spatial->walkway_distance_m == 10.0);
}

TEST_CASE("round trip through JSON is the identity") {
  const auto t = parse_trial(kTrial);
  CHECK(parse_trial(trial_to_json(t).dump()) == t);

  auto no_spatial = t;
  no_spatial.spatial.reset();
  CHECK(parse_trial(trial_to_json(no_spatial).dump()) == no_spatial);

  const auto path = std::filesystem::temp_directory_path() / "gaitkb_trial_io_test.json";
  write_trial_file(t, path);
  CHECK(read_trial_file(path) == t);
  std::filesystem::remove(path);
}

TEST_CASE("rejections") {
  auto doc = nlohmann::json::parse(kTrial);

  auto bad_gender = doc;
  bad_gender["patient"]["gender"] = "robot";
  CHECK(code_of(bad_gender.dump()) == ErrorCode::InvalidTrial);

  auto missing_right = doc;
  missing_right.erase("right_fv_newton");
  CHECK(code_of(missing_right.dump()) == ErrorCode::InvalidTrial);

  auto empty_left = doc;
  empty_left["left_fv_newton"] = nlohmann::json::array();
  CHECK(code_of(empty_left.dump()) == ErrorCode::InvalidTrial);

  auto string_sample = doc;
  string_sample["left_fv_newton"][1] = "12";
  CHECK(code_of(string_sample.dump()) == ErrorCode::InvalidTrial);

  auto zero_mass = doc;
  zero_mass["patient"]["body_mass_kg"] = 0;
  CHECK(code_of(zero_mass.dump()) == ErrorCode::InvalidPatientMeta);

  auto negative_rate = doc;
  negative_rate["sample_rate_hz"] = -1;
  CHECK(code_of(negative_rate.dump()) == ErrorCode::InvalidTrial);

  CHECK(code_of("") == ErrorCode::InvalidTrial);
  CHECK(code_of("{\"patient\": ") == ErrorCode::InvalidTrial);
  CHECK(code_of("[1, 2]") == ErrorCode::InvalidTrial);
  // Overflowing literals parse to infinity and must be rejected.
  std::string overflow = kTrial;
  overflow.replace(overflow.find("620.5"), 5, "1e999");
  CHECK(code_of(overflow) == ErrorCode::InvalidTrial);
  CHECK(code_of(R"({"patient": {"id": "x", "age": NaN}})") == ErrorCode::InvalidTrial);
}

}  // TEST_SUITE
