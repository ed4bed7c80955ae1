#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaitkb {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2
inline constexpr std::size_t kCurveLength = 101;     // 0..100 % of stance
inline constexpr int kStpCount = 16;
inline constexpr int kStpPerFoot = 8;

enum class Foot { Left, Right };
enum class Gender { Female, Male, Unspecified };

std::string_view to_string(Foot foot);
std::string_view to_string(Gender gender);
std::optional<Gender> parse_gender(std::string_view text);

struct PatientMeta {
  std::string id;
  double age = 0.0;          // years
  double body_mass = 0.0;    // kg
  double body_height = 0.0;  // cm
  Gender gender = Gender::Unspecified;

  bool operator==(const PatientMeta&) const = default;
};

/// Throws InvalidPatientMeta when a field violates its range.
void validate(const PatientMeta& meta);

/// Per-foot spatial annotations; lengths in metres, one entry per step.
struct FootSpatial {
  std::vector<double> step_length_m;
  std::vector<double> stride_length_m;

  bool operator==(const FootSpatial&) const = default;
};

struct SpatialMeta {
  FootSpatial left;
  FootSpatial right;
  std::optional<double> walkway_distance_m;

  bool operator==(const SpatialMeta&) const = default;
};

struct RawTrial {
  PatientMeta patient;
  std::vector<double> left_samples;   // vertical GRF [N]
  std::vector<double> right_samples;  // vertical GRF [N]
  double sample_rate = 0.0;           // Hz
  std::optional<SpatialMeta> spatial;

  const std::vector<double>& samples(Foot foot) const {
    return foot == Foot::Left ? left_samples : right_samples;
  }

  bool operator==(const RawTrial&) const = default;
};

/// Throws InvalidTrial / InvalidPatientMeta.
void validate(const RawTrial& trial);

struct StepSegment {
  Foot foot = Foot::Left;
  std::size_t start_index = 0;  // first sample above threshold
  std::size_t end_index = 0;    // last sample above threshold (inclusive)
  std::vector<double> samples;  // [N], samples[start_index..end_index]
};

struct NormalizedStepCurve {
  Foot foot = Foot::Left;
  std::array<double, kCurveLength> values{};  // multiples of body weight
};

struct ConsistencyGraph {
  Foot foot = Foot::Left;
  std::vector<NormalizedStepCurve> step_curves;
  NormalizedStepCurve mean_curve;
};

struct SegmentationConfig {
  double contact_fraction = 0.05;  // of body weight
  double min_stance_s = 0.1;
};

/// Threshold in newtons above which a sample counts as foot contact.
double contact_threshold(double body_mass, const SegmentationConfig& config = {});

std::vector<StepSegment> segment_steps(const RawTrial& trial, Foot foot,
                                       const SegmentationConfig& config = {});

std::vector<double> amplitude_normalize(std::span<const double> samples, double body_mass);

NormalizedStepCurve time_normalize(const StepSegment& segment, double body_mass);

ConsistencyGraph build_consistency_graph(std::span<const StepSegment> segments,
                                         double body_mass);

// ---------------------------------------------------------------------------
// Spatio-temporal parameters
// ---------------------------------------------------------------------------

/// Per-foot parameter kinds; stp id = kind index + 1 (left) or + 9 (right).
enum class StpKind {
  StanceTime,   // s
  SwingTime,    // % of stride
  StepTime,     // s
  StrideTime,   // s
  Cadence,      // steps/min
  WalkingSpeed, // m/s
  StepLength,   // m
  StrideLength, // m
};

int stp_id(StpKind kind, Foot foot);
StpKind stp_kind(int stp_id);
Foot stp_foot(int stp_id);
/// Same parameter on the other foot.
int stp_counterpart(int stp_id);
std::string_view stp_name(StpKind kind);
std::string_view stp_unit(StpKind kind);
bool is_valid_stp_id(int stp_id);

struct StpEntry {
  int stp_id = 0;
  std::optional<double> value;

  bool operator==(const StpEntry&) const = default;
};

class StpVector {
 public:
  StpVector();

  const StpEntry& operator[](int stp_id) const;
  std::optional<double> value(int stp_id) const { return (*this)[stp_id].value; }
  void set(int stp_id, std::optional<double> value);

  const std::array<StpEntry, kStpCount>& entries() const { return entries_; }
  std::size_t present_count() const;

  bool operator==(const StpVector&) const = default;

 private:
  std::array<StpEntry, kStpCount> entries_;
};

StpVector compute_stps(const RawTrial& trial, std::span<const StepSegment> left,
                       std::span<const StepSegment> right);

/// Everything the workbench shows for one loaded trial.
struct ProcessedTrial {
  RawTrial trial;
  std::vector<StepSegment> left_segments;
  std::vector<StepSegment> right_segments;
  ConsistencyGraph left_graph;
  ConsistencyGraph right_graph;
  StpVector stps;
};

/// Segment, normalize and parameterize. Throws NoSteps if a foot has no step.
ProcessedTrial process_trial(RawTrial trial, const SegmentationConfig& config = {});

}  // namespace gaitkb
