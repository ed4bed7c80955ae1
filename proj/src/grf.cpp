#include "gaitkb/grf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitkb/error.hpp"

namespace gaitkb {

std::string_view to_string(Foot foot) { return foot == Foot::Left ? "left" : "right"; }

std::string_view to_string(Gender gender) {
  switch (gender) {
    case Gender::Female: return "female";
    case Gender::Male: return "male";
    case Gender::Unspecified: return "unspecified";
  }
  return "unspecified";
}

std::optional<Gender> parse_gender(std::string_view text) {
  if (text == "female") return Gender::Female;
  if (text == "male") return Gender::Male;
  if (text == "unspecified") return Gender::Unspecified;
  return std::nullopt;
}

void validate(const PatientMeta& meta) {
  if (!std::isfinite(meta.body_mass) || meta.body_mass <= 0.0)
    throw Error(ErrorCode::InvalidPatientMeta, "body_mass must be > 0");
  if (!std::isfinite(meta.body_height) || meta.body_height <= 0.0)
    throw Error(ErrorCode::InvalidPatientMeta, "body_height must be > 0");
  if (!std::isfinite(meta.age) || meta.age < 0.0)
    throw Error(ErrorCode::InvalidPatientMeta, "age must be >= 0");
}

void validate(const RawTrial& trial) {
  validate(trial.patient);
  if (!std::isfinite(trial.sample_rate) || trial.sample_rate <= 0.0)
    throw Error(ErrorCode::InvalidTrial, "sample_rate must be > 0");
  for (Foot foot : {Foot::Left, Foot::Right}) {
    const auto& samples = trial.samples(foot);
    if (samples.empty())
      throw Error(ErrorCode::InvalidTrial,
                  std::string(to_string(foot)) + " sample stream is empty");
    if (!std::all_of(samples.begin(), samples.end(), [](double v) { return std::isfinite(v); }))
      throw Error(ErrorCode::InvalidTrial,
                  std::string(to_string(foot)) + " sample stream has non-finite values");
  }
}

double contact_threshold(double body_mass, const SegmentationConfig& config) {
  return config.contact_fraction * body_mass * kStandardGravity;
}

std::vector<StepSegment> segment_steps(const RawTrial& trial, Foot foot,
                                       const SegmentationConfig& config) {
  const auto& samples = trial.samples(foot);
  if (samples.empty())
    throw Error(ErrorCode::InvalidTrial, std::string(to_string(foot)) + " sample stream is empty");
  if (trial.sample_rate <= 0.0) throw Error(ErrorCode::InvalidTrial, "sample_rate must be > 0");

  const double threshold = contact_threshold(trial.patient.body_mass, config);
  const auto min_samples = static_cast<std::size_t>(std::ceil(config.min_stance_s * trial.sample_rate));

  std::vector<StepSegment> segments;
  std::size_t i = 0;
  const std::size_t n = samples.size();
  while (i < n) {
    if (!(samples[i] > threshold)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && samples[j + 1] > threshold) ++j;
    if (j - i + 1 >= min_samples) {
      StepSegment seg;
      seg.foot = foot;
      seg.start_index = i;
      seg.end_index = j;
      seg.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(i),
                         samples.begin() + static_cast<std::ptrdiff_t>(j + 1));
      segments.push_back(std::move(seg));
    }
    i = j + 1;
  }
  return segments;
}

std::vector<double> amplitude_normalize(std::span<const double> samples, double body_mass) {
  if (!(body_mass > 0.0)) throw Error(ErrorCode::InvalidPatientMeta, "body_mass must be > 0");
  const double body_weight = body_mass * kStandardGravity;
  std::vector<double> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [body_weight](double v) { return v / body_weight; });
  return out;
}

NormalizedStepCurve time_normalize(const StepSegment& segment, double body_mass) {
  const std::size_t n = segment.samples.size();
  if (n < 2) throw Error(ErrorCode::DegenerateSegment, "segment needs at least 2 samples");
  const auto normalized = amplitude_normalize(segment.samples, body_mass);

  NormalizedStepCurve curve;
  curve.foot = segment.foot;
  const std::size_t last = kCurveLength - 1;
  for (std::size_t t = 0; t < kCurveLength; ++t) {
    // Integer numerator keeps positions exact whenever (n-1) is a multiple of 100.
    const double pos = static_cast<double>(t * (n - 1)) / static_cast<double>(last);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo >= n - 1) {
      curve.values[t] = normalized[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(lo);
    curve.values[t] = normalized[lo] + frac * (normalized[lo + 1] - normalized[lo]);
  }
  return curve;
}

ConsistencyGraph build_consistency_graph(std::span<const StepSegment> segments, double body_mass) {
  if (segments.empty()) throw Error(ErrorCode::NoSteps, "no step segments");
  ConsistencyGraph graph;
  graph.foot = segments.front().foot;
  graph.mean_curve.foot = graph.foot;
  graph.step_curves.reserve(segments.size());
  for (const auto& seg : segments) graph.step_curves.push_back(time_normalize(seg, body_mass));

  const auto count = static_cast<double>(graph.step_curves.size());
  for (std::size_t t = 0; t < kCurveLength; ++t) {
    double sum = 0.0;
    for (const auto& curve : graph.step_curves) sum += curve.values[t];
    graph.mean_curve.values[t] = sum / count;
  }
  return graph;
}

// ---------------------------------------------------------------------------

int stp_id(StpKind kind, Foot foot) {
  return static_cast<int>(kind) + 1 + (foot == Foot::Right ? kStpPerFoot : 0);
}

bool is_valid_stp_id(int id) { return id >= 1 && id <= kStpCount; }

StpKind stp_kind(int id) {
  if (!is_valid_stp_id(id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(id));
  return static_cast<StpKind>((id - 1) % kStpPerFoot);
}

Foot stp_foot(int id) {
  if (!is_valid_stp_id(id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(id));
  return id <= kStpPerFoot ? Foot::Left : Foot::Right;
}

int stp_counterpart(int id) {
  return stp_foot(id) == Foot::Left ? id + kStpPerFoot : id - kStpPerFoot;
}

std::string_view stp_name(StpKind kind) {
  switch (kind) {
    case StpKind::StanceTime: return "stance time";
    case StpKind::SwingTime: return "swing time";
    case StpKind::StepTime: return "step time";
    case StpKind::StrideTime: return "stride time";
    case StpKind::Cadence: return "cadence";
    case StpKind::WalkingSpeed: return "walking speed";
    case StpKind::StepLength: return "step length";
    case StpKind::StrideLength: return "stride length";
  }
  return "";
}

std::string_view stp_unit(StpKind kind) {
  switch (kind) {
    case StpKind::StanceTime:
    case StpKind::StepTime:
    case StpKind::StrideTime: return "s";
    case StpKind::SwingTime: return "% stride";
    case StpKind::Cadence: return "steps/min";
    case StpKind::WalkingSpeed: return "m/s";
    case StpKind::StepLength:
    case StpKind::StrideLength: return "m";
  }
  return "";
}

StpVector::StpVector() {
  for (int i = 0; i < kStpCount; ++i) entries_[static_cast<std::size_t>(i)].stp_id = i + 1;
}

const StpEntry& StpVector::operator[](int id) const {
  if (!is_valid_stp_id(id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(id));
  return entries_[static_cast<std::size_t>(id - 1)];
}

void StpVector::set(int id, std::optional<double> value) {
  if (!is_valid_stp_id(id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(id));
  entries_[static_cast<std::size_t>(id - 1)].value = value;
}

std::size_t StpVector::present_count() const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                [](const StpEntry& e) { return e.value.has_value(); }));
}

namespace {

std::optional<double> mean_of(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void fill_foot(StpVector& out, Foot foot, std::span<const StepSegment> own,
               std::span<const StepSegment> other, double fs, const std::optional<SpatialMeta>& spatial) {
  std::vector<double> stance;
  for (const auto& s : own) stance.push_back(static_cast<double>(s.end_index - s.start_index + 1) / fs);

  std::vector<double> stride;
  for (std::size_t k = 1; k < own.size(); ++k)
    stride.push_back(static_cast<double>(own[k].start_index - own[k - 1].start_index) / fs);

  std::vector<double> step;
  for (const auto& s : own) {
    std::optional<std::size_t> previous;
    for (const auto& o : other)
      if (o.start_index < s.start_index) previous = o.start_index;
    if (previous) step.push_back(static_cast<double>(s.start_index - *previous) / fs);
  }

  const auto stance_time = mean_of(stance);
  const auto stride_time = mean_of(stride);
  const auto step_time = mean_of(step);

  out.set(stp_id(StpKind::StanceTime, foot), stance_time);
  out.set(stp_id(StpKind::StrideTime, foot), stride_time);
  out.set(stp_id(StpKind::StepTime, foot), step_time);
  if (stance_time && stride_time)
    out.set(stp_id(StpKind::SwingTime, foot), (*stride_time - *stance_time) / *stride_time * 100.0);
  if (step_time) out.set(stp_id(StpKind::Cadence, foot), 60.0 / *step_time);

  if (spatial) {
    const auto& fs_meta = foot == Foot::Left ? spatial->left : spatial->right;
    const auto step_length = mean_of(fs_meta.step_length_m);
    const auto stride_length = mean_of(fs_meta.stride_length_m);
    out.set(stp_id(StpKind::StepLength, foot), step_length);
    out.set(stp_id(StpKind::StrideLength, foot), stride_length);
    if (stride_length && stride_time)
      out.set(stp_id(StpKind::WalkingSpeed, foot), *stride_length / *stride_time);
  }
}

}  // namespace

StpVector compute_stps(const RawTrial& trial, std::span<const StepSegment> left,
                       std::span<const StepSegment> right) {
  if (!(trial.sample_rate > 0.0)) throw Error(ErrorCode::InvalidTrial, "sample_rate must be > 0");
  StpVector out;
  fill_foot(out, Foot::Left, left, right, trial.sample_rate, trial.spatial);
  fill_foot(out, Foot::Right, right, left, trial.sample_rate, trial.spatial);
  return out;
}

ProcessedTrial process_trial(RawTrial trial, const SegmentationConfig& config) {
  validate(trial);
  ProcessedTrial out;
  out.left_segments = segment_steps(trial, Foot::Left, config);
  out.right_segments = segment_steps(trial, Foot::Right, config);
  if (out.left_segments.empty()) throw Error(ErrorCode::NoSteps, "no left steps detected");
  if (out.right_segments.empty()) throw Error(ErrorCode::NoSteps, "no right steps detected");
  out.left_graph = build_consistency_graph(out.left_segments, trial.patient.body_mass);
  out.right_graph = build_consistency_graph(out.right_segments, trial.patient.body_mass);
  out.stps = compute_stps(trial, out.left_segments, out.right_segments);
  out.trial = std::move(trial);
  return out;
}

}  // namespace gaitkb
