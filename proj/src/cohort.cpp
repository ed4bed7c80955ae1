#include "gaitkb/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaitkb/error.hpp"

namespace gaitkb {

using nlohmann::json;

StpVector stps_from_parameters(const GaitParameters& p) {
  const double stride = p.stride_time;
  const double right_step = p.right_step_fraction * stride;
  const double left_step = stride - right_step;
  const double stride_length = p.step_length_left + p.step_length_right;

  StpVector out;
  auto fill = [&](Foot foot, double stance_fraction, double step_time, double step_length) {
    const double stance = stance_fraction * stride;
    out.set(stp_id(StpKind::StanceTime, foot), stance);
    out.set(stp_id(StpKind::SwingTime, foot), (stride - stance) / stride * 100.0);
    out.set(stp_id(StpKind::StepTime, foot), step_time);
    out.set(stp_id(StpKind::StrideTime, foot), stride);
    out.set(stp_id(StpKind::Cadence, foot), 60.0 / step_time);
    out.set(stp_id(StpKind::WalkingSpeed, foot), stride_length / stride);
    out.set(stp_id(StpKind::StepLength, foot), step_length);
    out.set(stp_id(StpKind::StrideLength, foot), stride_length);
  };
  fill(Foot::Left, p.stance_fraction_left, left_step, p.step_length_left);
  fill(Foot::Right, p.stance_fraction_right, right_step, p.step_length_right);
  return out;
}

GaitParameters CategoryProfile::mean() const {
  return {stride_time.mean,      stance_fraction_left.mean, stance_fraction_right.mean,
          right_step_fraction.mean, step_length_left.mean,  step_length_right.mean};
}

namespace {

CategoryProfile profile(std::string id, std::string name, double stride, double stance_l, double stance_r,
                        double right_step, double step_l, double step_r) {
  return CategoryProfile{std::move(id),       std::move(name),      {stride, 0.006},
                         {stance_l, 0.003},   {stance_r, 0.003},    {right_step, 0.003},
                         {step_l, 0.006},     {step_r, 0.006}};
}

double draw(std::mt19937_64& rng, const Normal& n) {
  if (n.sd <= 0.0) return n.mean;
  return std::normal_distribution<double>(n.mean, n.sd)(rng);
}

json normal_json(const Normal& n) { return json{{"mean", n.mean}, {"sd", n.sd}}; }

void read_normal(const json& doc, const char* key, Normal& n) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  n.mean = it->value("mean", n.mean);
  n.sd = it->value("sd", n.sd);
  if (!std::isfinite(n.mean) || !std::isfinite(n.sd) || n.sd < 0.0)
    throw Error(ErrorCode::InvalidRange, std::string("cohort config '") + key + "' is invalid");
}

json profile_json(const CategoryProfile& p) {
  return json{{"id", p.id},
              {"name", p.name},
              {"stride_time", normal_json(p.stride_time)},
              {"stance_fraction_left", normal_json(p.stance_fraction_left)},
              {"stance_fraction_right", normal_json(p.stance_fraction_right)},
              {"right_step_fraction", normal_json(p.right_step_fraction)},
              {"step_length_left", normal_json(p.step_length_left)},
              {"step_length_right", normal_json(p.step_length_right)}};
}

CategoryProfile profile_from_json(const json& doc, CategoryProfile base) {
  base.id = doc.value("id", base.id);
  base.name = doc.value("name", base.name);
  read_normal(doc, "stride_time", base.stride_time);
  read_normal(doc, "stance_fraction_left", base.stance_fraction_left);
  read_normal(doc, "stance_fraction_right", base.stance_fraction_right);
  read_normal(doc, "right_step_fraction", base.right_step_fraction);
  read_normal(doc, "step_length_left", base.step_length_left);
  read_normal(doc, "step_length_right", base.step_length_right);
  if (base.id.empty()) throw Error(ErrorCode::InvalidRange, "cohort profile needs an id");
  return base;
}

PatientRecord sample_record(std::mt19937_64& rng, const CohortConfig& config, const CategoryProfile& profile,
                            std::size_t index, std::int64_t added_at) {
  char id[64];
  std::snprintf(id, sizeof id, "%s-%04zu", profile.id.c_str(), index + 1);
  auto meta = sample_patient_meta(rng, config, id);
  return PatientRecord{std::move(meta), stps_from_parameters(sample_parameters(rng, profile)), added_at};
}

// Stance waveform in body weights over u in [0, 1]; positive inside.
double stance_shape(double u) {
  const double x = std::numbers::pi * u;
  return 1.2 * (std::sin(x) + 0.25 * std::sin(3.0 * x));
}

// Fraction of the contact spent below the detection threshold at each end.
double sub_threshold_margin(double contact_fraction) {
  double lo = 0.0;
  double hi = 0.25;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (stance_shape(mid) < contact_fraction ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CohortConfig default_cohort_config() {
  CohortConfig c;
  c.norm = profile("norm", "Norm", 1.10, 0.60, 0.60, 0.500, 0.70, 0.70);
  c.pathologies = {
      profile("ankle", "Ankle", 1.25, 0.64, 0.65, 0.495, 0.60, 0.62),
      profile("calcaneus", "Calcaneus", 1.70, 0.76, 0.77, 0.480, 0.38, 0.40),
      profile("hip", "Hip", 1.55, 0.72, 0.73, 0.485, 0.45, 0.46),
      profile("knee", "Knee", 1.40, 0.68, 0.69, 0.490, 0.52, 0.53),
  };
  return c;
}

json cohort_config_to_json(const CohortConfig& c) {
  json pathologies = json::array();
  for (const auto& p : c.pathologies) pathologies.push_back(profile_json(p));
  return json{{"norm_count", c.norm_count},
              {"per_category", c.per_category},
              {"seed", c.seed},
              {"age", normal_json(c.age)},
              {"body_height", normal_json(c.body_height)},
              {"body_mass", normal_json(c.body_mass)},
              {"norm", profile_json(c.norm)},
              {"pathologies", std::move(pathologies)}};
}

CohortConfig cohort_config_from_json(const json& doc) {
  auto c = default_cohort_config();
  if (!doc.is_object()) throw Error(ErrorCode::InvalidRange, "cohort config must be an object");
  try {
    c.norm_count = doc.value("norm_count", c.norm_count);
    c.per_category = doc.value("per_category", c.per_category);
    c.seed = doc.value("seed", c.seed);
    read_normal(doc, "age", c.age);
    read_normal(doc, "body_height", c.body_height);
    read_normal(doc, "body_mass", c.body_mass);
    if (auto it = doc.find("norm"); it != doc.end()) c.norm = profile_from_json(*it, c.norm);
    if (auto it = doc.find("pathologies"); it != doc.end()) {
      std::vector<CategoryProfile> profiles;
      for (const auto& p : *it) profiles.push_back(profile_from_json(p, CategoryProfile{}));
      c.pathologies = std::move(profiles);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidRange, std::string("cohort config: ") + e.what());
  }
  return c;
}

PatientMeta sample_patient_meta(std::mt19937_64& rng, const CohortConfig& config, std::string id) {
  PatientMeta meta;
  meta.id = std::move(id);
  const double g = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  meta.gender = g < 0.475 ? Gender::Female : (g < 0.95 ? Gender::Male : Gender::Unspecified);
  // Whole years and centimetres, mass to 0.1 kg, as in clinical records.
  meta.age = std::round(std::clamp(draw(rng, config.age), 18.0, 90.0));
  meta.body_height = std::round(std::clamp(draw(rng, config.body_height), 140.0, 205.0));
  meta.body_mass = std::round(std::clamp(draw(rng, config.body_mass), 40.0, 150.0) * 10.0) / 10.0;
  return meta;
}

GaitParameters sample_parameters(std::mt19937_64& rng, const CategoryProfile& p) {
  GaitParameters g;
  g.stride_time = std::max(0.3, draw(rng, p.stride_time));
  g.stance_fraction_left = std::clamp(draw(rng, p.stance_fraction_left), 0.05, 0.95);
  g.stance_fraction_right = std::clamp(draw(rng, p.stance_fraction_right), 0.05, 0.95);
  g.right_step_fraction = std::clamp(draw(rng, p.right_step_fraction), 0.05, 0.95);
  g.step_length_left = std::max(0.05, draw(rng, p.step_length_left));
  g.step_length_right = std::max(0.05, draw(rng, p.step_length_right));
  return g;
}

KnowledgeStore synthesize_store(const CohortConfig& config) {
  std::mt19937_64 rng(config.seed);
  constexpr std::int64_t kEpoch = 1'700'000'000'000;
  std::int64_t clock = kEpoch;

  KnowledgeStore store;
  store.norm_category.name = config.norm.name;
  for (std::size_t i = 0; i < config.norm_count; ++i)
    store = apply_patient(std::move(store), kNormCategoryId, sample_record(rng, config, config.norm, i, clock++));
  for (const auto& profile : config.pathologies) {
    store = add_category(std::move(store), profile.id, profile.name);
    for (std::size_t i = 0; i < config.per_category; ++i)
      store = apply_patient(std::move(store), profile.id, sample_record(rng, config, profile, i, clock++));
  }
  return store;
}

RawTrial synthesize_trial(const PatientMeta& meta, const GaitParameters& params, const TrialSynthesis& synthesis,
                          const SegmentationConfig& segmentation) {
  validate(meta);
  const double fs = synthesis.sample_rate;
  const double stride = params.stride_time;
  const double body_weight = meta.body_mass * kStandardGravity;
  const double margin = sub_threshold_margin(segmentation.contact_fraction);

  const double duration = synthesis.lead_in_s * 2.0 + (synthesis.strides + 1) * stride;
  const auto n = static_cast<std::size_t>(std::ceil(duration * fs));

  RawTrial trial;
  trial.patient = meta;
  trial.sample_rate = fs;
  trial.left_samples.assign(n, 0.0);
  trial.right_samples.assign(n, 0.0);

  auto stamp = [&](std::vector<double>& out, double first_contact, double stance_fraction) {
    const double stance = stance_fraction * stride;
    const double contact = stance / (1.0 - 2.0 * margin);
    for (int k = 0; k < synthesis.strides; ++k) {
      const double begin = first_contact + k * stride - margin * contact;
      const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor(begin * fs)));
      const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil((begin + contact) * fs)) + 1);
      for (std::size_t i = i0; i < i1; ++i) {
        const double u = (static_cast<double>(i) / fs - begin) / contact;
        if (u > 0.0 && u < 1.0) out[i] = stance_shape(u) * body_weight;
      }
    }
  };
  const double left_contact = synthesis.lead_in_s;
  stamp(trial.left_samples, left_contact, params.stance_fraction_left);
  stamp(trial.right_samples, left_contact + params.right_step_fraction * stride, params.stance_fraction_right);

  SpatialMeta spatial;
  const auto count = static_cast<std::size_t>(synthesis.strides);
  const double stride_length = params.step_length_left + params.step_length_right;
  spatial.left.step_length_m.assign(count, params.step_length_left);
  spatial.right.step_length_m.assign(count, params.step_length_right);
  spatial.left.stride_length_m.assign(count, stride_length);
  spatial.right.stride_length_m.assign(count, stride_length);
  trial.spatial = std::move(spatial);
  return trial;
}

}  // namespace gaitkb
