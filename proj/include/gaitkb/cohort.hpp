#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaitkb/eks.hpp"
#include "gaitkb/grf.hpp"

namespace gaitkb {

/// Underlying gait quantities from which all 16 STPs follow.
struct GaitParameters {
  double stride_time = 1.1;            // s, both feet
  double stance_fraction_left = 0.6;   // of stride
  double stance_fraction_right = 0.6;
  double right_step_fraction = 0.5;    // left contact -> right contact, of stride
  double step_length_left = 0.7;       // m
  double step_length_right = 0.7;      // m
};

/// Exact STP vector implied by a parameter set.
StpVector stps_from_parameters(const GaitParameters& params);

struct Normal {
  double mean = 0.0;
  double sd = 0.0;
};

struct CategoryProfile {
  std::string id;
  std::string name;
  Normal stride_time;
  Normal stance_fraction_left;
  Normal stance_fraction_right;
  Normal right_step_fraction;
  Normal step_length_left;
  Normal step_length_right;

  GaitParameters mean() const;
};

struct CohortConfig {
  std::size_t norm_count = 489;
  std::size_t per_category = 50;
  std::uint64_t seed = 1;
  CategoryProfile norm;
  std::vector<CategoryProfile> pathologies;
  Normal age{50.0, 15.0};          // clipped to [18, 90]
  Normal body_height{172.0, 9.0};  // cm, clipped to [140, 205]
  Normal body_mass{75.0, 12.0};    // kg, clipped to [40, 150]
};

/// Norm plus ankle, calcaneus, hip and knee profiles, separated by many
/// standard deviations on every STP.
CohortConfig default_cohort_config();

nlohmann::json cohort_config_to_json(const CohortConfig& config);
/// Missing keys keep their defaults.
CohortConfig cohort_config_from_json(const nlohmann::json& doc);

PatientMeta sample_patient_meta(std::mt19937_64& rng, const CohortConfig& config, std::string id);
GaitParameters sample_parameters(std::mt19937_64& rng, const CategoryProfile& profile);

/// Deterministic for a fixed config (including seed).
KnowledgeStore synthesize_store(const CohortConfig& config);

struct TrialSynthesis {
  double sample_rate = 1000.0;
  int strides = 10;
  double lead_in_s = 0.3;
};

/// Double-hump vertical force trace per foot whose above-threshold stance
/// durations and contact times reproduce `params`; spatial annotations carry
/// the step and stride lengths.
RawTrial synthesize_trial(const PatientMeta& meta, const GaitParameters& params,
                          const TrialSynthesis& synthesis = {}, const SegmentationConfig& segmentation = {});

}  // namespace gaitkb
