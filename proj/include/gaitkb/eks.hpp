#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gaitkb/grf.hpp"

namespace gaitkb {

inline constexpr int kStoreSchemaVersion = 1;
inline constexpr std::string_view kNormCategoryId = "norm";

struct PatientRecord {
  PatientMeta meta;
  StpVector stps;
  std::int64_t added_at = 0;  // unix epoch, milliseconds

  bool operator==(const PatientRecord&) const = default;
};

struct Bounds {
  double min = 0.0;
  double max = 0.0;

  bool contains(double x) const { return !(x < min || x > max); }
  bool operator==(const Bounds&) const = default;
};

/// A category's accepted value range for one STP. Without bounds the
/// category has no usable data for that parameter.
struct ParameterRange {
  int stp_id = 0;
  std::optional<Bounds> bounds;
  bool manual = false;

  bool operator==(const ParameterRange&) const = default;
};

struct GaitCategory {
  std::string id;
  std::string name;
  std::vector<PatientRecord> patients;
  std::array<ParameterRange, kStpCount> ranges;

  GaitCategory();
  GaitCategory(std::string id, std::string name);

  const ParameterRange& range(int stp_id) const;
  ParameterRange& range(int stp_id);
  bool has_manual_override() const;
  bool contains_patient(std::string_view patient_id) const;

  bool operator==(const GaitCategory&) const = default;
};

struct KnowledgeStore {
  int schema_version = kStoreSchemaVersion;
  GaitCategory norm_category{std::string(kNormCategoryId), "Norm"};
  std::vector<GaitCategory> pathology_categories;

  /// Norm first, then pathology categories in stored order.
  std::vector<const GaitCategory*> categories() const;
  const GaitCategory* find(std::string_view category_id) const;
  GaitCategory* find(std::string_view category_id);
  const GaitCategory& at(std::string_view category_id) const;
  GaitCategory& at(std::string_view category_id);
  std::size_t patient_count() const;

  bool operator==(const KnowledgeStore&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Closed, inclusive demographic predicates; absent clauses never filter.
struct DemographicFilter {
  std::optional<std::set<Gender>> gender;
  std::optional<Interval> age;
  std::optional<Interval> body_height;  // cm
  std::optional<Interval> body_mass;    // kg

  bool empty() const { return !gender && !age && !body_height && !body_mass; }
  bool matches(const PatientMeta& meta) const;
  /// Throws InvalidRange if some interval has lo > hi.
  void validate() const;

  bool operator==(const DemographicFilter&) const = default;
};

struct DistributionStats {
  int stp_id = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // population estimator
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::vector<double> raw_values;  // member order

  bool empty() const { return n == 0; }
  bool operator==(const DistributionStats&) const = default;
};

/// Summary statistics of an arbitrary sample; quartiles are Tukey hinges.
DistributionStats describe(int stp_id, std::vector<double> values);

// Store mutations take the store by value and return the updated copy, so a
// throwing call never leaves a half-applied state behind.

KnowledgeStore add_category(KnowledgeStore store, std::string category_id, std::string name);

KnowledgeStore apply_patient(KnowledgeStore store, std::string_view category_id, PatientRecord patient,
                             const std::optional<std::set<int>>& subset = std::nullopt);

KnowledgeStore remove_patient(KnowledgeStore store, std::string_view category_id,
                              std::string_view patient_id);

KnowledgeStore reset_category(KnowledgeStore store, std::string_view category_id);

KnowledgeStore override_range(KnowledgeStore store, std::string_view category_id, int stp_id, double min,
                              double max);

/// Exact extrema of the members' values for one STP (nullopt when none has it).
std::optional<Bounds> member_extrema(const GaitCategory& category, int stp_id,
                                     const DemographicFilter& filter = {});

std::vector<PatientRecord> filtered_members(const GaitCategory& category, const DemographicFilter& filter);

std::vector<double> member_values(const GaitCategory& category, int stp_id, const DemographicFilter& filter);

DistributionStats distribution_stats(const GaitCategory& category, int stp_id, const DemographicFilter& filter);

}  // namespace gaitkb
