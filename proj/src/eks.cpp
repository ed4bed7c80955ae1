#include "gaitkb/eks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitkb/error.hpp"

namespace gaitkb {

GaitCategory::GaitCategory() {
  for (int i = 0; i < kStpCount; ++i) ranges[static_cast<std::size_t>(i)].stp_id = i + 1;
}

GaitCategory::GaitCategory(std::string category_id, std::string category_name) : GaitCategory() {
  id = std::move(category_id);
  name = std::move(category_name);
}

const ParameterRange& GaitCategory::range(int stp_id) const {
  if (!is_valid_stp_id(stp_id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(stp_id));
  return ranges[static_cast<std::size_t>(stp_id - 1)];
}

ParameterRange& GaitCategory::range(int stp_id) {
  return const_cast<ParameterRange&>(std::as_const(*this).range(stp_id));
}

bool GaitCategory::has_manual_override() const {
  return std::any_of(ranges.begin(), ranges.end(), [](const ParameterRange& r) { return r.manual; });
}

bool GaitCategory::contains_patient(std::string_view patient_id) const {
  return std::any_of(patients.begin(), patients.end(),
                     [&](const PatientRecord& p) { return p.meta.id == patient_id; });
}

std::vector<const GaitCategory*> KnowledgeStore::categories() const {
  std::vector<const GaitCategory*> out{&norm_category};
  for (const auto& c : pathology_categories) out.push_back(&c);
  return out;
}

const GaitCategory* KnowledgeStore::find(std::string_view category_id) const {
  if (norm_category.id == category_id) return &norm_category;
  for (const auto& c : pathology_categories)
    if (c.id == category_id) return &c;
  return nullptr;
}

GaitCategory* KnowledgeStore::find(std::string_view category_id) {
  return const_cast<GaitCategory*>(std::as_const(*this).find(category_id));
}

const GaitCategory& KnowledgeStore::at(std::string_view category_id) const {
  const auto* c = find(category_id);
  if (!c) throw Error(ErrorCode::NotFound, "category '" + std::string(category_id) + "'");
  return *c;
}

GaitCategory& KnowledgeStore::at(std::string_view category_id) {
  return const_cast<GaitCategory&>(std::as_const(*this).at(category_id));
}

std::size_t KnowledgeStore::patient_count() const {
  std::size_t n = norm_category.patients.size();
  for (const auto& c : pathology_categories) n += c.patients.size();
  return n;
}

bool DemographicFilter::matches(const PatientMeta& meta) const {
  if (gender && !gender->contains(meta.gender)) return false;
  if (age && !age->contains(meta.age)) return false;
  if (body_height && !body_height->contains(meta.body_height)) return false;
  if (body_mass && !body_mass->contains(meta.body_mass)) return false;
  return true;
}

void DemographicFilter::validate() const {
  auto check = [](const std::optional<Interval>& iv, const char* what) {
    if (iv && !(iv->lo <= iv->hi))
      throw Error(ErrorCode::InvalidRange, std::string(what) + " interval has lo > hi");
  };
  check(age, "age");
  check(body_height, "body_height");
  check(body_mass, "body_mass");
}

// ---------------------------------------------------------------------------

namespace {

double median_sorted(std::span<const double> v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

void recompute_auto_ranges(GaitCategory& category) {
  for (auto& r : category.ranges)
    if (!r.manual) r.bounds = member_extrema(category, r.stp_id);
}

}  // namespace

DistributionStats describe(int stp_id, std::vector<double> values) {
  DistributionStats s;
  s.stp_id = stp_id;
  s.n = values.size();
  s.raw_values = std::move(values);
  if (s.n == 0) return s;

  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(s.raw_values.begin(), s.raw_values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : s.raw_values) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = s.n > 1 ? std::sqrt(ss / n) : 0.0;

  std::vector<double> sorted = s.raw_values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = median_sorted(sorted);
  // Tukey hinges: with odd n the median belongs to both halves.
  const std::size_t half = (s.n + 1) / 2;
  const std::span<const double> all(sorted);
  s.q1 = median_sorted(all.first(half));
  s.q3 = median_sorted(all.last(half));
  return s;
}

KnowledgeStore add_category(KnowledgeStore store, std::string category_id, std::string name) {
  if (category_id.empty()) throw Error(ErrorCode::InvalidRange, "category id must not be empty");
  if (store.find(category_id)) throw Error(ErrorCode::Duplicate, "category '" + category_id + "'");
  store.pathology_categories.emplace_back(std::move(category_id), std::move(name));
  return store;
}

KnowledgeStore apply_patient(KnowledgeStore store, std::string_view category_id, PatientRecord patient,
                             const std::optional<std::set<int>>& subset) {
  auto& category = store.at(category_id);
  validate(patient.meta);
  if (category.contains_patient(patient.meta.id))
    throw Error(ErrorCode::Duplicate,
                "patient '" + patient.meta.id + "' already in category '" + category.id + "'");
  if (subset) {
    for (int id : *subset)
      if (!is_valid_stp_id(id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(id));
    for (int id = 1; id <= kStpCount; ++id)
      if (!subset->contains(id)) patient.stps.set(id, std::nullopt);
  }
  category.patients.push_back(std::move(patient));
  recompute_auto_ranges(category);
  return store;
}

KnowledgeStore remove_patient(KnowledgeStore store, std::string_view category_id,
                              std::string_view patient_id) {
  auto& category = store.at(category_id);
  auto it = std::find_if(category.patients.begin(), category.patients.end(),
                         [&](const PatientRecord& p) { return p.meta.id == patient_id; });
  if (it == category.patients.end())
    throw Error(ErrorCode::NotFound, "patient '" + std::string(patient_id) + "'");
  category.patients.erase(it);
  recompute_auto_ranges(category);
  return store;
}

KnowledgeStore reset_category(KnowledgeStore store, std::string_view category_id) {
  auto& category = store.at(category_id);
  for (auto& r : category.ranges) r.manual = false;
  recompute_auto_ranges(category);
  return store;
}

KnowledgeStore override_range(KnowledgeStore store, std::string_view category_id, int stp_id, double min,
                              double max) {
  auto& category = store.at(category_id);
  if (!std::isfinite(min) || !std::isfinite(max))
    throw Error(ErrorCode::InvalidRange, "range bounds must be finite");
  if (min > max) throw Error(ErrorCode::InvalidRange, "min > max");
  auto& range = category.range(stp_id);
  range.bounds = Bounds{min, max};
  range.manual = true;
  return store;
}

std::optional<Bounds> member_extrema(const GaitCategory& category, int stp_id,
                                     const DemographicFilter& filter) {
  std::optional<Bounds> out;
  for (const auto& p : category.patients) {
    if (!filter.matches(p.meta)) continue;
    const auto v = p.stps.value(stp_id);
    if (!v) continue;
    if (!out) {
      out = Bounds{*v, *v};
    } else {
      out->min = std::min(out->min, *v);
      out->max = std::max(out->max, *v);
    }
  }
  return out;
}

std::vector<PatientRecord> filtered_members(const GaitCategory& category, const DemographicFilter& filter) {
  std::vector<PatientRecord> out;
  std::copy_if(category.patients.begin(), category.patients.end(), std::back_inserter(out),
               [&](const PatientRecord& p) { return filter.matches(p.meta); });
  return out;
}

std::vector<double> member_values(const GaitCategory& category, int stp_id, const DemographicFilter& filter) {
  std::vector<double> out;
  for (const auto& p : category.patients) {
    if (!filter.matches(p.meta)) continue;
    if (auto v = p.stps.value(stp_id)) out.push_back(*v);
  }
  return out;
}

DistributionStats distribution_stats(const GaitCategory& category, int stp_id, const DemographicFilter& filter) {
  if (!is_valid_stp_id(stp_id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(stp_id));
  return describe(stp_id, member_values(category, stp_id, filter));
}

}  // namespace gaitkb
