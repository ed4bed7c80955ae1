#include "gaitkb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitkb/error.hpp"

namespace gaitkb {

std::string_view to_string(ParamState state) {
  switch (state) {
    case ParamState::InRange: return "in_range";
    case ParamState::OutOfRange: return "out_of_range";
    case ParamState::NoData: return "no_data";
  }
  return "no_data";
}

MatchScore match_score(const StpVector& patient, std::span<const DistributionStats, kStpCount> stats,
                       double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be a finite positive number");
  MatchScore out;
  for (int i = 0; i < kStpCount; ++i) {
    const auto& s = stats[static_cast<std::size_t>(i)];
    const auto x = patient.value(i + 1);
    if (!x || s.empty()) continue;
    const double deviation = s.mean - *x;
    out.score += s.std_dev / std::max(deviation * deviation, epsilon);
    ++out.n_used;
  }
  return out;
}

GraphicalSummary graphical_summary(const StpVector& patient, std::span<const ParameterRange, kStpCount> ranges) {
  GraphicalSummary out{};
  for (int i = 0; i < kStpCount; ++i) {
    const auto& r = ranges[static_cast<std::size_t>(i)];
    const auto x = patient.value(i + 1);
    if (!x || !r.bounds) {
      out[static_cast<std::size_t>(i)] = ParamState::NoData;
    } else {
      out[static_cast<std::size_t>(i)] = r.bounds->contains(*x) ? ParamState::InRange : ParamState::OutOfRange;
    }
  }
  return out;
}

MatchResult match_category(const StpVector& patient, const CategoryView& view, double epsilon) {
  const auto score = match_score(patient, view.stats, epsilon);
  MatchResult r;
  r.category_id = view.category_id;
  r.category_name = view.category_name;
  r.score = score.score;
  r.n_used = score.n_used;
  r.summary = graphical_summary(patient, view.ranges);
  r.epsilon = epsilon;
  r.manual_override = view.manual_override;
  return r;
}

void sort_matches(std::vector<MatchResult>& results) {
  std::sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.category_name != b.category_name) return a.category_name < b.category_name;
    return a.category_id < b.category_id;
  });
}

namespace {

CategoryView view_header(const GaitCategory& category, const DemographicFilter& filter) {
  CategoryView v;
  v.category_id = category.id;
  v.category_name = category.name;
  v.manual_override = category.has_manual_override();
  v.member_count = static_cast<std::size_t>(
      std::count_if(category.patients.begin(), category.patients.end(),
                    [&](const PatientRecord& p) { return filter.matches(p.meta); }));
  return v;
}

void fill_stp(CategoryView& v, const GaitCategory& category, const DemographicFilter& filter, int stp) {
  auto idx = static_cast<std::size_t>(stp - 1);
  v.stats[idx] = distribution_stats(category, stp, filter);
  v.ranges[idx] = category.range(stp);
  if (!v.ranges[idx].manual && !filter.empty()) {
    const auto& s = v.stats[idx];
    v.ranges[idx].bounds = s.empty() ? std::nullopt : std::optional<Bounds>(Bounds{s.min, s.max});
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be a finite positive number");
}

}  // namespace

// ---------------------------------------------------------------------------
// Parallel kernels
// ---------------------------------------------------------------------------

CategoryView category_view(const GaitCategory& category, const DemographicFilter& filter) {
  auto v = view_header(category, filter);
#pragma omp parallel for schedule(static)
  for (int stp = 1; stp <= kStpCount; ++stp) fill_stp(v, category, filter, stp);
  return v;
}

std::vector<CategoryView> category_views(const KnowledgeStore& store, const DemographicFilter& filter) {
  const auto categories = store.categories();
  const int n_categories = static_cast<int>(categories.size());
  std::vector<CategoryView> views(categories.size());
  for (int c = 0; c < n_categories; ++c) views[static_cast<std::size_t>(c)] = view_header(*categories[static_cast<std::size_t>(c)], filter);

  // Flattened (category, stp) space so small categories do not serialize the loop.
  const int tasks = n_categories * kStpCount;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < tasks; ++t) {
    const auto c = static_cast<std::size_t>(t / kStpCount);
    fill_stp(views[c], *categories[c], filter, t % kStpCount + 1);
  }
  return views;
}

std::vector<MatchResult> rank_categories(const StpVector& patient, const KnowledgeStore& store,
                                         const DemographicFilter& filter, double epsilon) {
  check_epsilon(epsilon);
  const auto views = category_views(store, filter);
  const int n = static_cast<int>(views.size());
  std::vector<MatchResult> results(views.size());
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n; ++c)
    results[static_cast<std::size_t>(c)] = match_category(patient, views[static_cast<std::size_t>(c)], epsilon);
  sort_matches(results);
  return results;
}

std::vector<std::vector<MatchResult>> rank_batch(std::span<const StpVector> patients, const KnowledgeStore& store,
                                                 const DemographicFilter& filter, double epsilon) {
  check_epsilon(epsilon);
  const auto views = category_views(store, filter);
  const int n = static_cast<int>(patients.size());
  std::vector<std::vector<MatchResult>> out(patients.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (int p = 0; p < n; ++p) {
    auto& results = out[static_cast<std::size_t>(p)];
    results.reserve(views.size());
    for (const auto& v : views) results.push_back(match_category(patients[static_cast<std::size_t>(p)], v, epsilon));
    sort_matches(results);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serial reference
// ---------------------------------------------------------------------------

namespace reference {

CategoryView category_view(const GaitCategory& category, const DemographicFilter& filter) {
  auto v = view_header(category, filter);
  for (int stp = 1; stp <= kStpCount; ++stp) fill_stp(v, category, filter, stp);
  return v;
}

std::vector<CategoryView> category_views(const KnowledgeStore& store, const DemographicFilter& filter) {
  std::vector<CategoryView> views;
  for (const auto* c : store.categories()) views.push_back(reference::category_view(*c, filter));
  return views;
}

std::vector<MatchResult> rank_categories(const StpVector& patient, const KnowledgeStore& store,
                                         const DemographicFilter& filter, double epsilon) {
  check_epsilon(epsilon);
  std::vector<MatchResult> results;
  for (const auto& v : reference::category_views(store, filter)) results.push_back(match_category(patient, v, epsilon));
  sort_matches(results);
  return results;
}

std::vector<std::vector<MatchResult>> rank_batch(std::span<const StpVector> patients, const KnowledgeStore& store,
                                                 const DemographicFilter& filter, double epsilon) {
  check_epsilon(epsilon);
  const auto views = reference::category_views(store, filter);
  std::vector<std::vector<MatchResult>> out;
  out.reserve(patients.size());
  for (const auto& patient : patients) {
    std::vector<MatchResult> results;
    for (const auto& v : views) results.push_back(match_category(patient, v, epsilon));
    sort_matches(results);
    out.push_back(std::move(results));
  }
  return out;
}

}  // namespace reference

// ---------------------------------------------------------------------------

CategoryDifference category_difference(const DistributionStats& k, const DistributionStats& l) {
  if (k.empty() || l.empty()) throw Error(ErrorCode::EmptyDistribution, "both distributions need members");
  CategoryDifference out;
  out.stp_id = k.stp_id;
  const double numerator = (k.mean - l.mean) * (k.mean - l.mean);
  const double denominator = k.std_dev * k.std_dev + l.std_dev * l.std_dev;
  if (denominator > 0.0) {
    out.d = numerator / denominator;
  } else if (numerator > 0.0) {
    out.d = std::numeric_limits<double>::infinity();
    out.degenerate = true;
  }
  return out;
}

ItbpData itbp_data(const KnowledgeStore& store, std::string_view selected_category_id, int stp_id,
                   const StpVector* patient, const DemographicFilter& filter) {
  const auto& selected = store.at(selected_category_id);
  if (!is_valid_stp_id(stp_id)) throw Error(ErrorCode::NotFound, "stp id " + std::to_string(stp_id));
  ItbpData row;
  row.stp_id = stp_id;
  row.norm_stats = distribution_stats(store.norm_category, stp_id, filter);
  row.selected_stats = distribution_stats(selected, stp_id, filter);
  if (patient) {
    const auto kind = stp_kind(stp_id);
    row.patient_value_left = patient->value(gaitkb::stp_id(kind, Foot::Left));
    row.patient_value_right = patient->value(gaitkb::stp_id(kind, Foot::Right));
  }
  if (!row.norm_stats.empty() && !row.selected_stats.empty())
    row.difference = category_difference(row.norm_stats, row.selected_stats);
  return row;
}

std::vector<ItbpData> itbp_table(const KnowledgeStore& store, std::string_view selected_category_id,
                                 const StpVector* patient, const DemographicFilter& filter) {
  store.at(selected_category_id);
  std::vector<ItbpData> rows(kStpCount);
#pragma omp parallel for schedule(static)
  for (int stp = 1; stp <= kStpCount; ++stp)
    rows[static_cast<std::size_t>(stp - 1)] = itbp_data(store, selected_category_id, stp, patient, filter);
  return rows;
}

}  // namespace gaitkb
