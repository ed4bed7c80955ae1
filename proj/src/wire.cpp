#include "gaitkb/wire.hpp"

#include <charconv>
#include <cmath>

#include "gaitkb/error.hpp"
#include "gaitkb/trial_io.hpp"

namespace gaitkb::wire {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double parse_double(std::string_view text, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(ErrorCode::InvalidRange, "filter '" + key + "': bad number '" + std::string(text) + "'");
  return v;
}

Interval parse_interval(std::string_view text, const std::string& key) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::InvalidRange, "filter '" + key + "' expects LO:HI");
  Interval iv{parse_double(text.substr(0, colon), key), parse_double(text.substr(colon + 1), key)};
  if (iv.lo > iv.hi) throw Error(ErrorCode::InvalidRange, "filter '" + key + "' has lo > hi");
  return iv;
}

json interval_json(const std::optional<Interval>& iv) {
  return iv ? json::array({iv->lo, iv->hi}) : json(nullptr);
}

std::optional<Interval> interval_from(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    throw Error(ErrorCode::InvalidRange, std::string("filter '") + key + "' must be [lo, hi]");
  Interval iv{(*it)[0].get<double>(), (*it)[1].get<double>()};
  if (!(iv.lo <= iv.hi)) throw Error(ErrorCode::InvalidRange, std::string("filter '") + key + "' has lo > hi");
  return iv;
}

bool is_filter_key(std::string_view key) {
  return key == "gender" || key == "age" || key == "body_height" || key == "body_mass";
}

json curve_json(const NormalizedStepCurve& curve) { return json(curve.values); }

json graph_json(const ConsistencyGraph& graph) {
  json steps = json::array();
  for (const auto& c : graph.step_curves) steps.push_back(curve_json(c));
  return json{{"foot", std::string(to_string(graph.foot))},
              {"step_curves", std::move(steps)},
              {"mean_curve", curve_json(graph.mean_curve)}};
}

}  // namespace

bool has_filter_params(const Params& params) {
  for (const auto& [k, v] : params)
    if (is_filter_key(k)) return true;
  return false;
}

DemographicFilter parse_filter(const Params& params) {
  DemographicFilter f;
  for (const auto& [key, value] : params) {
    if (key == "gender") {
      std::set<Gender> genders;
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto token = rest.substr(0, comma);
        auto g = parse_gender(token);
        if (!g) throw Error(ErrorCode::InvalidRange, "filter 'gender': unknown value '" + std::string(token) + "'");
        genders.insert(*g);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
      if (genders.empty()) throw Error(ErrorCode::InvalidRange, "filter 'gender' is empty");
      f.gender = std::move(genders);
    } else if (key == "age") {
      f.age = parse_interval(value, key);
    } else if (key == "body_height") {
      f.body_height = parse_interval(value, key);
    } else if (key == "body_mass") {
      f.body_mass = parse_interval(value, key);
    }
  }
  return f;
}

DemographicFilter parse_filter_args(const std::vector<std::string>& args) {
  Params params;
  for (const auto& arg : args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidRange, "filter '" + arg + "' expects key=value");
    const auto key = arg.substr(0, eq);
    if (!is_filter_key(key)) throw Error(ErrorCode::InvalidRange, "unknown filter key '" + key + "'");
    params.emplace_back(key, arg.substr(eq + 1));
  }
  return parse_filter(params);
}

json filter_to_json(const DemographicFilter& filter) {
  json genders = nullptr;
  if (filter.gender) {
    genders = json::array();
    for (auto g : *filter.gender) genders.push_back(std::string(to_string(g)));
  }
  return json{{"gender", std::move(genders)},
              {"age", interval_json(filter.age)},
              {"body_height", interval_json(filter.body_height)},
              {"body_mass", interval_json(filter.body_mass)}};
}

DemographicFilter filter_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidRange, "filter must be an object");
  DemographicFilter f;
  if (auto it = doc.find("gender"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::InvalidRange, "filter 'gender' must be an array");
    std::set<Gender> genders;
    for (const auto& g : *it) {
      auto parsed = g.is_string() ? parse_gender(g.get<std::string>()) : std::nullopt;
      if (!parsed) throw Error(ErrorCode::InvalidRange, "filter 'gender': unknown value");
      genders.insert(*parsed);
    }
    f.gender = std::move(genders);
  }
  f.age = interval_from(doc, "age");
  f.body_height = interval_from(doc, "body_height");
  f.body_mass = interval_from(doc, "body_mass");
  return f;
}

json stps_to_json(const StpVector& stps) {
  json out = json::array();
  for (const auto& e : stps.entries()) {
    const auto kind = stp_kind(e.stp_id);
    out.push_back({{"stp_id", e.stp_id},
                   {"name", std::string(stp_name(kind))},
                   {"unit", std::string(stp_unit(kind))},
                   {"foot", std::string(to_string(stp_foot(e.stp_id)))},
                   {"value", optional_number(e.value)}});
  }
  return out;
}

json stats_to_json(const DistributionStats& s) {
  auto field = [&](double v) { return s.empty() ? json(nullptr) : json(v); };
  return json{{"stp_id", s.stp_id},   {"n", s.n},
              {"empty", s.empty()},   {"mean", field(s.mean)},
              {"std_dev", field(s.std_dev)}, {"min", field(s.min)},
              {"q1", field(s.q1)},    {"median", field(s.median)},
              {"q3", field(s.q3)},    {"max", field(s.max)},
              {"raw_values", s.raw_values}};
}

json match_report(const std::vector<MatchResult>& results, const DemographicFilter& filter, double epsilon) {
  json rows = json::array();
  for (const auto& r : results) {
    json summary = json::array();
    for (auto s : r.summary) summary.push_back(std::string(to_string(s)));
    rows.push_back({{"category_id", r.category_id},
                    {"category_name", r.category_name},
                    {"score", r.score},
                    {"n_used", r.n_used},
                    {"manual_override", r.manual_override},
                    {"summary", std::move(summary)}});
  }
  return json{{"epsilon", epsilon}, {"filter", filter_to_json(filter)}, {"results", std::move(rows)}};
}

json itbp_to_json(const ItbpData& row) {
  const auto kind = stp_kind(row.stp_id);
  json difference = nullptr;
  if (row.difference)
    difference = {{"d", number_or_null(row.difference->d)}, {"degenerate", row.difference->degenerate}};
  return json{{"stp_id", row.stp_id},
              {"name", std::string(stp_name(kind))},
              {"unit", std::string(stp_unit(kind))},
              {"foot", std::string(to_string(stp_foot(row.stp_id)))},
              {"norm", stats_to_json(row.norm_stats)},
              {"selected", stats_to_json(row.selected_stats)},
              {"patient_value_left", optional_number(row.patient_value_left)},
              {"patient_value_right", optional_number(row.patient_value_right)},
              {"difference", std::move(difference)}};
}

json parameters_report(std::string_view category_id, const std::vector<ItbpData>& rows,
                       const DemographicFilter& filter) {
  json out = json::array();
  for (const auto& r : rows) out.push_back(itbp_to_json(r));
  return json{{"category_id", std::string(category_id)},
              {"filter", filter_to_json(filter)},
              {"parameters", std::move(out)}};
}

json tree_to_json(const KnowledgeStore& store) {
  json categories = json::array();
  for (const auto* c : store.categories()) {
    json ranges = json::array();
    for (const auto& r : c->ranges)
      ranges.push_back({{"stp_id", r.stp_id},
                        {"min", r.bounds ? json(r.bounds->min) : json(nullptr)},
                        {"max", r.bounds ? json(r.bounds->max) : json(nullptr)},
                        {"manual", r.manual}});
    categories.push_back({{"id", c->id},
                          {"name", c->name},
                          {"is_norm", c == &store.norm_category},
                          {"patients", c->patients.size()},
                          {"manual_override", c->has_manual_override()},
                          {"ranges", std::move(ranges)}});
  }
  return json{{"schema_version", store.schema_version}, {"categories", std::move(categories)}};
}

json processed_trial_to_json(const ProcessedTrial& p) {
  const auto& trial = p.trial;
  const double mass = trial.patient.body_mass;
  const auto left_bw = amplitude_normalize(trial.left_samples, mass);
  const auto right_bw = amplitude_normalize(trial.right_samples, mass);
  const std::size_t n = std::max(left_bw.size(), right_bw.size());
  std::vector<double> time_s(n);
  for (std::size_t i = 0; i < n; ++i) time_s[i] = static_cast<double>(i) / trial.sample_rate;

  json combined{{"left_mean", curve_json(p.left_graph.mean_curve)},
                {"right_mean", curve_json(p.right_graph.mean_curve)},
                {"trial_time", {{"time_s", std::move(time_s)}, {"left_bw", left_bw}, {"right_bw", right_bw}}}};
  auto segments_json = [](const std::vector<StepSegment>& segs) {
    json out = json::array();
    for (const auto& s : segs) out.push_back({{"start_index", s.start_index}, {"end_index", s.end_index}});
    return out;
  };
  return json{{"patient", patient_meta_to_json(trial.patient)},
              {"sample_rate_hz", trial.sample_rate},
              {"segments", {{"left", segments_json(p.left_segments)}, {"right", segments_json(p.right_segments)}}},
              {"consistency", {{"left", graph_json(p.left_graph)},
                               {"right", graph_json(p.right_graph)},
                               {"combined", std::move(combined)}}},
              {"stps", stps_to_json(p.stps)}};
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace gaitkb::wire
