#include "gaitkb/service.hpp"

#include <chrono>
#include <cstdlib>

#include "gaitkb/error.hpp"
#include "gaitkb/store_io.hpp"
#include "gaitkb/trial_io.hpp"
#include "gaitkb/wire.hpp"

namespace gaitkb {

using nlohmann::json;

ServiceConfig config_from_env(ServiceConfig base) {
  if (const char* v = std::getenv("GAITKB_STORE")) base.store_path = v;
  if (const char* v = std::getenv("GAITKB_EPSILON")) base.epsilon = std::stod(v);
  if (const char* v = std::getenv("GAITKB_CONTACT_FRACTION")) base.segmentation.contact_fraction = std::stod(v);
  if (const char* v = std::getenv("GAITKB_LISTEN")) {
    std::string listen = v;
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
      base.listen_host = listen;
    } else {
      base.listen_host = listen.substr(0, colon);
      base.listen_port = std::stoi(listen.substr(colon + 1));
    }
  }
  return base;
}

namespace {

HttpResponse json_response(int status, const json& body) { return {status, wire::render(body)}; }

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, json{{"error", std::string(code)}, {"message", message}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidRange:
    case ErrorCode::InvalidEpsilon: return 400;
    case ErrorCode::Duplicate: return 409;
    case ErrorCode::InvalidTrial:
    case ErrorCode::InvalidPatientMeta:
    case ErrorCode::DegenerateSegment:
    case ErrorCode::NoSteps:
    case ErrorCode::EmptyDistribution: return 422;
    case ErrorCode::PersistenceError:
    case ErrorCode::VersionError: return 500;
  }
  return 500;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const auto j = path.find('/', i);
    parts.emplace_back(path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j;
  }
  return parts;
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidRange, std::string("malformed request body: ") + e.what());
  }
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

HttpResponse method_not_allowed() { return error_response(405, "MethodNotAllowed", "method not allowed"); }

const HttpResponse kNoPatient{409, wire::render(json{{"error", "NoPatientLoaded"},
                                                     {"message", "load a patient first"}})};

}  // namespace

Service::Service(KnowledgeStore store, ServiceConfig config, Persist persist, Clock clock)
    : config_(std::move(config)),
      persist_(std::move(persist)),
      clock_(clock ? std::move(clock) : Clock(now_ms)),
      store_(std::make_shared<const KnowledgeStore>(std::move(store))) {}

std::unique_ptr<Service> Service::open(ServiceConfig config) {
  KnowledgeStore store;
  if (std::filesystem::exists(config.store_path)) store = load_store(config.store_path);
  auto path = config.store_path;
  return std::make_unique<Service>(std::move(store), std::move(config),
                                   [path](const KnowledgeStore& s) { save_store(s, path); });
}

std::shared_ptr<const KnowledgeStore> Service::store() const {
  std::lock_guard lock(state_mutex_);
  return store_;
}

SessionState Service::session() const {
  std::lock_guard lock(state_mutex_);
  return session_;
}

Service::Snapshot Service::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return {store_, session_};
}

void Service::commit_store(KnowledgeStore next) {
  if (persist_) persist_(next);
  auto published = std::make_shared<const KnowledgeStore>(std::move(next));
  std::lock_guard lock(state_mutex_);
  store_ = std::move(published);
}

DemographicFilter Service::effective_filter(const HttpRequest& request, const SessionState& session) const {
  if (wire::has_filter_params(request.query)) return wire::parse_filter(request.query);
  return session.active_filter;
}

HttpResponse Service::handle(const HttpRequest& request) {
  try {
    const auto parts = split_path(request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    if (parts.size() == 2 && parts[0] == "patients" && parts[1] == "load")
      return post ? load_patient(request) : method_not_allowed();
    if (parts.size() == 1 && parts[0] == "patient") return get ? get_patient(request) : method_not_allowed();
    if (parts.size() == 1 && parts[0] == "match") return get ? get_match(request) : method_not_allowed();
    if (parts.size() == 1 && parts[0] == "tree") return get ? get_tree() : method_not_allowed();
    if (parts.size() == 1 && parts[0] == "filter") {
      if (get) return get_filter();
      return post ? set_filter(request) : method_not_allowed();
    }
    if (!parts.empty() && parts[0] == "categories") {
      if (parts.size() == 1) return post ? create_category(request) : method_not_allowed();
      const auto& id = parts[1];
      if (parts.size() == 3 && parts[2] == "parameters")
        return get ? get_parameters(request, id) : method_not_allowed();
      if (parts.size() == 3 && parts[2] == "apply") return post ? apply(request, id) : method_not_allowed();
      if (parts.size() == 3 && parts[2] == "reset") return post ? reset(id) : method_not_allowed();
      if (parts.size() == 4 && parts[2] == "ranges")
        return post ? override_range(request, id, parts[3]) : method_not_allowed();
    }
    return error_response(404, "NotFound", "no route for " + request.path);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

HttpResponse Service::load_patient(const HttpRequest& request) {
  auto processed = std::make_shared<const ProcessedTrial>(
      process_trial(parse_trial(request.body), config_.segmentation));
  auto body = wire::processed_trial_to_json(*processed);
  {
    std::lock_guard lock(state_mutex_);
    session_.loaded_patient = std::move(processed);
  }
  return json_response(200, body);
}

HttpResponse Service::get_patient(const HttpRequest&) {
  const auto snap = snapshot();
  if (!snap.session.loaded_patient) return kNoPatient;
  return json_response(200, wire::processed_trial_to_json(*snap.session.loaded_patient));
}

HttpResponse Service::get_match(const HttpRequest& request) {
  const auto snap = snapshot();
  if (!snap.session.loaded_patient) return kNoPatient;
  const auto filter = effective_filter(request, snap.session);
  const auto results = rank_categories(snap.session.loaded_patient->stps, *snap.store, filter, config_.epsilon);
  return json_response(200, wire::match_report(results, filter, config_.epsilon));
}

HttpResponse Service::get_parameters(const HttpRequest& request, const std::string& category_id) {
  const auto snap = snapshot();
  const auto filter = effective_filter(request, snap.session);
  const StpVector* patient = snap.session.loaded_patient ? &snap.session.loaded_patient->stps : nullptr;
  const auto rows = itbp_table(*snap.store, category_id, patient, filter);
  return json_response(200, wire::parameters_report(category_id, rows, filter));
}

HttpResponse Service::apply(const HttpRequest& request, const std::string& category_id) {
  std::lock_guard write(write_mutex_);
  const auto snap = snapshot();
  if (!snap.store->find(category_id)) throw Error(ErrorCode::NotFound, "category '" + category_id + "'");
  if (!snap.session.loaded_patient) return kNoPatient;

  const auto body = parse_body(request.body);
  std::optional<std::set<int>> subset;
  if (auto it = body.find("subset"); it != body.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::InvalidRange, "'subset' must be an array of stp ids");
    subset.emplace();
    for (const auto& id : *it) {
      if (!id.is_number_integer()) throw Error(ErrorCode::InvalidRange, "'subset' must be an array of stp ids");
      subset->insert(id.get<int>());
    }
  }
  const auto& loaded = *snap.session.loaded_patient;
  PatientRecord record{loaded.trial.patient, loaded.stps, clock_()};
  auto next = apply_patient(*snap.store, category_id, std::move(record), subset);
  const auto filter = effective_filter(request, snap.session);
  const auto results = rank_categories(loaded.stps, next, filter, config_.epsilon);
  commit_store(std::move(next));
  return json_response(200, wire::match_report(results, filter, config_.epsilon));
}

HttpResponse Service::reset(const std::string& category_id) {
  std::lock_guard write(write_mutex_);
  auto next = reset_category(*store(), category_id);
  auto body = wire::tree_to_json(next);
  commit_store(std::move(next));
  return json_response(200, body);
}

HttpResponse Service::override_range(const HttpRequest& request, const std::string& category_id,
                                     const std::string& stp) {
  std::lock_guard write(write_mutex_);
  int stp_id = 0;
  try {
    std::size_t used = 0;
    stp_id = std::stoi(stp, &used);
    if (used != stp.size()) throw std::invalid_argument(stp);
  } catch (const std::exception&) {
    throw Error(ErrorCode::NotFound, "stp id '" + stp + "'");
  }
  const auto body = parse_body(request.body);
  auto min = body.find("min");
  auto max = body.find("max");
  if (min == body.end() || max == body.end() || !min->is_number() || !max->is_number())
    throw Error(ErrorCode::InvalidRange, "body must be {\"min\": number, \"max\": number}");
  auto next = gaitkb::override_range(*store(), category_id, stp_id, min->get<double>(), max->get<double>());
  auto response = wire::tree_to_json(next);
  commit_store(std::move(next));
  return json_response(200, response);
}

HttpResponse Service::create_category(const HttpRequest& request) {
  std::lock_guard write(write_mutex_);
  const auto body = parse_body(request.body);
  auto id = body.find("id");
  auto name = body.find("name");
  if (id == body.end() || !id->is_string() || name == body.end() || !name->is_string())
    throw Error(ErrorCode::InvalidRange, "body must be {\"id\": string, \"name\": string}");
  auto next = add_category(*store(), id->get<std::string>(), name->get<std::string>());
  auto response = wire::tree_to_json(next);
  commit_store(std::move(next));
  return json_response(201, response);
}

HttpResponse Service::get_filter() { return json_response(200, wire::filter_to_json(session().active_filter)); }

HttpResponse Service::set_filter(const HttpRequest& request) {
  auto filter = wire::filter_from_json(parse_body(request.body));
  {
    std::lock_guard lock(state_mutex_);
    session_.active_filter = filter;
  }
  return json_response(200, wire::filter_to_json(filter));
}

HttpResponse Service::get_tree() { return json_response(200, wire::tree_to_json(*store())); }

}  // namespace gaitkb
