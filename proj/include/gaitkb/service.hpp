#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaitkb/analysis.hpp"
#include "gaitkb/eks.hpp"
#include "gaitkb/grf.hpp"

namespace gaitkb {

struct ServiceConfig {
  std::filesystem::path store_path = "gaitkb-store.json";
  double epsilon = kDefaultEpsilon;
  SegmentationConfig segmentation;
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
};

/// Reads GAITKB_STORE, GAITKB_EPSILON, GAITKB_CONTACT_FRACTION and
/// GAITKB_LISTEN (host:port) on top of `base`.
ServiceConfig config_from_env(ServiceConfig base = {});

struct HttpRequest {
  std::string method;
  std::string path;
  std::vector<std::pair<std::string, std::string>> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Session of the single clinician using the workbench.
struct SessionState {
  std::shared_ptr<const ProcessedTrial> loaded_patient;
  DemographicFilter active_filter;
};

/// Transport-independent request handler owning the live knowledge store.
///
/// Mutations are serialized on one mutex and built on a private copy of the
/// store; the copy is persisted first and only then published, so a failing
/// request (including a failing write) leaves store and session unchanged.
/// Readers grab shared snapshots and never observe a partial update.
class Service {
 public:
  using Persist = std::function<void(const KnowledgeStore&)>;
  using Clock = std::function<std::int64_t()>;

  Service(KnowledgeStore store, ServiceConfig config, Persist persist, Clock clock = {});

  /// Loads config.store_path (a fresh store with the norm category when the
  /// file does not exist) and autosaves to the same path.
  static std::unique_ptr<Service> open(ServiceConfig config);

  HttpResponse handle(const HttpRequest& request);

  std::shared_ptr<const KnowledgeStore> store() const;
  SessionState session() const;
  const ServiceConfig& config() const { return config_; }

 private:
  struct Snapshot {
    std::shared_ptr<const KnowledgeStore> store;
    SessionState session;
  };

  Snapshot snapshot() const;
  DemographicFilter effective_filter(const HttpRequest& request, const SessionState& session) const;
  void commit_store(KnowledgeStore next);

  HttpResponse load_patient(const HttpRequest& request);
  HttpResponse get_patient(const HttpRequest& request);
  HttpResponse get_match(const HttpRequest& request);
  HttpResponse get_parameters(const HttpRequest& request, const std::string& category_id);
  HttpResponse apply(const HttpRequest& request, const std::string& category_id);
  HttpResponse reset(const std::string& category_id);
  HttpResponse override_range(const HttpRequest& request, const std::string& category_id, const std::string& stp);
  HttpResponse create_category(const HttpRequest& request);
  HttpResponse get_filter();
  HttpResponse set_filter(const HttpRequest& request);
  HttpResponse get_tree();

  ServiceConfig config_;
  Persist persist_;
  Clock clock_;
  mutable std::mutex state_mutex_;  // guards store_ and session_ pointers
  std::mutex write_mutex_;          // serializes mutations
  std::shared_ptr<const KnowledgeStore> store_;
  SessionState session_;
};

/// Blocking HTTP front end on top of a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns the bound port, or -1 on failure. Port 0 picks a free port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gaitkb
