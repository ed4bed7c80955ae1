#include <httplib.h>

#include "gaitkb/service.hpp"

namespace gaitkb {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest request{req.method, req.path, {}, req.body};
      // Query string only; req.params also holds a form-encoded body.
      if (const auto q = req.target.find('?'); q != std::string::npos) {
        httplib::Params params;
        httplib::detail::parse_query_text(req.target.substr(q + 1), params);
        for (const auto& [k, v] : params) request.query.emplace_back(k, v);
      }
      auto response = service.handle(request);
      res.status = response.status;
      res.set_content(std::move(response.body), "application/json");
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace gaitkb
