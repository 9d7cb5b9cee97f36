#include "slotshot/annotation_server.hpp"

#include <httplib.h>

#include "slotshot/error.hpp"

namespace slotshot {
namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw DataError(std::string("request body is not JSON: ") + e.what());
  }
}

std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) {
    throw DataError(std::string("missing query parameter ") + name);
  }
  return req.get_param_value(name);
}

// Maps contract violations to 400 and anything else to 500.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const DataError& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  };
}

}  // namespace

AnnotationServer::AnnotationServer(AnnotationService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Get("/tasks/collection", guarded([this](const auto& req, auto& res) {
          auto task = service_.next_collection_task(required_param(req, "annotator"));
          if (!task) {
            res.status = 204;
            return;
          }
          reply(res, 200, task_json(*task));
        }));
  s.Post("/responses/collection", guarded([this](const auto& req, auto& res) {
           const auto ids = service_.submit_collection(parse_collection_response(parse_body(req)));
           reply(res, 200, {{"templates", ids}});
         }));
  s.Get("/tasks/verification", guarded([this](const auto& req, auto& res) {
          auto task = service_.next_verification_task(required_param(req, "annotator"));
          if (!task) {
            res.status = 204;
            return;
          }
          reply(res, 200, task_json(*task));
        }));
  s.Post("/responses/verification", guarded([this](const auto& req, auto& res) {
           service_.submit_verification(parse_verification_response(parse_body(req)));
           reply(res, 200, {{"ok", true}});
         }));
  s.Get("/templates", guarded([this](const auto& req, auto& res) {
          std::optional<std::string> relation;
          std::optional<TemplateStatus> status;
          if (req.has_param("relation")) relation = req.get_param_value("relation");
          if (req.has_param("status")) status = parse_template_status(req.get_param_value("status"));
          reply(res, 200, Json(service_.templates(relation, status)));
        }));
  s.Post(R"(/templates/([^/]+)/evaluate)", guarded([this](const auto& req, auto& res) {
           reply(res, 200, Json(service_.evaluate(req.matches[1].str())));
         }));
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind an ephemeral port on " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnotationServer::run() { server_->listen_after_bind(); }

void AnnotationServer::stop() {
  if (server_) server_->stop();
}

}  // namespace slotshot
