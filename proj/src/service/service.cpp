#include "toxblend/service/service.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace toxblend::service {

using nlohmann::json;

std::string json_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

namespace {

std::string quoted(const std::string& s) { return json(s).dump(); }

Response error(int status, const std::string& message) {
  return {status, "{\"error\":" + quoted(message) + "}"};
}

// Report text such as "0.861000" is already a JSON number; "NA" is not.
std::string auc_text(const std::optional<std::string>& auc) {
  if (!auc || auc->empty() || *auc == "NA") return "null";
  try {
    (void)json::parse(*auc).get<double>();
  } catch (const json::exception&) {
    return "null";
  }
  return *auc;
}

Response unavailable() { return {503, "{\"status\":\"unavailable\",\"bundle\":null}"}; }

}  // namespace

PredictionService::PredictionService(const std::string& bundle_dir)
    : bundle_(std::make_shared<const blend::Bundle>(blend::load_bundle(bundle_dir))),
      checksum_(blend::bundle_checksum(bundle_dir)) {}

Response PredictionService::health() const {
  if (!bundle_) return unavailable();
  return {200, "{\"status\":\"ok\",\"bundle\":" + quoted(checksum_) + "}"};
}

Response PredictionService::targets() const {
  if (!bundle_) return unavailable();
  std::string body = "{\"bundle\":" + quoted(checksum_) + ",\"targets\":[";
  for (std::size_t i = 0; i < bundle_->targets.size(); ++i) {
    const auto& t = bundle_->targets[i];
    body += (i ? "," : "") + std::string("{\"name\":") + quoted(t.name) + ",\"family\":" + quoted(t.family) +
            ",\"cv_auc\":" + auc_text(t.cv_auc) + "}";
  }
  return {200, body + "]}"};
}

Response PredictionService::predict(const std::string& body, const std::string& content_type) const {
  if (!bundle_) return unavailable();
  if (content_type.rfind("application/json", 0) != 0) return error(415, "content type must be application/json");
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error(400, "body is not valid JSON");
  }
  if (!req.is_object() || !req.contains("smiles") || !req.at("smiles").is_array()) {
    return error(400, "body must be an object with a \"smiles\" array");
  }
  for (auto it = req.begin(); it != req.end(); ++it) {
    if (it.key() != "smiles" && it.key() != "targets") return error(400, "unknown field \"" + it.key() + "\"");
  }
  const auto& list = req.at("smiles");
  if (list.empty()) return error(400, "\"smiles\" must not be empty");
  if (list.size() > static_cast<std::size_t>(kMaxSmiles)) {
    return error(413, "at most " + std::to_string(kMaxSmiles) + " SMILES per request");
  }
  std::vector<std::string> smiles;
  for (const auto& s : list) {
    if (!s.is_string()) return error(400, "\"smiles\" entries must be strings");
    smiles.push_back(s.get<std::string>());
  }
  std::vector<int> filter;
  if (req.contains("targets")) {
    if (!req.at("targets").is_array()) return error(400, "\"targets\" must be an array of names");
    for (const auto& t : req.at("targets")) {
      if (!t.is_string()) return error(400, "\"targets\" entries must be strings");
      int found = -1;
      for (std::size_t i = 0; i < bundle_->targets.size(); ++i) {
        if (bundle_->targets[i].name == t.get<std::string>()) found = static_cast<int>(i);
      }
      if (found < 0) return error(400, "unknown target \"" + t.get<std::string>() + "\"");
      filter.push_back(found);
    }
  }
  const auto preds = blend::predict_bundle(*bundle_, smiles, filter);
  std::string out = "{\"bundle\":" + quoted(checksum_) + ",\"molecules\":[";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& m = preds[i];
    out += (i ? "," : "") + std::string("{\"input\":") + quoted(m.input);
    if (m.error) {
      out += ",\"error\":" + quoted(*m.error) + "}";
      continue;
    }
    out += ",\"canonical\":" + quoted(m.canonical) + ",\"predictions\":[";
    for (std::size_t t = 0; t < m.targets.size(); ++t) {
      const auto& p = m.targets[t];
      out += (t ? "," : "") + std::string("{\"target\":") + quoted(p.target) + ",\"family\":" + quoted(p.family) +
             ",\"score\":" + json_number(p.score) + ",\"cv_auc\":" + auc_text(p.cv_auc) +
             ",\"distance\":" + json_number(p.distance) + ",\"reliable\":" + (p.reliable ? "true" : "false") + "}";
    }
    out += "]}";
  }
  return {200, out + "]}"};
}

struct HttpServer::Impl {
  const PredictionService& service;
  httplib::Server server;
  std::mutex log_mutex;

  explicit Impl(const PredictionService& s) : service(s) {
    auto reply = [](httplib::Response& res, const Response& r) {
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    server.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
    server.Get("/v1/targets", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.targets()); });
    server.Post("/v1/predict", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.predict(req.body, req.get_header_value("Content-Type")));
    });
    server.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      reply(res, error(500, what));
    });
    server.set_payload_max_length(16 * 1024 * 1024);
    server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      const json line = {{"method", req.method}, {"path", req.path}, {"status", res.status},
                         {"request_bytes", req.body.size()}, {"response_bytes", res.body.size()}};
      std::lock_guard lock(log_mutex);
      std::cerr << line.dump() << "\n";
    });
  }
};

HttpServer::HttpServer(const PredictionService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace toxblend::service
