#pragma once

#include <memory>
#include <string>

#include "toxblend/blend/bundle.hpp"

namespace toxblend::service {

struct Response {
  int status = 200;
  std::string body;
};

/// Stateless request handlers over an immutable bundle. Without a bundle
/// every endpoint answers 503.
class PredictionService {
 public:
  static constexpr int kMaxSmiles = 1000;

  PredictionService() = default;
  explicit PredictionService(const std::string& bundle_dir);

  bool ready() const { return bundle_ != nullptr; }

  Response health() const;
  Response targets() const;
  /// Body {"smiles": [...], "targets": [...]?}; content type must be application/json.
  Response predict(const std::string& body, const std::string& content_type) const;

 private:
  std::shared_ptr<const blend::Bundle> bundle_;
  std::string checksum_;
};

/// Fixed 6-decimal JSON number.
std::string json_number(double v);

class HttpServer {
 public:
  explicit HttpServer(const PredictionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0: any free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace toxblend::service
