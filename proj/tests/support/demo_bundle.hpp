#pragma once

// Small trained bundle on synthetic data, produced through the command layer.

#include <filesystem>
#include <string>

#include "toxblend/cli/commands.hpp"

namespace toxblend::test_support {

/// Trains and evaluates once per process; returns the bundle directory.
inline std::string demo_bundle() {
  static const std::string dir = [] {
    const auto out = (std::filesystem::temp_directory_path() / "toxblend_demo").string();
    std::filesystem::remove_all(out);
    auto j = nlohmann::json::parse(R"({
      "dataset": {"format": "synthetic", "name": "synthetic", "synthetic": {"molecules": 400, "seed": 3}},
      "seeds": [1],
      "members": [
        {"kind": "gbm", "family": "fingerprint", "gbm": {"max_rounds": 30, "eta": 0.3}},
        {"kind": "gbm", "family": "pld", "gbm": {"max_rounds": 30, "eta": 0.3}}
      ],
      "blend": {"gbm": {"max_rounds": 60}}
    })");
    j["output"] = out;
    const auto c = cli::resolve_config(j);
    cli::cmd_evaluate(c);
    cli::cmd_train(c);
    cli::cmd_blend(c);
    return out + "/bundle";
  }();
  return dir;
}

}  // namespace toxblend::test_support
