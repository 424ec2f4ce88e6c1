// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "demo_fixtures.hpp"
#include "test_support.hpp"
#include "vdpost/mock_server.hpp"

namespace vdpost::testing {

/// Demo corpus written to a temp dir with a mock server serving its fixtures.
struct DemoEnv {
  explicit DemoEnv(const demo::DemoOptions& options = {}, std::vector<Fixture> drop = {})
      : bundle(demo::build_demo(options)) {
    std::vector<Fixture> fixtures;
    for (auto& f : bundle.fixtures)
      if (std::none_of(drop.begin(), drop.end(), [&](const Fixture& d) { return d.digest == f.digest; }))
        fixtures.push_back(f);
    server = std::make_unique<MockLlmServer>(std::move(fixtures));
    server->start();
    config = demo::write_demo(dir.path(), bundle, server->base_url());
  }

  std::filesystem::path out() const { return dir / "out"; }

  struct Result {
    int code = 0;
    std::string out;
    std::string err;
  };

  Result run(std::vector<std::string> args) const {
    args.insert(args.end(), {"-c", config.string()});
    return run_raw(args);
  }

  static Result run_raw(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    return {code, o.str(), e.str()};
  }

  TempDir dir{"vdpost-demo"};
  demo::DemoBundle bundle;
  std::unique_ptr<MockLlmServer> server;
  std::filesystem::path config;
};

}  // namespace vdpost::testing
