// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Writes a self-contained offline demo: corpus, taxonomy, mock fixtures and a
// pipeline config.

#include <iostream>

#include <CLI11.hpp>

#include "demo_fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write an offline vdpost demo workspace", "vdpost-demo"};
  std::string dir, base_url = vdpost::demo::kPlaceholderUrl;
  vdpost::demo::DemoOptions options;
  bool no_failures = false;
  app.add_option("dir", dir, "Target directory")->required();
  app.add_option("--base-url", base_url, "Endpoint base URL written into config.json");
  app.add_option("--candidates", options.candidates, "Completions per query")->check(CLI::PositiveNumber);
  app.add_option("--max-in-flight", options.max_in_flight, "Per-endpoint request bound")->check(CLI::Range(1, 1024));
  app.add_flag("--no-failures", no_failures, "Do not inject transient HTTP failures");
  CLI11_PARSE(app, argc, argv);
  options.inject_failures = !no_failures;
  try {
    const auto bundle = vdpost::demo::build_demo(options);
    const auto config = vdpost::demo::write_demo(dir, bundle, base_url);
    std::cout << "wrote " << bundle.corpus.samples().size() << " samples and " << bundle.fixtures.size()
              << " fixtures; config: " << config.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "vdpost-demo: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
