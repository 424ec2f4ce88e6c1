// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vdpost/corpus.hpp"

namespace vdpost::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(VDPOST_TEST_FIXTURES) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vdpost") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Sample make_sample(const std::string& pair_id, Role role, const std::string& code = "int f(void) { return 0; }\n",
                          const std::string& date = "2021-06-01", const std::string& cwe = "CWE-416") {
  Sample s;
  s.pair_id = pair_id;
  s.role = role;
  s.sample_id = pair_id + (role == Role::Vulnerable ? "-v" : "-p");
  s.code = code;
  s.file_path = "src/" + pair_id + ".c";
  s.method_name = "f";
  s.project = "proj";
  s.commit_date = *Date::parse(date);
  s.ground_truth = {{cwe}, "Description of " + pair_id, "fix " + pair_id, "-old\n+new\n"};
  return s;
}

inline std::vector<Sample> sample_pair(const std::string& pair_id, const std::string& date = "2021-06-01") {
  return {make_sample(pair_id, Role::Vulnerable, "int f(char *p) { return p[8]; }\n", date),
          make_sample(pair_id, Role::Patched, "int f(char *p) { return p ? p[8] : 0; }\n", date)};
}

// --- independent oracles ---------------------------------------------------------------

/// Fraction of ones over all cells.
inline double oracle_pass_at_1(const std::vector<std::vector<bool>>& rows) {
  std::size_t ones = 0, cells = 0;
  for (const auto& r : rows)
    for (bool b : r) {
      ones += b ? 1 : 0;
      ++cells;
    }
  return static_cast<double>(ones) / static_cast<double>(cells);
}

/// Fraction of samples with any success among the first k responses.
inline double oracle_pass_at_k(const std::vector<std::vector<bool>>& rows, std::size_t k) {
  std::size_t hit = 0;
  for (const auto& r : rows) {
    bool any = false;
    for (std::size_t j = 0; j < k; ++j) any = any || r[j];
    hit += any ? 1 : 0;
  }
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

/// -log sigmoid(m) written as log(1 + e^-m).
inline double oracle_neg_log_sigmoid(double m) { return std::log(1.0 + std::exp(-m)); }

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

template <class Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace vdpost::testing
