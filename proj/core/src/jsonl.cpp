// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/jsonl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "vdpost/error.hpp"

namespace vdpost {

using nlohmann::json;

std::string_view tool_version() noexcept { return VDPOST_VERSION; }

bool is_blank(std::string_view line) noexcept {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

bool is_manifest(const json& record) noexcept {
  return record.is_object() && record.size() == 1 && record.contains("manifest");
}

json make_manifest(std::string_view command, std::string_view config_digest, std::optional<std::uint64_t> seed) {
  json m = {{"tool", "vdpost"},
            {"version", tool_version()},
            {"command", command},
            {"config_digest", config_digest}};
  if (seed) m["seed"] = *seed;
  return json{{"manifest", std::move(m)}};
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!is_manifest(record)) out.push_back(std::move(record));
  }
  return out;
}

std::optional<json> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    json record = json::parse(line, nullptr, false);
    if (is_manifest(record)) return record.at("manifest");
    return std::nullopt;
  }
  return std::nullopt;
}

namespace {

template <typename Fn>
void write_atomically(const std::filesystem::path& path, Fn&& fill) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    fill(out);
    out.flush();
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_jsonl(const std::filesystem::path& path, const json& manifest, const std::vector<json>& records) {
  write_atomically(path, [&](std::ostream& out) {
    out << manifest.dump() << '\n';
    for (const auto& r : records) out << r.dump() << '\n';
  });
}

void write_json(const std::filesystem::path& path, const json& document) {
  write_atomically(path, [&](std::ostream& out) { out << document.dump(2) << '\n'; });
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace vdpost
