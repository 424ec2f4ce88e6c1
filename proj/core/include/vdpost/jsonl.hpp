// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Line-delimited JSON helpers and the manifest header carried by every file
// the tools write.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vdpost {

std::string_view tool_version() noexcept;

bool is_blank(std::string_view line) noexcept;

/// True for the {"manifest": {...}} header record.
bool is_manifest(const nlohmann::json& record) noexcept;

/// {"manifest": {"tool", "version", "command", "config_digest"[, "seed"]}}.
nlohmann::json make_manifest(std::string_view command, std::string_view config_digest,
                             std::optional<std::uint64_t> seed = std::nullopt);

/// Reads every non-blank, non-manifest record. Throws DataError (with the
/// line number) on malformed JSON and when the file cannot be opened.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// Returns the manifest object of a JSONL file, if its first record is one.
std::optional<nlohmann::json> read_manifest(const std::filesystem::path& path);

/// Writes the manifest line followed by one compact record per line. The file
/// is written to a sibling temporary and renamed into place.
void write_jsonl(const std::filesystem::path& path, const nlohmann::json& manifest,
                 const std::vector<nlohmann::json>& records);

/// Pretty-printed (2-space) JSON document with a trailing newline, written
/// atomically like write_jsonl.
void write_json(const std::filesystem::path& path, const nlohmann::json& document);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace vdpost
