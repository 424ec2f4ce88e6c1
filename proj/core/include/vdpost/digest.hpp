// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <span>
#include <string>
#include <string_view>

#include "vdpost/gateway.hpp"

namespace vdpost {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Fixture key for a chat request: SHA-256 of the compact JSON
/// {"messages":[{"content":..,"role":..},..],"model":..}. Sampling
/// parameters (temperature, n) are deliberately excluded.
std::string request_digest(std::string_view model, std::span<const ChatMessage> messages);

}  // namespace vdpost
