// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/digest.hpp"

#include <array>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "vdpost/error.hpp"

namespace vdpost {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string request_digest(std::string_view model, std::span<const ChatMessage> messages) {
  // nlohmann::json orders object keys, so the dump is canonical.
  nlohmann::json body = {{"model", model}, {"messages", nlohmann::json::array()}};
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  return sha256_hex(body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

}  // namespace vdpost
