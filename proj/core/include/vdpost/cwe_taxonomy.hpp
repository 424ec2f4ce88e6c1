// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vdpost {

/// A CWE identifier, stored by number. Text form is always "CWE-<digits>".
class CweId {
 public:
  constexpr CweId() = default;
  constexpr explicit CweId(std::uint32_t number) : number_(number) {}

  /// Accepts "CWE-<digits>" in any letter case, surrounding whitespace allowed.
  static std::optional<CweId> parse(std::string_view text);
  /// Like parse() but throws DataError.
  static CweId from_string(std::string_view text);

  constexpr std::uint32_t number() const noexcept { return number_; }
  std::string to_string() const;

  constexpr auto operator<=>(const CweId&) const = default;

 private:
  std::uint32_t number_ = 0;
};

enum class TaxonomyFormat { OfficialXml, EdgeListJson };

/// "xml" / "official_xml" or "json" / "edge_list_json"; throws TaxonomyError.
TaxonomyFormat parse_taxonomy_format(std::string_view text);

/// ChildOf hierarchy of the CWE-1000 research view. Immutable after
/// construction.
class CweTaxonomy {
 public:
  using Edge = std::pair<CweId, CweId>;  // (child, parent)

  CweTaxonomy() = default;
  /// Every edge endpoint must be in `nodes`; rejects self-edges and cycles.
  CweTaxonomy(std::set<CweId> nodes, std::set<Edge> child_of);

  const std::set<CweId>& nodes() const noexcept { return nodes_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  bool contains(CweId id) const { return nodes_.contains(id); }
  bool has_edge(CweId child, CweId parent) const { return edges_.contains({child, parent}); }

  std::vector<CweId> parents(CweId id) const;
  std::vector<CweId> children(CweId id) const;

 private:
  std::set<CweId> nodes_;
  std::set<Edge> edges_;
};

CweTaxonomy load_taxonomy(const std::filesystem::path& source, TaxonomyFormat format);

/// {"edges": [[child, parent], ...]} with an optional "nodes" list.
CweTaxonomy parse_edge_list_json(std::string_view json_text);

/// Extracts ChildOf relations whose View_ID is 1000 from the official CWE
/// XML catalogue.
CweTaxonomy parse_official_xml(std::string_view xml_text);

/// Equality or a direct ChildOf edge in either direction.
bool related(CweId predicted, CweId truth, const CweTaxonomy& tax);

/// True iff some (p, t) pair is related.
bool match_any(std::span<const CweId> predicted, std::span<const CweId> truth, const CweTaxonomy& tax);

/// Parses every entry; throws DataError on the first invalid identifier.
std::vector<CweId> parse_cwe_list(std::span<const std::string> ids);

}  // namespace vdpost

template <>
struct std::hash<vdpost::CweId> {
  std::size_t operator()(const vdpost::CweId& id) const noexcept { return std::hash<std::uint32_t>{}(id.number()); }
};
