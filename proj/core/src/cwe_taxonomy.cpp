// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/cwe_taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "vdpost/error.hpp"

namespace vdpost {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::optional<std::uint32_t> parse_number(std::string_view digits) {
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

}  // namespace

std::optional<CweId> CweId::parse(std::string_view text) {
  text = trim(text);
  if (text.size() < 5 || !iequals(text.substr(0, 4), "CWE-")) return std::nullopt;
  auto number = parse_number(text.substr(4));
  if (!number) return std::nullopt;
  return CweId{*number};
}

CweId CweId::from_string(std::string_view text) {
  auto id = parse(text);
  if (!id) throw DataError("invalid CWE identifier \"" + std::string(text) + "\"");
  return *id;
}

std::string CweId::to_string() const { return "CWE-" + std::to_string(number_); }

TaxonomyFormat parse_taxonomy_format(std::string_view text) {
  if (iequals(text, "xml") || iequals(text, "official_xml") || iequals(text, "officialxml"))
    return TaxonomyFormat::OfficialXml;
  if (iequals(text, "json") || iequals(text, "edge_list_json") || iequals(text, "edgelistjson"))
    return TaxonomyFormat::EdgeListJson;
  throw TaxonomyError(TaxonomyError::Kind::UnknownFormat, "unknown taxonomy format \"" + std::string(text) + "\"");
}

CweTaxonomy::CweTaxonomy(std::set<CweId> nodes, std::set<Edge> child_of)
    : nodes_(std::move(nodes)), edges_(std::move(child_of)) {
  std::map<CweId, std::vector<CweId>> up;
  for (const auto& [child, parent] : edges_) {
    if (child == parent) throw TaxonomyError(TaxonomyError::Kind::SelfEdge, "self-edge on " + child.to_string());
    for (CweId end : {child, parent})
      if (!nodes_.contains(end))
        throw TaxonomyError(TaxonomyError::Kind::DanglingEdge,
                            "edge " + child.to_string() + " -> " + parent.to_string() + " references unknown node " +
                                end.to_string());
    up[child].push_back(parent);
  }

  // Iterative three-colour DFS over child -> parent edges.
  enum class Mark { White, Grey, Black };
  std::map<CweId, Mark> mark;
  for (const auto& [start, _] : up) {
    if (mark[start] != Mark::White) continue;
    std::vector<std::pair<CweId, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto it = up.find(node);
      if (it == up.end() || next == it->second.size()) {
        mark[node] = Mark::Black;
        stack.pop_back();
        continue;
      }
      const CweId parent = it->second[next++];
      const Mark m = mark[parent];
      if (m == Mark::Grey)
        throw TaxonomyError(TaxonomyError::Kind::Cycle, "ChildOf cycle through " + parent.to_string());
      if (m == Mark::White) {
        mark[parent] = Mark::Grey;
        stack.emplace_back(parent, 0);
      }
    }
  }
}

std::vector<CweId> CweTaxonomy::parents(CweId id) const {
  std::vector<CweId> out;
  for (auto it = edges_.lower_bound({id, CweId{0}}); it != edges_.end() && it->first == id; ++it)
    out.push_back(it->second);
  return out;
}

std::vector<CweId> CweTaxonomy::children(CweId id) const {
  std::vector<CweId> out;
  for (const auto& [child, parent] : edges_)
    if (parent == id) out.push_back(child);
  return out;
}

namespace {

CweId edge_end(const nlohmann::json& v, std::size_t index) {
  if (!v.is_string())
    throw TaxonomyError(TaxonomyError::Kind::Malformed, "edge " + std::to_string(index) + ": endpoints must be strings");
  auto id = CweId::parse(v.get<std::string>());
  if (!id)
    throw TaxonomyError(TaxonomyError::Kind::Malformed,
                        "edge " + std::to_string(index) + ": invalid CWE identifier \"" + v.get<std::string>() + "\"");
  return *id;
}

}  // namespace

CweTaxonomy parse_edge_list_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TaxonomyError(TaxonomyError::Kind::Malformed, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("edges") || !doc["edges"].is_array())
    throw TaxonomyError(TaxonomyError::Kind::Malformed, "expected an object with an \"edges\" array");

  std::set<CweId> nodes;
  std::set<CweTaxonomy::Edge> edges;
  const auto& list = doc["edges"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    if (!e.is_array() || e.size() != 2)
      throw TaxonomyError(TaxonomyError::Kind::Malformed, "edge " + std::to_string(i) + " is not a [child, parent] pair");
    const CweId child = edge_end(e[0], i);
    const CweId parent = edge_end(e[1], i);
    edges.emplace(child, parent);
    nodes.insert(child);
    nodes.insert(parent);
  }
  if (auto it = doc.find("nodes"); it != doc.end()) {
    if (!it->is_array()) throw TaxonomyError(TaxonomyError::Kind::Malformed, "\"nodes\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) nodes.insert(edge_end((*it)[i], i));
  }
  return CweTaxonomy(std::move(nodes), std::move(edges));
}

CweTaxonomy parse_official_xml(std::string_view xml_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml_text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw TaxonomyError(TaxonomyError::Kind::Malformed, std::string("malformed XML: ") + e.what());
  }
  auto catalog = tree.get_child_optional("Weakness_Catalog");
  if (!catalog) throw TaxonomyError(TaxonomyError::Kind::Malformed, "missing Weakness_Catalog root element");

  std::set<CweId> nodes;
  std::set<CweTaxonomy::Edge> edges;
  auto weaknesses = catalog->get_child_optional("Weaknesses");
  if (!weaknesses) return {};
  for (const auto& [tag, weakness] : *weaknesses) {
    if (tag != "Weakness") continue;
    auto id = parse_number(weakness.get<std::string>("<xmlattr>.ID", ""));
    if (!id) throw TaxonomyError(TaxonomyError::Kind::Malformed, "Weakness element without a numeric ID");
    const CweId child{*id};
    nodes.insert(child);
    auto related = weakness.get_child_optional("Related_Weaknesses");
    if (!related) continue;
    for (const auto& [rtag, rel] : *related) {
      if (rtag != "Related_Weakness") continue;
      if (rel.get<std::string>("<xmlattr>.Nature", "") != "ChildOf") continue;
      if (rel.get<std::string>("<xmlattr>.View_ID", "") != "1000") continue;
      auto parent = parse_number(rel.get<std::string>("<xmlattr>.CWE_ID", ""));
      if (!parent)
        throw TaxonomyError(TaxonomyError::Kind::Malformed, "ChildOf relation of " + child.to_string() + " lacks CWE_ID");
      edges.emplace(child, CweId{*parent});
    }
  }
  return CweTaxonomy(std::move(nodes), std::move(edges));
}

CweTaxonomy load_taxonomy(const std::filesystem::path& source, TaxonomyFormat format) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw DataError("cannot open taxonomy file '" + source.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return format == TaxonomyFormat::OfficialXml ? parse_official_xml(text) : parse_edge_list_json(text);
}

bool related(CweId predicted, CweId truth, const CweTaxonomy& tax) {
  return predicted == truth || tax.has_edge(predicted, truth) || tax.has_edge(truth, predicted);
}

bool match_any(std::span<const CweId> predicted, std::span<const CweId> truth, const CweTaxonomy& tax) {
  for (CweId p : predicted)
    for (CweId t : truth)
      if (related(p, t, tax)) return true;
  return false;
}

std::vector<CweId> parse_cwe_list(std::span<const std::string> ids) {
  std::vector<CweId> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(CweId::from_string(id));
  return out;
}

}  // namespace vdpost
