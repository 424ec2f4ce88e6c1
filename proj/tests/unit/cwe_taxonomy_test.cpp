// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/error.hpp"

namespace vdpost {
namespace {

CweId id(const char* s) { return CweId::from_string(s); }

const CweTaxonomy& excerpt() {
  static const CweTaxonomy tax =
      load_taxonomy(testing::fixture("cwe_1000_excerpt.xml"), TaxonomyFormat::OfficialXml);
  return tax;
}

TEST(CweId, ParsesCanonicalAndLooseForms) {
  EXPECT_EQ(CweId::parse("CWE-416")->number(), 416u);
  EXPECT_EQ(CweId::parse(" cwe-79 ")->to_string(), "CWE-79");
  EXPECT_FALSE(CweId::parse("CWE416"));
  EXPECT_FALSE(CweId::parse("CWE-"));
  EXPECT_FALSE(CweId::parse("CWE-12a"));
  EXPECT_THROW(CweId::from_string("416"), DataError);
}

TEST(Taxonomy, XmlKeepsOnlyResearchViewChildOf) {
  const auto& tax = excerpt();
  EXPECT_TRUE(tax.has_edge(id("CWE-416"), id("CWE-825")));
  EXPECT_TRUE(tax.has_edge(id("CWE-416"), id("CWE-672")));
  EXPECT_TRUE(tax.has_edge(id("CWE-119"), id("CWE-118")));
  EXPECT_FALSE(tax.has_edge(id("CWE-416"), id("CWE-119")));
  // CanPrecede and non-1000 views are ignored.
  EXPECT_FALSE(tax.has_edge(id("CWE-416"), id("CWE-120")));
  EXPECT_EQ(tax.parents(id("CWE-416")).size(), 2u);
  const auto parents = tax.parents(id("CWE-415"));
  EXPECT_EQ(parents.size(), 3u);
}

TEST(Taxonomy, OneHopMatching) {
  const auto& tax = excerpt();
  EXPECT_TRUE(related(id("CWE-416"), id("CWE-416"), tax));
  EXPECT_TRUE(related(id("CWE-825"), id("CWE-416"), tax));
  EXPECT_TRUE(related(id("CWE-416"), id("CWE-825"), tax));
  EXPECT_FALSE(related(id("CWE-119"), id("CWE-416"), tax));
  EXPECT_FALSE(related(id("CWE-118"), id("CWE-416"), tax));
  EXPECT_FALSE(related(id("CWE-664"), id("CWE-416"), tax));
  // Siblings under one parent are not related.
  EXPECT_FALSE(related(id("CWE-787"), id("CWE-125"), tax));

  const std::vector<CweId> truth{id("CWE-416")};
  const std::vector<CweId> preds{id("CWE-20"), id("CWE-825")};
  EXPECT_TRUE(match_any(preds, truth, tax));
  EXPECT_FALSE(match_any(std::vector<CweId>{}, truth, tax));
}

TEST(Taxonomy, EdgeListJson) {
  const auto tax = parse_edge_list_json(R"({"edges": [["CWE-416", "CWE-825"], ["CWE-825", "CWE-119"]],
                                           "nodes": ["CWE-20"]})");
  EXPECT_EQ(tax.nodes().size(), 4u);
  EXPECT_EQ(tax.children(id("CWE-825")), std::vector<CweId>{id("CWE-416")});
}

TEST(Taxonomy, RejectsMalformedGraphs) {
  auto kind_of = [](const char* text) {
    try {
      parse_edge_list_json(text);
    } catch (const TaxonomyError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << text;
    return TaxonomyError::Kind::UnknownFormat;
  };
  EXPECT_EQ(kind_of(R"({"edges": [["CWE-1", "CWE-1"]]})"), TaxonomyError::Kind::SelfEdge);
  EXPECT_EQ(kind_of(R"({"edges": [["CWE-1", "CWE-2"], ["CWE-2", "CWE-3"], ["CWE-3", "CWE-1"]]})"),
            TaxonomyError::Kind::Cycle);
  EXPECT_EQ(kind_of(R"({"edges": [["CWE-1"]]})"), TaxonomyError::Kind::Malformed);
  EXPECT_EQ(kind_of("[1, 2"), TaxonomyError::Kind::Malformed);
  EXPECT_THROW(parse_taxonomy_format("yaml"), TaxonomyError);
  EXPECT_THROW(parse_official_xml("<Weakness_Catalog><Weaknesses>"), TaxonomyError);
  EXPECT_THROW(CweTaxonomy({id("CWE-1")}, {{id("CWE-1"), id("CWE-2")}}), TaxonomyError);
}

TEST(Taxonomy, CweListParsing) {
  const std::vector<std::string> ok{"CWE-1", "cwe-2"};
  EXPECT_EQ(parse_cwe_list(ok).size(), 2u);
  const std::vector<std::string> bad{"CWE-1", "NVD-CWE-Other"};
  EXPECT_THROW(parse_cwe_list(bad), DataError);
}

}  // namespace
}  // namespace vdpost
