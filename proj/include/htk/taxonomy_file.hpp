#pragma once

// Taxonomy configuration file (JSON, schema_version 1):
//
//   {
//     "schema_version": 1,
//     "main_symbols": ["A", "B", ...],          // or a string "AB..."
//     "labels": ["Ah", "Bv", ...],              // may include mixtures
//     "mixtures": ["Ah-Bv", ...],               // optional
//     "modifier_rules": {                       // optional
//       "forbidden_prefixes": {"B": ["a"]},
//       "forbidden_suffixes": {}
//     },
//     "leaf_order": "canonical"                 // or "as_given"
//   }

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "htk/grammar.hpp"
#include "htk/taxonomy.hpp"

namespace htk {

inline constexpr int kTaxonomySchemaVersion = 1;

struct TaxonomyConfig {
  MainAlphabet alphabet;
  ModifierRules rules;
  std::vector<HorizonLabel> labels;
  LeafOrder order = LeafOrder::Canonical;

  TaxonomyGraph build() const {
    return TaxonomyGraph::build(labels, alphabet, order);
  }
};

/// Throws InvalidConfig for schema problems and the grammar errors for bad
/// labels.
TaxonomyConfig parse_taxonomy_config(const nlohmann::json& doc);
TaxonomyConfig load_taxonomy_config(const std::string& path);

}  // namespace htk
