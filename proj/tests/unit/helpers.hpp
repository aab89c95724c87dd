#pragma once

#include <string>
#include <vector>

#include "htk/grammar.hpp"
#include "htk/taxonomy.hpp"

namespace testing {

inline htk::HorizonLabel L(const std::string& text) {
  return htk::parse_label(text, htk::MainAlphabet("ABCDEFGHIJKLMNOPQRSTUVWXYZ"));
}

inline std::vector<htk::HorizonLabel> labels(const std::vector<std::string>& names) {
  std::vector<htk::HorizonLabel> out;
  for (const auto& n : names) out.push_back(L(n));
  return out;
}

inline htk::TaxonomyGraph graph(const std::vector<std::string>& names,
                                htk::LeafOrder order = htk::LeafOrder::Canonical) {
  return htk::TaxonomyGraph::build(labels(names), {}, order);
}

// The ten-label example taxonomy, in construction order.
inline htk::TaxonomyGraph worked_example() {
  return graph({"iC", "Gor", "Al", "Ael", "Acp", "Bt", "Bs", "Bv", "Btv", "Al-Bv"},
               htk::LeafOrder::AsGiven);
}

inline std::string data_path(const std::string& rel) {
  return std::string(HTK_DATA_DIR) + "/" + rel;
}

}  // namespace testing
