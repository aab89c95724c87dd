#pragma once

// Rooted label DAG: Root -> main-symbol nodes -> leaf labels. Mixture leaves
// hang below the main-symbol nodes of both members, so the graph is not a tree.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "htk/grammar.hpp"

namespace htk {

enum class NodeKind { Root, MainSymbol, Leaf };

struct TaxonomyNode {
  NodeKind kind = NodeKind::Root;
  char main = 0;                      // MainSymbol nodes only
  std::optional<HorizonLabel> label;  // Leaf nodes only
  std::vector<std::size_t> parents;
  std::vector<std::size_t> children;
  int height = 0;  // longest downward path to a leaf
};

enum class LeafOrder {
  /// Non-mixture leaves grouped by main symbol (alphabetical), lexicographic
  /// within a group; then mixture leaves, lexicographic.
  Canonical,
  /// Non-mixture leaves in input order, then mixture leaves in input order.
  AsGiven,
};

class TaxonomyGraph {
 public:
  /// Throws DuplicateLabel, DanglingMixtureParent, or UnknownMainSymbol when a
  /// non-empty alphabet is supplied and a label falls outside it.
  static TaxonomyGraph build(std::span<const HorizonLabel> labels,
                             MainAlphabet alphabet = {},
                             LeafOrder order = LeafOrder::Canonical);

  std::size_t root() const noexcept { return 0; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const TaxonomyNode& node(std::size_t id) const { return nodes_.at(id); }
  int height(std::size_t id) const { return nodes_.at(id).height; }
  /// Normalizer of the LCA distance: the height of the root.
  int max_height() const noexcept { return nodes_.front().height; }
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  /// Leaves in leaf order; the first nonmixture_count() are non-mixtures.
  const std::vector<HorizonLabel>& leaves() const noexcept { return leaves_; }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }
  std::size_t nonmixture_count() const noexcept { return nonmixture_count_; }
  std::size_t mixture_count() const noexcept {
    return leaves_.size() - nonmixture_count_;
  }
  std::vector<std::string> leaf_names() const;

  std::optional<std::size_t> leaf_index(const HorizonLabel& label) const;
  std::optional<std::size_t> leaf_index(std::string_view rendered) const;
  std::size_t leaf_node(std::size_t leaf_index) const {
    return leaf_nodes_.at(leaf_index);
  }
  std::optional<std::size_t> main_node(char main) const;

  /// Lowest common ancestor of two nodes: the common ancestor of least
  /// height (ties broken by the smaller node id).
  std::size_t lca(std::size_t a, std::size_t b) const;

  const MainAlphabet& alphabet() const noexcept { return alphabet_; }

 private:
  std::vector<std::size_t> ancestors(std::size_t id) const;

  std::vector<TaxonomyNode> nodes_;
  std::vector<HorizonLabel> leaves_;
  std::vector<std::size_t> leaf_nodes_;
  std::size_t nonmixture_count_ = 0;
  std::unordered_map<std::string, std::size_t> index_by_name_;
  MainAlphabet alphabet_;
};

/// s_G = 1 - height(LCA) / height(root) for two non-mixture leaves.
/// Throws LabelNotInTaxonomy or MixtureNotAllowed.
double lca_similarity(const TaxonomyGraph& g, const HorizonLabel& a,
                      const HorizonLabel& b);

/// s_G between simple labels. A label that is not a leaf is placed as a
/// virtual leaf below its main-symbol node.
double simple_similarity(const TaxonomyGraph& g, const SimpleLabel& a,
                         const SimpleLabel& b);

/// Categories of leaf pairs with a closed-form embedding dot product.
enum class PairCase {
  Identical,            // same leaf
  NoSharedMain,         // 1)
  SameMain,             // 2)
  MixFirstParent,       // 3.1) label is the first member
  MixSecondParent,      // 3.1) label is the second member
  MixFirstMain,         // 3.2) shares main with the first member only
  MixSecondMain,        // 3.2) shares main with the second member only
  SharedSecondParent,   // 4.1.1)
  SharedFirstParent,    // 4.1.2)
  SharedCrossedParent,  // 4.1.3)
  FirstMainsShared,     // 4.2.1)
  BothMainsShared,      // 4.2.2)
  CrossedMainShared,    // 4.2.3)
  BothMainsCrossed,     // 4.2.4)
  SecondMainsShared,    // 4.2.5)
  Composite,            // mixture pairs combining a shared parent and a shared main
};

std::string_view case_id(PairCase c) noexcept;

/// Closed-form dot product of a pair category (1 for identical leaves);
/// nullopt for Composite pairs.
std::optional<double> closed_form_value(PairCase c) noexcept;

PairCase classify_pair(const HorizonLabel& a, const HorizonLabel& b);

/// Target dot product of the embeddings of two leaves (mixtures allowed),
/// obtained by expanding the 1:2 mixture combination bilinearly over s_G.
double required_similarity(const TaxonomyGraph& g, const HorizonLabel& a,
                           const HorizonLabel& b);

}  // namespace htk
