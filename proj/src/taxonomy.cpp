#include "htk/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "htk/error.hpp"

namespace htk {

TaxonomyGraph TaxonomyGraph::build(std::span<const HorizonLabel> labels,
                                   MainAlphabet alphabet, LeafOrder order) {
  std::vector<HorizonLabel> simple;
  std::vector<HorizonLabel> mixed;
  std::set<std::string> seen;
  for (const auto& label : labels) {
    std::string name = render_label(label);
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::DuplicateLabel, "duplicate label '" + name + "'");
    }
    (label.is_mixture() ? mixed : simple).push_back(label);
  }

  if (order == LeafOrder::Canonical) {
    std::stable_sort(simple.begin(), simple.end(),
                     [](const HorizonLabel& a, const HorizonLabel& b) {
                       if (a.first().main != b.first().main) {
                         return a.first().main < b.first().main;
                       }
                       return render_label(a) < render_label(b);
                     });
    std::stable_sort(mixed.begin(), mixed.end(),
                     [](const HorizonLabel& a, const HorizonLabel& b) {
                       return render_label(a) < render_label(b);
                     });
  }

  const bool check_alphabet = !alphabet.empty();
  std::map<char, std::size_t> main_ids;
  TaxonomyGraph g;
  g.nodes_.emplace_back();

  // Main-symbol nodes in alphabetical order so node ids do not depend on the
  // input order.
  std::set<char> mains;
  for (const auto& label : simple) mains.insert(label.first().main);
  for (char m : mains) {
    if (check_alphabet && !alphabet.contains(m)) {
      throw Error(ErrorCode::UnknownMainSymbol,
                  "main symbol '" + std::string(1, m) + "' not in alphabet");
    }
    main_ids[m] = g.nodes_.size();
    TaxonomyNode node;
    node.kind = NodeKind::MainSymbol;
    node.main = m;
    node.parents.push_back(0);
    g.nodes_[0].children.push_back(g.nodes_.size());
    g.nodes_.push_back(std::move(node));
    if (!check_alphabet) alphabet.insert(m);
  }

  auto add_leaf = [&](const HorizonLabel& label,
                      std::initializer_list<char> parent_mains) {
    const std::size_t id = g.nodes_.size();
    TaxonomyNode node;
    node.kind = NodeKind::Leaf;
    node.label = label;
    for (char m : parent_mains) {
      const std::size_t parent = main_ids.at(m);
      node.parents.push_back(parent);
      g.nodes_[parent].children.push_back(id);
    }
    g.nodes_.push_back(std::move(node));
    g.index_by_name_.emplace(render_label(label), g.leaves_.size());
    g.leaves_.push_back(label);
    g.leaf_nodes_.push_back(id);
  };

  for (const auto& label : simple) add_leaf(label, {label.first().main});
  g.nonmixture_count_ = simple.size();
  for (const auto& label : mixed) {
    for (char m : {label.first().main, label.second().main}) {
      if (!main_ids.count(m)) {
        throw Error(ErrorCode::DanglingMixtureParent,
                    "mixture '" + render_label(label) + "' refers to main symbol '" +
                        std::string(1, m) + "' with no non-mixture label");
      }
    }
    add_leaf(label, {label.first().main, label.second().main});
  }

  // Heights: longest downward path; children always have larger ids.
  for (std::size_t id = g.nodes_.size(); id-- > 0;) {
    int h = 0;
    for (std::size_t child : g.nodes_[id].children) {
      h = std::max(h, g.nodes_[child].height + 1);
    }
    g.nodes_[id].height = h;
  }
  g.alphabet_ = std::move(alphabet);
  return g;
}

std::vector<std::pair<std::size_t, std::size_t>> TaxonomyGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    for (std::size_t child : nodes_[id].children) out.emplace_back(id, child);
  }
  return out;
}

std::vector<std::string> TaxonomyGraph::leaf_names() const {
  std::vector<std::string> names;
  names.reserve(leaves_.size());
  for (const auto& label : leaves_) names.push_back(render_label(label));
  return names;
}

std::optional<std::size_t> TaxonomyGraph::leaf_index(
    const HorizonLabel& label) const {
  return leaf_index(render_label(label));
}

std::optional<std::size_t> TaxonomyGraph::leaf_index(
    std::string_view rendered) const {
  auto it = index_by_name_.find(std::string(rendered));
  if (it == index_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TaxonomyGraph::main_node(char main) const {
  for (std::size_t child : nodes_.front().children) {
    if (nodes_[child].main == main) return child;
  }
  return std::nullopt;
}

std::vector<std::size_t> TaxonomyGraph::ancestors(std::size_t id) const {
  std::vector<std::size_t> out{id};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t p : nodes_.at(out[i]).parents) {
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t TaxonomyGraph::lca(std::size_t a, std::size_t b) const {
  const auto up_a = ancestors(a);
  const auto up_b = ancestors(b);
  std::vector<std::size_t> common;
  std::set_intersection(up_a.begin(), up_a.end(), up_b.begin(), up_b.end(),
                        std::back_inserter(common));
  // The root is a common ancestor of every pair.
  return *std::min_element(common.begin(), common.end(),
                           [this](std::size_t x, std::size_t y) {
                             if (nodes_[x].height != nodes_[y].height) {
                               return nodes_[x].height < nodes_[y].height;
                             }
                             return x < y;
                           });
}

namespace {

std::size_t require_leaf(const TaxonomyGraph& g, const HorizonLabel& label) {
  auto idx = g.leaf_index(label);
  if (!idx) {
    throw Error(ErrorCode::LabelNotInTaxonomy,
                "label '" + render_label(label) + "' is not in the taxonomy");
  }
  return *idx;
}

double similarity_from_height(const TaxonomyGraph& g, int lca_height) {
  if (g.max_height() == 0) return 1.0;
  return 1.0 - static_cast<double>(lca_height) / g.max_height();
}

}  // namespace

double lca_similarity(const TaxonomyGraph& g, const HorizonLabel& a,
                      const HorizonLabel& b) {
  const std::size_t ia = require_leaf(g, a);
  const std::size_t ib = require_leaf(g, b);
  if (a.is_mixture() || b.is_mixture()) {
    throw Error(ErrorCode::MixtureNotAllowed,
                "LCA similarity is defined for non-mixture labels only ('" +
                    render_label(a.is_mixture() ? a : b) + "')");
  }
  const std::size_t lca = g.lca(g.leaf_node(ia), g.leaf_node(ib));
  return similarity_from_height(g, g.height(lca));
}

double simple_similarity(const TaxonomyGraph& g, const SimpleLabel& a,
                         const SimpleLabel& b) {
  if (a == b) return 1.0;
  auto anchor = [&g](const SimpleLabel& s) -> std::size_t {
    if (auto idx = g.leaf_index(s.str())) return g.leaf_node(*idx);
    if (auto main = g.main_node(s.main)) return *main;
    return g.root();
  };
  return similarity_from_height(g, g.height(g.lca(anchor(a), anchor(b))));
}

std::string_view case_id(PairCase c) noexcept {
  switch (c) {
    case PairCase::Identical: return "identical";
    case PairCase::NoSharedMain: return "1";
    case PairCase::SameMain: return "2";
    case PairCase::MixFirstParent: return "3.1a";
    case PairCase::MixSecondParent: return "3.1b";
    case PairCase::MixFirstMain: return "3.2a";
    case PairCase::MixSecondMain: return "3.2b";
    case PairCase::SharedSecondParent: return "4.1.1";
    case PairCase::SharedFirstParent: return "4.1.2";
    case PairCase::SharedCrossedParent: return "4.1.3";
    case PairCase::FirstMainsShared: return "4.2.1";
    case PairCase::BothMainsShared: return "4.2.2";
    case PairCase::CrossedMainShared: return "4.2.3";
    case PairCase::BothMainsCrossed: return "4.2.4";
    case PairCase::SecondMainsShared: return "4.2.5";
    case PairCase::Composite: return "composite";
  }
  return "?";
}

std::optional<double> closed_form_value(PairCase c) noexcept {
  const double r5 = std::sqrt(5.0);
  switch (c) {
    case PairCase::Identical: return 1.0;
    case PairCase::NoSharedMain: return 0.0;
    case PairCase::SameMain: return 0.5;
    case PairCase::MixFirstParent: return 1.0 / r5;
    case PairCase::MixSecondParent: return 2.0 / r5;
    case PairCase::MixFirstMain: return 1.0 / (2.0 * r5);
    case PairCase::MixSecondMain: return 1.0 / r5;
    case PairCase::SharedSecondParent: return 4.0 / 5.0;
    case PairCase::SharedFirstParent: return 1.0 / 5.0;
    case PairCase::SharedCrossedParent: return 2.0 / 5.0;
    case PairCase::FirstMainsShared: return 1.0 / 10.0;
    case PairCase::BothMainsShared: return 1.0 / 2.0;
    case PairCase::CrossedMainShared: return 1.0 / 5.0;
    case PairCase::BothMainsCrossed: return 2.0 / 5.0;
    case PairCase::SecondMainsShared: return 2.0 / 5.0;
    case PairCase::Composite: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// 0: different main symbols, 1: same main symbol, 2: same label.
int relation(const SimpleLabel& a, const SimpleLabel& b) {
  if (a == b) return 2;
  return a.main == b.main ? 1 : 0;
}

}  // namespace

PairCase classify_pair(const HorizonLabel& a, const HorizonLabel& b) {
  if (a == b) return PairCase::Identical;
  if (!a.is_mixture() && !b.is_mixture()) {
    return a.first().main == b.first().main ? PairCase::SameMain
                                            : PairCase::NoSharedMain;
  }
  if (a.is_mixture() != b.is_mixture()) {
    const HorizonLabel& single = a.is_mixture() ? b : a;
    const HorizonLabel& mix = a.is_mixture() ? a : b;
    const int r1 = relation(single.first(), mix.first());
    const int r2 = relation(single.first(), mix.second());
    if (r1 == 2) return PairCase::MixFirstParent;
    if (r2 == 2) return PairCase::MixSecondParent;
    if (r1 == 1) return PairCase::MixFirstMain;
    if (r2 == 1) return PairCase::MixSecondMain;
    return PairCase::NoSharedMain;
  }

  const int r11 = relation(a.first(), b.first());
  const int r12 = relation(a.first(), b.second());
  const int r21 = relation(a.second(), b.first());
  const int r22 = relation(a.second(), b.second());
  // Members of a mixture have distinct main symbols, so each member relates
  // to at most one member of the other mixture.
  if (r11 && r22) {
    return (r11 == 1 && r22 == 1) ? PairCase::BothMainsShared : PairCase::Composite;
  }
  if (r12 && r21) {
    return (r12 == 1 && r21 == 1) ? PairCase::BothMainsCrossed : PairCase::Composite;
  }
  if (r11) return r11 == 2 ? PairCase::SharedFirstParent : PairCase::FirstMainsShared;
  if (r22) return r22 == 2 ? PairCase::SharedSecondParent : PairCase::SecondMainsShared;
  if (r12 || r21) {
    return std::max(r12, r21) == 2 ? PairCase::SharedCrossedParent
                                   : PairCase::CrossedMainShared;
  }
  return PairCase::NoSharedMain;
}

double required_similarity(const TaxonomyGraph& g, const HorizonLabel& a,
                           const HorizonLabel& b) {
  require_leaf(g, a);
  require_leaf(g, b);
  if (a == b) return 1.0;
  auto s = [&g](const SimpleLabel& x, const SimpleLabel& y) {
    return simple_similarity(g, x, y);
  };
  if (!a.is_mixture() && !b.is_mixture()) return s(a.first(), b.first());
  if (a.is_mixture() != b.is_mixture()) {
    const HorizonLabel& single = a.is_mixture() ? b : a;
    const HorizonLabel& mix = a.is_mixture() ? a : b;
    return (s(single.first(), mix.first()) +
            2.0 * s(single.first(), mix.second())) /
           std::sqrt(5.0);
  }
  return (s(a.first(), b.first()) + 2.0 * s(a.first(), b.second()) +
          2.0 * s(a.second(), b.first()) + 4.0 * s(a.second(), b.second())) /
         5.0;
}

}  // namespace htk
