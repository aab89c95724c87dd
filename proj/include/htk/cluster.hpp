#pragma once

// Rare-label clustering: labels with at most `threshold` samples are mapped
// to the retained label at minimum Levenshtein distance, then an optional
// override table replaces individual targets.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace htk {

/// Insertions, deletions and substitutions needed to turn `a` into `b`
/// (byte-wise).
std::size_t levenshtein(std::string_view a, std::string_view b);

using LabelCounts = std::map<std::string, long long>;
using OverridePairs = std::vector<std::pair<std::string, std::string>>;

class ClusterMap {
 public:
  long long threshold() const noexcept { return threshold_; }
  /// Retained labels, sorted.
  const std::vector<std::string>& retained() const noexcept { return retained_; }
  /// Rare label -> retained label, including override sources.
  const std::map<std::string, std::string>& mapping() const noexcept {
    return mapping_;
  }
  const OverridePairs& overrides() const noexcept { return overrides_; }

  bool is_retained(std::string_view label) const;
  /// Target for any label: itself when retained, the recorded target when
  /// rare, otherwise the nearest retained label by the same rule.
  std::string map(std::string_view label) const;

  void write_json(std::ostream& out) const;

 private:
  friend ClusterMap build_cluster_map(const LabelCounts&, long long,
                                      const OverridePairs&);
  std::string nearest(std::string_view label) const;

  long long threshold_ = 10;
  std::vector<std::string> retained_;
  std::map<std::string, long long> counts_;
  std::map<std::string, std::string> mapping_;
  OverridePairs overrides_;
};

/// Label strings should already be normalized (see
/// normalize_mixture_operators). Retention is strict: count > threshold.
/// Ties at equal distance prefer the same main symbol, then the larger
/// count, then the lexicographically smaller label. Throws EmptyRetainedSet,
/// OverrideTargetNotRetained, OverrideSourceRetained.
ClusterMap build_cluster_map(const LabelCounts& counts, long long threshold = 10,
                             const OverridePairs& overrides = {});

/// Merges counts of labels that only differ in their mixture operator.
LabelCounts normalize_counts(const LabelCounts& counts);

/// Two-column CSV readers; a header line is skipped when its second field is
/// not numeric (counts) or when it reads "source,target" (overrides).
LabelCounts read_counts_csv(std::istream& in);
OverridePairs read_overrides_csv(std::istream& in);

}  // namespace htk
