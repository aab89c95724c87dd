#include "htk/cluster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

#include "json.hpp"

#include "htk/error.hpp"
#include "htk/grammar.hpp"
#include "htk/kernels.hpp"

namespace htk {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

// Lower key wins.
auto candidate_key(std::string_view rare, const std::string& candidate,
                   std::size_t distance, long long count) {
  const bool same_main = guess_main_symbol(rare) == guess_main_symbol(candidate);
  return std::make_tuple(distance, !same_main, -count, candidate);
}

}  // namespace

bool ClusterMap::is_retained(std::string_view label) const {
  return std::binary_search(retained_.begin(), retained_.end(), label);
}

std::string ClusterMap::nearest(std::string_view label) const {
  std::size_t best = 0;
  auto best_key = candidate_key(label, retained_[0],
                                levenshtein(label, retained_[0]),
                                counts_.at(retained_[0]));
  for (std::size_t i = 1; i < retained_.size(); ++i) {
    auto key = candidate_key(label, retained_[i], levenshtein(label, retained_[i]),
                             counts_.at(retained_[i]));
    if (key < best_key) {
      best_key = std::move(key);
      best = i;
    }
  }
  return retained_[best];
}

std::string ClusterMap::map(std::string_view label) const {
  if (is_retained(label)) return std::string(label);
  if (auto it = mapping_.find(std::string(label)); it != mapping_.end()) {
    return it->second;
  }
  return nearest(label);
}

void ClusterMap::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["threshold"] = threshold_;
  doc["retained"] = retained_;
  nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
  for (const auto& [rare, target] : mapping_) mapping[rare] = target;
  doc["mapping"] = std::move(mapping);
  nlohmann::ordered_json overrides = nlohmann::ordered_json::array();
  for (const auto& [source, target] : overrides_) {
    overrides.push_back({{"source", source}, {"target", target}});
  }
  doc["overrides"] = std::move(overrides);
  out << doc.dump(2) << '\n';
}

ClusterMap build_cluster_map(const LabelCounts& counts, long long threshold,
                             const OverridePairs& overrides) {
  ClusterMap map;
  map.threshold_ = threshold;
  std::vector<std::string> rare;
  for (const auto& [label, count] : counts) {
    map.counts_[label] = count;
    (count > threshold ? map.retained_ : rare).push_back(label);
  }
  if (map.retained_.empty()) {
    throw Error(ErrorCode::EmptyRetainedSet,
                "no label has more than " + std::to_string(threshold) + " samples");
  }

  const auto table = kernels::omp::distance_table(rare, map.retained_);
  const std::size_t width = map.retained_.size();
  for (std::size_t r = 0; r < rare.size(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < width; ++c) {
      if (candidate_key(rare[r], map.retained_[c], table[r * width + c],
                        map.counts_[map.retained_[c]]) <
          candidate_key(rare[r], map.retained_[best], table[r * width + best],
                        map.counts_[map.retained_[best]])) {
        best = c;
      }
    }
    map.mapping_[rare[r]] = map.retained_[best];
  }

  for (const auto& [source, target] : overrides) {
    if (!map.is_retained(target)) {
      throw Error(ErrorCode::OverrideTargetNotRetained,
                  "override target '" + target + "' is not a retained label");
    }
    if (map.is_retained(source)) {
      throw Error(ErrorCode::OverrideSourceRetained,
                  "override source '" + source + "' is a retained label");
    }
    map.mapping_[source] = target;
  }
  map.overrides_ = overrides;
  return map;
}

LabelCounts normalize_counts(const LabelCounts& counts) {
  LabelCounts out;
  for (const auto& [label, count] : counts) {
    out[normalize_mixture_operators(label)] += count;
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

std::vector<std::pair<std::string, std::string>> read_pairs(std::istream& in,
                                                            std::string_view what) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorCode::MalformedRecord, std::string(what) + " line " +
                                                std::to_string(lineno) +
                                                ": expected two fields");
    }
    rows.emplace_back(trim(std::string_view(t).substr(0, comma)),
                      trim(std::string_view(t).substr(comma + 1)));
  }
  return rows;
}

}  // namespace

LabelCounts read_counts_csv(std::istream& in) {
  LabelCounts counts;
  const auto rows = read_pairs(in, "counts CSV");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [label, field] = rows[i];
    long long value = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      if (i == 0) continue;  // header
      throw Error(ErrorCode::MalformedRecord,
                  "counts CSV: bad count '" + field + "' for '" + label + "'");
    }
    if (value < 0) {
      throw Error(ErrorCode::MalformedRecord, "counts CSV: negative count for '" +
                                                label + "'");
    }
    counts[label] += value;
  }
  return counts;
}

OverridePairs read_overrides_csv(std::istream& in) {
  auto rows = read_pairs(in, "overrides CSV");
  if (!rows.empty() && rows.front().first == "source" &&
      rows.front().second == "target") {
    rows.erase(rows.begin());
  }
  return rows;
}

}  // namespace htk
