#include "htk/simgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "htk/error.hpp"

namespace htk {

std::string categorical_class_name(std::size_t feature, int value) {
  return kCategoricalPrefixes.at(feature) + std::to_string(value);
}

SeededRng::SeededRng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t SeededRng::next() { return engine_(); }

double SeededRng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::below(std::uint64_t n) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = -n % n;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= limit) return x % n;
  }
}

std::size_t SeededRng::weighted(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double target = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (target < weights[i]) return i;
    target -= weights[i];
  }
  // Rounding can leave target just above the last bucket.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

void GeneratorConfig::validate() const {
  auto invalid = [](const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, "generator config: " + why);
  };
  if (profiles == 0) invalid("profile count must be positive");
  double total = 0.0;
  for (double w : horizon_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) invalid("horizon weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) invalid("horizon weights must not all be zero");
  if (!(label_skew >= 0.0) || !std::isfinite(label_skew)) {
    invalid("label_skew must be a non-negative number");
  }
  for (int c : categorical_classes) {
    if (c < 1) invalid("every categorical feature needs at least one class");
  }
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& doc) {
  GeneratorConfig config;
  try {
    if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be an object");
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("profiles")) config.profiles = doc["profiles"].get<std::size_t>();
    if (doc.contains("horizon_weights")) {
      const auto w = doc["horizon_weights"].get<std::vector<double>>();
      if (w.size() != config.horizon_weights.size()) {
        throw Error(ErrorCode::InvalidConfig,
                    "horizon_weights needs 7 entries (horizon counts 2..8)");
      }
      std::copy(w.begin(), w.end(), config.horizon_weights.begin());
    }
    if (doc.contains("label_skew")) config.label_skew = doc["label_skew"].get<double>();
    if (doc.contains("categorical_classes")) {
      const auto c = doc["categorical_classes"].get<std::vector<int>>();
      if (c.size() != config.categorical_classes.size()) {
        throw Error(ErrorCode::InvalidConfig, "categorical_classes needs 5 entries");
      }
      std::copy(c.begin(), c.end(), config.categorical_classes.begin());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("generator config: ") + e.what());
  }
  config.validate();
  return config;
}

nlohmann::ordered_json GeneratorConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["seed"] = seed;
  doc["profiles"] = profiles;
  doc["horizon_weights"] = horizon_weights;
  doc["label_skew"] = label_skew;
  doc["categorical_classes"] = categorical_classes;
  return doc;
}

std::vector<ProfileRecord> generate(const GeneratorConfig& config,
                                    const TaxonomyGraph& g) {
  config.validate();
  if (g.leaf_count() == 0) {
    throw Error(ErrorCode::InvalidConfig, "taxonomy has no labels");
  }
  SeededRng rng(config.seed);

  // Zipf weights over a seeded permutation of the leaves, so the frequent
  // labels are not simply the first ones in leaf order.
  std::vector<std::string> labels = g.leaf_names();
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[rng.below(i)]);
  }
  std::vector<double> label_weights(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    label_weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), config.label_skew);
  }

  const int width = std::to_string(config.profiles).size();
  std::vector<ProfileRecord> records;
  records.reserve(config.profiles);
  for (std::size_t p = 0; p < config.profiles; ++p) {
    ProfileRecord rec;
    std::string num = std::to_string(p + 1);
    rec.id = "P" + std::string(width - num.size(), '0') + num;

    const int horizons = kMinHorizons + static_cast<int>(rng.weighted(config.horizon_weights));
    // Distinct centimeter boundaries in 1..99, then the stop depth.
    std::array<int, 99> cm{};
    std::iota(cm.begin(), cm.end(), 1);
    for (int i = 0; i < horizons - 1; ++i) {
      std::swap(cm[i], cm[i + rng.below(cm.size() - i)]);
    }
    std::sort(cm.begin(), cm.begin() + (horizons - 1));
    std::vector<double> markers;
    for (int i = 0; i < horizons - 1; ++i) markers.push_back(cm[i] / 100.0);
    markers.push_back(kStopDepth);
    rec.depths = DepthSequence::from_markers(std::move(markers));

    for (int t = 0; t < horizons; ++t) {
      rec.labels.push_back(labels[rng.weighted(label_weights)]);
      // Stone counts are mostly small with a long tail up to 100.
      const double u = rng.uniform();
      rec.stones.push_back(static_cast<int>(std::floor(u * u * u * (kMaxStones + 1))));
      std::array<int, kCategoricalFeatures> cat{};
      for (std::size_t f = 0; f < kCategoricalFeatures; ++f) {
        cat[f] = static_cast<int>(rng.below(config.categorical_classes[f]));
      }
      rec.categorical.push_back(cat);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

nlohmann::ordered_json record_to_json(const ProfileRecord& record) {
  nlohmann::ordered_json doc;
  doc["id"] = record.id;
  doc["depths"] = record.depths.markers();
  doc["labels"] = record.labels;
  doc["stones"] = record.stones;
  auto& cat = doc["categorical"] = nlohmann::ordered_json::array();
  for (const auto& row : record.categorical) {
    auto names = nlohmann::ordered_json::array();
    for (std::size_t f = 0; f < kCategoricalFeatures; ++f) {
      names.push_back(categorical_class_name(f, row[f]));
    }
    cat.push_back(std::move(names));
  }
  return doc;
}

namespace {

int parse_class_name(std::size_t feature, const std::string& name) {
  const std::string prefix = kCategoricalPrefixes[feature];
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) {
    throw Error(ErrorCode::MalformedRecord, "bad " + std::string(kCategoricalNames[feature]) +
                                                " class '" + name + "'");
  }
  int value = -1;
  const char* first = name.data() + prefix.size();
  const char* last = name.data() + name.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || value < 0) {
    throw Error(ErrorCode::MalformedRecord, "bad " + std::string(kCategoricalNames[feature]) +
                                                " class '" + name + "'");
  }
  return value;
}

}  // namespace

ProfileRecord record_from_json(const nlohmann::json& doc) {
  ProfileRecord rec;
  try {
    rec.id = doc.at("id").get<std::string>();
    rec.depths = DepthSequence::from_markers(doc.at("depths").get<std::vector<double>>());
    rec.labels = doc.at("labels").get<std::vector<std::string>>();
    rec.stones = doc.at("stones").get<std::vector<int>>();
    for (const auto& row : doc.at("categorical")) {
      if (row.size() != kCategoricalFeatures) {
        throw Error(ErrorCode::MalformedRecord, "record " + rec.id +
                                                    ": categorical rows need 5 entries");
      }
      std::array<int, kCategoricalFeatures> cat{};
      for (std::size_t f = 0; f < kCategoricalFeatures; ++f) {
        cat[f] = parse_class_name(f, row[f].get<std::string>());
      }
      rec.categorical.push_back(cat);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("record: ") + e.what());
  }
  const std::size_t d = rec.depths.size();
  if (rec.labels.size() != d || rec.stones.size() != d || rec.categorical.size() != d) {
    throw Error(ErrorCode::MalformedRecord,
                "record " + rec.id + ": one label and tabular tuple per stripe required");
  }
  return rec;
}

void write_records_jsonl(std::span<const ProfileRecord> records, std::ostream& out) {
  for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

std::vector<ProfileRecord> read_records_jsonl(std::istream& in) {
  std::vector<ProfileRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, "records line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

std::vector<std::string> stratification_labels(const ProfileRecord& record) {
  std::set<std::string> out(record.labels.begin(), record.labels.end());
  for (const auto& row : record.categorical) {
    for (std::size_t f = 0; f < kCategoricalFeatures; ++f) {
      out.insert(std::string(kCategoricalNames[f]) + "=" + categorical_class_name(f, row[f]));
    }
  }
  return {out.begin(), out.end()};
}

SplitIndices stratified_split(std::span<const ProfileRecord> records,
                              const std::array<double, 3>& fractions,
                              std::uint64_t seed) {
  double sum = 0.0;
  std::size_t nonempty = 0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error(ErrorCode::InvalidConfig, "split fractions must be non-negative");
    sum += f;
    if (f > 0.0) ++nonempty;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "split fractions must sum to 1");
  }
  if (records.size() < nonempty) {
    throw Error(ErrorCode::TooFewRecords,
                std::to_string(records.size()) + " records for " +
                    std::to_string(nonempty) + " non-empty splits");
  }

  const std::size_t n = records.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  // Label ids in lexicographic order; per-record label id lists.
  std::map<std::string, std::size_t> label_ids;
  std::vector<std::vector<std::size_t>> record_labels(n);
  {
    std::vector<std::vector<std::string>> names(n);
    for (std::size_t i = 0; i < n; ++i) {
      names[i] = stratification_labels(records[i]);
      for (const auto& l : names[i]) label_ids.emplace(l, 0);
    }
    std::size_t next = 0;
    for (auto& [name, id] : label_ids) id = next++;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& l : names[i]) record_labels[i].push_back(label_ids[l]);
    }
  }
  const std::size_t num_labels = label_ids.size();

  std::vector<std::size_t> total(num_labels, 0);
  for (const auto& ls : record_labels) {
    for (std::size_t l : ls) ++total[l];
  }

  // Split sizes are fixed up front: floors, then the leftover records go to
  // the largest remainders (lower index on ties).
  std::array<std::size_t, 3> capacity{};
  std::array<double, 3> remainder{};
  std::size_t placed = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double exact = fractions[j] * static_cast<double>(n);
    capacity[j] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[j] = exact - static_cast<double>(capacity[j]);
    placed += capacity[j];
  }
  while (placed < n) {
    std::size_t best = 3;
    for (std::size_t j = 0; j < 3; ++j) {
      if (fractions[j] > 0.0 && (best == 3 || remainder[j] > remainder[best])) best = j;
    }
    ++capacity[best];
    remainder[best] = -1.0;
    ++placed;
  }

  // desired[l][j]: how many more records with label l split j should get.
  std::vector<std::array<double, 3>> desired(num_labels);
  for (std::size_t l = 0; l < num_labels; ++l) {
    for (std::size_t j = 0; j < 3; ++j) {
      desired[l][j] = static_cast<double>(capacity[j]) * static_cast<double>(total[l]) /
                      static_cast<double>(n);
    }
  }

  // Records holding rare labels go first, while every split still has room.
  std::vector<std::size_t> rarity(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l : record_labels[i]) rarity[i] = std::min(rarity[i], total[l]);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rarity[a] < rarity[b]; });

  std::vector<int> assignment(n, -1);
  std::array<std::size_t, 3> filled{};
  for (std::size_t rec : order) {
    // Reduction of sum_l |desired| / size that placing rec in j would buy.
    std::size_t best = 3;
    double best_gain = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      if (filled[j] >= capacity[j]) continue;
      double gain = 0.0;
      for (std::size_t l : record_labels[rec]) {
        const double d = desired[l][j];
        gain += std::abs(d) - std::abs(d - 1.0);
      }
      gain /= static_cast<double>(capacity[j]);
      const auto room = [&](std::size_t k) { return capacity[k] - filled[k]; };
      if (best == 3 || gain > best_gain || (gain == best_gain && room(j) > room(best))) {
        best = j;
        best_gain = gain;
      }
    }
    assignment[rec] = static_cast<int>(best);
    ++filled[best];
    for (std::size_t l : record_labels[rec]) desired[l][best] -= 1.0;
  }

  // Refinement: swap records between splits while that lowers
  // sum_{l,j} (excess_lj / size_j)^2, excess being the count above target.
  // Sizes stay fixed. Labels are sorted per record, so the labels two
  // records do not share fall out of a merge.
  for (auto& ls : record_labels) std::sort(ls.begin(), ls.end());
  std::array<double, 3> weight{};
  for (std::size_t j = 0; j < 3; ++j) {
    weight[j] = capacity[j] ? 1.0 / (static_cast<double>(capacity[j]) *
                                     static_cast<double>(capacity[j]))
                            : 0.0;
  }
  // excess = -desired
  auto change = [&](std::size_t l, std::size_t j, double delta) {
    const double e = -desired[l][j];
    return weight[j] * ((e + delta) * (e + delta) - e * e);
  };
  auto swap_gain = [&](std::size_t a, std::size_t b) {
    const auto p = static_cast<std::size_t>(assignment[a]);
    const auto q = static_cast<std::size_t>(assignment[b]);
    const auto& la = record_labels[a];
    const auto& lb = record_labels[b];
    double delta = 0.0;
    std::size_t i = 0, k = 0;
    while (i < la.size() || k < lb.size()) {
      if (k == lb.size() || (i < la.size() && la[i] < lb[k])) {
        delta += change(la[i], p, -1.0) + change(la[i], q, 1.0);
        ++i;
      } else if (i == la.size() || lb[k] < la[i]) {
        delta += change(lb[k], q, -1.0) + change(lb[k], p, 1.0);
        ++k;
      } else {
        ++i;
        ++k;
      }
    }
    return delta;
  };
  auto apply_swap = [&](std::size_t a, std::size_t b) {
    const auto p = static_cast<std::size_t>(assignment[a]);
    const auto q = static_cast<std::size_t>(assignment[b]);
    for (std::size_t l : record_labels[a]) desired[l][p] += 1.0, desired[l][q] -= 1.0;
    for (std::size_t l : record_labels[b]) desired[l][q] += 1.0, desired[l][p] -= 1.0;
    std::swap(assignment[a], assignment[b]);
  };
  constexpr int kRefinePasses = 8;
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    bool improved = false;
    for (std::size_t a : order) {
      for (std::size_t b : order) {
        if (assignment[a] >= assignment[b]) continue;
        if (swap_gain(a, b) < -1e-12) {
          apply_swap(a, b);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  SplitIndices split;
  for (std::size_t i = 0; i < n; ++i) {
    (assignment[i] == 0 ? split.train : assignment[i] == 1 ? split.val : split.test).push_back(i);
  }
  return split;
}

double max_split_deviation(std::span<const ProfileRecord> records,
                           const SplitIndices& split) {
  if (records.empty()) return 0.0;
  std::map<std::string, std::size_t> overall;
  std::vector<std::vector<std::string>> labels(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    labels[i] = stratification_labels(records[i]);
    for (const auto& l : labels[i]) ++overall[l];
  }
  const double n = static_cast<double>(records.size());
  double worst = 0.0;
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    if (part->empty()) continue;
    std::map<std::string, std::size_t> counts;
    for (std::size_t i : *part) {
      for (const auto& l : labels[i]) ++counts[l];
    }
    for (const auto& [label, total] : overall) {
      const double in_part = counts.count(label) ? counts[label] : 0.0;
      worst = std::max(worst, std::abs(in_part / part->size() - total / n));
    }
  }
  return worst;
}

AverageDepthBaseline AverageDepthBaseline::fit(std::span<const ProfileRecord> train) {
  if (train.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "average-depth baseline needs training records");
  }
  // Modal length, smaller length on ties.
  std::map<std::size_t, std::size_t> lengths;
  for (const auto& rec : train) ++lengths[rec.depths.size()];
  std::size_t modal = 0, best = 0;
  for (const auto& [len, count] : lengths) {
    if (count > best) {
      modal = len;
      best = count;
    }
  }

  // Internal markers only: the stop depth of a shorter profile is not a
  // boundary at that position in a longer one.
  std::vector<double> means;
  for (std::size_t t = 0; t + 1 < modal; ++t) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& rec : train) {
      if (t + 1 < rec.depths.size()) {
        sum += rec.depths.markers()[t];
        ++count;
      }
    }
    means.push_back(sum / static_cast<double>(count));
  }
  std::sort(means.begin(), means.end());
  std::vector<double> markers;
  for (double m : means) {
    if (m < kStopDepth && (markers.empty() || m > markers.back())) markers.push_back(m);
  }
  markers.push_back(kStopDepth);

  AverageDepthBaseline baseline;
  baseline.markers_ = DepthSequence::from_markers(std::move(markers));
  return baseline;
}

}  // namespace htk
