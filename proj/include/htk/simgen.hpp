#pragma once

// Seeded synthetic soil profiles, dataset splitting, and reference baseline
// predictors. Everything here is a pure function of (seed, config): the
// random stream is std::mt19937_64 with hand-written distributions, since
// the standard library distributions are implementation-defined.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "htk/metrics.hpp"
#include "htk/taxonomy.hpp"

namespace htk {

inline constexpr int kMinHorizons = 2;
inline constexpr int kMaxHorizons = 8;
inline constexpr int kMaxStones = 100;

/// Categorical tabular features: soil type, soil color, carbonate, humus,
/// rooting.
inline constexpr std::array<const char*, kCategoricalFeatures> kCategoricalNames = {
    "soil_type", "soil_color", "carbonate", "humus", "rooting"};
inline constexpr std::array<const char*, kCategoricalFeatures> kCategoricalPrefixes = {
    "ST", "K", "C", "h", "W"};

/// Class name of a categorical feature value, e.g. ("humus", 3) -> "h3".
std::string categorical_class_name(std::size_t feature, int value);

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Index drawn proportionally to non-negative weights.
  std::size_t weighted(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

struct GeneratorConfig {
  std::uint64_t seed = 7;
  std::size_t profiles = 100;
  /// Relative weights of horizon counts 2..8.
  std::array<double, kMaxHorizons - kMinHorizons + 1> horizon_weights{
      0.10, 0.25, 0.25, 0.20, 0.10, 0.06, 0.04};
  /// Zipf exponent of the label frequencies; 0 gives uniform labels.
  double label_skew = 1.1;
  std::array<int, kCategoricalFeatures> categorical_classes{17, 74, 7, 8, 7};

  /// Throws InvalidConfig.
  void validate() const;
  static GeneratorConfig from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
};

struct ProfileRecord {
  std::string id;
  DepthSequence depths;
  std::vector<std::string> labels;  // one per stripe
  std::vector<int> stones;          // one per stripe
  std::vector<std::array<int, kCategoricalFeatures>> categorical;  // one per stripe

  bool operator==(const ProfileRecord&) const = default;
};

/// Throws InvalidConfig; an empty taxonomy is invalid.
std::vector<ProfileRecord> generate(const GeneratorConfig& config,
                                    const TaxonomyGraph& g);

nlohmann::ordered_json record_to_json(const ProfileRecord& record);
ProfileRecord record_from_json(const nlohmann::json& doc);
void write_records_jsonl(std::span<const ProfileRecord> records, std::ostream& out);
std::vector<ProfileRecord> read_records_jsonl(std::istream& in);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Stratification targets of a record: its horizon labels plus
/// "feature=class" entries for the categorical features.
std::vector<std::string> stratification_labels(const ProfileRecord& record);

/// Greedy iterative multilabel stratification. Throws InvalidConfig for
/// fractions that are negative or do not sum to 1 (within 1e-9) and
/// TooFewRecords when there are fewer records than non-empty splits.
SplitIndices stratified_split(std::span<const ProfileRecord> records,
                              const std::array<double, 3>& fractions,
                              std::uint64_t seed);

/// Largest |frequency in split - overall frequency| over stratification
/// labels and non-empty splits, frequencies being fractions of records.
double max_split_deviation(std::span<const ProfileRecord> records,
                           const SplitIndices& split);

/// Predicts one fixed depth sequence: per-position means of the internal
/// markers of the training set, at the modal training length.
class AverageDepthBaseline {
 public:
  /// Throws EmptyTrainingSet.
  static AverageDepthBaseline fit(std::span<const ProfileRecord> train);

  const DepthSequence& predict(const ProfileRecord&) const { return markers_; }
  const DepthSequence& markers() const noexcept { return markers_; }

 private:
  DepthSequence markers_;
};

}  // namespace htk
