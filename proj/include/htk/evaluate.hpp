#pragma once

// Evaluation of per-profile predictions into a single report with the depth,
// tabular and horizon metric blocks.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "htk/embed.hpp"
#include "htk/metrics.hpp"
#include "htk/simgen.hpp"
#include "htk/taxonomy.hpp"

namespace htk {

struct CategoricalColumn {
  std::string name;
  std::vector<std::string> truth;              // per true stripe
  std::vector<std::vector<std::string>> pred;  // ranked classes per stripe
};

/// One profile. Horizon predictions are given either as ranked label lists
/// or as embedding vectors (decoded against the embedding matrix), one per
/// true stripe.
struct EvalSample {
  std::string id;
  std::vector<double> truth_depths;
  std::vector<double> pred_depths;
  std::vector<std::string> truth_labels;
  std::vector<std::vector<std::string>> ranked_labels;
  std::vector<std::vector<double>> pred_vectors;
  std::vector<double> stones_truth;
  std::vector<double> stones_pred;
  std::vector<CategoricalColumn> categorical;
};

EvalSample sample_from_json(const nlohmann::json& doc);
nlohmann::ordered_json sample_to_json(const EvalSample& sample);
std::vector<EvalSample> read_samples_jsonl(std::istream& in);
void write_samples_jsonl(std::span<const EvalSample> samples, std::ostream& out);

struct FeatureReport {
  std::string name;
  ClassificationMetrics top1;
  std::vector<std::pair<std::size_t, TopKMetrics>> at_k;
};

struct EvalReport {
  std::size_t samples = 0;
  std::size_t horizons = 0;
  double iou = 0.0;
  bool has_stones = false;
  double stones_mse = 0.0;
  std::vector<FeatureReport> categorical;
  ClassificationMetrics horizon;
  std::vector<std::pair<std::size_t, TopKMetrics>> horizon_at_k;
  double aggregated_accuracy = 0.0;
};

/// `embeddings` may be null when every sample carries ranked labels. Throws
/// DimensionMismatch / LabelMismatch naming the first offending record.
EvalReport evaluate(std::span<const EvalSample> samples,
                    const EmbeddingMatrix* embeddings, const TaxonomyGraph& g,
                    std::span<const std::size_t> ks);

/// Rates as percentages with two decimals; MSE as a plain number.
nlohmann::ordered_json report_to_json(const EvalReport& report);

/// Samples for held-out records from the average-depth baseline and a
/// random-label predictor (uniform random vectors in the embedding space,
/// random stone counts, random class rankings).
std::vector<EvalSample> baseline_samples(std::span<const ProfileRecord> test,
                                         const AverageDepthBaseline& depth,
                                         std::size_t embedding_dim,
                                         const std::array<int, kCategoricalFeatures>& classes,
                                         std::uint64_t seed);

}  // namespace htk
