#pragma once

// Evaluation metrics: 1D-IoU over depth sequences, MSE, macro classification
// metrics, top-k metrics, aggregated main-symbol accuracy, and the weighted
// multitask loss.

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "htk/taxonomy.hpp"

namespace htk {

inline constexpr double kStopDepth = 1.0;
inline constexpr double kDefaultDepthEpsilon = 0.01;

/// Lower horizon boundaries 0 < d_1 < ... < d_D = 1 (meters).
class DepthSequence {
 public:
  /// Validates the markers as-is. Throws DepthOutOfRange, NonMonotone or
  /// NoTerminator.
  static DepthSequence from_markers(std::vector<double> markers);

  const std::vector<double>& markers() const noexcept { return markers_; }
  std::size_t size() const noexcept { return markers_.size(); }
  /// Stripe t spans [d_{t-1}, d_t] with d_0 = 0.
  std::pair<double, double> stripe(std::size_t t) const {
    return {t == 0 ? 0.0 : markers_[t - 1], markers_[t]};
  }

  bool operator==(const DepthSequence&) const = default;

 private:
  std::vector<double> markers_;
};

/// Keeps markers up to the first one within epsilon of the stop depth, which
/// is rounded to 1.0; later markers are dropped.
DepthSequence normalize_depths(std::span<const double> raw,
                               double epsilon = kDefaultDepthEpsilon);

/// Mean IoU of index-paired stripes over max(D_pred, D_truth); unmatched
/// stripes score 0.
double iou_1d(const DepthSequence& pred, const DepthSequence& truth);

double mse(std::span<const double> pred, std::span<const double> truth);

struct LabeledPair {
  std::string truth;
  std::string predicted;
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Macro averages over classes that occur as truth or as prediction.
/// Per-class 0/0 ratios count as 0.
ClassificationMetrics classification_metrics(std::span<const LabeledPair> samples);

struct RankedSample {
  std::string truth;
  std::vector<std::string> ranked;
};

struct TopKMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro over classes in truth or in any top-k
  double recall = 0.0;     // macro over classes with truth support
};

/// Throws EmptySampleSet, KOutOfRange (k = 0 or a ranked list shorter than
/// k) and UnknownLabel (label outside `label_set`, when given).
TopKMetrics topk_metrics(std::span<const RankedSample> samples, std::size_t k,
                         const std::set<std::string>* label_set = nullptr);

/// Accuracy after mapping both sides to their main symbol (mixtures count
/// their second member). Labels are parsed with the taxonomy's alphabet;
/// unparseable labels throw UnknownLabel.
double aggregated_accuracy(std::span<const LabeledPair> samples,
                           const TaxonomyGraph& g);

inline constexpr std::size_t kCategoricalFeatures = 5;

struct LossComponents {
  double depth = 0.0;
  double stones = 0.0;
  std::array<double, kCategoricalFeatures> categorical{};
  double horizon = 0.0;
};

/// 10 depth + stones/10 + sum(categorical) + 10 horizon. Throws NegativeLoss
/// for negative or non-finite components.
double total_loss(const LossComponents& c);

struct TeacherForcingSchedule {
  enum class Kind { Full, LinearDecay };
  Kind kind = Kind::Full;
  int epochs = 0;  // LinearDecay only

  static TeacherForcingSchedule full() { return {Kind::Full, 0}; }
  static TeacherForcingSchedule linear_decay(int epochs) {
    return {Kind::LinearDecay, epochs};
  }
};

/// Full: 1. LinearDecay(E): max(0, 1 - epoch/E), epoch 0 being the first.
/// Throws NonPositiveEpochCount.
double teacher_forcing_rate(const TeacherForcingSchedule& schedule, int epoch);

}  // namespace htk
