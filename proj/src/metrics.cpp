#include "htk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "htk/error.hpp"
#include "htk/grammar.hpp"

namespace htk {

namespace {

// Markers are compared against the stop depth with a little slack so that
// e.g. 0.99 counts as within 0.01 of 1.0 despite binary rounding.
constexpr double kMarginSlack = 1e-12;

std::string show(double v) { return std::to_string(v); }

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

DepthSequence DepthSequence::from_markers(std::vector<double> markers) {
  if (markers.empty()) {
    throw Error(ErrorCode::NoTerminator, "empty depth sequence");
  }
  double prev = 0.0;
  for (double d : markers) {
    if (!(d > 0.0) || d > kStopDepth) {
      throw Error(ErrorCode::DepthOutOfRange, "depth marker " + show(d) +
                                                  " outside (0, 1]");
    }
    if (!(d > prev)) {
      throw Error(ErrorCode::NonMonotone, "depth marker " + show(d) +
                                              " does not exceed " + show(prev));
    }
    prev = d;
  }
  if (markers.back() != kStopDepth) {
    throw Error(ErrorCode::NoTerminator, "last depth marker " +
                                             show(markers.back()) + " is not 1.0");
  }
  DepthSequence seq;
  seq.markers_ = std::move(markers);
  return seq;
}

DepthSequence normalize_depths(std::span<const double> raw, double epsilon) {
  std::vector<double> kept;
  double prev = 0.0;
  for (double d : raw) {
    if (!(d > 0.0) || d > kStopDepth + epsilon + kMarginSlack) {
      throw Error(ErrorCode::DepthOutOfRange,
                  "depth marker " + show(d) + " outside (0, 1 + epsilon]");
    }
    if (!(d > prev)) {
      throw Error(ErrorCode::NonMonotone, "depth marker " + show(d) +
                                              " does not exceed " + show(prev));
    }
    if (std::abs(d - kStopDepth) <= epsilon + kMarginSlack) {
      kept.push_back(kStopDepth);
      return DepthSequence::from_markers(std::move(kept));
    }
    kept.push_back(d);
    prev = d;
  }
  throw Error(ErrorCode::NoTerminator,
              "no depth marker within " + show(epsilon) + " of the stop depth");
}

double iou_1d(const DepthSequence& pred, const DepthSequence& truth) {
  const std::size_t paired = std::min(pred.size(), truth.size());
  const std::size_t total = std::max(pred.size(), truth.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < paired; ++t) {
    const auto [a0, a1] = pred.stripe(t);
    const auto [b0, b1] = truth.stripe(t);
    const double inter = std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
    const double uni = (a1 - a0) + (b1 - b0) - inter;
    sum += uni > 0.0 ? inter / uni : 1.0;
  }
  return sum / static_cast<double>(total);
}

double mse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "mse: " + std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " targets");
  }
  if (pred.empty()) throw Error(ErrorCode::EmptySampleSet, "mse: no samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

ClassificationMetrics classification_metrics(std::span<const LabeledPair> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::EmptySampleSet, "classification metrics: no samples");
  }
  struct Counts {
    std::size_t tp = 0, predicted = 0, support = 0;
  };
  std::map<std::string, Counts> per_class;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    ++per_class[s.truth].support;
    ++per_class[s.predicted].predicted;
    if (s.truth == s.predicted) {
      ++per_class[s.truth].tp;
      ++correct;
    }
  }
  std::vector<double> precisions, recalls, f1s;
  for (const auto& [label, c] : per_class) {
    const double p = ratio(c.tp, c.predicted);
    const double r = ratio(c.tp, c.support);
    precisions.push_back(p);
    recalls.push_back(r);
    f1s.push_back(p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0);
  }
  return {ratio(correct, samples.size()), mean(f1s), mean(precisions), mean(recalls)};
}

TopKMetrics topk_metrics(std::span<const RankedSample> samples, std::size_t k,
                         const std::set<std::string>* label_set) {
  if (samples.empty()) {
    throw Error(ErrorCode::EmptySampleSet, "top-k metrics: no samples");
  }
  if (k == 0) throw Error(ErrorCode::KOutOfRange, "k must be at least 1");
  auto check = [label_set](const std::string& label) {
    if (label_set && !label_set->count(label)) {
      throw Error(ErrorCode::UnknownLabel, "label '" + label + "' is not in V");
    }
  };

  struct Counts {
    std::size_t hits = 0, in_topk = 0, support = 0;
  };
  std::map<std::string, Counts> per_class;
  std::size_t hits = 0;
  for (const auto& s : samples) {
    if (s.ranked.size() < k) {
      throw Error(ErrorCode::KOutOfRange,
                  "ranked list of length " + std::to_string(s.ranked.size()) +
                      " is shorter than k = " + std::to_string(k));
    }
    check(s.truth);
    ++per_class[s.truth].support;
    std::set<std::string> top(s.ranked.begin(), s.ranked.begin() + k);
    for (const auto& label : top) {
      check(label);
      ++per_class[label].in_topk;
    }
    if (top.count(s.truth)) {
      ++per_class[s.truth].hits;
      ++hits;
    }
  }
  std::vector<double> precisions, recalls;
  for (const auto& [label, c] : per_class) {
    precisions.push_back(ratio(c.hits, c.in_topk));
    if (c.support > 0) recalls.push_back(ratio(c.hits, c.support));
  }
  return {ratio(hits, samples.size()), mean(precisions), mean(recalls)};
}

double aggregated_accuracy(std::span<const LabeledPair> samples,
                           const TaxonomyGraph& g) {
  if (samples.empty()) {
    throw Error(ErrorCode::EmptySampleSet, "aggregated accuracy: no samples");
  }
  auto main_of = [&g](const std::string& text) {
    try {
      return main_symbol(parse_label(text, g.alphabet()));
    } catch (const Error& e) {
      throw Error(ErrorCode::UnknownLabel, e.what());
    }
  };
  std::size_t correct = 0;
  for (const auto& s : samples) {
    if (main_of(s.truth) == main_of(s.predicted)) ++correct;
  }
  return ratio(correct, samples.size());
}

double total_loss(const LossComponents& c) {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::NegativeLoss,
                  std::string(name) + " loss must be finite and non-negative");
    }
  };
  check(c.depth, "depth");
  check(c.stones, "stones");
  check(c.horizon, "horizon");
  double categorical = 0.0;
  for (double v : c.categorical) {
    check(v, "categorical");
    categorical += v;
  }
  return 10.0 * c.depth + c.stones / 10.0 + categorical + 10.0 * c.horizon;
}

double teacher_forcing_rate(const TeacherForcingSchedule& schedule, int epoch) {
  if (epoch < 0) {
    throw Error(ErrorCode::InvalidConfig, "epoch must be non-negative");
  }
  if (schedule.kind == TeacherForcingSchedule::Kind::Full) return 1.0;
  if (schedule.epochs <= 0) {
    throw Error(ErrorCode::NonPositiveEpochCount,
                "linear decay needs a positive epoch count");
  }
  return std::max(0.0, 1.0 - static_cast<double>(epoch) / schedule.epochs);
}

}  // namespace htk
