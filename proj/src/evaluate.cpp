#include "htk/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "htk/decode.hpp"
#include "htk/error.hpp"

namespace htk {

namespace {

[[noreturn]] void mismatch(ErrorCode code, const std::string& id, const std::string& why) {
  throw Error(code, "record " + id + ": " + why);
}

double percent(double rate) { return std::round(rate * 10000.0) / 100.0; }

nlohmann::ordered_json classification_json(const ClassificationMetrics& m) {
  nlohmann::ordered_json j;
  j["accuracy"] = percent(m.accuracy);
  j["f1"] = percent(m.f1);
  j["precision"] = percent(m.precision);
  j["recall"] = percent(m.recall);
  return j;
}

nlohmann::ordered_json at_k_json(const std::vector<std::pair<std::size_t, TopKMetrics>>& at_k) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, m] : at_k) {
    nlohmann::ordered_json entry;
    entry["accuracy"] = percent(m.accuracy);
    entry["precision"] = percent(m.precision);
    entry["recall"] = percent(m.recall);
    j[std::to_string(k)] = std::move(entry);
  }
  return j;
}

}  // namespace

EvalSample sample_from_json(const nlohmann::json& doc) {
  EvalSample s;
  try {
    s.id = doc.at("id").get<std::string>();
    s.truth_depths = doc.at("truth_depths").get<std::vector<double>>();
    s.pred_depths = doc.at("pred_depths").get<std::vector<double>>();
    s.truth_labels = doc.at("truth_labels").get<std::vector<std::string>>();
    if (doc.contains("ranked_labels")) {
      s.ranked_labels = doc["ranked_labels"].get<std::vector<std::vector<std::string>>>();
    }
    if (doc.contains("pred_vectors")) {
      s.pred_vectors = doc["pred_vectors"].get<std::vector<std::vector<double>>>();
    }
    if (doc.contains("tabular")) {
      const auto& tab = doc["tabular"];
      if (tab.contains("stones")) {
        s.stones_truth = tab["stones"].at("truth").get<std::vector<double>>();
        s.stones_pred = tab["stones"].at("pred").get<std::vector<double>>();
      }
      if (tab.contains("categorical")) {
        for (const auto& [name, col] : tab["categorical"].items()) {
          CategoricalColumn c;
          c.name = name;
          c.truth = col.at("truth").get<std::vector<std::string>>();
          for (const auto& p : col.at("pred")) {
            if (p.is_string()) {
              c.pred.push_back({p.get<std::string>()});
            } else {
              c.pred.push_back(p.get<std::vector<std::string>>());
            }
          }
          s.categorical.push_back(std::move(c));
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("sample: ") + e.what());
  }
  return s;
}

nlohmann::ordered_json sample_to_json(const EvalSample& s) {
  nlohmann::ordered_json doc;
  doc["id"] = s.id;
  doc["truth_depths"] = s.truth_depths;
  doc["pred_depths"] = s.pred_depths;
  doc["truth_labels"] = s.truth_labels;
  if (!s.ranked_labels.empty()) doc["ranked_labels"] = s.ranked_labels;
  if (!s.pred_vectors.empty()) doc["pred_vectors"] = s.pred_vectors;
  if (!s.stones_truth.empty() || !s.categorical.empty()) {
    auto& tab = doc["tabular"];
    if (!s.stones_truth.empty()) {
      tab["stones"]["truth"] = s.stones_truth;
      tab["stones"]["pred"] = s.stones_pred;
    }
    for (const auto& c : s.categorical) {
      tab["categorical"][c.name]["truth"] = c.truth;
      tab["categorical"][c.name]["pred"] = c.pred;
    }
  }
  return doc;
}

std::vector<EvalSample> read_samples_jsonl(std::istream& in) {
  std::vector<EvalSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, "samples line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_samples_jsonl(std::span<const EvalSample> samples, std::ostream& out) {
  for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
}

EvalReport evaluate(std::span<const EvalSample> samples,
                    const EmbeddingMatrix* embeddings, const TaxonomyGraph& g,
                    std::span<const std::size_t> ks) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no samples to evaluate");
  EvalReport report;
  report.samples = samples.size();

  // Depths.
  double iou_sum = 0.0;
  for (const auto& s : samples) {
    try {
      iou_sum += iou_1d(normalize_depths(s.pred_depths), normalize_depths(s.truth_depths));
    } catch (const Error& e) {
      throw Error(e.code(), "record " + s.id + ": " + e.what());
    }
  }
  report.iou = iou_sum / static_cast<double>(samples.size());

  // Horizon labels: decode all vectors in one batch.
  std::vector<double> batch;
  for (const auto& s : samples) {
    const bool vectors = !s.pred_vectors.empty();
    const std::size_t given = vectors ? s.pred_vectors.size() : s.ranked_labels.size();
    if (given != s.truth_labels.size()) {
      mismatch(ErrorCode::LabelMismatch, s.id,
               std::to_string(given) + " horizon predictions for " +
                   std::to_string(s.truth_labels.size()) + " true horizons");
    }
    for (const auto& label : s.truth_labels) {
      if (!g.leaf_index(label)) {
        mismatch(ErrorCode::LabelMismatch, s.id, "label '" + label + "' is not in the taxonomy");
      }
    }
    if (!vectors) {
      for (const auto& ranked : s.ranked_labels) {
        if (ranked.empty()) mismatch(ErrorCode::LabelMismatch, s.id, "empty ranked label list");
        for (const auto& label : ranked) {
          if (!g.leaf_index(label)) {
            mismatch(ErrorCode::LabelMismatch, s.id,
                     "ranked label '" + label + "' is not in the taxonomy");
          }
        }
      }
      continue;
    }
    if (!embeddings) mismatch(ErrorCode::DimensionMismatch, s.id, "vectors given but no embeddings");
    for (const auto& v : s.pred_vectors) {
      if (v.size() != embeddings->dim()) {
        mismatch(ErrorCode::DimensionMismatch, s.id,
                 "vector of length " + std::to_string(v.size()) + ", embeddings have dimension " +
                     std::to_string(embeddings->dim()));
      }
      batch.insert(batch.end(), v.begin(), v.end());
    }
  }
  if (embeddings) {
    for (const auto& name : embeddings->labels()) {
      if (!g.leaf_index(name)) {
        throw Error(ErrorCode::LabelMismatch,
                    "embedding label '" + name + "' is not in the taxonomy");
      }
    }
  }
  std::vector<Prediction> decoded;
  if (!batch.empty()) decoded = rank_batch(*embeddings, batch);

  std::vector<RankedSample> ranked;
  std::size_t next_decoded = 0;
  for (const auto& s : samples) {
    for (std::size_t t = 0; t < s.truth_labels.size(); ++t) {
      RankedSample r{s.truth_labels[t], {}};
      if (!s.pred_vectors.empty()) {
        const auto& p = decoded[next_decoded++];
        for (std::size_t idx : p.ranked) r.ranked.push_back(embeddings->labels()[idx]);
      } else {
        r.ranked = s.ranked_labels[t];
      }
      ranked.push_back(std::move(r));
    }
  }
  report.horizons = ranked.size();
  if (ranked.empty()) throw Error(ErrorCode::EmptySampleSet, "no horizons to evaluate");

  std::vector<LabeledPair> top1;
  for (const auto& r : ranked) top1.push_back({r.truth, r.ranked.front()});
  report.horizon = classification_metrics(top1);
  report.aggregated_accuracy = aggregated_accuracy(top1, g);
  for (std::size_t k : ks) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i].ranked.size() < k) {
        // Locate the record for the message.
        std::size_t seen = 0;
        for (const auto& s : samples) {
          seen += s.truth_labels.size();
          if (i < seen) mismatch(ErrorCode::LabelMismatch, s.id, "fewer than k = " +
                                                                    std::to_string(k) +
                                                                    " ranked labels");
        }
      }
    }
    report.horizon_at_k.emplace_back(k, topk_metrics(ranked, k));
  }

  // Stones.
  std::vector<double> stones_truth, stones_pred;
  for (const auto& s : samples) {
    if (s.stones_truth.size() != s.stones_pred.size() ||
        (!s.stones_truth.empty() && s.stones_truth.size() != s.truth_labels.size())) {
      mismatch(ErrorCode::DimensionMismatch, s.id, "stone counts do not match the horizons");
    }
    stones_truth.insert(stones_truth.end(), s.stones_truth.begin(), s.stones_truth.end());
    stones_pred.insert(stones_pred.end(), s.stones_pred.begin(), s.stones_pred.end());
  }
  if (!stones_truth.empty()) {
    report.has_stones = true;
    report.stones_mse = mse(stones_pred, stones_truth);
  }

  // Categorical features, in name order.
  std::map<std::string, std::vector<RankedSample>> features;
  for (const auto& s : samples) {
    for (const auto& c : s.categorical) {
      if (c.truth.size() != c.pred.size() || c.truth.size() != s.truth_labels.size()) {
        mismatch(ErrorCode::DimensionMismatch, s.id,
                 "feature '" + c.name + "' does not have one entry per horizon");
      }
      auto& rows = features[c.name];
      for (std::size_t t = 0; t < c.truth.size(); ++t) {
        if (c.pred[t].empty()) mismatch(ErrorCode::LabelMismatch, s.id, "empty class ranking");
        rows.push_back({c.truth[t], c.pred[t]});
      }
    }
  }
  for (const auto& [name, rows] : features) {
    FeatureReport fr{name, {}, {}};
    std::vector<LabeledPair> pairs;
    std::size_t shortest = rows.front().ranked.size();
    for (const auto& r : rows) {
      pairs.push_back({r.truth, r.ranked.front()});
      shortest = std::min(shortest, r.ranked.size());
    }
    fr.top1 = classification_metrics(pairs);
    for (std::size_t k : ks) {
      if (k <= shortest) fr.at_k.emplace_back(k, topk_metrics(rows, k));
    }
    report.categorical.push_back(std::move(fr));
  }
  return report;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["samples"] = report.samples;
  doc["horizons"] = report.horizons;
  doc["depth"]["iou"] = percent(report.iou);

  auto tab = nlohmann::ordered_json::object();
  if (report.has_stones) tab["stones_mse"] = std::round(report.stones_mse * 10000.0) / 10000.0;
  if (!report.categorical.empty()) {
    ClassificationMetrics mean;
    auto features = nlohmann::ordered_json::object();
    for (const auto& f : report.categorical) {
      auto entry = classification_json(f.top1);
      entry["at_k"] = at_k_json(f.at_k);
      features[f.name] = std::move(entry);
      mean.accuracy += f.top1.accuracy;
      mean.f1 += f.top1.f1;
      mean.precision += f.top1.precision;
      mean.recall += f.top1.recall;
    }
    tab["categorical"] = std::move(features);
    const double n = static_cast<double>(report.categorical.size());
    mean.accuracy /= n;
    mean.f1 /= n;
    mean.precision /= n;
    mean.recall /= n;
    tab["categorical_mean"] = classification_json(mean);
  }
  doc["tabular"] = std::move(tab);

  auto horizon = classification_json(report.horizon);
  horizon["at_k"] = at_k_json(report.horizon_at_k);
  horizon["aggregated_accuracy"] = percent(report.aggregated_accuracy);
  doc["horizon"] = std::move(horizon);
  return doc;
}

std::vector<EvalSample> baseline_samples(std::span<const ProfileRecord> test,
                                         const AverageDepthBaseline& depth,
                                         std::size_t embedding_dim,
                                         const std::array<int, kCategoricalFeatures>& classes,
                                         std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<EvalSample> out;
  out.reserve(test.size());
  for (const auto& rec : test) {
    EvalSample s;
    s.id = rec.id;
    s.truth_depths = rec.depths.markers();
    s.pred_depths = depth.predict(rec).markers();
    s.truth_labels = rec.labels;
    for (std::size_t t = 0; t < rec.labels.size(); ++t) {
      std::vector<double> v(embedding_dim);
      do {
        for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
      } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
      s.pred_vectors.push_back(std::move(v));
      s.stones_truth.push_back(rec.stones[t]);
      s.stones_pred.push_back(static_cast<double>(rng.below(kMaxStones + 1)));
    }
    for (std::size_t f = 0; f < kCategoricalFeatures; ++f) {
      CategoricalColumn c;
      c.name = kCategoricalNames[f];
      for (std::size_t t = 0; t < rec.labels.size(); ++t) {
        c.truth.push_back(categorical_class_name(f, rec.categorical[t][f]));
        std::vector<int> order(classes[f]);
        for (int i = 0; i < classes[f]; ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        std::vector<std::string> ranking;
        for (int cls : order) ranking.push_back(categorical_class_name(f, cls));
        c.pred.push_back(std::move(ranking));
      }
      s.categorical.push_back(std::move(c));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace htk
