#include "htk/decode.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"

#include "htk/error.hpp"

namespace htk {

namespace {

void check_query(const EmbeddingMatrix& m, std::span<const double> y,
                 std::size_t item) {
  if (y.size() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector " + std::to_string(item) + " has length " +
                    std::to_string(y.size()) + ", expected " +
                    std::to_string(m.dim()));
  }
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw Error(ErrorCode::ZeroVector,
                "vector " + std::to_string(item) + " has zero norm");
  }
}

std::vector<std::size_t> rank_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

Prediction rank_labels(const EmbeddingMatrix& m, std::span<const double> y) {
  check_query(m, y, 0);
  Prediction p;
  p.scores = kernels::serial::cosine_scores(m.view(), y);
  p.ranked = rank_scores(p.scores);
  return p;
}

std::vector<Prediction> rank_batch(const EmbeddingMatrix& m,
                                   std::span<const double> vectors) {
  if (m.dim() == 0 || vectors.size() % m.dim() != 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "batch size is not a multiple of the embedding dimension");
  }
  const std::size_t batch = vectors.size() / m.dim();
  for (std::size_t q = 0; q < batch; ++q) {
    check_query(m, vectors.subspan(q * m.dim(), m.dim()), q);
  }
  const auto scores = kernels::omp::cosine_scores(m.view(), vectors);
  std::vector<Prediction> out(batch);
  const std::span<const double> all(scores);
  for (std::size_t q = 0; q < batch; ++q) {
    const auto row = all.subspan(q * m.size(), m.size());
    out[q].scores.assign(row.begin(), row.end());
    out[q].ranked = rank_scores(row);
  }
  return out;
}

std::vector<std::string> top_k(const EmbeddingMatrix& m, const Prediction& p,
                               std::size_t k) {
  if (k < 1 || k > p.ranked.size()) {
    throw Error(ErrorCode::KOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " +
                    std::to_string(p.ranked.size()) + "]");
  }
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(m.labels()[p.ranked[i]]);
  return out;
}

std::vector<DecodeItem> read_vectors_jsonl(std::istream& in) {
  std::vector<DecodeItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRecord,
                  "vectors line " + std::to_string(lineno) + ": " + e.what());
    }
    DecodeItem item;
    const nlohmann::json* values = &doc;
    if (doc.is_object()) {
      item.id = doc.contains("id") ? doc["id"].get<std::string>()
                                   : std::to_string(lineno);
      values = &doc.at("vector");
    } else {
      item.id = std::to_string(lineno);
    }
    if (!values->is_array()) {
      throw Error(ErrorCode::MalformedRecord,
                  "vectors line " + std::to_string(lineno) + ": expected an array");
    }
    item.vector = values->get<std::vector<double>>();
    items.push_back(std::move(item));
  }
  return items;
}

void write_rankings_jsonl(const EmbeddingMatrix& m,
                          const std::vector<DecodeItem>& items,
                          const std::vector<Prediction>& predictions,
                          std::size_t top, std::ostream& out) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& p = predictions[i];
    const std::size_t n = top == 0 ? p.ranked.size() : std::min(top, p.ranked.size());
    nlohmann::ordered_json line;
    line["id"] = items[i].id;
    // built separately: ordered_json stores members in a vector, so a
    // reference into `line` dies on the next insertion
    auto ranked = nlohmann::ordered_json::array();
    auto scores = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < n; ++r) {
      ranked.push_back(m.labels()[p.ranked[r]]);
      scores.push_back(p.scores[p.ranked[r]]);
    }
    line["ranked"] = std::move(ranked);
    line["scores"] = std::move(scores);
    out << line.dump() << '\n';
  }
}

}  // namespace htk
