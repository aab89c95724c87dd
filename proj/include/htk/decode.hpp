#pragma once

// Nearest-embedding decoding: rank every label column by cosine similarity
// to a predicted vector.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "htk/embed.hpp"

namespace htk {

struct Prediction {
  std::vector<double> scores;        // cosine per column, in column order
  std::vector<std::size_t> ranked;   // column indices, best first
};

/// Throws DimensionMismatch or ZeroVector. Ties keep column (leaf) order.
Prediction rank_labels(const EmbeddingMatrix& m, std::span<const double> y);

/// Ranks a row-major batch of vectors (batch x dim) in parallel.
std::vector<Prediction> rank_batch(const EmbeddingMatrix& m,
                                   std::span<const double> vectors);

/// First k ranked labels. Throws KOutOfRange unless 1 <= k <= N.
std::vector<std::string> top_k(const EmbeddingMatrix& m, const Prediction& p,
                               std::size_t k);

struct DecodeItem {
  std::string id;
  std::vector<double> vector;
};

/// JSON lines: either a bare number array or {"id": ..., "vector": [...]}.
std::vector<DecodeItem> read_vectors_jsonl(std::istream& in);
/// One line per item: {"id", "ranked": [...], "scores": [...]} limited to
/// `top` entries (0 = all).
void write_rankings_jsonl(const EmbeddingMatrix& m,
                          const std::vector<DecodeItem>& items,
                          const std::vector<Prediction>& predictions,
                          std::size_t top, std::ostream& out);

}  // namespace htk
