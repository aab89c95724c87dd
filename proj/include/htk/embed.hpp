#pragma once

// Unit-sphere label embeddings whose pairwise dot products reproduce the
// taxonomy similarities. Non-mixture labels are placed one at a time by
// forward substitution against all earlier labels; each label opens one new
// coordinate. Mixtures are the normalized 1:2 combination of their members.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "htk/kernels.hpp"
#include "htk/taxonomy.hpp"

namespace htk {

/// dim x N matrix, column-major, one column per label.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t dim, std::vector<std::string> labels);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::span<const double> column(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * dim_, dim_);
  }
  std::span<double> column(std::size_t i) {
    return std::span<double>(data_).subspan(i * dim_, dim_);
  }
  double operator()(std::size_t row, std::size_t col) const {
    return data_[col * dim_ + row];
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  kernels::ColumnsView view() const { return {data_, dim_, labels_.size()}; }

  bool operator==(const EmbeddingMatrix& other) const {
    return dim_ == other.dim_ && labels_ == other.labels_ && data_ == other.data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Similarity oracle over construction positions (i, j), i > j.
using PairSimilarity = std::function<double(std::size_t, std::size_t)>;

/// Places `names.size()` unit vectors in R^n (n = names.size()) so that
/// dot(v_i, v_j) = similarity(i, j). Column k is zero below row k. Throws
/// InfeasibleHierarchy (radicand below -1e-9) or SingularStep (pivot below
/// 1e-12); both messages name the offending label pair.
EmbeddingMatrix embed_by_similarity(std::vector<std::string> names,
                                    const PairSimilarity& similarity);

/// Full d_E x N matrix for a taxonomy, columns in leaf order.
EmbeddingMatrix embed_taxonomy(const TaxonomyGraph& g);

/// normalize(phi(first)/3 + 2 phi(second)/3). Throws ParentNotEmbedded or
/// SameMainSymbol.
std::vector<double> mixture_embedding(const EmbeddingMatrix& m,
                                      const HorizonLabel& first,
                                      const HorizonLabel& second);

struct CaseDeviation {
  PairCase pair_case;
  std::size_t pairs = 0;
  double max_deviation = 0.0;
};

struct IdentityReport {
  std::vector<CaseDeviation> cases;  // only categories that occurred
  std::size_t pairs = 0;             // unordered pairs incl. self pairs
  double max_deviation = 0.0;        // over all pairs
  double max_nonmixture_deviation = 0.0;
  double max_norm_deviation = 0.0;
  bool passed = false;
};

/// Compares every leaf-pair dot product with required_similarity.
IdentityReport verify_identities(const EmbeddingMatrix& m,
                                 const TaxonomyGraph& g, double tol);

// Serialization: numbers are written with 17 significant digits and read
// back bit-identically.
void write_embeddings_csv(const EmbeddingMatrix& m, std::ostream& out);
void write_embeddings_json(const EmbeddingMatrix& m, std::ostream& out);
EmbeddingMatrix read_embeddings_csv(std::istream& in);
EmbeddingMatrix read_embeddings_json(std::istream& in);
/// Dispatches on the file extension (.json, otherwise CSV).
EmbeddingMatrix load_embeddings(const std::string& path);

std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace htk
