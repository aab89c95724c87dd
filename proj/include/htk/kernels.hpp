#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference and an
// OpenMP variant with identical results (each output slot is written by
// exactly one iteration, so no reduction order is involved). The library
// calls the OpenMP variants; tests and benchmarks compare the two.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace htk::kernels {

/// Column-major view of `count` vectors of length `dim`.
struct ColumnsView {
  std::span<const double> data;
  std::size_t dim = 0;
  std::size_t count = 0;

  std::span<const double> column(std::size_t i) const {
    return data.subspan(i * dim, dim);
  }
};

namespace serial {

/// Row-major count x count matrix of pairwise dot products.
std::vector<double> gram(ColumnsView columns);

/// For each query (row-major batch x dim), the cosine similarity against
/// every column; result is row-major batch x count. Zero-norm queries and
/// columns produce 0.
std::vector<double> cosine_scores(ColumnsView columns,
                                  std::span<const double> queries);

/// Row-major rows.size() x cols.size() table of Levenshtein distances.
std::vector<std::size_t> distance_table(std::span<const std::string> rows,
                                        std::span<const std::string> cols);

}  // namespace serial

namespace omp {

std::vector<double> gram(ColumnsView columns);
std::vector<double> cosine_scores(ColumnsView columns,
                                  std::span<const double> queries);
std::vector<std::size_t> distance_table(std::span<const std::string> rows,
                                        std::span<const std::string> cols);

}  // namespace omp

/// Number of worker threads the OpenMP variants will use (1 without OpenMP).
int max_threads() noexcept;
void set_threads(int n) noexcept;

}  // namespace htk::kernels
