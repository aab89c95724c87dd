#include "htk/kernels.hpp"

#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "htk/cluster.hpp"

namespace htk::kernels {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

std::vector<double> column_norms(ColumnsView columns) {
  std::vector<double> norms(columns.count);
  for (std::size_t j = 0; j < columns.count; ++j) {
    norms[j] = std::sqrt(dot(columns.column(j), columns.column(j)));
  }
  return norms;
}

void cosine_row(ColumnsView columns, std::span<const double> norms,
                std::span<const double> query, std::span<double> out) {
  const double qn = std::sqrt(dot(query, query));
  for (std::size_t j = 0; j < columns.count; ++j) {
    const double denom = qn * norms[j];
    out[j] = denom > 0.0 ? dot(query, columns.column(j)) / denom : 0.0;
  }
}

}  // namespace

namespace serial {

std::vector<double> gram(ColumnsView columns) {
  const std::size_t n = columns.count;
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = dot(columns.column(i), columns.column(j));
    }
  }
  return out;
}

std::vector<double> cosine_scores(ColumnsView columns,
                                  std::span<const double> queries) {
  const std::size_t batch = columns.dim ? queries.size() / columns.dim : 0;
  const auto norms = column_norms(columns);
  std::vector<double> out(batch * columns.count);
  std::span<double> view(out);
  for (std::size_t q = 0; q < batch; ++q) {
    cosine_row(columns, norms, queries.subspan(q * columns.dim, columns.dim),
               view.subspan(q * columns.count, columns.count));
  }
  return out;
}

std::vector<std::size_t> distance_table(std::span<const std::string> rows,
                                        std::span<const std::string> cols) {
  std::vector<std::size_t> out(rows.size() * cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out[i * cols.size() + j] = levenshtein(rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace serial

namespace omp {

std::vector<double> gram(ColumnsView columns) {
  const auto n = static_cast<std::int64_t>(columns.count);
  std::vector<double> out(columns.count * columns.count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      out[i * n + j] = dot(columns.column(i), columns.column(j));
    }
  }
  return out;
}

std::vector<double> cosine_scores(ColumnsView columns,
                                  std::span<const double> queries) {
  const std::size_t batch = columns.dim ? queries.size() / columns.dim : 0;
  const auto norms = column_norms(columns);
  std::vector<double> out(batch * columns.count);
  std::span<double> view(out);
  const auto nbatch = static_cast<std::int64_t>(batch);
#pragma omp parallel for schedule(static)
  for (std::int64_t q = 0; q < nbatch; ++q) {
    cosine_row(columns, norms, queries.subspan(q * columns.dim, columns.dim),
               view.subspan(q * columns.count, columns.count));
  }
  return out;
}

std::vector<std::size_t> distance_table(std::span<const std::string> rows,
                                        std::span<const std::string> cols) {
  std::vector<std::size_t> out(rows.size() * cols.size());
  const auto nrows = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < nrows; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out[i * cols.size() + j] = levenshtein(rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace omp

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace htk::kernels
