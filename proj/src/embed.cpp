#include "htk/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "htk/error.hpp"

namespace htk {

namespace {

constexpr double kRadicandTolerance = 1e-9;
constexpr double kMinPivot = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<std::string> labels)
    : dim_(dim), labels_(std::move(labels)), data_(dim_ * labels_.size(), 0.0) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw Error(ErrorCode::DuplicateLabel,
                  "duplicate embedding label '" + labels_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix embed_by_similarity(std::vector<std::string> names,
                                    const PairSimilarity& similarity) {
  const std::size_t n = names.size();
  EmbeddingMatrix m(n, std::move(names));
  for (std::size_t k = 0; k < n; ++k) {
    auto phi = m.column(k);
    // Forward substitution: row j of the system only involves the first j+1
    // coordinates of phi_k because phi_j vanishes below row j.
    for (std::size_t j = 0; j < k; ++j) {
      const auto prior = m.column(j);
      const double pivot = prior[j];
      if (pivot < kMinPivot) {
        throw Error(ErrorCode::SingularStep,
                    "singular step placing '" + m.labels()[k] + "': pivot of '" +
                        m.labels()[j] + "' is " + format_double(pivot));
      }
      double residual = similarity(k, j);
      for (std::size_t i = 0; i < j; ++i) residual -= phi[i] * prior[i];
      phi[j] = residual / pivot;
    }
    const double radicand = 1.0 - dot(phi.first(k), phi.first(k));
    if (radicand < -kRadicandTolerance) {
      std::size_t culprit = k - 1;
      double partial = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        partial += phi[j] * phi[j];
        if (partial > 1.0 + kRadicandTolerance) {
          culprit = j;
          break;
        }
      }
      throw Error(ErrorCode::InfeasibleHierarchy,
                  "infeasible hierarchy at pair ('" + m.labels()[k] + "', '" +
                      m.labels()[culprit] + "'): 1 - |partial|^2 = " +
                      format_double(radicand));
    }
    phi[k] = std::sqrt(std::max(radicand, 0.0));
  }
  return m;
}

EmbeddingMatrix embed_taxonomy(const TaxonomyGraph& g) {
  const std::size_t dim = g.nonmixture_count();
  const auto& leaves = g.leaves();
  std::vector<std::string> nonmixture_names(leaves.size());
  std::transform(leaves.begin(), leaves.end(), nonmixture_names.begin(),
                 render_label);
  nonmixture_names.resize(dim);

  const auto base = embed_by_similarity(
      nonmixture_names, [&](std::size_t i, std::size_t j) {
        return lca_similarity(g, leaves[i], leaves[j]);
      });

  EmbeddingMatrix m(dim, g.leaf_names());
  for (std::size_t k = 0; k < dim; ++k) {
    std::copy_n(base.column(k).begin(), dim, m.column(k).begin());
  }
  for (std::size_t k = dim; k < leaves.size(); ++k) {
    const auto& mix = leaves[k];
    const auto v = mixture_embedding(m, HorizonLabel::simple(mix.first()),
                                     HorizonLabel::simple(mix.second()));
    std::copy(v.begin(), v.end(), m.column(k).begin());
  }
  return m;
}

std::vector<double> mixture_embedding(const EmbeddingMatrix& m,
                                      const HorizonLabel& first,
                                      const HorizonLabel& second) {
  auto column_of = [&m](const HorizonLabel& parent) {
    const std::string name = render_label(parent);
    auto idx = parent.is_mixture() ? std::nullopt : m.index_of(name);
    if (!idx) {
      throw Error(ErrorCode::ParentNotEmbedded,
                  "mixture parent '" + name + "' is not an embedded non-mixture label");
    }
    return m.column(*idx);
  };
  const auto p1 = column_of(first);
  const auto p2 = column_of(second);
  if (main_symbol(first) == main_symbol(second)) {
    throw Error(ErrorCode::SameMainSymbol,
                "mixture parents '" + render_label(first) + "' and '" +
                    render_label(second) + "' share a main symbol");
  }
  std::vector<double> v(m.dim());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = p1[i] / 3.0 + 2.0 * p2[i] / 3.0;
  }
  const double norm = std::sqrt(dot(v, v));
  for (double& x : v) x /= norm;
  return v;
}

IdentityReport verify_identities(const EmbeddingMatrix& m,
                                 const TaxonomyGraph& g, double tol) {
  const std::size_t n = m.size();
  std::vector<HorizonLabel> labels;
  labels.reserve(n);
  for (const auto& name : m.labels()) {
    auto idx = g.leaf_index(name);
    if (!idx) {
      throw Error(ErrorCode::LabelNotInTaxonomy,
                  "embedding label '" + name + "' is not in the taxonomy");
    }
    labels.push_back(g.leaves()[*idx]);
  }

  const auto gram = kernels::omp::gram(m.view());
  std::map<PairCase, CaseDeviation> by_case;
  IdentityReport report;
  for (std::size_t i = 0; i < n; ++i) {
    report.max_norm_deviation = std::max(
        report.max_norm_deviation, std::abs(std::sqrt(gram[i * n + i]) - 1.0));
    for (std::size_t j = i; j < n; ++j) {
      const PairCase c = classify_pair(labels[i], labels[j]);
      const double dev =
          std::abs(gram[i * n + j] - required_similarity(g, labels[i], labels[j]));
      auto& entry = by_case.try_emplace(c, CaseDeviation{c}).first->second;
      ++entry.pairs;
      entry.max_deviation = std::max(entry.max_deviation, dev);
      report.max_deviation = std::max(report.max_deviation, dev);
      if (!labels[i].is_mixture() && !labels[j].is_mixture()) {
        report.max_nonmixture_deviation =
            std::max(report.max_nonmixture_deviation, dev);
      }
      ++report.pairs;
    }
  }
  for (auto& [c, entry] : by_case) report.cases.push_back(entry);
  report.passed = report.max_deviation <= tol && report.max_norm_deviation <= tol;
  return report;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedRecord,
                "not a number: '" + std::string(text) + "'");
  }
  return value;
}

void write_embeddings_csv(const EmbeddingMatrix& m, std::ostream& out) {
  for (std::size_t j = 0; j < m.size(); ++j) {
    out << (j ? "," : "") << m.labels()[j];
  }
  out << '\n';
  for (std::size_t r = 0; r < m.dim(); ++r) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      out << (j ? "," : "") << format_double(m(r, j));
    }
    out << '\n';
  }
}

void write_embeddings_json(const EmbeddingMatrix& m, std::ostream& out) {
  out << "{\n";
  for (std::size_t j = 0; j < m.size(); ++j) {
    out << "  " << nlohmann::json(m.labels()[j]).dump() << ": [";
    const auto col = m.column(j);
    for (std::size_t r = 0; r < col.size(); ++r) {
      out << (r ? ", " : "") << format_double(col[r]);
    }
    out << (j + 1 < m.size() ? "],\n" : "]\n");
  }
  out << "}\n";
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  for (std::size_t pos; (pos = line.find(',')) != std::string_view::npos;) {
    out.push_back(line.substr(0, pos));
    line.remove_prefix(pos + 1);
  }
  out.push_back(line);
  return out;
}

}  // namespace

EmbeddingMatrix read_embeddings_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::MalformedRecord, "embedding CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> labels;
  for (auto field : split_commas(line)) labels.emplace_back(field);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_commas(line);
    if (fields.size() != labels.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "embedding CSV row " + std::to_string(rows.size() + 1) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(labels.size()));
    }
    auto& row = rows.emplace_back();
    for (auto f : fields) row.push_back(parse_double(f));
  }
  EmbeddingMatrix m(rows.size(), std::move(labels));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < m.size(); ++j) m.column(j)[r] = rows[r][j];
  }
  return m;
}

EmbeddingMatrix read_embeddings_json(std::istream& in) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("embedding JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.empty()) {
    throw Error(ErrorCode::MalformedRecord, "embedding JSON must be a non-empty object");
  }
  std::vector<std::string> labels;
  std::size_t dim = doc.begin().value().size();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_array() || it.value().size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "embedding of '" + it.key() + "' has the wrong length");
    }
    labels.push_back(it.key());
  }
  EmbeddingMatrix m(dim, std::move(labels));
  std::size_t j = 0;
  for (auto it = doc.begin(); it != doc.end(); ++it, ++j) {
    for (std::size_t r = 0; r < dim; ++r) {
      m.column(j)[r] = it.value()[r].get<double>();
    }
  }
  return m;
}

EmbeddingMatrix load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open embeddings '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return read_embeddings_json(in);
  }
  return read_embeddings_csv(in);
}

}  // namespace htk
