#include <sstream>

#include "doctest.h"

#include "helpers.hpp"
#include "htk/error.hpp"
#include "htk/evaluate.hpp"

using namespace htk;

namespace {

EvalSample perfect_sample(const std::string& id) {
  EvalSample s;
  s.id = id;
  s.truth_depths = {0.3, 1.0};
  s.pred_depths = {0.3, 1.0};
  s.truth_labels = {"Ah", "Bv"};
  s.ranked_labels = {{"Ah", "Bv", "Cv"}, {"Bv", "Ah", "Cv"}};
  s.stones_truth = {5, 10};
  s.stones_pred = {5, 10};
  s.categorical.push_back({"humus", {"h1", "h2"}, {{"h1", "h2"}, {"h2", "h1"}}});
  return s;
}

ErrorCode eval_error(const std::vector<EvalSample>& samples, const EmbeddingMatrix* m,
                     const TaxonomyGraph& g) {
  std::vector<std::size_t> ks{1};
  try {
    evaluate(samples, m, g, ks);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("perfect predictions score 100 everywhere") {
  auto g = testing::graph({"Ah", "Bv", "Cv"});
  std::vector<EvalSample> samples{perfect_sample("a"), perfect_sample("b")};
  std::vector<std::size_t> ks{1, 2};
  auto report = evaluate(samples, nullptr, g, ks);
  auto j = report_to_json(report);
  CHECK(j["depth"]["iou"] == 100.0);
  CHECK(j["horizon"]["accuracy"] == 100.0);
  CHECK(j["horizon"]["f1"] == 100.0);
  CHECK(j["horizon"]["aggregated_accuracy"] == 100.0);
  CHECK(j["tabular"]["stones_mse"] == 0.0);
  CHECK(j["tabular"]["categorical"]["humus"]["accuracy"] == 100.0);
  CHECK(report.samples == 2);
  CHECK(report.horizons == 4);
}

TEST_CASE("vector predictions decode through the embeddings") {
  auto g = testing::graph({"Ah", "Bv", "Cv"});
  auto m = embed_taxonomy(g);
  auto s = perfect_sample("v");
  s.ranked_labels.clear();
  for (const auto& l : s.truth_labels) {
    auto col = m.column(*m.index_of(l));
    s.pred_vectors.emplace_back(col.begin(), col.end());
  }
  std::vector<EvalSample> samples{s};
  std::vector<std::size_t> ks{1};
  auto report = evaluate(samples, &m, g, ks);
  CHECK(report.horizon.accuracy == 1.0);
}

TEST_CASE("mismatches name the record") {
  auto g = testing::graph({"Ah", "Bv", "Cv"});
  auto m = embed_taxonomy(g);
  auto s = perfect_sample("broken");
  s.ranked_labels.clear();
  s.pred_vectors = {{1, 0}, {0, 1}};
  std::vector<EvalSample> samples{s};
  CHECK(eval_error(samples, &m, g) == ErrorCode::DimensionMismatch);

  auto t = perfect_sample("short");
  t.ranked_labels.pop_back();
  std::vector<EvalSample> short_samples{t};
  CHECK(eval_error(short_samples, nullptr, g) == ErrorCode::LabelMismatch);
  try {
    std::vector<std::size_t> ks{1};
    evaluate(short_samples, nullptr, g, ks);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("short") != std::string::npos);
  }
}

TEST_CASE("samples round-trip through json lines") {
  std::vector<EvalSample> samples{perfect_sample("a")};
  std::stringstream io;
  write_samples_jsonl(samples, io);
  auto back = read_samples_jsonl(io);
  REQUIRE(back.size() == 1);
  CHECK(back[0].ranked_labels == samples[0].ranked_labels);
  CHECK(back[0].categorical[0].pred == samples[0].categorical[0].pred);
}
