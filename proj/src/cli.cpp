#include "htk/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "htk/cluster.hpp"
#include "htk/decode.hpp"
#include "htk/embed.hpp"
#include "htk/error.hpp"
#include "htk/evaluate.hpp"
#include "htk/kernels.hpp"
#include "htk/simgen.hpp"
#include "htk/taxonomy_file.hpp"

namespace htk {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return in;
}

/// Any failure while loading the taxonomy is a configuration error.
TaxonomyConfig load_taxonomy(const std::string& path) {
  try {
    return load_taxonomy_config(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
}

std::optional<std::uint64_t> seed_from_env() {
  const char* value = std::getenv("HTK_SEED");
  if (!value || !*value) return std::nullopt;
  std::uint64_t seed = 0;
  const std::string_view text(value);
  auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidConfig, "HTK_SEED is not an unsigned integer");
  }
  return seed;
}

nlohmann::json read_json_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "'" + path + "': " + e.what());
  }
}

std::vector<std::string> read_id_list(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

// ---- parse ---------------------------------------------------------------

struct ParseArgs {
  std::string taxonomy;
  std::vector<std::string> labels;
};

int cmd_parse(const ParseArgs& args, std::ostream& out, std::ostream& err) {
  const auto config = load_taxonomy(args.taxonomy);
  const ModifierRules* rules = config.rules.empty() ? nullptr : &config.rules;
  int status = 0;
  for (const auto& text : args.labels) {
    try {
      const auto label = parse_label(text, config.alphabet, rules);
      nlohmann::ordered_json j;
      if (label.is_mixture()) {
        j["kind"] = "mixture";
        j["first"] = label.first().str();
        j["second"] = label.second().str();
      } else {
        j["kind"] = "simple";
        j["label"] = label.first().str();
        j["prefix"] = label.first().prefix;
        j["main"] = std::string(1, label.first().main);
        j["suffix"] = label.first().suffix;
      }
      out << j.dump() << '\n';
    } catch (const Error& e) {
      err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
      status = std::max(status, exit_status(e.code()));
    }
  }
  return status;
}

// ---- embed ---------------------------------------------------------------

struct EmbedArgs {
  std::string taxonomy;
  std::string out;
  std::string format;
  bool verify = false;
  double tol = 1e-9;
};

int cmd_embed(const EmbedArgs& args, std::ostream& out, std::ostream& err) {
  const auto graph = load_taxonomy(args.taxonomy).build();
  const auto m = embed_taxonomy(graph);
  std::string format = args.format;
  if (format.empty()) {
    format = fs::path(args.out).extension() == ".json" ? "json" : "csv";
  }
  {
    auto file = open_out(args.out);
    if (format == "json") {
      write_embeddings_json(m, file);
    } else {
      write_embeddings_csv(m, file);
    }
  }
  const auto report = verify_identities(m, graph, args.tol);
  out << "shape: " << m.dim() << " x " << m.size() << '\n';
  out << "max gram deviation: " << format_double(report.max_nonmixture_deviation) << '\n';
  out << "max identity deviation: " << format_double(report.max_deviation) << '\n';
  out << "max norm deviation: " << format_double(report.max_norm_deviation) << '\n';
  if (args.verify) {
    for (const auto& c : report.cases) {
      out << "case " << case_id(c.pair_case) << ": " << c.pairs
          << " pairs, max deviation " << format_double(c.max_deviation) << '\n';
    }
    if (!report.passed) {
      err << "error: identity check failed at tolerance " << format_double(args.tol) << '\n';
      return 3;
    }
    out << "verify: ok\n";
  }
  return 0;
}

// ---- cluster -------------------------------------------------------------

struct ClusterArgs {
  std::string counts;
  long long threshold = 10;
  std::string overrides;
  std::string out;
};

int cmd_cluster(const ClusterArgs& args, std::ostream& out, std::ostream&) {
  LabelCounts counts;
  {
    auto in = open_in(args.counts);
    counts = normalize_counts(read_counts_csv(in));
  }
  OverridePairs overrides;
  if (!args.overrides.empty()) {
    auto in = open_in(args.overrides);
    for (auto& [source, target] : read_overrides_csv(in)) {
      overrides.emplace_back(normalize_mixture_operators(source),
                             normalize_mixture_operators(target));
    }
  }
  const auto map = build_cluster_map(counts, args.threshold, overrides);
  {
    auto file = open_out(args.out);
    map.write_json(file);
  }
  out << "retained " << map.retained().size() << " of " << counts.size()
      << " labels; mapped " << map.mapping().size() << " rare labels\n";
  return 0;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
  std::string samples;
  std::string embeddings;
  std::string taxonomy;
  std::vector<std::size_t> ks{1, 5};
  std::string out;
  int jobs = 0;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream&) {
  if (args.jobs > 0) kernels::set_threads(args.jobs);
  const auto graph = load_taxonomy(args.taxonomy).build();
  std::optional<EmbeddingMatrix> m;
  if (!args.embeddings.empty()) m = load_embeddings(args.embeddings);
  std::vector<EvalSample> samples;
  {
    auto in = open_in(args.samples);
    samples = read_samples_jsonl(in);
  }
  for (std::size_t k : args.ks) {
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  }
  const auto report = evaluate(samples, m ? &*m : nullptr, graph, args.ks);
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (args.out.empty() || args.out == "-") {
    out << text;
  } else {
    auto file = open_out(args.out);
    file << text;
    out << "evaluated " << report.samples << " profiles, " << report.horizons
        << " horizons\n";
  }
  return 0;
}

// ---- generate ------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string taxonomy;
  std::string out;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream&) {
  const auto doc = read_json_file(args.config);
  auto config = GeneratorConfig::from_json(doc);
  if (auto seed = seed_from_env()) config.seed = *seed;
  std::string taxonomy = args.taxonomy;
  if (taxonomy.empty()) {
    if (!doc.contains("taxonomy")) {
      throw Error(ErrorCode::InvalidConfig,
                  "no taxonomy given (use --taxonomy or a \"taxonomy\" config key)");
    }
    taxonomy = (fs::path(args.config).parent_path() / doc["taxonomy"].get<std::string>()).string();
  }
  const auto graph = load_taxonomy(taxonomy).build();
  const auto records = generate(config, graph);
  auto file = open_out(args.out);
  write_records_jsonl(records, file);
  out << "generated " << records.size() << " profiles (seed " << config.seed << ")\n";
  return 0;
}

// ---- split ---------------------------------------------------------------

struct SplitArgs {
  std::string records;
  std::vector<double> fractions{0.6, 0.2, 0.2};
  std::uint64_t seed = 7;
  std::string out_dir;
};

int cmd_split(const SplitArgs& args, std::ostream& out, std::ostream&) {
  if (args.fractions.size() != 3) {
    throw Error(ErrorCode::InvalidConfig, "--fractions needs three values");
  }
  std::vector<ProfileRecord> records;
  {
    auto in = open_in(args.records);
    records = read_records_jsonl(in);
  }
  const std::uint64_t seed = seed_from_env().value_or(args.seed);
  const auto split = stratified_split(
      records, {args.fractions[0], args.fractions[1], args.fractions[2]}, seed);
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + args.out_dir + "'");
  const std::pair<const char*, const std::vector<std::size_t>*> parts[] = {
      {"train.txt", &split.train}, {"val.txt", &split.val}, {"test.txt", &split.test}};
  for (const auto& [name, indices] : parts) {
    auto file = open_out((fs::path(args.out_dir) / name).string());
    for (std::size_t i : *indices) file << records[i].id << '\n';
  }
  out << "split " << records.size() << " profiles into " << split.train.size() << "/"
      << split.val.size() << "/" << split.test.size() << "; max label frequency deviation "
      << format_double(max_split_deviation(records, split)) << '\n';
  return 0;
}

// ---- decode --------------------------------------------------------------

struct DecodeArgs {
  std::string embeddings;
  std::string vectors;
  std::string out;
  std::size_t top = 0;
  int jobs = 0;
};

int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream&) {
  if (args.jobs > 0) kernels::set_threads(args.jobs);
  const auto m = load_embeddings(args.embeddings);
  std::vector<DecodeItem> items;
  {
    auto in = open_in(args.vectors);
    items = read_vectors_jsonl(in);
  }
  std::vector<double> batch;
  for (const auto& item : items) {
    if (item.vector.size() != m.dim()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "vector '" + item.id + "' has length " + std::to_string(item.vector.size()) +
                      ", embeddings have dimension " + std::to_string(m.dim()));
    }
    batch.insert(batch.end(), item.vector.begin(), item.vector.end());
  }
  const auto predictions = batch.empty() ? std::vector<Prediction>{} : rank_batch(m, batch);
  if (args.out.empty() || args.out == "-") {
    write_rankings_jsonl(m, items, predictions, args.top, out);
  } else {
    auto file = open_out(args.out);
    write_rankings_jsonl(m, items, predictions, args.top, file);
    out << "decoded " << items.size() << " vectors\n";
  }
  return 0;
}

// ---- baseline ------------------------------------------------------------

struct BaselineArgs {
  std::string records;
  std::string split_dir;
  std::string embeddings;
  std::string config;
  std::uint64_t seed = 7;
  std::string out;
};

int cmd_baseline(const BaselineArgs& args, std::ostream& out, std::ostream&) {
  std::vector<ProfileRecord> records;
  {
    auto in = open_in(args.records);
    records = read_records_jsonl(in);
  }
  std::map<std::string, const ProfileRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  auto select = [&](const char* name) {
    std::vector<ProfileRecord> chosen;
    for (const auto& id : read_id_list((fs::path(args.split_dir) / name).string())) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw Error(ErrorCode::InvalidConfig, std::string(name) + " lists unknown id '" + id + "'");
      }
      chosen.push_back(*it->second);
    }
    return chosen;
  };
  const auto train = select("train.txt");
  const auto test = select("test.txt");

  GeneratorConfig gen;
  if (!args.config.empty()) gen = GeneratorConfig::from_json(read_json_file(args.config));
  for (const auto& rec : records) {
    for (const auto& row : rec.categorical) {
      for (std::size_t f = 0; f < kCategoricalFeatures; ++f) {
        if (row[f] >= gen.categorical_classes[f]) {
          throw Error(ErrorCode::InvalidConfig,
                      "record " + rec.id + " has " + kCategoricalNames[f] +
                          " class beyond the configured class count");
        }
      }
    }
  }
  const auto m = load_embeddings(args.embeddings);
  const std::uint64_t seed = seed_from_env().value_or(args.seed);
  const auto depth = AverageDepthBaseline::fit(train);
  const auto samples = baseline_samples(test, depth, m.dim(), gen.categorical_classes, seed);
  auto file = open_out(args.out);
  write_samples_jsonl(samples, file);
  out << "baseline depth markers:";
  for (double d : depth.markers().markers()) out << ' ' << format_double(d);
  out << "\nwrote " << samples.size() << " samples\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"htk: horizon label taxonomy toolkit"};
  app.name("htk");
  app.require_subcommand(1);

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse and normalize horizon labels");
  parse->add_option("--taxonomy", parse_args.taxonomy, "Taxonomy JSON file")->required();
  parse->add_option("labels", parse_args.labels, "Label strings")->required();

  EmbedArgs embed_args;
  auto* embed = app.add_subcommand("embed", "Compute the label embedding matrix");
  embed->add_option("--taxonomy", embed_args.taxonomy, "Taxonomy JSON file")->required();
  embed->add_option("--out", embed_args.out, "Output file")->required();
  embed->add_option("--format", embed_args.format, "csv or json (default: by extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  embed->add_flag("--verify", embed_args.verify, "Check all pairwise identities");
  embed->add_option("--tol", embed_args.tol, "Verification tolerance");

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "Map rare labels onto retained labels");
  cluster->add_option("--counts", cluster_args.counts, "label,count CSV")->required();
  cluster->add_option("--threshold", cluster_args.threshold, "Retain labels with more samples");
  cluster->add_option("--overrides", cluster_args.overrides, "source,target CSV");
  cluster->add_option("--out", cluster_args.out, "Cluster map JSON")->required();

  EvaluateArgs eval_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute the evaluation report");
  evaluate_cmd->add_option("--samples", eval_args.samples, "Samples JSON lines")->required();
  evaluate_cmd->add_option("--embeddings", eval_args.embeddings, "Embedding CSV/JSON");
  evaluate_cmd->add_option("--taxonomy", eval_args.taxonomy, "Taxonomy JSON file")->required();
  evaluate_cmd->add_option("--k", eval_args.ks, "Cutoffs for @k metrics")->delimiter(',');
  evaluate_cmd->add_option("--out", eval_args.out, "Report JSON (default: stdout)");
  evaluate_cmd->add_option("--jobs", eval_args.jobs, "Worker threads");

  GenerateArgs gen_args;
  auto* generate_cmd = app.add_subcommand("generate", "Generate synthetic profiles");
  generate_cmd->add_option("--config", gen_args.config, "Generator config JSON")->required();
  generate_cmd->add_option("--taxonomy", gen_args.taxonomy, "Taxonomy JSON file");
  generate_cmd->add_option("--out", gen_args.out, "Records JSON lines")->required();

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Stratified train/val/test split");
  split->add_option("--records", split_args.records, "Records JSON lines")->required();
  split->add_option("--fractions", split_args.fractions, "train,val,test")->delimiter(',');
  split->add_option("--seed", split_args.seed, "Shuffle seed");
  split->add_option("--out-dir", split_args.out_dir, "Manifest directory")->required();

  DecodeArgs decode_args;
  auto* decode = app.add_subcommand("decode", "Rank labels for embedding vectors");
  decode->add_option("--embeddings", decode_args.embeddings, "Embedding CSV/JSON")->required();
  decode->add_option("--vectors", decode_args.vectors, "Vectors JSON lines")->required();
  decode->add_option("--out", decode_args.out, "Rankings JSON lines (default: stdout)");
  decode->add_option("--top", decode_args.top, "Keep only the best N labels");
  decode->add_option("--jobs", decode_args.jobs, "Worker threads");

  BaselineArgs base_args;
  auto* baseline = app.add_subcommand("baseline", "Baseline predictions for the test split");
  baseline->add_option("--records", base_args.records, "Records JSON lines")->required();
  baseline->add_option("--split-dir", base_args.split_dir, "Manifest directory")->required();
  baseline->add_option("--embeddings", base_args.embeddings, "Embedding CSV/JSON")->required();
  baseline->add_option("--config", base_args.config, "Generator config (class counts)");
  baseline->add_option("--seed", base_args.seed, "Random-label seed");
  baseline->add_option("--out", base_args.out, "Samples JSON lines")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) return cmd_parse(parse_args, out, err);
    if (*embed) return cmd_embed(embed_args, out, err);
    if (*cluster) return cmd_cluster(cluster_args, out, err);
    if (*evaluate_cmd) return cmd_evaluate(eval_args, out, err);
    if (*generate_cmd) return cmd_generate(gen_args, out, err);
    if (*split) return cmd_split(split_args, out, err);
    if (*decode) return cmd_decode(decode_args, out, err);
    if (*baseline) return cmd_baseline(base_args, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_status(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace htk
