#include "htk/taxonomy_file.hpp"

#include <fstream>

#include "htk/error.hpp"

namespace htk {

namespace {

[[noreturn]] void invalid(const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "taxonomy file: " + why);
}

std::map<char, std::set<std::string>> read_rule_map(const nlohmann::json& doc,
                                                    const char* key) {
  std::map<char, std::set<std::string>> out;
  if (!doc.contains(key)) return out;
  for (const auto& [main, modifiers] : doc.at(key).items()) {
    if (main.size() != 1) invalid(std::string(key) + " keys must be single main symbols");
    for (const auto& m : modifiers) out[main[0]].insert(m.get<std::string>());
  }
  return out;
}

}  // namespace

TaxonomyConfig parse_taxonomy_config(const nlohmann::json& doc) {
  TaxonomyConfig config;
  try {
    if (!doc.is_object()) invalid("top level must be an object");
    const int version = doc.value("schema_version", 0);
    if (version != kTaxonomySchemaVersion) {
      invalid("unsupported schema_version " + std::to_string(version));
    }
    const auto& mains = doc.at("main_symbols");
    if (mains.is_string()) {
      config.alphabet = MainAlphabet(mains.get<std::string>());
    } else {
      for (const auto& m : mains) {
        const auto s = m.get<std::string>();
        if (s.size() != 1) invalid("main symbol '" + s + "' is not a single letter");
        config.alphabet.insert(s[0]);
      }
    }
    if (config.alphabet.empty()) invalid("main_symbols is empty");

    if (doc.contains("modifier_rules")) {
      const auto& rules = doc["modifier_rules"];
      config.rules.forbidden_prefixes = read_rule_map(rules, "forbidden_prefixes");
      config.rules.forbidden_suffixes = read_rule_map(rules, "forbidden_suffixes");
    }

    const std::string order = doc.value("leaf_order", "canonical");
    if (order == "canonical") {
      config.order = LeafOrder::Canonical;
    } else if (order == "as_given") {
      config.order = LeafOrder::AsGiven;
    } else {
      invalid("leaf_order must be 'canonical' or 'as_given'");
    }

    const ModifierRules* rules = config.rules.empty() ? nullptr : &config.rules;
    for (const char* key : {"labels", "mixtures"}) {
      if (!doc.contains(key)) continue;
      for (const auto& s : doc[key]) {
        config.labels.push_back(parse_label(s.get<std::string>(), config.alphabet, rules));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(e.what());
  }
  return config;
}

TaxonomyConfig load_taxonomy_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open taxonomy file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "taxonomy file '" + path + "': " + e.what());
  }
  return parse_taxonomy_config(doc);
}

}  // namespace htk
