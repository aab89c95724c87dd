#include "htk/grammar.hpp"

#include <vector>

#include "htk/error.hpp"

namespace htk {

namespace {

constexpr std::string_view kDegree = "\xC2\xB0";  // '°' in UTF-8

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

[[noreturn]] void malformed(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::MalformedLabel,
              "malformed label '" + std::string(text) + "': " + why);
}

SimpleLabel parse_member(std::string_view member, std::string_view whole,
                         const MainAlphabet& alphabet) {
  if (member.empty()) malformed(whole, "empty mixture member");
  std::size_t main_pos = std::string_view::npos;
  for (std::size_t i = 0; i < member.size(); ++i) {
    const char c = member[i];
    if (is_upper(c)) {
      if (main_pos != std::string_view::npos) {
        malformed(whole, "two main symbols in '" + std::string(member) + "'");
      }
      main_pos = i;
    } else if (!is_lower(c)) {
      malformed(whole, "illegal character '" + std::string(1, c) + "'");
    }
  }
  if (main_pos == std::string_view::npos) {
    malformed(whole, "no uppercase main symbol in '" + std::string(member) + "'");
  }
  SimpleLabel label{std::string(member.substr(0, main_pos)), member[main_pos],
                    std::string(member.substr(main_pos + 1))};
  if (!alphabet.contains(label.main)) {
    throw Error(ErrorCode::UnknownMainSymbol,
                "unknown main symbol '" + std::string(1, label.main) +
                    "' in label '" + std::string(whole) + "'");
  }
  return label;
}

}  // namespace

HorizonLabel HorizonLabel::simple(SimpleLabel label) {
  return HorizonLabel(std::move(label), std::nullopt);
}

HorizonLabel HorizonLabel::mixture(SimpleLabel first, SimpleLabel second) {
  if (first.main == second.main) {
    throw Error(ErrorCode::MalformedLabel,
                "malformed label '" + first.str() + "-" + second.str() +
                    "': mixture members share main symbol '" +
                    std::string(1, first.main) + "'");
  }
  return HorizonLabel(std::move(first), std::move(second));
}

MainAlphabet::MainAlphabet(std::set<char> symbols) {
  for (char c : symbols) insert(c);
}

MainAlphabet::MainAlphabet(std::string_view symbols) {
  for (char c : symbols) insert(c);
}

void MainAlphabet::insert(char c) {
  if (!is_upper(c)) {
    throw Error(ErrorCode::InvalidConfig,
                "main symbol must be an uppercase letter, got '" +
                    std::string(1, c) + "'");
  }
  symbols_.insert(c);
}

bool ModifierRules::allows(const SimpleLabel& label) const {
  if (auto it = forbidden_prefixes.find(label.main);
      it != forbidden_prefixes.end() && it->second.count(label.prefix)) {
    return false;
  }
  if (auto it = forbidden_suffixes.find(label.main);
      it != forbidden_suffixes.end() && it->second.count(label.suffix)) {
    return false;
  }
  return true;
}

std::string normalize_mixture_operators(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.substr(i, kDegree.size()) == kDegree) {
      out.push_back('-');
      i += kDegree.size() - 1;
    } else if (text[i] == '+') {
      out.push_back('-');
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

HorizonLabel parse_label(std::string_view text, const MainAlphabet& alphabet,
                         const ModifierRules* rules) {
  if (text.empty()) malformed(text, "empty string");
  const std::string normalized = normalize_mixture_operators(text);

  std::vector<std::string_view> members;
  std::string_view rest = normalized;
  for (std::size_t pos; (pos = rest.find('-')) != std::string_view::npos;) {
    members.push_back(rest.substr(0, pos));
    rest.remove_prefix(pos + 1);
  }
  members.push_back(rest);
  if (members.size() > 2) malformed(text, "more than one mixture operator");

  std::vector<SimpleLabel> parsed;
  for (auto member : members) {
    parsed.push_back(parse_member(member, text, alphabet));
    if (rules && !rules->allows(parsed.back())) {
      malformed(text, "modifier combination '" + parsed.back().str() +
                          "' is forbidden by the rule table");
    }
  }
  if (parsed.size() == 1) return HorizonLabel::simple(std::move(parsed[0]));
  return HorizonLabel::mixture(std::move(parsed[0]), std::move(parsed[1]));
}

std::string render_label(const HorizonLabel& label) {
  if (!label.is_mixture()) return label.first().str();
  return label.first().str() + "-" + label.second().str();
}

char main_symbol(const HorizonLabel& label) noexcept {
  return label.is_mixture() ? label.second().main : label.first().main;
}

std::optional<char> guess_main_symbol(std::string_view text) noexcept {
  for (auto it = text.rbegin(); it != text.rend(); ++it) {
    if (is_upper(*it)) return *it;
  }
  return std::nullopt;
}

}  // namespace htk
