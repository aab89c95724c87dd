#pragma once

// Horizon label grammar: [prefix]MAIN[suffix], or two such labels joined by a
// mixture operator ('+', '-' or '°'). Mixtures are always normalized to '-'.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace htk {

struct SimpleLabel {
  std::string prefix;
  char main = 'A';
  std::string suffix;

  std::string str() const { return prefix + main + suffix; }

  auto operator<=>(const SimpleLabel&) const = default;
};

class HorizonLabel {
 public:
  static HorizonLabel simple(SimpleLabel label);
  /// Throws MalformedLabel when both members share a main symbol.
  static HorizonLabel mixture(SimpleLabel first, SimpleLabel second);

  bool is_mixture() const noexcept { return second_.has_value(); }

  /// The label itself for simple labels, the first member for mixtures.
  const SimpleLabel& first() const noexcept { return first_; }
  /// Second (dominant) member. Only valid for mixtures.
  const SimpleLabel& second() const { return second_.value(); }

  auto operator<=>(const HorizonLabel&) const = default;

 private:
  HorizonLabel(SimpleLabel first, std::optional<SimpleLabel> second)
      : first_(std::move(first)), second_(std::move(second)) {}

  SimpleLabel first_;
  std::optional<SimpleLabel> second_;
};

/// Set of admissible uppercase main symbols. Loaded from the taxonomy file.
class MainAlphabet {
 public:
  MainAlphabet() = default;
  explicit MainAlphabet(std::set<char> symbols);
  explicit MainAlphabet(std::string_view symbols);

  bool contains(char c) const { return symbols_.count(c) != 0; }
  bool empty() const { return symbols_.empty(); }
  const std::set<char>& symbols() const { return symbols_; }
  void insert(char c);

 private:
  std::set<char> symbols_;
};

/// Optional table of forbidden modifier/main-symbol combinations, e.g. the
/// prefix "a" before main symbol B. Modifiers are matched as whole strings.
struct ModifierRules {
  std::map<char, std::set<std::string>> forbidden_prefixes;
  std::map<char, std::set<std::string>> forbidden_suffixes;

  bool empty() const {
    return forbidden_prefixes.empty() && forbidden_suffixes.empty();
  }
  bool allows(const SimpleLabel& label) const;
};

/// Parses a label string. Throws Error(MalformedLabel) or
/// Error(UnknownMainSymbol).
HorizonLabel parse_label(std::string_view text, const MainAlphabet& alphabet,
                         const ModifierRules* rules = nullptr);

std::string render_label(const HorizonLabel& label);

/// Main symbol used for aggregation; mixtures report their second member.
char main_symbol(const HorizonLabel& label) noexcept;

/// Rewrites '+' and '°' mixture operators to '-' without validating the rest.
std::string normalize_mixture_operators(std::string_view text);

/// Main symbol of an unvalidated label string: the last uppercase ASCII
/// letter, which is the dominant member's main symbol for mixtures.
std::optional<char> guess_main_symbol(std::string_view text) noexcept;

}  // namespace htk
