#pragma once

// Scorable multi-party, multi-issue negotiation game: parties, issues, score
// tables, thresholds, and the integer scoring/acceptability arithmetic.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace negobench {

using Score = std::int64_t;

// 1-based party index, matching the p1..pn notation.
using PartyIndex = std::size_t;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class NotationError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUnknownIssue, kOutOfRange, kDuplicate, kPartial };
  NotationError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct IssueSpec {
  char id = 'A';
  std::string label;
  int option_count = 0;
  std::vector<std::string> option_labels;  // empty or option_count entries
  std::string context;                     // background text shown to every party
};

enum class IncentiveKind {
  kCooperative,
  kGreedy,
  kAdversarialTargeted,
  kAdversarialUntargeted,
};

struct Incentive {
  IncentiveKind kind = IncentiveKind::kCooperative;
  std::optional<PartyIndex> target;  // only for kAdversarialTargeted
};

std::string_view to_string(IncentiveKind kind);
IncentiveKind incentive_kind_from_string(std::string_view text);

struct PartySpec {
  std::string name;
  std::string description;  // public role, visible to everyone
  PartyIndex index = 0;
  std::vector<std::vector<Score>> score_table;  // [issue][option]
  Score threshold = 0;
  Score batna = 0;
  bool veto = false;
  bool is_p1 = false;
  Incentive incentive;
};

// One option per issue, stored as 1-based option indices in issue order.
class Deal {
 public:
  Deal() = default;
  explicit Deal(std::vector<int> choices) : choices_(std::move(choices)) {}

  int choice(std::size_t issue_position) const { return choices_.at(issue_position); }
  void set_choice(std::size_t issue_position, int option) { choices_.at(issue_position) = option; }
  const std::vector<int>& choices() const { return choices_; }
  std::size_t size() const { return choices_.size(); }

  friend bool operator==(const Deal&, const Deal&) = default;
  friend auto operator<=>(const Deal&, const Deal&) = default;

 private:
  std::vector<int> choices_;
};

struct GameConfig {
  std::string name;
  std::string global_instructions;  // optional free-text preamble
  std::vector<PartySpec> parties;
  std::vector<IssueSpec> issues;
  Deal initial_deal;
  int rounds = 4;
  Score p1_bonus = 10;
  std::size_t success_quorum = 0;  // 0 in a raw file means n_parties - 1

  std::size_t party_count() const { return parties.size(); }
  const PartySpec& party(PartyIndex index) const;
  PartyIndex p1() const;
  PartyIndex p2() const;
  std::optional<std::size_t> issue_position(char id) const;
  std::uint64_t deal_count() const;
};

// Throws ConfigError naming the offending field. Returns the input on success.
const GameConfig& validate_config(const GameConfig& config);

void validate_deal(const GameConfig& config, const Deal& deal);

Score deal_score(const GameConfig& config, const Deal& deal, PartyIndex party);

// Equality with the threshold counts as acceptable.
bool is_acceptable(const GameConfig& config, const Deal& deal, PartyIndex party);

std::vector<Score> party_scores(const GameConfig& config, const Deal& deal);
std::vector<bool> votes(const GameConfig& config, const Deal& deal);

// "A1, B3, C2" style rendering; issue order follows the config.
std::string deal_notation(const GameConfig& config, const Deal& deal);

// Case-insensitive, whitespace tolerant. Throws NotationError.
Deal parse_notation(std::string_view text, const GameConfig& config);

// JSON game file I/O.
GameConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const GameConfig& config);
GameConfig load_config(const std::filesystem::path& path);

// Directory layout used by the original benchmark release (config.txt,
// scores_files/<role>.txt, optional initial_deal.txt and
// global_instructions.txt). See docs/game_format.md.
GameConfig load_benchmark_directory(const std::filesystem::path& dir);

}  // namespace negobench
