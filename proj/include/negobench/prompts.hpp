#pragma once

// Prompt rendering from an external template directory. Templates use
// square-bracket uppercase placeholders ([HISTORY], [WINDOW SIZE], ...).
//
//   <dir>/variations/variation_<1..6>.txt   round prompts for the six presets
//   <dir>/fragments.json                    pieces for non-preset flag sets
//   <dir>/incentives/<kind>.txt             negotiation guideline block
//   <dir>/incentives/<kind>_context.txt     role paragraph in the global context
//   <dir>/turns/{opening,final}.txt         p1's first and final turn preambles
//   <dir>/single_agent/{one_call,six_calls}.txt

#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "negobench/game.hpp"

namespace negobench {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CoTConfig {
  bool prev_deals_calc = false;
  bool others_prefs = false;
  bool candidates = false;
  bool selection = false;
  bool planning = false;

  friend bool operator==(const CoTConfig&, const CoTConfig&) = default;
};

// Reasoning presets 1..6. Throws std::out_of_range for other rows.
CoTConfig cot_preset(int row);
// Row whose flags equal cot, if any.
std::optional<int> cot_preset_row(const CoTConfig& cot);

struct HistoryWindow {
  std::size_t size = 6;
  std::deque<std::pair<std::string, std::string>> entries;  // (speaker name, public text), oldest first

  void push(std::string speaker, std::string text);
};

enum class SingleAgentMode { kOneCall, kSixCalls };

std::string_view to_string(SingleAgentMode mode);

// Single pass: substituted values are never rescanned. Unknown placeholders
// are left untouched.
std::string substitute(std::string_view text, const std::map<std::string, std::string>& values);

class TemplateSet {
 public:
  static TemplateSet load(const std::filesystem::path& dir);

  const std::string& variation(int row) const;
  const std::string& fragment(const std::string& key) const;
  const std::string& incentive(IncentiveKind kind) const;
  const std::string& incentive_context(IncentiveKind kind) const;
  const std::string& opening() const { return opening_; }
  const std::string& final_turn() const { return final_; }
  const std::string& single_agent(SingleAgentMode mode) const;

 private:
  std::map<int, std::string> variations_;
  std::map<std::string, std::string> fragments_;
  std::map<IncentiveKind, std::string> incentives_;
  std::map<IncentiveKind, std::string> incentive_contexts_;
  std::string opening_;
  std::string final_;
  std::string one_call_;
  std::string six_calls_;
};

std::string render_global_context(const TemplateSet& templates, const GameConfig& config, PartyIndex party);

std::string render_history(const HistoryWindow& window);

// Round prompt for the flag set. Preset flag sets use their variation file;
// other valid sets are composed from fragments. Throws TemplateError when
// candidates are enabled without selection.
std::string render_round_prompt(const TemplateSet& templates, const GameConfig& config, PartyIndex party,
                                const HistoryWindow& window, const std::optional<std::string>& prev_plan,
                                const CoTConfig& cot);

// Fragment composition only; equals the variation file for preset flags.
std::string compose_round_template(const TemplateSet& templates, const CoTConfig& cot);

enum class TurnKind { kOpening, kRound, kFinal };

std::string_view to_string(TurnKind kind);

// Opening/final preamble (p1 only) followed by the round prompt.
std::string render_turn_prompt(const TemplateSet& templates, const GameConfig& config, PartyIndex party,
                               TurnKind kind, const HistoryWindow& window,
                               const std::optional<std::string>& prev_plan, const CoTConfig& cot);

// round is 1-based; prior_reasoning only for six_calls after round 1.
std::string render_single_agent_prompt(const TemplateSet& templates, const GameConfig& config,
                                       SingleAgentMode mode, int round,
                                       const std::optional<std::string>& prior_reasoning);

}  // namespace negobench
