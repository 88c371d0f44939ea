#include "negobench/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace negobench {

namespace {

std::string read_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError("missing template file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

constexpr IncentiveKind kAllIncentives[] = {IncentiveKind::kCooperative, IncentiveKind::kGreedy,
                                            IncentiveKind::kAdversarialTargeted,
                                            IncentiveKind::kAdversarialUntargeted};

std::string target_name(const GameConfig& config, const PartySpec& party) {
  return party.incentive.target ? config.party(*party.incentive.target).name : std::string();
}

}  // namespace

CoTConfig cot_preset(int row) {
  //                 calc   others candid select plan
  switch (row) {
    case 1: return {false, false, false, false, false};
    case 2: return {true, true, true, true, true};
    case 3: return {true, true, false, true, true};
    case 4: return {true, true, false, true, false};
    case 5: return {false, true, false, true, true};
    case 6: return {false, false, false, true, true};
  }
  throw std::out_of_range("CoT preset rows are 1..6, got " + std::to_string(row));
}

std::optional<int> cot_preset_row(const CoTConfig& cot) {
  for (int row = 1; row <= 6; ++row) {
    if (cot_preset(row) == cot) return row;
  }
  return std::nullopt;
}

void HistoryWindow::push(std::string speaker, std::string text) {
  entries.emplace_back(std::move(speaker), std::move(text));
  while (entries.size() > size) entries.pop_front();
}

std::string_view to_string(SingleAgentMode mode) {
  return mode == SingleAgentMode::kOneCall ? "one_call" : "six_calls";
}

std::string_view to_string(TurnKind kind) {
  switch (kind) {
    case TurnKind::kOpening: return "opening";
    case TurnKind::kRound: return "round";
    case TurnKind::kFinal: return "final";
  }
  return "round";
}

std::string substitute(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '[') {
      const auto close = text.find(']', pos + 1);
      if (close != std::string_view::npos) {
        const std::string key(text.substr(pos + 1, close - pos - 1));
        auto it = values.find(key);
        if (it != values.end()) {
          out += it->second;
          pos = close + 1;
          continue;
        }
      }
    }
    out += text[pos++];
  }
  return out;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set;
  for (int row = 1; row <= 6; ++row) {
    set.variations_[row] = read_template(dir / "variations" / ("variation_" + std::to_string(row) + ".txt"));
  }
  std::ifstream fragments(dir / "fragments.json");
  if (!fragments) throw TemplateError("missing template file '" + (dir / "fragments.json").string() + "'");
  try {
    set.fragments_ = nlohmann::json::parse(fragments).get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw TemplateError("fragments.json: " + std::string(e.what()));
  }
  for (IncentiveKind kind : kAllIncentives) {
    const std::string stem(to_string(kind));
    set.incentives_[kind] = read_template(dir / "incentives" / (stem + ".txt"));
    set.incentive_contexts_[kind] = read_template(dir / "incentives" / (stem + "_context.txt"));
  }
  set.opening_ = read_template(dir / "turns" / "opening.txt");
  set.final_ = read_template(dir / "turns" / "final.txt");
  set.one_call_ = read_template(dir / "single_agent" / "one_call.txt");
  set.six_calls_ = read_template(dir / "single_agent" / "six_calls.txt");
  return set;
}

const std::string& TemplateSet::variation(int row) const {
  auto it = variations_.find(row);
  if (it == variations_.end()) throw TemplateError("no variation template for row " + std::to_string(row));
  return it->second;
}

const std::string& TemplateSet::fragment(const std::string& key) const {
  auto it = fragments_.find(key);
  if (it == fragments_.end()) throw TemplateError("fragments.json has no '" + key + "'");
  return it->second;
}

const std::string& TemplateSet::incentive(IncentiveKind kind) const { return incentives_.at(kind); }

const std::string& TemplateSet::incentive_context(IncentiveKind kind) const {
  return incentive_contexts_.at(kind);
}

const std::string& TemplateSet::single_agent(SingleAgentMode mode) const {
  return mode == SingleAgentMode::kOneCall ? one_call_ : six_calls_;
}

std::string render_global_context(const TemplateSet& templates, const GameConfig& config, PartyIndex index) {
  const PartySpec& self = config.party(index);
  const PartySpec& p1 = config.party(config.p1());
  const PartySpec& p2 = config.party(config.p2());
  std::ostringstream out;
  if (!config.global_instructions.empty()) out << config.global_instructions << "\n\n";
  out << "You are taking part in the negotiation \"" << config.name << "\" between " << config.party_count()
      << " parties over " << config.issues.size() << " issues.\n\nParties:\n";
  for (const auto& party : config.parties) {
    out << "- " << party.name;
    if (party.is_p1) {
      out << " (main negotiator, veto)";
    } else if (party.veto) {
      out << " (veto)";
    }
    if (!party.description.empty()) out << ": " << party.description;
    out << "\n";
  }
  out << "\nIssues:\n";
  for (const auto& issue : config.issues) {
    out << "Issue " << issue.id;
    if (!issue.label.empty()) out << " (" << issue.label << ")";
    out << ".";
    if (!issue.context.empty()) out << " " << issue.context;
    out << "\n";
    for (int option = 1; option <= issue.option_count; ++option) {
      out << "  " << issue.id << option;
      if (!issue.option_labels.empty()) out << ": " << issue.option_labels[static_cast<std::size_t>(option - 1)];
      out << "\n";
    }
  }
  out << "\nA deal picks exactly one option for every issue. A deal is accepted when at least "
      << config.success_quorum << " of the " << config.party_count() << " parties accept it, including "
      << p1.name << " and " << p2.name << ", who both hold a veto. Voting is automatic: a party accepts a deal "
      << "when the deal's total score for that party meets or exceeds its minimum score. " << p1.name
      << " proposes the first and the final deal, and receives a bonus of " << config.p1_bonus
      << " points if the final deal is accepted by everyone. If no deal is accepted, every party receives "
      << "its BATNA (Best Alternative To a Negotiated Agreement).\n\n";

  out << "You are " << self.name << ".\n";
  out << "Your confidential scores (never reveal them), shown in parentheses:\n";
  for (std::size_t i = 0; i < config.issues.size(); ++i) {
    const auto& issue = config.issues[i];
    out << "Issue " << issue.id << ":";
    for (int option = 1; option <= issue.option_count; ++option) {
      out << (option == 1 ? " " : ", ") << issue.id << option << " ("
          << self.score_table[i][static_cast<std::size_t>(option - 1)] << ")";
    }
    out << "\n";
  }
  out << "Your minimum acceptable score is " << self.threshold << ". Your BATNA is " << self.batna << ".\n";
  if (self.is_p1) {
    out << "The initial deal you will present is " << deal_notation(config, config.initial_deal) << ".\n";
  }
  out << substitute(templates.incentive_context(self.incentive.kind), {{"TARGET", target_name(config, self)}});
  return out.str();
}

std::string render_history(const HistoryWindow& window) {
  std::string out;
  for (const auto& [speaker, text] : window.entries) {
    out += "\n";
    out += speaker;
    out += ": ";
    out += text;
  }
  if (!out.empty()) out += "\n";
  return out;
}

std::string compose_round_template(const TemplateSet& templates, const CoTConfig& cot) {
  if (cot.candidates && !cot.selection) {
    throw TemplateError("CoT candidates require the selection step");
  }
  const auto& f = [&](const char* key) -> const std::string& { return templates.fragment(key); };
  std::string out = f("history");
  if (cot.planning) out += f("prev_plan");
  out += f("turn");
  out += "\n";
  out += cot.prev_deals_calc ? f("scratchpad_calc") : f("scratchpad_plain");
  int step = 0;
  auto add_step = [&](const std::string& text) { out += "\n" + std::to_string(++step) + ") " + text; };
  if (cot.others_prefs) add_step(f("step_others"));
  const std::string& basis = cot.others_prefs ? f("basis_others") : f("basis_history");
  add_step(substitute(cot.candidates ? f("step_proposal_three") : f("step_proposal_single"), {{"BASIS", basis}}));
  if (cot.candidates && cot.selection) add_step(f("step_selection"));
  out += "\n" + f("guidelines");
  out += "\n" + f("format");
  if (cot.planning) out += "\n" + f("plan_instruction");
  return out;
}

std::string render_round_prompt(const TemplateSet& templates, const GameConfig& config, PartyIndex index,
                                const HistoryWindow& window, const std::optional<std::string>& prev_plan,
                                const CoTConfig& cot) {
  const PartySpec& party = config.party(index);
  const auto row = cot_preset_row(cot);
  const std::string body = row ? templates.variation(*row) : compose_round_template(templates, cot);
  const std::string guidelines =
      substitute(templates.incentive(party.incentive.kind), {{"TARGET", target_name(config, party)}});
  return substitute(body, {
                              {"WINDOW SIZE", std::to_string(window.size)},
                              {"HISTORY", render_history(window)},
                              {"LAST PLAN", prev_plan.value_or("")},
                              {"NEGOTIATION GUIDELINES", guidelines},
                          });
}

std::string render_turn_prompt(const TemplateSet& templates, const GameConfig& config, PartyIndex party,
                               TurnKind kind, const HistoryWindow& window,
                               const std::optional<std::string>& prev_plan, const CoTConfig& cot) {
  std::string out;
  if (kind == TurnKind::kOpening) {
    out = substitute(templates.opening(), {{"INITIAL DEAL", deal_notation(config, config.initial_deal)}});
    out += "\n";
  } else if (kind == TurnKind::kFinal) {
    out = templates.final_turn() + "\n";
  }
  return out + render_round_prompt(templates, config, party, window, prev_plan, cot);
}

std::string render_single_agent_prompt(const TemplateSet& templates, const GameConfig& config,
                                       SingleAgentMode mode, int round,
                                       const std::optional<std::string>& prior_reasoning) {
  return substitute(templates.single_agent(mode), {
                                                      {"INITIAL DEAL", deal_notation(config, config.initial_deal)},
                                                      {"ROUND", std::to_string(round)},
                                                      {"TOTAL ROUNDS", "6"},
                                                      {"PRIOR REASONING", prior_reasoning.value_or("")},
                                                  });
}

}  // namespace negobench
