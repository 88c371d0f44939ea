#include "negobench/game.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace negobench {

namespace {

std::string party_field(PartyIndex index, std::string_view field) {
  return "parties[" + std::to_string(index) + "]." + std::string(field);
}

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

}  // namespace

std::string_view to_string(IncentiveKind kind) {
  switch (kind) {
    case IncentiveKind::kCooperative: return "cooperative";
    case IncentiveKind::kGreedy: return "greedy";
    case IncentiveKind::kAdversarialTargeted: return "adversarial_targeted";
    case IncentiveKind::kAdversarialUntargeted: return "adversarial_untargeted";
  }
  return "cooperative";
}

IncentiveKind incentive_kind_from_string(std::string_view text) {
  if (text == "cooperative" || text == "compromising") return IncentiveKind::kCooperative;
  if (text == "greedy") return IncentiveKind::kGreedy;
  if (text == "adversarial_targeted" || text == "targeted") return IncentiveKind::kAdversarialTargeted;
  if (text == "adversarial_untargeted" || text == "untargeted") {
    return IncentiveKind::kAdversarialUntargeted;
  }
  throw ConfigError("incentive", "unknown incentive '" + std::string(text) + "'");
}

const PartySpec& GameConfig::party(PartyIndex index) const {
  if (index == 0 || index > parties.size()) {
    throw ConfigError("party", "party index " + std::to_string(index) + " out of range");
  }
  return parties[index - 1];
}

PartyIndex GameConfig::p1() const {
  for (const auto& p : parties) {
    if (p.is_p1) return p.index;
  }
  throw ConfigError("parties", "no p1 party");
}

PartyIndex GameConfig::p2() const {
  for (const auto& p : parties) {
    if (p.veto && !p.is_p1) return p.index;
  }
  throw ConfigError("parties", "no p2 veto party");
}

std::optional<std::size_t> GameConfig::issue_position(char id) const {
  const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(id)));
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (issues[i].id == upper) return i;
  }
  return std::nullopt;
}

std::uint64_t GameConfig::deal_count() const {
  std::uint64_t total = 1;
  for (const auto& issue : issues) {
    const auto count = static_cast<std::uint64_t>(issue.option_count);
    if (count != 0 && total > std::numeric_limits<std::uint64_t>::max() / count) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= count;
  }
  return total;
}

void validate_deal(const GameConfig& config, const Deal& deal) {
  if (deal.size() != config.issues.size()) {
    throw NotationError(NotationError::Kind::kPartial,
                        "deal has " + std::to_string(deal.size()) + " choices for " +
                            std::to_string(config.issues.size()) + " issues");
  }
  for (std::size_t i = 0; i < deal.size(); ++i) {
    const int option = deal.choice(i);
    if (option < 1 || option > config.issues[i].option_count) {
      throw NotationError(NotationError::Kind::kOutOfRange,
                          std::string(1, config.issues[i].id) + std::to_string(option) +
                              " is out of range");
    }
  }
}

const GameConfig& validate_config(const GameConfig& config) {
  if (config.issues.empty()) throw ConfigError("issues", "at least one issue is required");
  if (config.parties.size() < 2) throw ConfigError("parties", "at least two parties are required");

  std::set<char> ids;
  for (std::size_t i = 0; i < config.issues.size(); ++i) {
    const auto& issue = config.issues[i];
    const std::string field = "issues[" + std::to_string(i) + "]";
    if (issue.id < 'A' || issue.id > 'Z') throw ConfigError(field + ".id", "must be an uppercase letter");
    if (!ids.insert(issue.id).second) {
      throw ConfigError(field + ".id", std::string("duplicate issue id '") + issue.id + "'");
    }
    if (issue.option_count < 2 || issue.option_count > 9) {
      throw ConfigError(field + ".option_count", "must be in 2..9");
    }
    if (!issue.option_labels.empty() &&
        issue.option_labels.size() != static_cast<std::size_t>(issue.option_count)) {
      throw ConfigError(field + ".options", "label count does not match option_count");
    }
  }

  std::size_t p1_count = 0;
  std::size_t veto_count = 0;
  for (std::size_t k = 0; k < config.parties.size(); ++k) {
    const auto& party = config.parties[k];
    const PartyIndex index = k + 1;
    if (party.index != index) throw ConfigError(party_field(index, "index"), "must equal list position");
    if (party.name.empty()) throw ConfigError(party_field(index, "name"), "must not be empty");
    if (party.score_table.size() != config.issues.size()) {
      throw ConfigError(party_field(index, "scores"),
                        "has " + std::to_string(party.score_table.size()) + " rows for " +
                            std::to_string(config.issues.size()) + " issues");
    }
    for (std::size_t i = 0; i < config.issues.size(); ++i) {
      if (party.score_table[i].size() != static_cast<std::size_t>(config.issues[i].option_count)) {
        throw ConfigError(party_field(index, "scores") + "." + config.issues[i].id,
                          "has " + std::to_string(party.score_table[i].size()) + " entries for " +
                              std::to_string(config.issues[i].option_count) + " options");
      }
      for (Score score : party.score_table[i]) {
        if (score < 0) throw ConfigError(party_field(index, "scores") + "." + config.issues[i].id, "must be >= 0");
      }
    }
    if (party.batna < 0) throw ConfigError(party_field(index, "batna"), "must be >= 0");
    if (party.is_p1) {
      ++p1_count;
      if (!party.veto) throw ConfigError(party_field(index, "veto"), "p1 must hold a veto");
    }
    if (party.veto) ++veto_count;
    const auto& incentive = party.incentive;
    if ((incentive.kind == IncentiveKind::kAdversarialTargeted) != incentive.target.has_value()) {
      throw ConfigError(party_field(index, "incentive"), "target is required iff adversarial_targeted");
    }
    if (incentive.target &&
        (*incentive.target == 0 || *incentive.target > config.parties.size() || *incentive.target == index)) {
      throw ConfigError(party_field(index, "incentive.target"), "must name another party");
    }
  }
  if (p1_count != 1) throw ConfigError("parties.p1", "exactly one party must be p1");
  if (veto_count != 2) throw ConfigError("parties.veto", "exactly two parties (p1 and p2) must hold a veto");

  if (config.rounds < 1) throw ConfigError("rounds", "must be at least 1");
  if (config.success_quorum == 0 || config.success_quorum > config.parties.size()) {
    throw ConfigError("success_quorum", "must be in 1..n_parties");
  }
  try {
    validate_deal(config, config.initial_deal);
  } catch (const NotationError& e) {
    throw ConfigError("initial_deal", e.what());
  }
  return config;
}

Score deal_score(const GameConfig& config, const Deal& deal, PartyIndex party) {
  validate_deal(config, deal);
  const auto& table = config.party(party).score_table;
  Score total = 0;
  for (std::size_t i = 0; i < deal.size(); ++i) {
    total += table[i][static_cast<std::size_t>(deal.choice(i) - 1)];
  }
  return total;
}

bool is_acceptable(const GameConfig& config, const Deal& deal, PartyIndex party) {
  return deal_score(config, deal, party) >= config.party(party).threshold;
}

std::vector<Score> party_scores(const GameConfig& config, const Deal& deal) {
  std::vector<Score> scores;
  scores.reserve(config.parties.size());
  for (const auto& p : config.parties) scores.push_back(deal_score(config, deal, p.index));
  return scores;
}

std::vector<bool> votes(const GameConfig& config, const Deal& deal) {
  std::vector<bool> result;
  result.reserve(config.parties.size());
  for (const auto& p : config.parties) result.push_back(is_acceptable(config, deal, p.index));
  return result;
}

std::string deal_notation(const GameConfig& config, const Deal& deal) {
  validate_deal(config, deal);
  std::string out;
  for (std::size_t i = 0; i < deal.size(); ++i) {
    if (i) out += ", ";
    out += config.issues[i].id;
    out += std::to_string(deal.choice(i));
  }
  return out;
}

Deal parse_notation(std::string_view text, const GameConfig& config) {
  std::vector<int> choices(config.issues.size(), 0);
  std::size_t pos = 0;
  auto is_separator = [](char c) {
    return c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  };
  while (pos < text.size()) {
    if (is_separator(text[pos])) {
      ++pos;
      continue;
    }
    const char letter = text[pos];
    if (!std::isalpha(static_cast<unsigned char>(letter))) {
      throw NotationError(NotationError::Kind::kSyntax,
                          "expected an issue letter at offset " + std::to_string(pos));
    }
    ++pos;
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    const std::size_t digits_begin = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (digits_begin == pos) {
      throw NotationError(NotationError::Kind::kSyntax,
                          std::string("missing option index after '") + letter + "'");
    }
    // "A1B2" needs no separator: a letter can only start the next item.
    if (pos < text.size() && !is_separator(text[pos]) && !std::isalpha(static_cast<unsigned char>(text[pos]))) {
      throw NotationError(NotationError::Kind::kSyntax,
                          "unexpected character at offset " + std::to_string(pos));
    }
    const auto issue = config.issue_position(letter);
    if (!issue) {
      throw NotationError(NotationError::Kind::kUnknownIssue,
                          std::string("unknown issue '") + letter + "'");
    }
    const std::string digits(text.substr(digits_begin, pos - digits_begin));
    const int option = digits.size() > 2 ? 100 : std::stoi(digits);
    const auto& spec = config.issues[*issue];
    if (option < 1 || option > spec.option_count) {
      throw NotationError(NotationError::Kind::kOutOfRange,
                          std::string(1, spec.id) + digits + " is out of range 1.." +
                              std::to_string(spec.option_count));
    }
    if (choices[*issue] != 0) {
      throw NotationError(NotationError::Kind::kDuplicate,
                          std::string("issue ") + spec.id + " mentioned twice");
    }
    choices[*issue] = option;
  }
  std::string missing;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (choices[i] == 0) missing += config.issues[i].id;
  }
  if (!missing.empty()) {
    throw NotationError(NotationError::Kind::kPartial, "partial deal, missing issues " + missing);
  }
  return Deal(std::move(choices));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Incentive incentive_from_json(const nlohmann::json& node) {
  Incentive incentive;
  if (node.is_string()) {
    incentive.kind = incentive_kind_from_string(node.get<std::string>());
  } else if (node.is_object()) {
    incentive.kind = incentive_kind_from_string(node.at("kind").get<std::string>());
    if (node.contains("target")) incentive.target = node.at("target").get<PartyIndex>();
  } else {
    throw ConfigError("incentive", "must be a string or an object");
  }
  return incentive;
}

nlohmann::json incentive_to_json(const Incentive& incentive) {
  if (!incentive.target) return std::string(to_string(incentive.kind));
  return {{"kind", to_string(incentive.kind)}, {"target", *incentive.target}};
}

}  // namespace

GameConfig config_from_json(const nlohmann::json& doc) {
  GameConfig config;
  try {
    config.name = doc.value("name", std::string("unnamed"));
    config.global_instructions = doc.value("global_instructions", std::string());
    for (const auto& node : doc.at("issues")) {
      IssueSpec issue;
      const auto id = node.at("id").get<std::string>();
      if (id.size() != 1) throw ConfigError("issues.id", "must be a single letter, got '" + id + "'");
      issue.id = id[0];
      issue.label = node.value("label", std::string());
      issue.context = node.value("context", std::string());
      if (node.contains("options")) issue.option_labels = node.at("options").get<std::vector<std::string>>();
      issue.option_count = node.contains("option_count") ? node.at("option_count").get<int>()
                                                         : static_cast<int>(issue.option_labels.size());
      config.issues.push_back(std::move(issue));
    }
    PartyIndex index = 1;
    for (const auto& node : doc.at("parties")) {
      PartySpec party;
      party.index = index++;
      party.name = node.at("name").get<std::string>();
      party.description = node.value("description", std::string());
      const auto& scores = node.at("scores");
      if (scores.is_array()) {
        party.score_table = scores.get<std::vector<std::vector<Score>>>();
      } else {
        for (const auto& issue : config.issues) {
          const std::string key(1, issue.id);
          if (!scores.contains(key)) continue;
          party.score_table.push_back(scores.at(key).get<std::vector<Score>>());
        }
        if (scores.size() != party.score_table.size()) {
          throw ConfigError(party_field(party.index, "scores"), "names an unknown issue");
        }
      }
      party.threshold = node.at("threshold").get<Score>();
      party.batna = node.contains("batna") ? node.at("batna").get<Score>() : party.threshold;
      party.is_p1 = node.value("p1", false);
      party.veto = node.value("veto", party.is_p1);
      if (node.contains("incentive")) party.incentive = incentive_from_json(node.at("incentive"));
      config.parties.push_back(std::move(party));
    }
    config.rounds = doc.value("rounds", 4);
    config.p1_bonus = doc.value("p1_bonus", Score{10});
    config.success_quorum = doc.value("success_quorum", std::size_t{0});
    if (config.success_quorum == 0 && !config.parties.empty()) {
      config.success_quorum = config.parties.size() - 1;
    }
    const auto& initial = doc.at("initial_deal");
    if (initial.is_string()) {
      config.initial_deal = parse_notation(initial.get<std::string>(), config);
    } else {
      config.initial_deal = Deal(initial.get<std::vector<int>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", e.what());
  } catch (const NotationError& e) {
    throw ConfigError("initial_deal", e.what());
  }
  validate_config(config);
  return config;
}

nlohmann::json config_to_json(const GameConfig& config) {
  nlohmann::json doc;
  doc["name"] = config.name;
  if (!config.global_instructions.empty()) doc["global_instructions"] = config.global_instructions;
  doc["issues"] = nlohmann::json::array();
  for (const auto& issue : config.issues) {
    nlohmann::json node{{"id", std::string(1, issue.id)}, {"label", issue.label},
                        {"option_count", issue.option_count}};
    if (!issue.option_labels.empty()) node["options"] = issue.option_labels;
    if (!issue.context.empty()) node["context"] = issue.context;
    doc["issues"].push_back(std::move(node));
  }
  doc["parties"] = nlohmann::json::array();
  for (const auto& party : config.parties) {
    nlohmann::json scores = nlohmann::json::object();
    for (std::size_t i = 0; i < config.issues.size(); ++i) {
      scores[std::string(1, config.issues[i].id)] = party.score_table[i];
    }
    nlohmann::json node{{"name", party.name},           {"scores", scores},
                        {"threshold", party.threshold}, {"batna", party.batna},
                        {"veto", party.veto},           {"p1", party.is_p1},
                        {"incentive", incentive_to_json(party.incentive)}};
    if (!party.description.empty()) node["description"] = party.description;
    doc["parties"].push_back(std::move(node));
  }
  doc["initial_deal"] = deal_notation(config, config.initial_deal);
  doc["rounds"] = config.rounds;
  doc["p1_bonus"] = config.p1_bonus;
  doc["success_quorum"] = config.success_quorum;
  return doc;
}

GameConfig load_config(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return load_benchmark_directory(path);
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open game config '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("path", path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Original benchmark directory layout.
//
//   config.txt                 one line per party: "<name>, <role>[, <incentive>]"
//                              role is p1, p2, p3, ...; p1 and p2 hold vetoes
//   scores_files/<role>.txt    one comma-separated line of option scores per
//                              issue, then a final line holding the threshold
//   initial_deal.txt           optional deal notation; defaults to option 1 everywhere
//   global_instructions.txt    optional shared preamble

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto trimmed = trim(line);
    if (!trimmed.empty()) lines.push_back(std::move(trimmed));
  }
  return lines;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream stream(line);
  std::string part;
  while (std::getline(stream, part, ',')) parts.push_back(trim(part));
  return parts;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return trim(buffer.str());
}

}  // namespace

GameConfig load_benchmark_directory(const std::filesystem::path& dir) {
  GameConfig config;
  config.name = dir.filename().string();
  const auto rows = read_lines(dir / "config.txt");
  for (const auto& row : rows) {
    const auto fields = split_commas(row);
    if (fields.size() < 2) throw ConfigError("config.txt", "malformed row '" + row + "'");
    PartySpec party;
    party.name = fields[0];
    const std::string role = fields[1];
    party.is_p1 = role == "p1";
    party.veto = role == "p1" || role == "p2";
    if (fields.size() > 2) party.incentive.kind = incentive_kind_from_string(fields[2]);
    const auto score_lines = read_lines(dir / "scores_files" / (role + ".txt"));
    if (score_lines.size() < 2) throw ConfigError("scores_files/" + role, "needs scores and a threshold");
    for (std::size_t i = 0; i + 1 < score_lines.size(); ++i) {
      std::vector<Score> row_scores;
      for (const auto& cell : split_commas(score_lines[i])) row_scores.push_back(std::stoll(cell));
      party.score_table.push_back(std::move(row_scores));
    }
    party.threshold = std::stoll(score_lines.back());
    party.batna = party.threshold;
    config.parties.push_back(std::move(party));
  }
  // p1 first, p2 second, then file order, so party indices match roles.
  std::stable_sort(config.parties.begin(), config.parties.end(), [](const PartySpec& a, const PartySpec& b) {
    auto rank = [](const PartySpec& p) { return p.is_p1 ? 0 : (p.veto ? 1 : 2); };
    return rank(a) < rank(b);
  });
  for (std::size_t k = 0; k < config.parties.size(); ++k) config.parties[k].index = k + 1;
  if (config.parties.empty()) throw ConfigError("config.txt", "no parties");
  for (std::size_t i = 0; i < config.parties.front().score_table.size(); ++i) {
    IssueSpec issue;
    issue.id = static_cast<char>('A' + i);
    issue.label = std::string("Issue ") + issue.id;
    issue.option_count = static_cast<int>(config.parties.front().score_table[i].size());
    config.issues.push_back(std::move(issue));
  }
  config.success_quorum = config.parties.size() - 1;
  if (std::filesystem::exists(dir / "global_instructions.txt")) {
    config.global_instructions = read_text(dir / "global_instructions.txt");
  }
  if (std::filesystem::exists(dir / "initial_deal.txt")) {
    try {
      config.initial_deal = parse_notation(read_text(dir / "initial_deal.txt"), config);
    } catch (const NotationError& e) {
      throw ConfigError("initial_deal", e.what());
    }
  } else {
    config.initial_deal = Deal(std::vector<int>(config.issues.size(), 1));
  }
  validate_config(config);
  return config;
}

}  // namespace negobench
