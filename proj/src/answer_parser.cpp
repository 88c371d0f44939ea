#include "negobench/answer_parser.hpp"

#include <algorithm>
#include <cctype>

namespace negobench {

namespace {

struct TagToken {
  std::string name;
  bool closing = false;
  std::size_t begin = 0;  // offset of '<'
  std::size_t end = 0;    // offset one past '>'
};

bool is_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Uppercase angle-bracket tags: <NAME>, </NAME>, and multi-word <PREV PLAN>.
std::vector<TagToken> tokenize(std::string_view text) {
  std::vector<TagToken> tokens;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    std::size_t cursor = pos + 1;
    bool closing = false;
    if (cursor < text.size() && text[cursor] == '/') {
      closing = true;
      ++cursor;
    }
    const std::size_t name_begin = cursor;
    if (cursor >= text.size() || text[cursor] < 'A' || text[cursor] > 'Z') {
      ++pos;
      continue;
    }
    while (cursor < text.size()) {
      if (is_name_char(text[cursor])) {
        ++cursor;
      } else if (text[cursor] == ' ' && cursor + 1 < text.size() && is_name_char(text[cursor + 1])) {
        ++cursor;
      } else {
        break;
      }
    }
    if (cursor < text.size() && text[cursor] == '>') {
      tokens.push_back({std::string(text.substr(name_begin, cursor - name_begin)), closing, pos, cursor + 1});
      pos = cursor + 1;
    } else {
      ++pos;
    }
  }
  return tokens;
}

bool is_section(std::string_view name) { return name == "ANSWER" || name == "SCRATCHPAD" || name == "PLAN"; }
bool is_known(std::string_view name) { return is_section(name) || name == "DEAL"; }

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

struct OpenTag {
  std::string name;
  std::size_t content_begin = 0;
  bool clean = true;
};

DealLocation location_of(const std::vector<OpenTag>& stack) {
  if (stack.empty()) return DealLocation::kTopLevel;
  const auto& parent = stack.back().name;
  if (parent == "ANSWER") return DealLocation::kAnswer;
  if (parent == "SCRATCHPAD") return DealLocation::kScratchpad;
  return DealLocation::kPlan;
}

}  // namespace

std::vector<std::string> ParsedAnswer::deal_texts() const {
  std::vector<std::string> texts;
  for (const auto& block : deals) texts.push_back(block.text);
  return texts;
}

std::string_view to_string(DealSource source) {
  switch (source) {
    case DealSource::kNone: return "none";
    case DealSource::kDealTag: return "deal_tag";
    case DealSource::kScan: return "scan";
  }
  return "none";
}

ParsedAnswer extract_sections(std::string_view full_text) {
  ParsedAnswer parsed;
  parsed.full_text = std::string(full_text);
  auto& flags = parsed.flags;

  std::vector<OpenTag> stack;
  for (const auto& token : tokenize(full_text)) {
    if (!is_known(token.name)) {
      if (std::ranges::find(flags.hallucinated_tags, token.name) == flags.hallucinated_tags.end()) {
        flags.hallucinated_tags.push_back(token.name);
      }
      continue;
    }
    if (!token.closing) {
      bool clean = true;
      if (!stack.empty()) {
        // Only DEAL may sit inside a section, and nothing may sit inside DEAL.
        if (token.name != "DEAL" || stack.back().name == "DEAL") {
          flags.tag_mismatch = true;
          clean = false;
          stack.back().clean = false;
        }
      }
      stack.push_back({token.name, token.end, clean});
      continue;
    }
    if (!stack.empty() && stack.back().name == token.name) {
      OpenTag open = std::move(stack.back());
      stack.pop_back();
      if (!open.clean) continue;
      std::string content = trim(full_text.substr(open.content_begin, token.begin - open.content_begin));
      if (open.name == "DEAL") {
        parsed.deals.push_back({std::move(content), location_of(stack)});
      } else if (open.name == "ANSWER") {
        if (!parsed.public_text) parsed.public_text = std::move(content);
      } else if (open.name == "SCRATCHPAD") {
        if (!parsed.scratchpad) parsed.scratchpad = std::move(content);
      } else if (!parsed.plan) {
        parsed.plan = std::move(content);
      }
      continue;
    }
    flags.tag_mismatch = true;
    auto match = std::find_if(stack.rbegin(), stack.rend(), [&](const OpenTag& o) { return o.name == token.name; });
    if (match != stack.rend()) {
      // Crossed tags: discard everything opened after the match, and the match.
      stack.erase(std::prev(match.base()), stack.end());
      for (auto& open : stack) open.clean = false;
    }
  }
  if (!stack.empty()) flags.tag_mismatch = true;
  flags.missing_answer_tags = !parsed.public_text.has_value();
  flags.deal_outside_answer = std::ranges::any_of(
      parsed.deals, [](const DealBlock& b) { return b.location != DealLocation::kAnswer; });
  return parsed;
}

DealExtraction extract_deal(const ParsedAnswer& parsed, const GameConfig& config, const ExtractOptions& options) {
  DealExtraction result;

  const DealBlock* chosen = nullptr;
  for (DealLocation wanted : {DealLocation::kAnswer, DealLocation::kTopLevel}) {
    for (const auto& block : parsed.deals) {
      if (block.location != wanted) continue;
      if (!chosen || options.last_deal_wins) chosen = &block;
    }
    if (chosen) break;
  }
  if (chosen) {
    try {
      result.deal = parse_notation(chosen->text, config);
      result.source = DealSource::kDealTag;
      return result;
    } catch (const NotationError& e) {
      if (e.kind() == NotationError::Kind::kPartial) result.partial = true;
    }
  }

  if (parsed.public_text) {
    // Option tokens like "A2" or "b3": one letter, one digit, word-bounded.
    const std::string& text = *parsed.public_text;
    std::vector<int> choices(config.issues.size(), 0);
    bool any = false;
    auto word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
      if (!std::isalpha(static_cast<unsigned char>(text[i])) || !std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        continue;
      }
      if (i > 0 && word_char(text[i - 1])) continue;
      if (i + 2 < text.size() && word_char(text[i + 2])) continue;
      const auto issue = config.issue_position(text[i]);
      if (!issue) continue;
      const int option = text[i + 1] - '0';
      if (option < 1 || option > config.issues[*issue].option_count) continue;
      choices[*issue] = option;
      any = true;
    }
    if (any) {
      if (std::ranges::find(choices, 0) == choices.end()) {
        result.deal = Deal(std::move(choices));
        result.source = DealSource::kScan;
        return result;
      }
      result.partial = true;
    }
  }
  return result;
}

std::string render_answer(std::string_view scratchpad, std::string_view public_text,
                          std::optional<std::string_view> deal, std::string_view plan) {
  std::string out;
  if (!scratchpad.empty()) {
    out += "<SCRATCHPAD>\n";
    out += scratchpad;
    out += "\n</SCRATCHPAD>\n";
  }
  out += "<ANSWER>\n";
  out += public_text;
  if (deal) {
    if (!public_text.empty()) out += ' ';
    out += "<DEAL>";
    out += *deal;
    out += "</DEAL>";
  }
  out += "\n</ANSWER>";
  if (!plan.empty()) {
    out += "\n<PLAN>\n";
    out += plan;
    out += "\n</PLAN>";
  }
  return out;
}

}  // namespace negobench
