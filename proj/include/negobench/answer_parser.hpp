#pragma once

// Splits a raw agent reply into the tag-delimited sections the prompts ask
// for (<SCRATCHPAD>, <ANSWER>, <PLAN>, <DEAL>) and extracts deal proposals.
// Malformed output is reported through flags; parsing never fails.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "negobench/game.hpp"

namespace negobench {

enum class DealLocation { kAnswer, kTopLevel, kScratchpad, kPlan };

struct DealBlock {
  std::string text;
  DealLocation location = DealLocation::kTopLevel;

  friend bool operator==(const DealBlock&, const DealBlock&) = default;
};

struct ParseFlags {
  bool missing_answer_tags = false;
  std::vector<std::string> hallucinated_tags;  // unique, first-seen order
  bool tag_mismatch = false;
  bool deal_outside_answer = false;

  friend bool operator==(const ParseFlags&, const ParseFlags&) = default;
};

struct ParsedAnswer {
  std::string full_text;
  std::optional<std::string> public_text;  // first well-formed ANSWER block
  std::optional<std::string> scratchpad;
  std::optional<std::string> plan;
  std::vector<DealBlock> deals;  // every well-formed DEAL block, in order
  ParseFlags flags;

  std::vector<std::string> deal_texts() const;
  // What the other parties see: the ANSWER content, or the whole reply when
  // no ANSWER block could be extracted.
  const std::string& broadcast_text() const { return public_text ? *public_text : full_text; }

  friend bool operator==(const ParsedAnswer&, const ParsedAnswer&) = default;
};

ParsedAnswer extract_sections(std::string_view full_text);

enum class DealSource { kNone, kDealTag, kScan };

std::string_view to_string(DealSource source);

struct DealExtraction {
  std::optional<Deal> deal;
  DealSource source = DealSource::kNone;
  bool partial = false;  // some path found a deal missing issues
};

struct ExtractOptions {
  bool last_deal_wins = true;
};

// Order: DEAL tags (preferring blocks inside the ANSWER, then top-level
// ones), then an option-token scan of the public text, then nothing.
DealExtraction extract_deal(const ParsedAnswer& parsed, const GameConfig& config,
                            const ExtractOptions& options = {});

// Compliant reply layout used by scripted agents and round-trip tests.
std::string render_answer(std::string_view scratchpad, std::string_view public_text,
                          std::optional<std::string_view> deal, std::string_view plan);

}  // namespace negobench
