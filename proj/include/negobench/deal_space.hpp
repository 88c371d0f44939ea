#pragma once

// Exhaustive analysis of a game's deal space: enumeration, success, outcome
// vectors with BATNA substitution, Pareto dominance and front.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "negobench/game.hpp"

namespace negobench {

inline constexpr std::uint64_t kMaxEnumeratedDeals = 10'000'000;

enum class BonusPolicy { kNever, kOnSixWay, kOnSuccess };

// What a party that rejects an otherwise successful deal receives.
enum class RejectorPayoff { kBatna, kDealScore };

struct OutcomeOptions {
  BonusPolicy bonus = BonusPolicy::kOnSixWay;
  RejectorPayoff rejector = RejectorPayoff::kBatna;
};

struct OutcomeVector {
  std::vector<Score> scores;  // one per party, party order
  bool success = false;
  bool bonus_applied = false;

  friend bool operator==(const OutcomeVector&, const OutcomeVector&) = default;
};

// Calls visit(deal) for every deal in lexicographic order (issue order,
// option index ascending). Throws std::length_error past the size guard
// unless force is set.
void for_each_deal(const GameConfig& config, const std::function<void(const Deal&)>& visit,
                   bool force = false);
std::vector<Deal> enumerate_deals(const GameConfig& config, bool force = false);

bool deal_success(const GameConfig& config, const Deal& deal);
bool unanimous(const GameConfig& config, const Deal& deal);

OutcomeVector outcome_vector(const GameConfig& config, const Deal& deal,
                             const OutcomeOptions& options = {});
OutcomeVector failure_outcome(const GameConfig& config);

// a >= b everywhere and a > b somewhere. Throws std::invalid_argument on
// length mismatch.
bool pareto_dominates(std::span<const Score> a, std::span<const Score> b);

// Indices of undominated vectors, ascending. Equal vectors are all kept.
std::vector<std::size_t> pareto_front(const std::vector<std::vector<Score>>& vectors);

struct Range {
  double min = 0;
  double avg = 0;
  double max = 0;
};

struct GameAnalysis {
  std::uint64_t total_deals = 0;
  std::uint64_t acceptable_count = 0;
  std::uint64_t unanimous_count = 0;
  std::uint64_t pareto_front_size = 0;          // over acceptable outcome vectors
  std::uint64_t pareto_front_size_no_batna = 0;  // over raw scores of all deals
  std::optional<Range> collective_score;         // mean party score per acceptable deal
  std::optional<Range> party_score;              // individual entries across acceptable deals
  std::optional<Range> inequality;               // Gini per acceptable deal
};

struct AnalysisOptions {
  OutcomeOptions outcome{BonusPolicy::kNever, RejectorPayoff::kBatna};
  bool require_unanimous = false;  // count acceptable as all-parties-accept
  bool force = false;
};

struct DealRow {
  Deal deal;
  std::vector<Score> raw_scores;
  OutcomeVector outcome;
  bool acceptable = false;
  bool in_front = false;         // acceptable-set front
  bool in_raw_front = false;     // all-deals front without BATNA substitution
};

GameAnalysis analyze_game(const GameConfig& config, const AnalysisOptions& options = {},
                          std::vector<DealRow>* rows = nullptr);

}  // namespace negobench
