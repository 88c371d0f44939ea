#pragma once

// Batch evaluation metrics: 5/6-way, 6-way, Any, Wrong, Failed, structural
// leakage and the Gini inequality coefficient.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "negobench/answer_parser.hpp"
#include "negobench/deal_space.hpp"
#include "negobench/game.hpp"
#include "negobench/gini.hpp"

namespace negobench {

enum class LeakReason { kAnswerNotExtracted, kPrivateTagInPublic, kDealTagsMissing };

std::string_view to_string(LeakReason reason);

struct LeakVerdict {
  bool leak = false;
  std::vector<LeakReason> reasons;
};

struct LeakOptions {
  // Fire the first condition whenever full and public texts differ at all.
  bool literal_difference = false;
};

LeakVerdict detect_structure_leakage(std::string_view full_answer, std::string_view public_answer,
                                     const LeakOptions& options = {});

// Pluggable judge for the model-judged leakage metric. Nothing is bundled;
// ReplayJudge serves stored verdicts for offline runs.
using LeakageJudge = std::function<bool(const std::string& prompt, const std::string& answer)>;

class ReplayJudge {
 public:
  void record(const std::string& prompt, const std::string& answer, bool verdict);
  bool operator()(const std::string& prompt, const std::string& answer) const;

 private:
  std::map<std::pair<std::string, std::string>, bool> verdicts_;
};

struct RoundRecord {
  int round = 0;
  PartyIndex speaker = 0;
  ParsedAnswer parsed;
  std::optional<Deal> proposed_deal;
  std::optional<Score> own_score_of_proposal;
  LeakVerdict structure_leak;
};

struct ExperimentRecord {
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  std::optional<Deal> final_deal;
  std::size_t final_accept_count = 0;
  bool failed = false;
  OutcomeVector outcome;
};

struct SeedBreakdown {
  std::uint64_t seed = 0;
  bool failed = false;
  bool five_way = false;
  bool six_way = false;
  bool any = false;
  std::size_t proposal_rounds = 0;
  std::size_t wrong_rounds = 0;
  std::size_t answered_rounds = 0;
  std::size_t leak_rounds = 0;
  std::optional<double> gini;

  friend bool operator==(const SeedBreakdown&, const SeedBreakdown&) = default;
};

struct MetricsReport {
  std::size_t experiments = 0;
  double five_way_pct = 0;
  double six_way_pct = 0;
  double any_pct = 0;
  double wrong_pct = 0;
  double failed_pct = 0;
  double structure_leak_pct = 0;
  std::optional<double> gini_mean_of_final_deals;
  std::vector<SeedBreakdown> per_seed;  // ascending seed

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct MetricsOptions {
  // Score failed experiments' Gini with the all-BATNA vector.
  bool gini_includes_failures = false;
};

// Throws std::invalid_argument on an empty batch.
MetricsReport compute_metrics(const GameConfig& config, std::span<const ExperimentRecord> records,
                              const MetricsOptions& options = {});

nlohmann::json report_to_json(const MetricsReport& report);
std::string report_to_text(const MetricsReport& report);

}  // namespace negobench
