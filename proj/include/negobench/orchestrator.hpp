#pragma once

// Negotiation sessions: the multi-agent game loop with seeded speaking
// order and automatic voting, the single-agent baselines, and seeded
// experiment batches persisted as one JSON-lines transcript per seed.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "negobench/agents.hpp"
#include "negobench/answer_parser.hpp"
#include "negobench/deal_space.hpp"
#include "negobench/game.hpp"
#include "negobench/metrics.hpp"
#include "negobench/prompts.hpp"

namespace negobench {

enum class SessionMode { kMulti, kSingleOneCall, kSingleSixCalls };

std::string_view to_string(SessionMode mode);
SessionMode session_mode_from_string(std::string_view text);

inline constexpr int kSixCallsRounds = 6;

struct TurnEvent {
  std::size_t index = 0;  // position in the session, 0-based
  int round = 0;          // 1-based; the final proposal uses rounds + 1 in multi mode
  TurnKind kind = TurnKind::kRound;
  PartyIndex speaker = 0;
  std::string prompt;
  std::string reply;
  ParsedAnswer parsed;
  DealExtraction extraction;
  std::optional<Score> own_score;
  std::vector<bool> votes;  // empty when no deal was extracted
  bool proposal_success = false;
  LeakVerdict leak;
  std::optional<TokenUsage> usage;
};

struct ErrorEvent {
  std::size_t index = 0;
  int round = 0;
  PartyIndex speaker = 0;
  std::string kind;
  std::string message;
};

struct Transcript {
  GameConfig config;
  std::uint64_t seed = 0;
  SessionMode mode = SessionMode::kMulti;
  CoTConfig cot;
  std::size_t window = 6;
  int rounds = 0;
  std::vector<nlohmann::json> endpoints;
  std::vector<std::string> system_prompts;  // per party, index 0 = party 1
  std::vector<TurnEvent> turns;
  std::optional<ErrorEvent> error;
  bool complete = false;  // session_end was written
  std::optional<Deal> final_deal;
  bool failed = false;
  std::string failure_reason;
  std::size_t final_accept_count = 0;
  OutcomeVector outcome;
};

using EventSink = std::function<void(const nlohmann::json& line)>;

struct SessionOptions {
  const TemplateSet* templates = nullptr;  // required
  std::size_t window = 6;
  std::optional<int> rounds;  // overrides config.rounds
  OutcomeOptions outcome;
  LeakOptions leak;
  ExtractOptions extract;
  const PolicyRegistry* registry = nullptr;  // defaults to the global registry
  EventSink sink;                            // receives each line as it is produced
};

// endpoints[k] plays party k + 1. Endpoint failures end the session as a
// failed experiment; they are never thrown.
Transcript run_multi_agent(const GameConfig& config, const std::vector<AgentEndpoint>& endpoints,
                           std::uint64_t seed, const CoTConfig& cot, const SessionOptions& options);

Transcript run_single_agent(const GameConfig& config, const AgentEndpoint& endpoint, SingleAgentMode mode,
                            std::uint64_t seed, const SessionOptions& options);

// Speaking order of every multi-agent round, as derived from the seed.
// Round 1 opens with p1; the rest of round 1 and every later round is a
// fresh SplitMix64 Fisher-Yates permutation.
std::vector<std::vector<PartyIndex>> speaking_orders(const GameConfig& config, std::uint64_t seed, int rounds);

std::string to_jsonl(const Transcript& transcript);
std::vector<nlohmann::json> transcript_lines(const Transcript& transcript);

struct TranscriptLoadResult {
  Transcript transcript;
  std::vector<std::string> warnings;
};

class TranscriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws TranscriptError naming the line on schema violations. A missing
// session_end is tolerated and reported as a warning (the experiment is
// then counted as failed).
TranscriptLoadResult load_transcript(const std::filesystem::path& path);

ExperimentRecord experiment_record(const Transcript& transcript);

// Recomputes votes from stored deals; true when they match the stored flags.
bool votes_replay(const Transcript& transcript);

struct ExperimentPlan {
  GameConfig config;
  std::vector<AgentEndpoint> endpoints;  // one per party (multi) or p1's first (single)
  SessionMode mode = SessionMode::kMulti;
  CoTConfig cot;
  std::vector<std::uint64_t> seeds;
  std::size_t parallelism = 1;
  SessionOptions session;
  std::optional<std::filesystem::path> output_dir;
  bool force = false;
  MetricsOptions metrics;
};

struct BatchResult {
  std::vector<ExperimentRecord> records;  // ascending seed
  MetricsReport report;
  std::vector<std::uint64_t> reused_seeds;  // skipped because a complete transcript existed
};

BatchResult run_experiments(const ExperimentPlan& plan);

std::filesystem::path transcript_path(const std::filesystem::path& output_dir, std::uint64_t seed);

// Loads every seed_*.jsonl under dir (or dir/transcripts).
struct LoadedBatch {
  std::vector<Transcript> transcripts;  // ascending seed
  std::vector<std::string> warnings;
};
LoadedBatch load_transcript_dir(const std::filesystem::path& dir);

}  // namespace negobench
