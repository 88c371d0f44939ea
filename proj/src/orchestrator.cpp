#include "negobench/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "negobench/rng.hpp"

namespace negobench {

std::string_view to_string(SessionMode mode) {
  switch (mode) {
    case SessionMode::kMulti: return "multi";
    case SessionMode::kSingleOneCall: return "single1";
    case SessionMode::kSingleSixCalls: return "single6";
  }
  return "multi";
}

SessionMode session_mode_from_string(std::string_view text) {
  if (text == "multi") return SessionMode::kMulti;
  if (text == "single1" || text == "single-1" || text == "one_call") return SessionMode::kSingleOneCall;
  if (text == "single6" || text == "single-6" || text == "six_calls") return SessionMode::kSingleSixCalls;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected multi, single1, single6)");
}

std::vector<std::vector<PartyIndex>> speaking_orders(const GameConfig& config, std::uint64_t seed, int rounds) {
  SplitMix64 rng(seed);
  const PartyIndex p1 = config.p1();
  std::vector<std::vector<PartyIndex>> orders;
  for (int round = 1; round <= rounds; ++round) {
    std::vector<PartyIndex> order;
    for (const auto& party : config.parties) {
      if (round == 1 && party.index == p1) continue;
      order.push_back(party.index);
    }
    rng.shuffle(order);
    if (round == 1) order.insert(order.begin(), p1);
    orders.push_back(std::move(order));
  }
  return orders;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json cot_to_json(const CoTConfig& cot) {
  return {{"prev_deals_calc", cot.prev_deals_calc}, {"others_prefs", cot.others_prefs},
          {"candidates", cot.candidates},           {"selection", cot.selection},
          {"planning", cot.planning}};
}

CoTConfig cot_from_json(const nlohmann::json& node) {
  CoTConfig cot;
  cot.prev_deals_calc = node.at("prev_deals_calc").get<bool>();
  cot.others_prefs = node.at("others_prefs").get<bool>();
  cot.candidates = node.at("candidates").get<bool>();
  cot.selection = node.at("selection").get<bool>();
  cot.planning = node.at("planning").get<bool>();
  return cot;
}

nlohmann::json optional_text(const std::optional<std::string>& text) {
  return text ? nlohmann::json(*text) : nlohmann::json();
}

TurnKind turn_kind_from_string(std::string_view text) {
  if (text == "opening") return TurnKind::kOpening;
  if (text == "final") return TurnKind::kFinal;
  if (text == "round") return TurnKind::kRound;
  throw std::invalid_argument("unknown turn kind '" + std::string(text) + "'");
}

DealSource deal_source_from_string(std::string_view text) {
  if (text == "deal_tag") return DealSource::kDealTag;
  if (text == "scan") return DealSource::kScan;
  if (text == "none") return DealSource::kNone;
  throw std::invalid_argument("unknown deal source '" + std::string(text) + "'");
}

LeakReason leak_reason_from_string(std::string_view text) {
  for (LeakReason r : {LeakReason::kAnswerNotExtracted, LeakReason::kPrivateTagInPublic,
                       LeakReason::kDealTagsMissing}) {
    if (to_string(r) == text) return r;
  }
  throw std::invalid_argument("unknown leak reason '" + std::string(text) + "'");
}

nlohmann::json start_line(const Transcript& t) {
  return {{"event", "session_start"},
          {"seed", t.seed},
          {"mode", to_string(t.mode)},
          {"cot", cot_to_json(t.cot)},
          {"window", t.window},
          {"rounds", t.rounds},
          {"config", config_to_json(t.config)},
          {"endpoints", t.endpoints}};
}

nlohmann::json context_line(PartyIndex party, const std::string& text) {
  return {{"event", "context"}, {"speaker", party}, {"text", text}};
}

nlohmann::json turn_line(const GameConfig& config, const TurnEvent& e) {
  nlohmann::json flags{{"missing_answer_tags", e.parsed.flags.missing_answer_tags},
                       {"hallucinated_tags", e.parsed.flags.hallucinated_tags},
                       {"tag_mismatch", e.parsed.flags.tag_mismatch},
                       {"deal_outside_answer", e.parsed.flags.deal_outside_answer}};
  nlohmann::json reasons = nlohmann::json::array();
  for (auto r : e.leak.reasons) reasons.push_back(to_string(r));
  nlohmann::json line{{"event", "turn"},
                      {"index", e.index},
                      {"round", e.round},
                      {"kind", to_string(e.kind)},
                      {"speaker", e.speaker},
                      {"prompt", e.prompt},
                      {"reply", e.reply},
                      {"public_text", optional_text(e.parsed.public_text)},
                      {"scratchpad", optional_text(e.parsed.scratchpad)},
                      {"plan", optional_text(e.parsed.plan)},
                      {"deal_texts", e.parsed.deal_texts()},
                      {"flags", flags},
                      {"deal", e.extraction.deal ? nlohmann::json(deal_notation(config, *e.extraction.deal))
                                                 : nlohmann::json()},
                      {"deal_source", to_string(e.extraction.source)},
                      {"partial_deal", e.extraction.partial},
                      {"own_score", e.own_score ? nlohmann::json(*e.own_score) : nlohmann::json()},
                      {"votes", e.votes},
                      {"proposal_success", e.proposal_success},
                      {"leak", e.leak.leak},
                      {"leak_reasons", reasons}};
  if (e.usage) {
    line["usage"] = {{"prompt_tokens", e.usage->prompt_tokens}, {"completion_tokens", e.usage->completion_tokens}};
  }
  return line;
}

nlohmann::json error_line(const ErrorEvent& e) {
  return {{"event", "error"}, {"index", e.index},     {"round", e.round},
          {"speaker", e.speaker}, {"kind", e.kind}, {"message", e.message}};
}

nlohmann::json end_line(const Transcript& t) {
  return {{"event", "session_end"},
          {"final_deal", t.final_deal ? nlohmann::json(deal_notation(t.config, *t.final_deal)) : nlohmann::json()},
          {"failed", t.failed},
          {"failure_reason", t.failure_reason},
          {"final_accept_count", t.final_accept_count},
          {"success", t.outcome.success},
          {"bonus_applied", t.outcome.bonus_applied},
          {"outcome", t.outcome.scores}};
}

// Session bookkeeping shared by the multi- and single-agent loops.
class Session {
 public:
  Session(const GameConfig& config, std::uint64_t seed, SessionMode mode, const CoTConfig& cot,
          const SessionOptions& options)
      : options_(options) {
    if (!options.templates) throw std::invalid_argument("SessionOptions.templates is required");
    t_.config = config;
    t_.seed = seed;
    t_.mode = mode;
    t_.cot = cot;
    t_.window = options.window;
  }

  Transcript& transcript() { return t_; }

  void emit(const nlohmann::json& line) {
    if (options_.sink) options_.sink(line);
  }

  void start(const std::vector<AgentEndpoint>& endpoints, const std::vector<PartyIndex>& speakers) {
    for (const auto& e : endpoints) t_.endpoints.push_back(endpoint_to_json(e));
    t_.system_prompts.assign(t_.config.party_count(), std::string());
    for (PartyIndex p : speakers) {
      t_.system_prompts[p - 1] = render_global_context(*options_.templates, t_.config, p);
    }
    emit(start_line(t_));
    for (PartyIndex p : speakers) emit(context_line(p, t_.system_prompts[p - 1]));
  }

  // Returns false when the endpoint failed; the session is then over.
  bool turn(const AgentEndpoint& endpoint, PartyIndex speaker, int round, TurnKind kind, std::string prompt) {
    const auto& config = t_.config;
    AgentRequest request{&config, speaker, t_.system_prompts[speaker - 1], prompt, t_.seed};
    AgentReply reply;
    try {
      reply = complete(endpoint, request, options_.registry ? *options_.registry : PolicyRegistry::global());
    } catch (const AgentError& e) {
      t_.error = ErrorEvent{t_.turns.size(), round, speaker, std::string(to_string(e.kind())), e.what()};
      emit(error_line(*t_.error));
      return false;
    }
    TurnEvent event;
    event.index = t_.turns.size();
    event.round = round;
    event.kind = kind;
    event.speaker = speaker;
    event.prompt = std::move(prompt);
    event.reply = reply.text;
    event.usage = reply.usage;
    event.parsed = extract_sections(event.reply);
    event.extraction = extract_deal(event.parsed, config, options_.extract);
    if (event.extraction.deal) {
      event.own_score = deal_score(config, *event.extraction.deal, speaker);
      event.votes = votes(config, *event.extraction.deal);
      event.proposal_success = deal_success(config, *event.extraction.deal);
    }
    event.leak = detect_structure_leakage(event.reply, event.parsed.broadcast_text(), options_.leak);
    emit(turn_line(config, event));
    t_.turns.push_back(std::move(event));
    return true;
  }

  void finish(const std::optional<Deal>& final_deal, std::string failure_reason) {
    const auto& config = t_.config;
    t_.complete = true;
    if (final_deal) {
      t_.final_deal = final_deal;
      t_.final_accept_count = static_cast<std::size_t>(std::ranges::count(votes(config, *final_deal), true));
      t_.outcome = outcome_vector(config, *final_deal, options_.outcome);
    } else {
      t_.failed = true;
      t_.failure_reason = std::move(failure_reason);
      t_.outcome = failure_outcome(config);
    }
    emit(end_line(t_));
  }

 private:
  const SessionOptions& options_;
  Transcript t_;
};

}  // namespace

std::vector<nlohmann::json> transcript_lines(const Transcript& t) {
  std::vector<nlohmann::json> lines;
  lines.push_back(start_line(t));
  for (std::size_t k = 0; k < t.system_prompts.size(); ++k) {
    if (!t.system_prompts[k].empty()) lines.push_back(context_line(k + 1, t.system_prompts[k]));
  }
  for (const auto& turn : t.turns) lines.push_back(turn_line(t.config, turn));
  if (t.error) lines.push_back(error_line(*t.error));
  if (t.complete) lines.push_back(end_line(t));
  return lines;
}

std::string to_jsonl(const Transcript& transcript) {
  std::string out;
  for (const auto& line : transcript_lines(transcript)) {
    out += line.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sessions

Transcript run_multi_agent(const GameConfig& config, const std::vector<AgentEndpoint>& endpoints,
                           std::uint64_t seed, const CoTConfig& cot, const SessionOptions& options) {
  validate_config(config);
  if (endpoints.size() != config.party_count()) {
    throw std::invalid_argument("run_multi_agent needs one endpoint per party");
  }
  Session session(config, seed, SessionMode::kMulti, cot, options);
  auto& t = session.transcript();
  t.rounds = options.rounds.value_or(config.rounds);
  if (t.rounds < 1) throw std::invalid_argument("rounds must be at least 1");

  std::vector<PartyIndex> everyone;
  for (const auto& p : config.parties) everyone.push_back(p.index);
  session.start(endpoints, everyone);

  const auto& templates = *options.templates;
  const PartyIndex p1 = config.p1();
  HistoryWindow history{options.window, {}};
  std::vector<std::optional<std::string>> last_plan(config.party_count());

  auto speak = [&](PartyIndex speaker, int round, TurnKind kind) {
    const auto& plan = last_plan[speaker - 1];
    std::string prompt = render_turn_prompt(templates, config, speaker, kind, history,
                                            cot.planning ? plan : std::nullopt, cot);
    if (!session.turn(endpoints[speaker - 1], speaker, round, kind, std::move(prompt))) return false;
    const auto& event = t.turns.back();
    history.push(config.party(speaker).name, event.parsed.broadcast_text());
    if (event.parsed.plan) last_plan[speaker - 1] = event.parsed.plan;
    return true;
  };

  const auto orders = speaking_orders(config, seed, t.rounds);
  for (int round = 1; round <= t.rounds; ++round) {
    const auto& order = orders[static_cast<std::size_t>(round - 1)];
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
      const TurnKind kind = round == 1 && slot == 0 ? TurnKind::kOpening : TurnKind::kRound;
      if (!speak(order[slot], round, kind)) {
        session.finish(std::nullopt, "endpoint failure: " + t.error->message);
        return t;
      }
    }
  }
  if (!speak(p1, t.rounds + 1, TurnKind::kFinal)) {
    session.finish(std::nullopt, "endpoint failure: " + t.error->message);
    return t;
  }
  const auto& final_turn = t.turns.back();
  session.finish(final_turn.extraction.deal, final_turn.extraction.deal ? "" : "no parseable final deal");
  return t;
}

namespace {

std::string prior_reasoning_of(const TurnEvent& turn) {
  std::string out;
  if (turn.parsed.scratchpad) out += *turn.parsed.scratchpad;
  if (turn.parsed.plan) {
    if (!out.empty()) out += "\n";
    out += *turn.parsed.plan;
  }
  return out.empty() ? turn.reply : out;
}

}  // namespace

Transcript run_single_agent(const GameConfig& config, const AgentEndpoint& endpoint, SingleAgentMode mode,
                            std::uint64_t seed, const SessionOptions& options) {
  validate_config(config);
  const SessionMode session_mode =
      mode == SingleAgentMode::kOneCall ? SessionMode::kSingleOneCall : SessionMode::kSingleSixCalls;
  Session session(config, seed, session_mode, CoTConfig{}, options);
  auto& t = session.transcript();
  const int calls = mode == SingleAgentMode::kOneCall ? 1 : kSixCallsRounds;
  t.rounds = calls;
  const PartyIndex p1 = config.p1();
  session.start({endpoint}, {p1});

  std::optional<std::string> prior;
  for (int round = 1; round <= calls; ++round) {
    const TurnKind kind = round == calls ? TurnKind::kFinal : TurnKind::kRound;
    std::string prompt = render_single_agent_prompt(*options.templates, config, mode, round, prior);
    if (!session.turn(endpoint, p1, round, kind, std::move(prompt))) {
      session.finish(std::nullopt, "endpoint failure: " + t.error->message);
      return t;
    }
    prior = prior_reasoning_of(t.turns.back());
  }
  const auto& final_turn = t.turns.back();
  session.finish(final_turn.extraction.deal, final_turn.extraction.deal ? "" : "no parseable final deal");
  return t;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::optional<std::string> text_or_null(const nlohmann::json& node, const char* key) {
  const auto& v = node.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

}  // namespace

TranscriptLoadResult load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TranscriptError("cannot open transcript '" + path.string() + "'");
  TranscriptLoadResult result;
  auto& t = result.transcript;
  bool started = false;
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    if (raw.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_number);
    nlohmann::json line;
    try {
      line = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      if (in.peek() == EOF) {
        // A torn final line from an interrupted run.
        result.warnings.push_back(where + ": truncated final line ignored");
        break;
      }
      throw TranscriptError(where + ": not valid JSON");
    }
    try {
      const auto event = line.at("event").get<std::string>();
      if (event == "session_start") {
        if (started) throw TranscriptError(where + ": duplicate session_start");
        started = true;
        t.seed = line.at("seed").get<std::uint64_t>();
        t.mode = session_mode_from_string(line.at("mode").get<std::string>());
        t.cot = cot_from_json(line.at("cot"));
        t.window = line.at("window").get<std::size_t>();
        t.rounds = line.at("rounds").get<int>();
        t.config = config_from_json(line.at("config"));
        t.endpoints = line.at("endpoints").get<std::vector<nlohmann::json>>();
        t.system_prompts.assign(t.config.party_count(), std::string());
        continue;
      }
      if (!started) throw TranscriptError(where + ": event before session_start");
      if (t.complete) throw TranscriptError(where + ": event after session_end");
      if (event == "context") {
        const auto speaker = line.at("speaker").get<PartyIndex>();
        t.config.party(speaker);
        t.system_prompts[speaker - 1] = line.at("text").get<std::string>();
      } else if (event == "turn") {
        TurnEvent e;
        e.index = line.at("index").get<std::size_t>();
        if (e.index != t.turns.size()) throw TranscriptError(where + ": turn index out of order");
        e.round = line.at("round").get<int>();
        e.kind = turn_kind_from_string(line.at("kind").get<std::string>());
        e.speaker = line.at("speaker").get<PartyIndex>();
        t.config.party(e.speaker);
        e.prompt = line.at("prompt").get<std::string>();
        e.reply = line.at("reply").get<std::string>();
        e.parsed = extract_sections(e.reply);
        if (e.parsed.public_text != text_or_null(line, "public_text")) {
          throw TranscriptError(where + ": public_text does not match the reply");
        }
        if (const auto deal = text_or_null(line, "deal")) e.extraction.deal = parse_notation(*deal, t.config);
        e.extraction.source = deal_source_from_string(line.at("deal_source").get<std::string>());
        e.extraction.partial = line.at("partial_deal").get<bool>();
        if (!line.at("own_score").is_null()) e.own_score = line.at("own_score").get<Score>();
        e.votes = line.at("votes").get<std::vector<bool>>();
        e.proposal_success = line.at("proposal_success").get<bool>();
        e.leak.leak = line.at("leak").get<bool>();
        for (const auto& r : line.at("leak_reasons")) e.leak.reasons.push_back(leak_reason_from_string(r.get<std::string>()));
        if (line.contains("usage")) {
          e.usage = TokenUsage{line["usage"].at("prompt_tokens").get<std::int64_t>(),
                               line["usage"].at("completion_tokens").get<std::int64_t>()};
        }
        t.turns.push_back(std::move(e));
      } else if (event == "error") {
        t.error = ErrorEvent{line.at("index").get<std::size_t>(), line.at("round").get<int>(),
                             line.at("speaker").get<PartyIndex>(), line.at("kind").get<std::string>(),
                             line.at("message").get<std::string>()};
      } else if (event == "session_end") {
        t.complete = true;
        if (const auto deal = text_or_null(line, "final_deal")) t.final_deal = parse_notation(*deal, t.config);
        t.failed = line.at("failed").get<bool>();
        t.failure_reason = line.at("failure_reason").get<std::string>();
        t.final_accept_count = line.at("final_accept_count").get<std::size_t>();
        t.outcome.success = line.at("success").get<bool>();
        t.outcome.bonus_applied = line.at("bonus_applied").get<bool>();
        t.outcome.scores = line.at("outcome").get<std::vector<Score>>();
        if (t.failed == t.final_deal.has_value()) {
          throw TranscriptError(where + ": failed must be set exactly when final_deal is null");
        }
      } else {
        throw TranscriptError(where + ": unknown event '" + event + "'");
      }
    } catch (const TranscriptError&) {
      throw;
    } catch (const std::exception& e) {
      throw TranscriptError(where + ": " + e.what());
    }
  }
  if (!started) throw TranscriptError(path.string() + ": no session_start record");
  if (!t.complete) {
    result.warnings.push_back(path.string() + ": partial transcript (no session_end); counted as failed");
    t.failed = true;
    t.failure_reason = "partial transcript";
    t.outcome = failure_outcome(t.config);
  }
  return result;
}

ExperimentRecord experiment_record(const Transcript& t) {
  ExperimentRecord record;
  record.seed = t.seed;
  for (const auto& turn : t.turns) {
    RoundRecord round;
    round.round = turn.round;
    round.speaker = turn.speaker;
    round.parsed = turn.parsed;
    round.proposed_deal = turn.extraction.deal;
    round.own_score_of_proposal = turn.own_score;
    round.structure_leak = turn.leak;
    record.rounds.push_back(std::move(round));
  }
  record.failed = t.failed;
  if (!t.failed) record.final_deal = t.final_deal;
  record.final_accept_count = t.final_accept_count;
  record.outcome = t.outcome;
  return record;
}

bool votes_replay(const Transcript& t) {
  for (const auto& turn : t.turns) {
    if (!turn.extraction.deal) {
      if (!turn.votes.empty()) return false;
      continue;
    }
    if (votes(t.config, *turn.extraction.deal) != turn.votes) return false;
    if (deal_success(t.config, *turn.extraction.deal) != turn.proposal_success) return false;
  }
  if (t.final_deal) {
    const auto v = votes(t.config, *t.final_deal);
    if (static_cast<std::size_t>(std::ranges::count(v, true)) != t.final_accept_count) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Batches

std::filesystem::path transcript_path(const std::filesystem::path& output_dir, std::uint64_t seed) {
  return output_dir / "transcripts" / ("seed_" + std::to_string(seed) + ".jsonl");
}

namespace {

Transcript run_one(const ExperimentPlan& plan, std::uint64_t seed, const SessionOptions& options) {
  switch (plan.mode) {
    case SessionMode::kMulti:
      return run_multi_agent(plan.config, plan.endpoints, seed, plan.cot, options);
    case SessionMode::kSingleOneCall:
      return run_single_agent(plan.config, plan.endpoints.at(0), SingleAgentMode::kOneCall, seed, options);
    case SessionMode::kSingleSixCalls:
      return run_single_agent(plan.config, plan.endpoints.at(0), SingleAgentMode::kSixCalls, seed, options);
  }
  throw std::logic_error("unreachable");
}

Transcript aborted_transcript(const ExperimentPlan& plan, std::uint64_t seed, const std::string& message) {
  Transcript t;
  t.config = plan.config;
  t.seed = seed;
  t.mode = plan.mode;
  t.cot = plan.cot;
  t.window = plan.session.window;
  t.rounds = plan.session.rounds.value_or(plan.config.rounds);
  for (const auto& e : plan.endpoints) t.endpoints.push_back(endpoint_to_json(e));
  t.system_prompts.assign(plan.config.party_count(), std::string());
  t.error = ErrorEvent{0, 0, plan.config.p1(), "session", message};
  t.complete = true;
  t.failed = true;
  t.failure_reason = "session error: " + message;
  t.outcome = failure_outcome(plan.config);
  return t;
}

}  // namespace

BatchResult run_experiments(const ExperimentPlan& plan) {
  if (plan.seeds.empty()) throw std::invalid_argument("run_experiments: no seeds");
  validate_config(plan.config);
  BatchResult result;
  std::vector<std::optional<Transcript>> transcripts(plan.seeds.size());
  std::vector<bool> reused(plan.seeds.size(), false);

  if (plan.output_dir) std::filesystem::create_directories(*plan.output_dir / "transcripts");

  auto work = [&](std::size_t i) {
    const std::uint64_t seed = plan.seeds[i];
    if (plan.output_dir && !plan.force) {
      const auto path = transcript_path(*plan.output_dir, seed);
      if (std::filesystem::exists(path)) {
        try {
          auto loaded = load_transcript(path);
          if (loaded.transcript.complete) {
            transcripts[i] = std::move(loaded.transcript);
            reused[i] = true;
            return;
          }
        } catch (const TranscriptError&) {
          // Unreadable leftovers are re-run.
        }
      }
    }
    SessionOptions options = plan.session;
    std::ofstream out;
    if (plan.output_dir) {
      out.open(transcript_path(*plan.output_dir, seed), std::ios::trunc);
      options.sink = [&out](const nlohmann::json& line) { out << line.dump() << '\n' << std::flush; };
    }
    try {
      transcripts[i] = run_one(plan, seed, options);
    } catch (const std::exception& e) {
      transcripts[i] = aborted_transcript(plan, seed, e.what());
      if (out.is_open()) {
        out.close();
        out.open(transcript_path(*plan.output_dir, seed), std::ios::trunc);
        out << to_jsonl(*transcripts[i]);
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(plan.parallelism, 1, plan.seeds.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < plan.seeds.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < plan.seeds.size(); i = next++) work(i);
      });
    }
    for (auto& thread : threads) thread.join();
  }

  std::vector<std::size_t> order(plan.seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::ranges::stable_sort(order, {}, [&](std::size_t i) { return plan.seeds[i]; });
  for (std::size_t i : order) {
    result.records.push_back(experiment_record(*transcripts[i]));
    if (reused[i]) result.reused_seeds.push_back(plan.seeds[i]);
  }
  result.report = compute_metrics(plan.config, result.records, plan.metrics);
  return result;
}

LoadedBatch load_transcript_dir(const std::filesystem::path& dir) {
  std::filesystem::path root = dir;
  if (std::filesystem::is_directory(dir / "transcripts")) root = dir / "transcripts";
  if (!std::filesystem::is_directory(root)) throw TranscriptError("not a directory: '" + dir.string() + "'");
  static const std::regex kName(R"(seed_\d+\.jsonl)");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), kName)) {
      files.push_back(entry.path());
    }
  }
  LoadedBatch batch;
  for (const auto& file : files) {
    auto loaded = load_transcript(file);
    batch.transcripts.push_back(std::move(loaded.transcript));
    for (auto& w : loaded.warnings) batch.warnings.push_back(std::move(w));
  }
  std::ranges::stable_sort(batch.transcripts, {}, &Transcript::seed);
  std::ranges::sort(batch.warnings);
  return batch;
}

}  // namespace negobench
