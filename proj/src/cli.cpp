#include "negobench/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "negobench/gini.hpp"

namespace negobench::cli {

namespace fs = std::filesystem;

namespace {

// Usage and configuration problems; mapped to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument("not a seed: '" + std::string(text) + "'");
  }
  return value;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return std::string(text.substr(first, last - first + 1));
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << content;
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

nlohmann::json range_json(const std::optional<Range>& range) {
  if (!range) return nullptr;
  return {{"min", range->min}, {"avg", range->avg}, {"max", range->max}};
}

std::string range_text(const std::optional<Range>& range) {
  if (!range) return "n/a";
  return "min " + fixed(range->min, 2) + "  avg " + fixed(range->avg, 2) + "  max " + fixed(range->max, 2);
}

GameConfig load_config_checked(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("config not found: '" + path.string() + "'");
  return load_config(path);
}

BonusPolicy bonus_from_string(const std::string& text) {
  if (text == "never") return BonusPolicy::kNever;
  if (text == "on_6way") return BonusPolicy::kOnSixWay;
  if (text == "on_success") return BonusPolicy::kOnSuccess;
  throw UsageError("unknown bonus policy '" + text + "' (never, on_6way, on_success)");
}

RejectorPayoff rejector_from_string(const std::string& text) {
  if (text == "batna") return RejectorPayoff::kBatna;
  if (text == "deal_score") return RejectorPayoff::kDealScore;
  throw UsageError("unknown rejector payoff '" + text + "' (batna, deal_score)");
}

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

LoadedPlan plan_from_json(const nlohmann::json& doc, const fs::path& base) {
  LoadedPlan loaded;
  auto& plan = loaded.plan;
  try {
    if (!doc.contains("config")) throw UsageError("plan: missing 'config'");
    plan.config = load_config_checked(resolve(base, doc.at("config").get<std::string>()));

    const fs::path templates = resolve(base, doc.value("templates", std::string("templates")));
    if (!fs::is_directory(templates)) throw UsageError("templates directory not found: '" + templates.string() + "'");
    loaded.templates = std::make_unique<TemplateSet>(TemplateSet::load(templates));
    plan.session.templates = loaded.templates.get();

    plan.mode = session_mode_from_string(doc.value("mode", std::string("multi")));
    if (doc.contains("cot")) {
      const auto& cot = doc.at("cot");
      plan.cot.prev_deals_calc = cot.value("prev_deals_calc", false);
      plan.cot.others_prefs = cot.value("others_prefs", false);
      plan.cot.candidates = cot.value("candidates", false);
      plan.cot.selection = cot.value("selection", false);
      plan.cot.planning = cot.value("planning", false);
      if (plan.cot.candidates && !plan.cot.selection) {
        throw UsageError("plan: cot.candidates requires cot.selection");
      }
    } else {
      plan.cot = cot_preset(doc.value("cot_row", 2));
    }

    const auto& seeds = doc.at("seeds");
    plan.seeds = seeds.is_string() ? parse_seed_list(seeds.get<std::string>())
                                   : seeds.get<std::vector<std::uint64_t>>();
    if (plan.seeds.empty()) throw UsageError("plan: no seeds");

    if (doc.contains("rounds")) plan.session.rounds = doc.at("rounds").get<int>();
    plan.session.window = doc.value("window", std::size_t{6});
    plan.parallelism = doc.value("parallelism", std::size_t{1});
    if (plan.parallelism == 0) throw UsageError("plan: parallelism must be at least 1");
    if (doc.contains("output")) plan.output_dir = resolve(base, doc.at("output").get<std::string>());
    plan.force = doc.value("force", false);

    if (doc.contains("outcome")) {
      const auto& o = doc.at("outcome");
      plan.session.outcome.bonus = bonus_from_string(o.value("bonus", std::string("on_6way")));
      plan.session.outcome.rejector = rejector_from_string(o.value("rejector", std::string("batna")));
    }
    if (doc.contains("leak")) plan.session.leak.literal_difference = doc.at("leak").value("literal_difference", false);
    if (doc.contains("extract")) plan.session.extract.last_deal_wins = doc.at("extract").value("last_deal_wins", true);
    if (doc.contains("metrics")) {
      plan.metrics.gini_includes_failures = doc.at("metrics").value("gini_includes_failures", false);
    }

    // agents: one endpoint for every party, or an array with one per party.
    const auto agents = doc.value("agents", nlohmann::json{{"kind", "scripted"}, {"policy", "oracle-negotiator"}});
    const std::size_t n = plan.mode == SessionMode::kMulti ? plan.config.party_count() : 1;
    if (agents.is_array()) {
      if (agents.size() != plan.config.party_count()) {
        throw UsageError("plan: 'agents' array must have one entry per party (" +
                         std::to_string(plan.config.party_count()) + ")");
      }
      for (const auto& a : agents) plan.endpoints.push_back(endpoint_from_json(a));
    } else {
      for (std::size_t k = 0; k < plan.config.party_count(); ++k) plan.endpoints.push_back(endpoint_from_json(agents));
    }
    if (doc.contains("p1_agent")) {
      plan.endpoints[plan.config.p1() - 1] = endpoint_from_json(doc.at("p1_agent"));
    }
    if (n == 1) plan.endpoints = {plan.endpoints[plan.config.p1() - 1]};
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("plan: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("plan: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw UsageError(std::string("plan: ") + e.what());
  }
  return loaded;
}

nlohmann::json manifest_json(const ExperimentPlan& plan, const BatchResult& result) {
  nlohmann::json endpoints = nlohmann::json::array();
  for (const auto& e : plan.endpoints) endpoints.push_back(endpoint_to_json(e));
  return {{"config", config_to_json(plan.config)},
          {"mode", to_string(plan.mode)},
          {"cot_row", cot_preset_row(plan.cot) ? nlohmann::json(*cot_preset_row(plan.cot)) : nlohmann::json()},
          {"seeds", plan.seeds},
          {"reused_seeds", result.reused_seeds},
          {"window", plan.session.window},
          {"rounds", plan.session.rounds.value_or(plan.config.rounds)},
          {"endpoints", endpoints}};
}

bool any_failed(const MetricsReport& report) {
  for (const auto& s : report.per_seed) {
    if (s.failed) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Subcommands

struct AnalyzeArgs {
  std::string config;
  bool no_batna = false;
  bool dump_deals = false;
  bool all_accept = false;
  bool force = false;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const GameConfig config = load_config_checked(a.config);
  AnalysisOptions options;
  options.require_unanimous = a.all_accept;
  options.force = a.force;
  std::vector<DealRow> rows;
  const auto analysis = analyze_game(config, options, a.dump_deals ? &rows : nullptr);
  out << analysis_to_text(analysis, a.no_batna);
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    auto doc = analysis_to_json(analysis);
    if (!a.no_batna) doc.erase("pareto_front_size_no_batna");
    write_file(dir / "analysis.json", doc.dump(2) + "\n");
    if (a.dump_deals) {
      std::ostringstream csv;
      csv << "deal";
      for (const auto& p : config.parties) csv << ",score_" << p.index;
      for (const auto& p : config.parties) csv << ",outcome_" << p.index;
      csv << ",acceptable,in_front,in_raw_front\n";
      for (const auto& row : rows) {
        csv << deal_notation(config, row.deal);
        for (Score s : row.raw_scores) csv << ',' << s;
        for (Score s : row.outcome.scores) csv << ',' << s;
        csv << ',' << row.acceptable << ',' << row.in_front << ',' << row.in_raw_front << '\n';
      }
      write_file(dir / "deals.csv", csv.str());
    }
  }
  return kExitOk;
}

struct RunArgs {
  std::string plan;
  std::string config;
  std::string templates;
  std::string seeds;
  int cot_row = 0;
  std::string mode;
  int rounds = 0;
  int window = 0;
  int parallelism = 0;
  std::string out;
  std::string agent;
  std::string p1_agent;
  bool force = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  nlohmann::json doc = nlohmann::json::object();
  fs::path base = fs::current_path();
  if (!a.plan.empty()) {
    const fs::path plan_path(a.plan);
    std::ifstream in(plan_path);
    if (!in) throw UsageError("plan not found: '" + a.plan + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError(a.plan + ": " + e.what());
    }
    base = fs::absolute(plan_path).parent_path();
  }
  // Flag values are relative to the working directory.
  const auto cwd = fs::current_path();
  auto set_path = [&](const char* key, const std::string& value) {
    if (!value.empty()) doc[key] = fs::absolute(cwd / value).string();
  };
  set_path("config", a.config);
  set_path("templates", a.templates);
  set_path("output", a.out);
  if (a.templates.empty() && !doc.contains("templates")) doc["templates"] = (cwd / "templates").string();
  if (!a.seeds.empty()) doc["seeds"] = a.seeds;
  if (a.cot_row != 0) {
    doc["cot_row"] = a.cot_row;
    doc.erase("cot");
  }
  if (!a.mode.empty()) doc["mode"] = a.mode;
  if (a.rounds != 0) doc["rounds"] = a.rounds;
  if (a.window != 0) doc["window"] = a.window;
  if (a.parallelism != 0) doc["parallelism"] = a.parallelism;
  if (!a.agent.empty()) doc["agents"] = {{"kind", "scripted"}, {"policy", a.agent}};
  if (!a.p1_agent.empty()) doc["p1_agent"] = {{"kind", "scripted"}, {"policy", a.p1_agent}};
  if (a.force) doc["force"] = true;
  if (!doc.contains("seeds")) throw UsageError("run: no seeds (use --seeds or the plan's 'seeds')");

  auto loaded = plan_from_json(doc, base);
  for (const auto& e : loaded.plan.endpoints) {
    if (const auto* s = std::get_if<ScriptedEndpoint>(&e.kind)) {
      if (!PolicyRegistry::global().contains(s->policy_id)) {
        throw UsageError("unknown scripted policy '" + s->policy_id + "'");
      }
    }
  }
  const auto result = run_experiments(loaded.plan);
  if (!result.reused_seeds.empty()) {
    err << "reused " << result.reused_seeds.size() << " existing transcript(s); pass --force to re-run\n";
  }
  out << report_to_text(result.report);
  if (loaded.plan.output_dir) {
    const auto& dir = *loaded.plan.output_dir;
    write_file(dir / "report.json", report_to_json(result.report).dump(2) + "\n");
    write_file(dir / "report.txt", report_to_text(result.report));
    write_file(dir / "manifest.json", manifest_json(loaded.plan, result).dump(2) + "\n");
  }
  return any_failed(result.report) ? kExitFailures : kExitOk;
}

LoadedBatch load_batch(const std::string& dir, std::ostream& err) {
  if (!fs::is_directory(dir)) throw UsageError("transcript directory not found: '" + dir + "'");
  auto batch = load_transcript_dir(dir);
  for (const auto& w : batch.warnings) err << "warning: " << w << "\n";
  if (batch.transcripts.empty()) throw UsageError("no seed_*.jsonl transcripts under '" + dir + "'");
  const auto reference = config_to_json(batch.transcripts.front().config);
  for (const auto& t : batch.transcripts) {
    if (config_to_json(t.config) != reference) {
      throw UsageError("transcripts under '" + dir + "' use different game configs");
    }
  }
  return batch;
}

struct ScoreArgs {
  std::string dir;
  bool json = false;
  bool gini_includes_failures = false;
  std::string out;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const auto batch = load_batch(a.dir, err);
  std::vector<ExperimentRecord> records;
  for (const auto& t : batch.transcripts) records.push_back(experiment_record(t));
  MetricsOptions options;
  options.gini_includes_failures = a.gini_includes_failures;
  const auto report = compute_metrics(batch.transcripts.front().config, records, options);
  out << (a.json ? report_to_json(report).dump(2) + "\n" : report_to_text(report));
  if (!a.out.empty()) write_file(a.out, report_to_json(report).dump(2) + "\n");
  return any_failed(report) ? kExitFailures : kExitOk;
}

struct ReportArgs {
  std::string dir;
  std::string out;
  std::string delimiter = ",";
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const auto batch = load_batch(a.dir, err);
  const auto& d = a.delimiter;
  std::ostringstream progression;
  progression << "seed" << d << "round" << d << "turn" << d << "deal" << d << "p1_score" << d
              << "collective_score\n";
  std::ostringstream gini_csv;
  gini_csv << "seed" << d << "failed" << d << "success" << d << "gini\n";
  for (const auto& t : batch.transcripts) {
    const PartyIndex p1 = t.config.p1();
    for (const auto& turn : t.turns) {
      if (turn.speaker != p1 || !turn.extraction.deal) continue;
      const auto scores = party_scores(t.config, *turn.extraction.deal);
      Score collective = 0;
      for (Score s : scores) collective += s;
      progression << t.seed << d << turn.round << d << turn.index << d
                  << deal_notation(t.config, *turn.extraction.deal) << d << scores[p1 - 1] << d << collective
                  << "\n";
    }
    const auto g = gini(std::span<const Score>(t.outcome.scores));
    gini_csv << t.seed << d << (t.failed ? 1 : 0) << d << (t.outcome.success ? 1 : 0) << d << fixed(g.value, 6)
             << "\n";
  }
  const fs::path dir = a.out.empty() ? fs::path(a.dir) / "plots" : fs::path(a.out);
  write_file(dir / "progression.csv", progression.str());
  write_file(dir / "gini.csv", gini_csv.str());
  out << "wrote " << (dir / "progression.csv").string() << " and " << (dir / "gini.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string item = trim(text.substr(start, comma - start));
    if (item.empty()) throw std::invalid_argument("empty entry in seed list '" + std::string(text) + "'");
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(parse_u64(item));
    } else {
      const auto lo = parse_u64(trim(std::string_view(item).substr(0, dash)));
      const auto hi = parse_u64(trim(std::string_view(item).substr(dash + 1)));
      if (hi < lo) throw std::invalid_argument("descending seed range '" + item + "'");
      if (hi - lo >= 1'000'000) throw std::invalid_argument("seed range too large '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    start = comma + 1;
  }
  return seeds;
}

nlohmann::json analysis_to_json(const GameAnalysis& analysis) {
  return {{"total_deals", analysis.total_deals},
          {"acceptable_count", analysis.acceptable_count},
          {"unanimous_count", analysis.unanimous_count},
          {"pareto_front_size", analysis.pareto_front_size},
          {"pareto_front_size_no_batna", analysis.pareto_front_size_no_batna},
          {"collective_score", range_json(analysis.collective_score)},
          {"party_score", range_json(analysis.party_score)},
          {"inequality", range_json(analysis.inequality)}};
}

std::string analysis_to_text(const GameAnalysis& a, bool with_raw_front) {
  std::ostringstream os;
  os << "Acceptable deals        " << a.acceptable_count << "/" << a.total_deals << "\n";
  os << "Unanimous deals         " << a.unanimous_count << "/" << a.total_deals << "\n";
  os << "Pareto front            " << a.pareto_front_size << "/" << a.acceptable_count << "\n";
  if (with_raw_front) {
    os << "Pareto front (no BATNA) " << a.pareto_front_size_no_batna << "/" << a.total_deals << "\n";
  }
  os << "Collective score        " << range_text(a.collective_score) << "\n";
  os << "Party score             " << range_text(a.party_score) << "\n";
  os << "Inequality (Gini)       " << range_text(a.inequality) << "\n";
  return os.str();
}

LoadedPlan load_plan(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("plan not found: '" + path.string() + "'");
  const auto doc = nlohmann::json::parse(in);
  try {
    return plan_from_json(doc, fs::absolute(path).parent_path());
  } catch (const UsageError& e) {
    throw std::invalid_argument(e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-party negotiation benchmark harness"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze-game", "Enumerate a game's deal space");
  analyze_cmd->add_option("--config", analyze.config, "Game config (JSON file or benchmark directory)")->required();
  analyze_cmd->add_flag("--no-batna", analyze.no_batna, "Also report the front over raw scores of all deals");
  analyze_cmd->add_flag("--dump-deals", analyze.dump_deals, "Write the per-deal table (needs --out)");
  analyze_cmd->add_flag("--all-accept", analyze.all_accept, "Count a deal acceptable only if every party accepts");
  analyze_cmd->add_flag("--force", analyze.force, "Enumerate past the size guard");
  analyze_cmd->add_option("--out", analyze.out, "Output directory");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a seeded experiment batch");
  run_cmd->add_option("--plan", run_args.plan, "JSON plan file");
  run_cmd->add_option("--config", run_args.config, "Game config");
  run_cmd->add_option("--templates", run_args.templates, "Prompt template directory");
  run_cmd->add_option("--seeds,--seed", run_args.seeds, "Seed list, e.g. 1-10 or 1,4,7");
  run_cmd->add_option("--cot-row", run_args.cot_row, "Reasoning preset row")->check(CLI::Range(1, 6));
  run_cmd->add_option("--mode", run_args.mode, "multi, single1 or single6")
      ->check(CLI::IsMember({"multi", "single1", "single6"}));
  run_cmd->add_option("--rounds", run_args.rounds, "Rounds")->check(CLI::PositiveNumber);
  run_cmd->add_option("--window", run_args.window, "History window size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--parallelism", run_args.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_args.out, "Output directory");
  run_cmd->add_option("--agent", run_args.agent, "Scripted policy for every party");
  run_cmd->add_option("--p1-agent", run_args.p1_agent, "Scripted policy for p1");
  run_cmd->add_flag("--force", run_args.force, "Re-run seeds that already have transcripts");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Recompute metrics from transcripts");
  score_cmd->add_option("dir", score.dir, "Transcript directory")->required();
  score_cmd->add_flag("--json", score.json, "Print JSON instead of the table");
  score_cmd->add_flag("--gini-includes-failures", score.gini_includes_failures,
                      "Include failed experiments' BATNA vectors in the Gini mean");
  score_cmd->add_option("--out", score.out, "Also write the JSON report here");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Write plot data from transcripts");
  report_cmd->add_option("dir", report.dir, "Transcript directory")->required();
  report_cmd->add_option("--out", report.out, "Output directory (default <dir>/plots)");
  report_cmd->add_option("--delimiter", report.delimiter, "Field delimiter");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze, out);
    if (*run_cmd) return cmd_run(run_args, out, err);
    if (*score_cmd) return cmd_score(score, out, err);
    if (*report_cmd) return cmd_report(report, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TemplateError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TranscriptError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailures;
  }
  return kExitUsage;
}

}  // namespace negobench::cli
