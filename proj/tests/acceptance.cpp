// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. All tolerances and limits are pinned below.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "negobench/answer_parser.hpp"
#include "negobench/deal_space.hpp"
#include "negobench/gini.hpp"
#include "negobench/metrics.hpp"
#include "negobench/orchestrator.hpp"
#include "negobench/prompts.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace nb = negobench;
namespace nt = negobench::testing;

namespace {

constexpr double kGiniTolerance = 1e-12;
constexpr int kTheoremGames = 50;
constexpr double kTheoremSeconds = 10.0;
constexpr double kEndToEndSeconds = 30.0;
constexpr int kMetricBatches = 20;
constexpr int kFuzzInputs = 100'000;
constexpr int kGiniRandomVectors = 1000;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) detail = what;
    ok = ok && condition;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<nb::AgentEndpoint> uniform(const nb::GameConfig& g, const std::string& policy,
                                       nlohmann::json params = nlohmann::json::object()) {
  return std::vector<nb::AgentEndpoint>(g.party_count(), nb::AgentEndpoint::scripted(policy, params));
}

// ---------------------------------------------------------------------------

Check pareto_batna_theorem() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(20240601);
  std::size_t pairs = 0;
  for (int game = 0; game < kTheoremGames; ++game) {
    const auto g = nt::random_small_game(gen, 200);
    c.require(g.deal_count() <= 200 && g.party_count() >= 2 && g.party_count() <= 4 && g.issues.size() >= 2 &&
                  g.issues.size() <= 3,
              "generator out of bounds");
    std::vector<std::vector<nb::Score>> good, bad, all_outcomes, raw;
    for (const auto& d : nb::enumerate_deals(g)) {
      const auto o = nb::outcome_vector(g, d, {nb::BonusPolicy::kNever, nb::RejectorPayoff::kBatna});
      (o.success ? good : bad).push_back(o.scores);
      all_outcomes.push_back(o.scores);
      raw.push_back(nb::party_scores(g, d));
    }
    for (const auto& a : good) {
      for (const auto& f : bad) {
        ++pairs;
        c.require(!nb::pareto_dominates(f, a), "a failing deal dominated an acceptable one in game " +
                                                   std::to_string(game));
      }
    }
    for (const auto* set : {&good, &all_outcomes, &raw}) {
      if (set->empty()) continue;
      c.require(nb::pareto_front(*set) == nt::brute_front(*set), "front differs from oracle in game " +
                                                                     std::to_string(game));
    }
  }
  const double elapsed = seconds_since(start);
  c.require(elapsed < kTheoremSeconds, "runtime " + std::to_string(elapsed) + " s");
  if (c.ok) c.detail = std::to_string(kTheoremGames) + " games, " + std::to_string(pairs) + " pairs, " +
                       std::to_string(elapsed).substr(0, 5) + " s";
  return c;
}

Check gini_suite() {
  Check c;
  for (std::size_t n = 1; n <= 12; ++n) {
    const std::vector<double> equal(n, 7.25);
    c.require(nb::gini(std::span<const double>(equal)).value == 0.0, "equal vector not zero");
    if (n < 2) continue;
    std::vector<double> one(n, 0.0);
    one[n / 2] = 13.0;
    c.require(std::fabs(nb::gini(std::span<const double>(one)).value - double(n - 1) / double(n)) <= kGiniTolerance,
              "single-winner case off for n=" + std::to_string(n));
  }
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> len(2, 20);
  std::uniform_real_distribution<double> value(0.0, 1000.0), scale(0.01, 100.0);
  for (int t = 0; t < kGiniRandomVectors; ++t) {
    std::vector<double> v(static_cast<std::size_t>(len(gen)));
    for (auto& x : v) x = value(gen);
    const double base = nb::gini(std::span<const double>(v)).value;
    auto scaled = v;
    const double k = scale(gen);
    for (auto& x : scaled) x *= k;
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    c.require(std::fabs(nb::gini(std::span<const double>(scaled)).value - base) <= kGiniTolerance,
              "scale invariance");
    c.require(std::fabs(nb::gini(std::span<const double>(shuffled)).value - base) <= kGiniTolerance,
              "permutation invariance");
  }
  const std::vector<nb::Score> hand{30, 60};
  const auto f = nb::gini_fraction(hand);
  c.require(f.denominator != 0 && f.numerator * 6 == f.denominator, "(30,60) is not exactly 1/6");
  if (c.ok) c.detail = "tolerance 1e-12, " + std::to_string(kGiniRandomVectors) + " random vectors";
  return c;
}

Check metrics_oracle() {
  Check c;
  const auto& g = nt::synthetic_game();
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> rate(0.0, 0.6);
  std::uniform_int_distribution<int> rounds(1, 4), row(1, 6), seeds(3, 8), window(1, 6), policy(0, 3), bonus(0, 2);
  const char* policies[] = {"random-proposer", "oracle-negotiator", "stubborn", "echo-initial-deal"};
  for (int batch = 0; batch < kMetricBatches; ++batch) {
    nb::ExperimentPlan plan;
    plan.config = g;
    const double r = rate(gen);
    for (std::size_t p = 0; p < g.party_count(); ++p) {
      plan.endpoints.push_back(nb::AgentEndpoint::scripted(policies[policy(gen)], {{"malformed_rate", r}}));
    }
    if (batch % 4 == 0) plan.endpoints[0] = nb::AgentEndpoint::scripted("malformed");
    plan.cot = nb::cot_preset(row(gen));
    const auto first = static_cast<std::uint64_t>(batch * 100);
    const int count = seeds(gen);
    for (int s = 0; s < count; ++s) plan.seeds.push_back(first + static_cast<std::uint64_t>(s));
    plan.session.templates = &nt::default_templates();
    plan.session.rounds = rounds(gen);
    plan.session.window = static_cast<std::size_t>(window(gen));
    plan.session.outcome.bonus = static_cast<nb::BonusPolicy>(bonus(gen));
    const auto result = nb::run_experiments(plan);

    std::vector<std::vector<nlohmann::json>> transcripts;
    for (auto seed : plan.seeds) {
      transcripts.push_back(nb::transcript_lines(nb::run_multi_agent(g, plan.endpoints, seed, plan.cot, plan.session)));
    }
    const auto tally = nt::tally_transcripts(transcripts);
    const auto& rep = result.report;
    const std::string where = " (batch " + std::to_string(batch) + ")";
    c.require(rep.five_way_pct == tally.five_way_pct, "five_way" + where);
    c.require(rep.six_way_pct == tally.six_way_pct, "six_way" + where);
    c.require(rep.any_pct == tally.any_pct, "any" + where);
    c.require(rep.wrong_pct == tally.wrong_pct, "wrong" + where);
    c.require(rep.failed_pct == tally.failed_pct, "failed" + where);
    c.require(rep.structure_leak_pct == tally.structure_leak_pct, "structure_leak" + where);
    c.require(rep.gini_mean_of_final_deals == tally.gini_mean, "gini_mean" + where);
  }
  if (c.ok) c.detail = std::to_string(kMetricBatches) + " batches, 7 fields, exact";
  return c;
}

Check leakage_corpus() {
  Check c;
  const auto dir = nt::source_dir() / "tests" / "corpus" / "leakage";
  std::size_t samples = 0, agree = 0;
  std::set<std::string> reasons_seen;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    const auto text = read_file(entry.path());
    auto label_path = entry.path();
    label_path.replace_extension(".expected.json");
    const auto label = nlohmann::json::parse(read_file(label_path));
    const auto parsed = nb::extract_sections(text);
    const auto verdict = nb::detect_structure_leakage(text, parsed.broadcast_text());
    std::vector<std::string> reasons;
    for (auto r : verdict.reasons) reasons.emplace_back(nb::to_string(r));
    reasons_seen.insert(reasons.begin(), reasons.end());
    const bool match = verdict.leak == label.at("leak").get<bool>() &&
                       reasons == label.at("reasons").get<std::vector<std::string>>();
    c.require(match, "disagrees on " + entry.path().filename().string());
    ++samples;
    agree += match;
  }
  c.require(samples >= 30, "corpus has fewer than 30 samples");
  c.require(reasons_seen.size() == 3, "not every leakage condition is covered");
  if (c.ok) c.detail = std::to_string(agree) + "/" + std::to_string(samples) + " samples agree";
  return c;
}

Check determinism() {
  Check c;
  const auto& g = nt::synthetic_game();
  nb::SessionOptions options;
  options.templates = &nt::default_templates();
  const auto endpoints = uniform(g, "random-proposer", {{"malformed_rate", 0.25}});
  for (std::uint64_t seed : {1u, 17u, 123456789u}) {
    const auto a = nb::to_jsonl(nb::run_multi_agent(g, endpoints, seed, nb::cot_preset(2), options));
    const auto b = nb::to_jsonl(nb::run_multi_agent(g, endpoints, seed, nb::cot_preset(2), options));
    c.require(a == b, "session differs between runs for seed " + std::to_string(seed));
  }
  std::string reports[2];
  std::vector<std::string> files[2];
  for (int k = 0; k < 2; ++k) {
    nb::ExperimentPlan plan;
    plan.config = g;
    plan.endpoints = endpoints;
    plan.cot = nb::cot_preset(2);
    for (std::uint64_t s = 1; s <= 16; ++s) plan.seeds.push_back(s);
    plan.parallelism = k == 0 ? 1 : 8;
    plan.session = options;
    plan.output_dir = nt::scratch_dir("acceptance_determinism_" + std::to_string(k));
    const auto result = nb::run_experiments(plan);
    reports[k] = nb::report_to_json(result.report).dump() + nb::report_to_text(result.report);
    for (auto s : plan.seeds) files[k].push_back(read_file(nb::transcript_path(*plan.output_dir, s)));
  }
  c.require(reports[0] == reports[1], "reports differ between parallelism 1 and 8");
  c.require(files[0] == files[1], "transcripts differ between parallelism 1 and 8");
  if (c.ok) c.detail = "repeat runs and parallelism 1 vs 8 byte-identical";
  return c;
}

Check prompt_fidelity() {
  Check c;
  const auto& t = nt::default_templates();
  const auto& g = nt::synthetic_game();
  nb::HistoryWindow window{4, {}};
  window.push("ArenaCorp", "We start from <DEAL>A1, B1, C1, D1, E3</DEAL>.");
  window.push("Green Coalition", "The wetland matters most to us.");
  const std::string plan = "Offer B3 if the union asks for C3.";
  auto has = [](const std::string& text, const char* s) { return text.find(s) != std::string::npos; };
  for (int row = 1; row <= 6; ++row) {
    const auto cot = nb::cot_preset(row);
    auto golden = read_file(nt::source_dir() / "tests" / "golden" / ("variation_" + std::to_string(row) + ".txt"));
    while (!golden.empty() && golden.back() == '\n') golden.pop_back();
    const auto expected = nb::substitute(
        golden, {{"WINDOW SIZE", "4"}, {"HISTORY", nb::render_history(window)}, {"LAST PLAN", plan}});
    const auto rendered = nb::render_round_prompt(t, g, 1, window, plan, cot);
    const std::string r = "row " + std::to_string(row);
    c.require(rendered == expected, r + " differs from its golden file");
    const auto composed = nb::compose_round_template(t, cot);
    c.require(composed == t.variation(row), r + " fragment composition differs from the variation file");
    c.require(has(rendered, "<PLAN> and </PLAN>") == cot.planning, r + " PLAN sentence");
    c.require(has(rendered, "calculator") == cot.prev_deals_calc, r + " calculator sentence");
    c.require(has(rendered, "Think about the others' preferences") == cot.others_prefs, r + " preferences sentence");
    c.require(has(rendered, "three different proposals") == cot.candidates, r + " three-proposals sentence");
    c.require(has(rendered, "From the three proposals, select") == (cot.candidates && cot.selection),
              r + " selection sentence");
  }
  if (c.ok) c.detail = "6 presets byte-identical, 5 invariants each";
  return c;
}

Check end_to_end() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  const auto& g = nt::synthetic_game();
  nb::ExperimentPlan plan;
  plan.config = g;
  plan.endpoints = uniform(g, "oracle-negotiator");
  plan.cot = nb::cot_preset(2);
  for (std::uint64_t s = 1; s <= 10; ++s) plan.seeds.push_back(s);
  plan.session.templates = &nt::default_templates();
  const auto good = nb::run_experiments(plan).report;
  c.require(good.five_way_pct == 100.0, "five_way_pct " + std::to_string(good.five_way_pct));
  c.require(good.wrong_pct == 0.0, "wrong_pct " + std::to_string(good.wrong_pct));
  c.require(good.structure_leak_pct == 0.0, "structure_leak_pct " + std::to_string(good.structure_leak_pct));
  c.require(good.failed_pct == 0.0, "failed_pct " + std::to_string(good.failed_pct));

  plan.endpoints[g.p1() - 1] = nb::AgentEndpoint::scripted("malformed");
  const auto bad = nb::run_experiments(plan).report;
  c.require(bad.failed_pct == 100.0, "malformed p1 failed_pct " + std::to_string(bad.failed_pct));
  c.require(bad.structure_leak_pct > 0.0, "malformed p1 produced no structural leakage");
  const double elapsed = seconds_since(start);
  c.require(elapsed < kEndToEndSeconds, "runtime " + std::to_string(elapsed) + " s");
  if (c.ok) {
    std::ostringstream os;
    os << "oracle 5/6-way 100, malformed p1 failed 100 with leak " << bad.structure_leak_pct << "%, "
       << std::to_string(elapsed).substr(0, 5) << " s";
    c.detail = os.str();
  }
  return c;
}

Check single_agent() {
  Check c;
  const auto& g = nt::synthetic_game();
  nb::SessionOptions options;
  options.templates = &nt::default_templates();
  int runs = 0;
  for (auto mode : {nb::SingleAgentMode::kOneCall, nb::SingleAgentMode::kSixCalls}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto t = nb::run_single_agent(g, nb::AgentEndpoint::scripted("oracle-negotiator"), mode, seed, options);
      c.require(!t.failed && t.final_deal && nb::deal_success(g, *t.final_deal),
                std::string(nb::to_string(mode)) + " seed " + std::to_string(seed) + " did not succeed");
      ++runs;
    }
  }
  if (c.ok) c.detail = std::to_string(runs) + "/" + std::to_string(runs) + " single-agent runs succeed";
  return c;
}

Check parser_fuzz() {
  Check c;
  std::mt19937_64 gen(99991);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 256), soup_len(0, 24);
  const std::vector<std::string> vocab{"<ANSWER>", "</ANSWER>", "<SCRATCHPAD>", "</SCRATCHPAD>", "<PLAN>", "</PLAN>",
                                       "<DEAL>", "</DEAL>", "<SUGGESTION>", "</SUGGESTION>", "<PREV PLAN>", "<",
                                       ">", "</", "A1", "b2", " ", "\n", "**ANSWER**", "deal", "<answer>", "E3,"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  bool missing = false, hallucinated = false, mismatch = false, outside = false;
  std::size_t crashes = 0;
  for (int i = 0; i < kFuzzInputs; ++i) {
    std::string input;
    if (i % 2 == 0) {
      const int n = len(gen);
      for (int k = 0; k < n; ++k) input.push_back(static_cast<char>(byte(gen)));
    } else {
      const int n = soup_len(gen);
      for (int k = 0; k < n; ++k) input += vocab[word(gen)];
    }
    try {
      const auto p = nb::extract_sections(input);
      missing = missing || p.flags.missing_answer_tags;
      hallucinated = hallucinated || !p.flags.hallucinated_tags.empty();
      mismatch = mismatch || p.flags.tag_mismatch;
      outside = outside || p.flags.deal_outside_answer;
      (void)nb::extract_deal(p, nt::synthetic_game());
      (void)nb::detect_structure_leakage(input, p.broadcast_text());
    } catch (...) {
      ++crashes;
    }
  }
  c.require(crashes == 0, std::to_string(crashes) + " inputs threw");
  c.require(missing && hallucinated && mismatch && outside, "not every flag fired");
  if (c.ok) c.detail = std::to_string(kFuzzInputs) + " inputs, 0 crashes, 4/4 flags fired";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Pareto/BATNA theorem and front oracle", pareto_batna_theorem},
      {2, "Gini suite", gini_suite},
      {3, "metrics vs independent tally", metrics_oracle},
      {4, "structural-leakage corpus", leakage_corpus},
      {5, "determinism", determinism},
      {6, "prompt fidelity", prompt_fidelity},
      {7, "end-to-end scripted benchmark", end_to_end},
      {8, "single-agent harness", single_agent},
      {9, "parser fuzz", parser_fuzz},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    failures += !result.ok;
    std::cout << "criterion " << criterion.id << ": " << (result.ok ? "PASS" : "FAIL") << "  " << criterion.name
              << "  [" << result.detail << "]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
