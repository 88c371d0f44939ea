#pragma once

// Test-only oracles. Deliberately written without calling the library's
// analysis or metric code so they can check it.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "negobench/game.hpp"

namespace negobench::testing {

// Random game with 2-4 parties and 2-3 issues of 2-6 options, at most
// max_deals deals. batna = threshold; p1 and p2 hold vetoes.
inline GameConfig random_small_game(std::mt19937_64& gen, std::size_t max_deals = 200) {
  GameConfig config;
  config.name = "random";
  std::uniform_int_distribution<int> party_count(2, 4), issue_count(2, 3), options(2, 6), score(0, 30);
  const int n = party_count(gen);
  const int m = issue_count(gen);
  std::size_t deals = 1;
  for (int i = 0; i < m; ++i) {
    IssueSpec issue;
    issue.id = static_cast<char>('A' + i);
    do {
      issue.option_count = options(gen);
    } while (deals * static_cast<std::size_t>(issue.option_count) > max_deals);
    deals *= static_cast<std::size_t>(issue.option_count);
    config.issues.push_back(issue);
  }
  for (int p = 1; p <= n; ++p) {
    PartySpec party;
    party.name = "P" + std::to_string(p);
    party.index = static_cast<PartyIndex>(p);
    Score best = 0;
    for (const auto& issue : config.issues) {
      std::vector<Score> row;
      Score row_max = 0;
      for (int o = 0; o < issue.option_count; ++o) {
        row.push_back(score(gen));
        row_max = std::max(row_max, row.back());
      }
      best += row_max;
      party.score_table.push_back(row);
    }
    std::uniform_int_distribution<Score> threshold(0, best);
    party.threshold = threshold(gen);
    party.batna = party.threshold;
    party.is_p1 = p == 1;
    party.veto = p <= 2;
    config.parties.push_back(party);
  }
  config.initial_deal = Deal(std::vector<int>(config.issues.size(), 1));
  std::uniform_int_distribution<std::size_t> quorum(1, config.parties.size());
  config.success_quorum = quorum(gen);
  return config;
}

inline std::vector<std::vector<int>> all_deals(const GameConfig& config) {
  std::vector<std::vector<int>> out{{}};
  for (const auto& issue : config.issues) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out) {
      for (int o = 1; o <= issue.option_count; ++o) {
        auto d = prefix;
        d.push_back(o);
        next.push_back(d);
      }
    }
    out = std::move(next);
  }
  return out;
}

inline Score score_of(const GameConfig& config, const std::vector<int>& deal, std::size_t party) {
  Score s = 0;
  for (std::size_t i = 0; i < deal.size(); ++i) {
    s += config.parties[party].score_table[i][static_cast<std::size_t>(deal[i] - 1)];
  }
  return s;
}

inline bool passes(const GameConfig& config, const std::vector<int>& deal) {
  std::size_t yes = 0;
  for (std::size_t p = 0; p < config.parties.size(); ++p) {
    const bool ok = score_of(config, deal, p) >= config.parties[p].threshold;
    if (!ok && config.parties[p].veto) return false;
    yes += ok;
  }
  return yes >= config.success_quorum;
}

inline bool dominates(const std::vector<Score>& a, const std::vector<Score>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

inline std::vector<std::size_t> brute_front(const std::vector<std::vector<Score>>& v) {
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < v.size() && !dominated; ++j) dominated = j != i && dominates(v[j], v[i]);
    if (!dominated) front.push_back(i);
  }
  return front;
}

inline double naive_gini(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double sum = 0, diff = 0;
  for (double a : x) {
    sum += a;
    for (double b : x) diff += std::fabs(a - b);
  }
  if (sum == 0) return 0;
  // 2 n^2 mean written as 2 n sum so integer inputs round exactly once.
  return diff / (2.0 * n * sum);
}

// The seven report fields tallied straight from JSON-lines transcripts.
struct Tally {
  double five_way_pct = 0;
  double six_way_pct = 0;
  double any_pct = 0;
  double wrong_pct = 0;
  double failed_pct = 0;
  double structure_leak_pct = 0;
  std::optional<double> gini_mean;
};

inline Tally tally_transcripts(const std::vector<std::vector<nlohmann::json>>& transcripts) {
  std::size_t total = 0, completed = 0, five = 0, six = 0, any = 0, failed = 0;
  std::size_t proposals = 0, wrong = 0, turns = 0, leaks = 0, gini_n = 0;
  double gini_sum = 0;
  for (const auto& lines : transcripts) {
    ++total;
    GameConfig config;
    bool saw_any = false;
    for (const auto& line : lines) {
      const auto event = line.at("event").get<std::string>();
      if (event == "session_start") {
        config = config_from_json(line.at("config"));
      } else if (event == "turn") {
        ++turns;
        const auto& pub = line.at("public_text");
        const std::string text = pub.is_null() ? line.at("reply").get<std::string>() : pub.get<std::string>();
        const bool leak = pub.is_null() || text.find("<PLAN>") != std::string::npos ||
                          text.find("</PLAN>") != std::string::npos ||
                          text.find("<SCRATCHPAD>") != std::string::npos ||
                          text.find("</SCRATCHPAD>") != std::string::npos ||
                          text.find("<DEAL>") == std::string::npos || text.find("</DEAL>") == std::string::npos;
        leaks += leak;
        if (line.at("deal").is_null()) continue;
        ++proposals;
        const auto deal = parse_notation(line.at("deal").get<std::string>(), config).choices();
        const auto speaker = line.at("speaker").get<std::size_t>() - 1;
        wrong += score_of(config, deal, speaker) < config.parties[speaker].threshold;
        saw_any = saw_any || passes(config, deal);
      } else if (event == "session_end") {
        if (line.at("failed").get<bool>()) {
          ++failed;
          continue;
        }
        ++completed;
        const auto deal = parse_notation(line.at("final_deal").get<std::string>(), config).choices();
        const bool ok = passes(config, deal);
        bool all = true;
        for (std::size_t p = 0; p < config.parties.size(); ++p) {
          all = all && score_of(config, deal, p) >= config.parties[p].threshold;
        }
        five += ok;
        six += all;
        if (ok) {
          std::vector<double> outcome;
          for (const auto& s : line.at("outcome")) outcome.push_back(s.get<double>());
          gini_sum += naive_gini(outcome);
          ++gini_n;
        }
      }
    }
    any += saw_any;
  }
  auto pct = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : 100.0 * double(a) / double(b); };
  Tally t;
  t.five_way_pct = pct(five, completed);
  t.six_way_pct = pct(six, completed);
  t.any_pct = pct(any, total);
  t.wrong_pct = pct(wrong, proposals);
  t.failed_pct = pct(failed, total);
  t.structure_leak_pct = pct(leaks, turns);
  if (gini_n > 0) t.gini_mean = gini_sum / double(gini_n);
  return t;
}

}  // namespace negobench::testing
