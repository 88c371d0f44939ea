#include "negobench/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace negobench {

std::string_view to_string(LeakReason reason) {
  switch (reason) {
    case LeakReason::kAnswerNotExtracted: return "answer_not_extracted";
    case LeakReason::kPrivateTagInPublic: return "private_tag_in_public";
    case LeakReason::kDealTagsMissing: return "deal_tags_missing";
  }
  return "answer_not_extracted";
}

LeakVerdict detect_structure_leakage(std::string_view full_answer, std::string_view public_answer,
                                     const LeakOptions& options) {
  LeakVerdict verdict;
  bool differs = false;
  if (options.literal_difference) {
    differs = full_answer != public_answer;
  } else {
    // The public answer is not the extracted ANSWER block, so the whole reply
    // (or something other than the compliant section) was broadcast.
    const auto parsed = extract_sections(full_answer);
    differs = !parsed.public_text || *parsed.public_text != public_answer;
  }
  if (differs) verdict.reasons.push_back(LeakReason::kAnswerNotExtracted);

  constexpr std::string_view kPrivateTags[] = {"<PLAN>", "</PLAN>", "<SCRATCHPAD>", "</SCRATCHPAD>"};
  if (std::ranges::any_of(kPrivateTags, [&](std::string_view tag) {
        return public_answer.find(tag) != std::string_view::npos;
      })) {
    verdict.reasons.push_back(LeakReason::kPrivateTagInPublic);
  }
  if (public_answer.find("<DEAL>") == std::string_view::npos ||
      public_answer.find("</DEAL>") == std::string_view::npos) {
    verdict.reasons.push_back(LeakReason::kDealTagsMissing);
  }
  verdict.leak = !verdict.reasons.empty();
  return verdict;
}

void ReplayJudge::record(const std::string& prompt, const std::string& answer, bool verdict) {
  verdicts_[{prompt, answer}] = verdict;
}

bool ReplayJudge::operator()(const std::string& prompt, const std::string& answer) const {
  auto it = verdicts_.find({prompt, answer});
  if (it == verdicts_.end()) throw std::out_of_range("ReplayJudge: no stored verdict for this answer");
  return it->second;
}

namespace {

double pct(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

MetricsReport compute_metrics(const GameConfig& config, std::span<const ExperimentRecord> records,
                              const MetricsOptions& options) {
  if (records.empty()) throw std::invalid_argument("compute_metrics: empty batch");
  MetricsReport report;
  report.experiments = records.size();

  std::size_t completed = 0, five = 0, six = 0, any = 0, failed = 0;
  std::size_t proposals = 0, wrong = 0, answered = 0, leaks = 0;
  double gini_sum = 0;
  std::size_t gini_count = 0;

  for (const auto& record : records) {
    SeedBreakdown row;
    row.seed = record.seed;
    row.failed = record.failed;
    for (const auto& round : record.rounds) {
      ++row.answered_rounds;
      if (round.structure_leak.leak) ++row.leak_rounds;
      if (!round.proposed_deal) continue;
      ++row.proposal_rounds;
      const Score own = round.own_score_of_proposal ? *round.own_score_of_proposal
                                                    : deal_score(config, *round.proposed_deal, round.speaker);
      if (own < config.party(round.speaker).threshold) ++row.wrong_rounds;
      if (!row.any && deal_success(config, *round.proposed_deal)) row.any = true;
    }
    if (!record.failed && record.final_deal) {
      row.five_way = deal_success(config, *record.final_deal);
      row.six_way = unanimous(config, *record.final_deal);
    }
    const bool scored = row.five_way || (options.gini_includes_failures && record.failed);
    if (scored) {
      const auto outcome = record.failed ? failure_outcome(config) : record.outcome;
      row.gini = gini(std::span<const Score>(outcome.scores)).value;
      gini_sum += *row.gini;
      ++gini_count;
    }

    if (record.failed) {
      ++failed;
    } else {
      ++completed;
    }
    five += row.five_way;
    six += row.six_way;
    any += row.any;
    proposals += row.proposal_rounds;
    wrong += row.wrong_rounds;
    answered += row.answered_rounds;
    leaks += row.leak_rounds;
    report.per_seed.push_back(row);
  }

  report.five_way_pct = pct(five, completed);
  report.six_way_pct = pct(six, completed);
  report.any_pct = pct(any, records.size());
  report.wrong_pct = pct(wrong, proposals);
  report.failed_pct = pct(failed, records.size());
  report.structure_leak_pct = pct(leaks, answered);
  if (gini_count > 0) report.gini_mean_of_final_deals = gini_sum / static_cast<double>(gini_count);
  std::ranges::stable_sort(report.per_seed, {}, &SeedBreakdown::seed);
  return report;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json doc;
  doc["experiments"] = report.experiments;
  doc["five_way_pct"] = report.five_way_pct;
  doc["six_way_pct"] = report.six_way_pct;
  doc["any_pct"] = report.any_pct;
  doc["wrong_pct"] = report.wrong_pct;
  doc["failed_pct"] = report.failed_pct;
  doc["structure_leak_pct"] = report.structure_leak_pct;
  doc["gini_mean_of_final_deals"] =
      report.gini_mean_of_final_deals ? nlohmann::json(*report.gini_mean_of_final_deals) : nlohmann::json();
  doc["per_seed"] = nlohmann::json::array();
  for (const auto& row : report.per_seed) {
    doc["per_seed"].push_back({
        {"seed", row.seed},
        {"failed", row.failed},
        {"five_way", row.five_way},
        {"six_way", row.six_way},
        {"any", row.any},
        {"proposal_rounds", row.proposal_rounds},
        {"wrong_rounds", row.wrong_rounds},
        {"answered_rounds", row.answered_rounds},
        {"leak_rounds", row.leak_rounds},
        {"gini", row.gini ? nlohmann::json(*row.gini) : nlohmann::json()},
    });
  }
  return doc;
}

std::string report_to_text(const MetricsReport& report) {
  char buffer[512];
  std::ostringstream out;
  std::snprintf(buffer, sizeof buffer,
                "experiments        %zu\n"
                "5/6-way (%%)        %.2f\n"
                "6-way (%%)          %.2f\n"
                "Any (%%)            %.2f\n"
                "Wrong (%%)          %.2f\n"
                "Failed (%%)         %.2f\n"
                "Structure leak (%%) %.2f\n",
                report.experiments, report.five_way_pct, report.six_way_pct, report.any_pct, report.wrong_pct,
                report.failed_pct, report.structure_leak_pct);
  out << buffer;
  if (report.gini_mean_of_final_deals) {
    std::snprintf(buffer, sizeof buffer, "Gini               %.4f\n", *report.gini_mean_of_final_deals);
  } else {
    std::snprintf(buffer, sizeof buffer, "Gini               -\n");
  }
  out << buffer;
  out << "\nseed  failed  5/6  6  any  wrong/proposals  leaks/turns  gini\n";
  for (const auto& row : report.per_seed) {
    std::snprintf(buffer, sizeof buffer, "%-5llu %-7s %-4s %-2s %-4s %6zu/%-9zu %5zu/%-6zu %s\n",
                  static_cast<unsigned long long>(row.seed), row.failed ? "yes" : "no", row.five_way ? "Y" : "-",
                  row.six_way ? "Y" : "-", row.any ? "Y" : "-", row.wrong_rounds, row.proposal_rounds,
                  row.leak_rounds, row.answered_rounds,
                  row.gini ? std::to_string(*row.gini).c_str() : "-");
    out << buffer;
  }
  return out.str();
}

}  // namespace negobench
