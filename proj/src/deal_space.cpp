#include "negobench/deal_space.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "negobench/gini.hpp"

namespace negobench {

void for_each_deal(const GameConfig& config, const std::function<void(const Deal&)>& visit, bool force) {
  const auto total = config.deal_count();
  if (!force && total > kMaxEnumeratedDeals) {
    throw std::length_error("deal space has " + std::to_string(total) +
                            " deals; refusing to enumerate without force");
  }
  if (config.issues.empty()) return;
  Deal deal(std::vector<int>(config.issues.size(), 1));
  while (true) {
    visit(deal);
    // Odometer increment, last issue fastest.
    std::size_t position = config.issues.size();
    while (position > 0) {
      --position;
      if (deal.choice(position) < config.issues[position].option_count) {
        deal.set_choice(position, deal.choice(position) + 1);
        break;
      }
      deal.set_choice(position, 1);
      if (position == 0) return;
    }
  }
}

std::vector<Deal> enumerate_deals(const GameConfig& config, bool force) {
  std::vector<Deal> deals;
  for_each_deal(config, [&](const Deal& d) { deals.push_back(d); }, force);
  return deals;
}

bool deal_success(const GameConfig& config, const Deal& deal) {
  std::size_t accepted = 0;
  for (const auto& party : config.parties) {
    const bool accepts = is_acceptable(config, deal, party.index);
    if (party.veto && !accepts) return false;
    if (accepts) ++accepted;
  }
  return accepted >= config.success_quorum;
}

bool unanimous(const GameConfig& config, const Deal& deal) {
  return std::ranges::all_of(config.parties,
                             [&](const PartySpec& p) { return is_acceptable(config, deal, p.index); });
}

OutcomeVector failure_outcome(const GameConfig& config) {
  OutcomeVector out;
  for (const auto& party : config.parties) out.scores.push_back(party.batna);
  return out;
}

OutcomeVector outcome_vector(const GameConfig& config, const Deal& deal, const OutcomeOptions& options) {
  if (!deal_success(config, deal)) return failure_outcome(config);
  OutcomeVector out;
  out.success = true;
  bool all_accept = true;
  for (const auto& party : config.parties) {
    const Score score = deal_score(config, deal, party.index);
    const bool accepts = score >= party.threshold;
    all_accept = all_accept && accepts;
    out.scores.push_back(accepts || options.rejector == RejectorPayoff::kDealScore ? score : party.batna);
  }
  const bool bonus = options.bonus == BonusPolicy::kOnSuccess ||
                     (options.bonus == BonusPolicy::kOnSixWay && all_accept);
  if (bonus) {
    out.scores[config.p1() - 1] += config.p1_bonus;
    out.bonus_applied = true;
  }
  return out;
}

bool pareto_dominates(std::span<const Score> a, std::span<const Score> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pareto_dominates: length mismatch");
  bool strictly_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly_better = true;
  }
  return strictly_better;
}

std::vector<std::size_t> pareto_front(const std::vector<std::vector<Score>>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("pareto_front: empty input");
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < vectors.size() && !dominated; ++j) {
      dominated = j != i && pareto_dominates(vectors[j], vectors[i]);
    }
    if (!dominated) front.push_back(i);
  }
  return front;
}

namespace {

class RangeAccumulator {
 public:
  void add(double value) {
    min_ = std::min(min_, value);
    max_ = std::max(max_, value);
    sum_ += value;
    ++count_;
  }
  std::optional<Range> result() const {
    if (count_ == 0) return std::nullopt;
    return Range{min_, sum_ / static_cast<double>(count_), max_};
  }

 private:
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0;
  std::size_t count_ = 0;
};

}  // namespace

GameAnalysis analyze_game(const GameConfig& config, const AnalysisOptions& options, std::vector<DealRow>* rows) {
  std::vector<DealRow> all;
  for_each_deal(config, [&](const Deal& deal) {
    DealRow row;
    row.deal = deal;
    row.raw_scores = party_scores(config, deal);
    row.outcome = outcome_vector(config, deal, options.outcome);
    row.acceptable = options.require_unanimous ? unanimous(config, deal) : row.outcome.success;
    all.push_back(std::move(row));
  }, options.force);

  GameAnalysis analysis;
  analysis.total_deals = all.size();

  std::vector<std::size_t> acceptable_rows;
  std::vector<std::vector<Score>> acceptable_vectors;
  std::vector<std::vector<Score>> raw_vectors;
  RangeAccumulator collective, individual, inequality;
  for (std::size_t i = 0; i < all.size(); ++i) {
    raw_vectors.push_back(all[i].raw_scores);
    if (unanimous(config, all[i].deal)) ++analysis.unanimous_count;
    if (!all[i].acceptable) continue;
    acceptable_rows.push_back(i);
    acceptable_vectors.push_back(all[i].outcome.scores);
    const auto& scores = all[i].outcome.scores;
    double sum = 0;
    for (Score s : scores) {
      sum += static_cast<double>(s);
      individual.add(static_cast<double>(s));
    }
    collective.add(sum / static_cast<double>(scores.size()));
    inequality.add(gini(std::span<const Score>(scores)).value);
  }
  analysis.acceptable_count = acceptable_rows.size();
  if (!acceptable_vectors.empty()) {
    const auto front = pareto_front(acceptable_vectors);
    analysis.pareto_front_size = front.size();
    for (std::size_t k : front) all[acceptable_rows[k]].in_front = true;
  }
  if (!raw_vectors.empty()) {
    const auto raw_front = pareto_front(raw_vectors);
    analysis.pareto_front_size_no_batna = raw_front.size();
    for (std::size_t k : raw_front) all[k].in_raw_front = true;
  }
  analysis.collective_score = collective.result();
  analysis.party_score = individual.result();
  analysis.inequality = inequality.result();
  if (rows) *rows = std::move(all);
  return analysis;
}

}  // namespace negobench
