#pragma once

// Command-line front end: analyze-game, run, score, report.
//
// Exit codes: 0 success, 1 experiment-level failures present,
// 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "negobench/deal_space.hpp"
#include "negobench/orchestrator.hpp"

namespace negobench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1-10", "3", "1,4,9-12". Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

nlohmann::json analysis_to_json(const GameAnalysis& analysis);
std::string analysis_to_text(const GameAnalysis& analysis, bool with_raw_front);

// Loads a JSON plan; relative paths inside resolve against the plan's
// directory. Owns the template set the returned plan points to.
struct LoadedPlan {
  ExperimentPlan plan;
  std::unique_ptr<TemplateSet> templates;
};
LoadedPlan load_plan(const std::filesystem::path& path);

}  // namespace negobench::cli
