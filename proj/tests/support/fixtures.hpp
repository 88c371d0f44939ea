#pragma once

#include <filesystem>
#include <string>

#include "negobench/game.hpp"
#include "negobench/prompts.hpp"

#ifndef NEGOBENCH_SOURCE_DIR
#error "NEGOBENCH_SOURCE_DIR must point at the repository root"
#endif

namespace negobench::testing {

inline std::filesystem::path source_dir() { return NEGOBENCH_SOURCE_DIR; }

inline const GameConfig& synthetic_game() {
  static const GameConfig config = load_config(source_dir() / "games" / "synthetic_harbor.json");
  return config;
}

inline const TemplateSet& default_templates() {
  static const TemplateSet templates = TemplateSet::load(source_dir() / "templates");
  return templates;
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("negobench_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace negobench::testing
