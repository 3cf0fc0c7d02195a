#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wood/baseline.hpp"
#include "wood/hardness.hpp"
#include "wood/similarity.hpp"

namespace wood {
namespace cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct CorpusArgs {
  std::filesystem::path train;
  std::filesystem::path test;
  std::string format = "auto";  // auto | jsonl | csv
  bool allow_empty_text = false;
};

struct SimilarityArgs {
  CorpusArgs corpora;
  SimilarityConfig config;
  std::filesystem::path out_dir;
  int workers = 1;
};

struct ScoreArgs {
  CorpusArgs corpora;
  std::vector<std::filesystem::path> predictions;
  SimilarityConfig sim;
  HardnessConfig hardness;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> matrix_cache;
  int workers = 1;
};

struct SweepArgs {
  ScoreArgs base;
  std::vector<double> a_grid;  // default: {a}
  std::vector<double> b_grid;  // default: nine-step grid
};

struct AnalyzeArgs {
  ScoreArgs base;
  size_t window = 20;
  std::vector<double> b_grid;  // sweep.csv rows; default nine-step grid
};

struct TrainBaselineArgs {
  CorpusArgs corpora;
  BowTrainConfig train_config;
  std::filesystem::path out_dir;
};

struct DemoArgs {
  uint64_t seed = 7;
  std::filesystem::path out_dir;
  int workers = 1;
};

int cmd_similarity(const SimilarityArgs& args);
int cmd_score(const ScoreArgs& args);
int cmd_sweep(const SweepArgs& args);
int cmd_analyze(const AnalyzeArgs& args);
int cmd_train_baseline(const TrainBaselineArgs& args);
int cmd_demo(const DemoArgs& args);

}  // namespace cli
}  // namespace wood
