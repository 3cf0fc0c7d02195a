#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wood/corpus.hpp"
#include "wood/hardness.hpp"
#include "wood/metric.hpp"

namespace wood {

struct SeriesEntry {
  std::string sample_id;
  double topb_avg = 0.0;
  int tier = 0;
  bool correct = false;
  double confidence = 0.0;  // probability of the predicted class
};

// Test samples ordered by descending topb_avg (ties: id ascending). This is
// the similarity-rank view the error and confidence diagnostics read from.
struct DiagnosticSeries {
  std::vector<SeriesEntry> entries;

  size_t size() const { return entries.size(); }
  size_t total_errors() const;
};

DiagnosticSeries build_series(const PredictionSet& preds, const Corpus& corpus,
                              const HardnessProfile& profile);

struct WindowErrorRow {
  size_t start = 0;  // inclusive rank
  size_t end = 0;    // exclusive rank; last window may be short
  size_t errors = 0;
};

// Incorrect-prediction counts per consecutive window of the sorted series.
std::vector<WindowErrorRow> error_counts_by_window(
    const DiagnosticSeries& series, size_t window);

enum class SeriesSubset { correct, incorrect };

// (rank, confidence) pairs for the chosen subset, preserving series order.
std::vector<std::pair<size_t, double>> confidence_profile(
    const DiagnosticSeries& series, SeriesSubset subset);

// Writes series.csv, window_errors.csv, tier_summary.csv, sweep.csv and
// summary.json into out_dir. reports must be non-empty; the first one is the
// headline report in summary.json, all of them become sweep.csv rows.
// Reruns on identical inputs produce byte-identical files.
std::vector<std::filesystem::path> emit_report(
    const DiagnosticSeries& series, std::span<const WindowErrorRow> windows,
    std::span<const MetricReport> reports, size_t window,
    const std::filesystem::path& out_dir);

}  // namespace wood
