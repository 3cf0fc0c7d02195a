#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wood/corpus.hpp"
#include "wood/hardness.hpp"

namespace wood {

// Per-sample evaluation score. For accuracy, e is 1 if correct else 0; the
// interface accepts any real score so other metrics can plug in later.
struct PerSampleScore {
  std::string sample_id;
  double e = 0.0;
};

struct WoodScore {
  double raw = 0.0;         // sum of k * A_k, k = 1..K by ascending OOD degree
  double normalized = 0.0;  // raw / (K(K+1)/2), in [0,1]
};

struct MetricReport {
  std::string model_name;
  // config echo
  double a = 1.0;
  double b_percent = 100.0;
  int num_tiers = 0;
  std::string similarity_method;

  double plain_accuracy = 0.0;
  std::vector<double> tier_accuracies;  // index 0 = tier 1 (least OOD)
  std::vector<size_t> tier_sizes;
  std::vector<size_t> tier_errors;
  double wood_raw = 0.0;
  double wood_normalized = 0.0;
  std::optional<double> wopt_raw;         // generic form, E_i weighted by p_i
  std::optional<double> wopt_normalized;  // divided by sum of p_i
};

// Fraction of correct predictions. Inputs must be aligned.
double accuracy(const PredictionSet& preds, const Corpus& corpus);

// Accuracy restricted to each tier, indexed by tier (1-based tier k at k-1).
std::vector<double> per_tier_accuracy(const PredictionSet& preds,
                                      const Corpus& corpus,
                                      const HardnessProfile& profile);

// W_acc over tier accuracies ordered by ascending OOD degree: the most
// OOD tier carries the largest weight K.
WoodScore wood_accuracy(std::span<const double> tier_accuracies);

// Generic form: sum of E_i * p_i over the test set; optionally normalized by
// the total weight. Scores and profile must cover identical sample ids.
double wood_generic(std::span<const PerSampleScore> scores,
                    const HardnessProfile& profile, bool normalize);

std::vector<PerSampleScore> correctness_scores(const PredictionSet& preds,
                                               const Corpus& corpus);

// Full report for one model under one hardness profile.
MetricReport score_model(const PredictionSet& preds, const Corpus& corpus,
                         const HardnessProfile& profile,
                         std::string similarity_method = "");

// One report per (a, b) pair. W_acc depends only on b; a enters through the
// generic form.
std::vector<MetricReport> sweep(const PredictionSet& preds,
                                const Corpus& corpus,
                                const SimilarityMatrix& matrix,
                                std::span<const double> a_values,
                                std::span<const double> b_values, int k,
                                std::string similarity_method = "");

std::string reports_to_csv(std::span<const MetricReport> reports);
void write_reports_csv(std::span<const MetricReport> reports,
                       const std::filesystem::path& path);
void write_report_json(const MetricReport& report,
                       const std::filesystem::path& path);

}  // namespace wood
