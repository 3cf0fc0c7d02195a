#include "wood/metric.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "wood/csv.hpp"
#include "wood/error.hpp"
#include "wood/util.hpp"

namespace wood {

using nlohmann::json;

namespace {

void require_aligned(const PredictionSet& preds, const Corpus& corpus) {
  if (preds.records.empty())
    throw ValidationError("prediction set is empty");
  const AlignmentReport report = validate_alignment(corpus, preds);
  if (!report.aligned()) {
    std::string msg = "predictions are not aligned with the test corpus:";
    if (!report.missing.empty())
      msg += " missing '" + report.missing.front() + "'";
    if (!report.extra.empty())
      msg += " extra '" + report.extra.front() + "'";
    throw ValidationError(msg);
  }
}

// tier of each corpus sample, in corpus order
std::vector<int> tiers_in_corpus_order(const Corpus& corpus,
                                       const HardnessProfile& profile) {
  if (profile.samples.size() != corpus.size())
    throw ValidationError(
        "hardness profile does not cover the test corpus (sizes " +
        std::to_string(profile.samples.size()) + " vs " +
        std::to_string(corpus.size()) + ")");
  std::unordered_map<std::string_view, int> tier_of;
  tier_of.reserve(profile.samples.size());
  for (const auto& s : profile.samples) tier_of.emplace(s.sample_id, s.tier);
  std::vector<int> tiers;
  tiers.reserve(corpus.size());
  for (const auto& s : corpus.samples) {
    auto it = tier_of.find(s.id);
    if (it == tier_of.end())
      throw ValidationError("hardness profile has no sample '" + s.id + "'");
    tiers.push_back(it->second);
  }
  return tiers;
}

}  // namespace

double accuracy(const PredictionSet& preds, const Corpus& corpus) {
  require_aligned(preds, corpus);
  size_t correct = 0;
  for (const auto& s : corpus.samples)
    if (preds.records.at(s.id).predicted_label == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

std::vector<double> per_tier_accuracy(const PredictionSet& preds,
                                      const Corpus& corpus,
                                      const HardnessProfile& profile) {
  require_aligned(preds, corpus);
  const auto tiers = tiers_in_corpus_order(corpus, profile);
  const auto k = static_cast<size_t>(profile.num_tiers);
  std::vector<size_t> sizes(k, 0);
  std::vector<size_t> correct(k, 0);
  for (size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus.samples[i];
    const size_t t = static_cast<size_t>(tiers[i]) - 1;
    ++sizes[t];
    if (preds.records.at(s.id).predicted_label == s.label) ++correct[t];
  }
  std::vector<double> accs(k);
  for (size_t t = 0; t < k; ++t) {
    if (sizes[t] == 0)
      throw ValidationError("tier " + std::to_string(t + 1) + " is empty");
    accs[t] = static_cast<double>(correct[t]) / static_cast<double>(sizes[t]);
  }
  return accs;
}

WoodScore wood_accuracy(std::span<const double> tier_accuracies) {
  const size_t k = tier_accuracies.size();
  if (k < 2)
    throw ValidationError("wood_accuracy needs at least two tiers");
  WoodScore score;
  for (size_t i = 0; i < k; ++i) {
    const double acc = tier_accuracies[i];
    if (!(acc >= 0.0 && acc <= 1.0))
      throw ValidationError("tier accuracy out of [0,1]: " +
                            format_double(acc));
    score.raw += static_cast<double>(i + 1) * acc;
  }
  score.normalized = score.raw / (static_cast<double>(k) *
                                  static_cast<double>(k + 1) / 2.0);
  return score;
}

std::vector<PerSampleScore> correctness_scores(const PredictionSet& preds,
                                               const Corpus& corpus) {
  require_aligned(preds, corpus);
  std::vector<PerSampleScore> scores;
  scores.reserve(corpus.size());
  for (const auto& s : corpus.samples) {
    const bool ok = preds.records.at(s.id).predicted_label == s.label;
    scores.push_back({s.id, ok ? 1.0 : 0.0});
  }
  return scores;
}

double wood_generic(std::span<const PerSampleScore> scores,
                    const HardnessProfile& profile, bool normalize) {
  if (scores.size() != profile.samples.size())
    throw ValidationError("scores and hardness profile differ in size");
  std::unordered_map<std::string_view, double> e_of;
  e_of.reserve(scores.size());
  for (const auto& s : scores)
    if (!e_of.emplace(s.sample_id, s.e).second)
      throw ValidationError("duplicate score for sample '" + s.sample_id +
                            "'");
  double total = 0.0;
  double weight = 0.0;
  // profile order fixes the association order, keeping results reproducible
  for (const auto& s : profile.samples) {
    auto it = e_of.find(s.sample_id);
    if (it == e_of.end())
      throw ValidationError("no score for sample '" + s.sample_id + "'");
    total += it->second * s.p;
    weight += s.p;
  }
  return normalize ? total / weight : total;
}

MetricReport score_model(const PredictionSet& preds, const Corpus& corpus,
                         const HardnessProfile& profile,
                         std::string similarity_method) {
  MetricReport report;
  report.model_name = preds.model_name;
  report.a = profile.a;
  report.b_percent = profile.b_percent;
  report.num_tiers = profile.num_tiers;
  report.similarity_method = std::move(similarity_method);

  report.plain_accuracy = accuracy(preds, corpus);
  report.tier_accuracies = per_tier_accuracy(preds, corpus, profile);
  report.tier_sizes = profile.tier_sizes();
  report.tier_errors.resize(report.tier_sizes.size());
  for (size_t t = 0; t < report.tier_sizes.size(); ++t) {
    const auto correct = static_cast<size_t>(
        report.tier_accuracies[t] * static_cast<double>(report.tier_sizes[t]) +
        0.5);
    report.tier_errors[t] = report.tier_sizes[t] - correct;
  }

  const WoodScore wood = wood_accuracy(report.tier_accuracies);
  report.wood_raw = wood.raw;
  report.wood_normalized = wood.normalized;

  const auto scores = correctness_scores(preds, corpus);
  report.wopt_raw = wood_generic(scores, profile, false);
  report.wopt_normalized = wood_generic(scores, profile, true);
  return report;
}

std::vector<MetricReport> sweep(const PredictionSet& preds,
                                const Corpus& corpus,
                                const SimilarityMatrix& matrix,
                                std::span<const double> a_values,
                                std::span<const double> b_values, int k,
                                std::string similarity_method) {
  if (a_values.empty() || b_values.empty())
    throw ValidationError("sweep grids must be non-empty");
  std::vector<MetricReport> reports;
  reports.reserve(a_values.size() * b_values.size());
  for (double a : a_values) {
    HardnessConfig base;
    base.a = a;
    base.num_tiers = k;
    const auto profiles = sweep_b(matrix, b_values, base);
    for (const auto& profile : profiles)
      reports.push_back(
          score_model(preds, corpus, profile, similarity_method));
  }
  return reports;
}

std::string reports_to_csv(std::span<const MetricReport> reports) {
  if (reports.empty())
    throw ValidationError("no reports to export");
  const int k = reports.front().num_tiers;
  for (const auto& r : reports)
    if (r.num_tiers != k)
      throw ValidationError("reports mix different tier counts");

  CsvWriter csv;
  std::vector<std::string> header = {
      "model",    "a",        "b_percent",       "num_tiers",
      "similarity_method", "accuracy", "wood_raw", "wood_normalized",
      "wopt_raw", "wopt_normalized"};
  for (int t = 1; t <= k; ++t) header.push_back("A_" + std::to_string(t));
  csv.row(header);
  for (const auto& r : reports) {
    std::vector<std::string> row = {
        r.model_name,
        format_double(r.a),
        format_double(r.b_percent),
        std::to_string(r.num_tiers),
        r.similarity_method,
        format_double(r.plain_accuracy),
        format_double(r.wood_raw),
        format_double(r.wood_normalized),
        r.wopt_raw ? format_double(*r.wopt_raw) : "",
        r.wopt_normalized ? format_double(*r.wopt_normalized) : ""};
    for (double acc : r.tier_accuracies) row.push_back(format_double(acc));
    csv.row(row);
  }
  return csv.content();
}

void write_reports_csv(std::span<const MetricReport> reports,
                       const std::filesystem::path& path) {
  write_file(path, reports_to_csv(reports));
}

void write_report_json(const MetricReport& report,
                       const std::filesystem::path& path) {
  json j{{"model", report.model_name},
         {"a", report.a},
         {"b_percent", report.b_percent},
         {"num_tiers", report.num_tiers},
         {"similarity_method", report.similarity_method},
         {"accuracy", report.plain_accuracy},
         {"tier_accuracies", report.tier_accuracies},
         {"tier_sizes", report.tier_sizes},
         {"tier_errors", report.tier_errors},
         {"wood_raw", report.wood_raw},
         {"wood_normalized", report.wood_normalized}};
  j["wopt_raw"] = report.wopt_raw ? json(*report.wopt_raw) : json(nullptr);
  j["wopt_normalized"] =
      report.wopt_normalized ? json(*report.wopt_normalized) : json(nullptr);
  write_file(path, j.dump(2) + "\n");
}

}  // namespace wood
