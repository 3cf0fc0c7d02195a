#include "wood/analysis.hpp"

#include <algorithm>

#include "json.hpp"
#include "wood/csv.hpp"
#include "wood/error.hpp"
#include "wood/util.hpp"

namespace wood {

using nlohmann::json;

size_t DiagnosticSeries::total_errors() const {
  size_t errors = 0;
  for (const auto& e : entries)
    if (!e.correct) ++errors;
  return errors;
}

DiagnosticSeries build_series(const PredictionSet& preds, const Corpus& corpus,
                              const HardnessProfile& profile) {
  const AlignmentReport alignment = validate_alignment(corpus, preds);
  if (!alignment.aligned()) {
    std::string msg = "predictions are not aligned with the test corpus:";
    if (!alignment.missing.empty())
      msg += " missing '" + alignment.missing.front() + "'";
    if (!alignment.extra.empty())
      msg += " extra '" + alignment.extra.front() + "'";
    throw ValidationError(msg);
  }
  if (profile.samples.size() != corpus.size())
    throw ValidationError("hardness profile does not cover the test corpus");

  DiagnosticSeries series;
  series.entries.reserve(profile.samples.size());
  for (const auto& hs : profile.samples) {
    if (!corpus.contains(hs.sample_id))
      throw ValidationError("hardness profile has unknown sample '" +
                            hs.sample_id + "'");
    const Sample& sample = corpus.at(hs.sample_id);
    const PredictionRecord& rec = preds.records.at(hs.sample_id);
    SeriesEntry entry;
    entry.sample_id = hs.sample_id;
    entry.topb_avg = hs.topb_avg;
    entry.tier = hs.tier;
    entry.correct = rec.predicted_label == sample.label;
    entry.confidence = rec.confidence();
    series.entries.push_back(std::move(entry));
  }
  std::sort(series.entries.begin(), series.entries.end(),
            [](const SeriesEntry& lhs, const SeriesEntry& rhs) {
              if (lhs.topb_avg != rhs.topb_avg)
                return lhs.topb_avg > rhs.topb_avg;
              return lhs.sample_id < rhs.sample_id;
            });
  return series;
}

std::vector<WindowErrorRow> error_counts_by_window(
    const DiagnosticSeries& series, size_t window) {
  if (window < 1)
    throw ValidationError("window must be at least 1");
  std::vector<WindowErrorRow> rows;
  const size_t n = series.size();
  for (size_t start = 0; start < n; start += window) {
    WindowErrorRow row;
    row.start = start;
    row.end = std::min(start + window, n);
    for (size_t i = row.start; i < row.end; ++i)
      if (!series.entries[i].correct) ++row.errors;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<size_t, double>> confidence_profile(
    const DiagnosticSeries& series, SeriesSubset subset) {
  const bool want_correct = subset == SeriesSubset::correct;
  std::vector<std::pair<size_t, double>> out;
  for (size_t i = 0; i < series.size(); ++i)
    if (series.entries[i].correct == want_correct)
      out.emplace_back(i, series.entries[i].confidence);
  return out;
}

namespace {

json report_json(const MetricReport& r) {
  json j{{"model", r.model_name},
         {"a", r.a},
         {"b_percent", r.b_percent},
         {"num_tiers", r.num_tiers},
         {"similarity_method", r.similarity_method},
         {"accuracy", r.plain_accuracy},
         {"tier_accuracies", r.tier_accuracies},
         {"tier_sizes", r.tier_sizes},
         {"tier_errors", r.tier_errors},
         {"wood_raw", r.wood_raw},
         {"wood_normalized", r.wood_normalized}};
  j["wopt_raw"] = r.wopt_raw ? json(*r.wopt_raw) : json(nullptr);
  j["wopt_normalized"] =
      r.wopt_normalized ? json(*r.wopt_normalized) : json(nullptr);
  return j;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(
    const DiagnosticSeries& series, std::span<const WindowErrorRow> windows,
    std::span<const MetricReport> reports, size_t window,
    const std::filesystem::path& out_dir) {
  if (reports.empty())
    throw ValidationError("emit_report requires at least one metric report");
  ensure_directory(out_dir);
  std::vector<std::filesystem::path> written;

  {
    CsvWriter csv;
    csv.row({"sample_id", "rank", "topb_avg", "tier", "correct",
             "confidence"});
    for (size_t i = 0; i < series.size(); ++i) {
      const auto& e = series.entries[i];
      csv.row({e.sample_id, std::to_string(i + 1), format_double(e.topb_avg),
               std::to_string(e.tier), e.correct ? "1" : "0",
               format_double(e.confidence)});
    }
    const auto path = out_dir / "series.csv";
    csv.save(path);
    written.push_back(path);
  }

  {
    CsvWriter csv;
    csv.row({"window_start", "window_end", "errors"});
    // 1-based inclusive rank range, matching the rank column of series.csv
    for (const auto& w : windows)
      csv.row({std::to_string(w.start + 1), std::to_string(w.end),
               std::to_string(w.errors)});
    const auto path = out_dir / "window_errors.csv";
    csv.save(path);
    written.push_back(path);
  }

  const MetricReport& headline = reports.front();
  {
    CsvWriter csv;
    csv.row({"tier", "size", "errors", "accuracy"});
    for (size_t t = 0; t < headline.tier_accuracies.size(); ++t)
      csv.row({std::to_string(t + 1), std::to_string(headline.tier_sizes[t]),
               std::to_string(headline.tier_errors[t]),
               format_double(headline.tier_accuracies[t])});
    const auto path = out_dir / "tier_summary.csv";
    csv.save(path);
    written.push_back(path);
  }

  {
    const auto path = out_dir / "sweep.csv";
    write_reports_csv(reports, path);
    written.push_back(path);
  }

  {
    json j{{"headline", report_json(headline)},
           {"num_test_samples", series.size()},
           {"total_errors", series.total_errors()},
           {"window", window},
           {"num_sweep_rows", reports.size()}};
    const auto path = out_dir / "summary.json";
    write_file(path, j.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace wood
