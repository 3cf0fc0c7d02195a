#include "wood/demo.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "wood/analysis.hpp"
#include "wood/baseline.hpp"
#include "wood/error.hpp"
#include "wood/hardness.hpp"
#include "wood/metric.hpp"
#include "wood/rng.hpp"
#include "wood/similarity.hpp"
#include "wood/util.hpp"

namespace wood {
namespace demo {

using nlohmann::json;

namespace {

constexpr size_t kTrainA = 160;
constexpr size_t kTestA = 60;
constexpr size_t kTestB = 60;

// Domain A: short reviews. Sentiment words, nouns, and function words below
// are the entire train vocabulary. Small sentiment pools keep each word
// frequent in train, so a mixed-in A clause reliably fills the top-b slots.
const std::vector<std::string> kPosA = {"great", "wonderful", "superb",
                                        "charming"};
const std::vector<std::string> kNegA = {"awful", "terrible", "boring", "dull"};
const std::vector<std::string> kNounsA = {"movie", "film",   "story",
                                          "cast",  "acting", "ending"};

// Domain B: longer reviews over entirely unseen vocabulary. A B review shares
// no tokens with train at all unless an A clause is mixed in, so the mixed
// reviews are the only bridge between the domains.
const std::vector<std::string> kPosB = {"riveting",    "masterful", "immersive",
                                        "captivating", "luminous",  "resonant"};
const std::vector<std::string> kNegB = {"tedious",  "dreary",  "hollow",
                                        "lifeless", "grating", "disjointed"};
const std::vector<std::string> kNounsB = {
    "screenplay", "cinematography", "narrative", "pacing",
    "dialogue",   "script",         "sequences", "composition"};
const std::vector<std::string> kPaddingB = {
    "through", "every",  "scene", "its",  "tone",    "kept",
    "shifting", "while",  "each",  "beat", "settled", "slowly"};

const std::string& pick(SplitMix64& rng, const std::vector<std::string>& pool) {
  return pool[rng.below(pool.size())];
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  out.push_back('.');
  return out;
}

std::string gen_a_text(SplitMix64& rng, int label) {
  const auto& sentiments = label == 1 ? kPosA : kNegA;
  const std::string& sent = pick(rng, sentiments);
  const std::string& noun = pick(rng, kNounsA);
  switch (rng.below(4)) {
    case 0:
      return join({"the", noun, "was", sent});
    case 1:
      return join({"really", sent, noun});
    case 2:
      return join({"this", noun, "is", "very", sent});
    default:
      return join({"a", sent, noun, "and", "a", pick(rng, sentiments),
                   pick(rng, kNounsA)});
  }
}

std::string gen_b_text(SplitMix64& rng, int label, bool mix_in_a) {
  const auto& sentiments = label == 1 ? kPosB : kNegB;
  const size_t target_len = 18 + rng.below(13);
  std::vector<std::string> tokens;
  while (tokens.size() < target_len) {
    switch (rng.below(3)) {
      case 0:
        tokens.insert(tokens.end(), {pick(rng, kNounsB), "felt",
                                     pick(rng, sentiments)});
        break;
      case 1:
        tokens.insert(tokens.end(), {"another", pick(rng, sentiments),
                                     pick(rng, kNounsB)});
        break;
      default:
        tokens.insert(tokens.end(),
                      {pick(rng, kPaddingB), pick(rng, kPaddingB),
                       pick(rng, kPaddingB)});
        break;
    }
  }
  if (mix_in_a) {
    // a full A-style clause, sentiment agreeing with the label
    const auto& a_sentiments = label == 1 ? kPosA : kNegA;
    tokens.insert(tokens.end(),
                  {"really", pick(rng, a_sentiments), pick(rng, kNounsA)});
  }
  return join(tokens);
}

std::string padded_id(const char* prefix, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%03zu", prefix, i);
  return buf;
}

Corpus subset_corpus(const Corpus& test, std::span<const std::string> ids) {
  Corpus sub;
  sub.role = CorpusRole::test;
  sub.num_classes = test.num_classes;
  sub.label_names = test.label_names;
  for (const auto& id : ids) sub.samples.push_back(test.at(id));
  sub.finalize();
  return sub;
}

PredictionSet subset_predictions(const PredictionSet& preds,
                                 std::span<const std::string> ids) {
  PredictionSet sub;
  sub.model_name = preds.model_name;
  for (const auto& id : ids) sub.records.emplace(id, preds.records.at(id));
  return sub;
}

double mean_topb_avg(const HardnessProfile& profile,
                     std::span<const std::string> ids) {
  double sum = 0.0;
  for (const auto& id : ids) sum += profile.at(id).topb_avg;
  return sum / static_cast<double>(ids.size());
}

double mean_correct_confidence(const DiagnosticSeries& series, size_t begin,
                               size_t end) {
  double sum = 0.0;
  size_t n = 0;
  for (size_t i = begin; i < end; ++i) {
    if (series.entries[i].correct) {
      sum += series.entries[i].confidence;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

void write_manifest(const Corpus& corpus, const std::filesystem::path& path) {
  json j{{"num_classes", corpus.num_classes},
         {"label_names", corpus.label_names}};
  write_file(path, j.dump(2) + "\n");
}

}  // namespace

TwoDomainData generate_two_domain(uint64_t seed) {
  SplitMix64 rng(seed);
  TwoDomainData data;
  data.train.role = CorpusRole::train;
  data.train.num_classes = 2;
  data.train.label_names = {"negative", "positive"};
  data.test.role = CorpusRole::test;
  data.test.num_classes = 2;
  data.test.label_names = {"negative", "positive"};

  for (size_t i = 0; i < kTrainA; ++i) {
    const int label = static_cast<int>(i % 2);
    data.train.samples.push_back(
        {padded_id("a-train", i), gen_a_text(rng, label), label});
  }
  for (size_t i = 0; i < kTestA; ++i) {
    const int label = static_cast<int>(i % 2);
    Sample s{padded_id("a-test", i), gen_a_text(rng, label), label};
    data.a_test_ids.push_back(s.id);
    data.test.samples.push_back(std::move(s));
  }
  for (size_t i = 0; i < kTestB; ++i) {
    const int label = static_cast<int>(i % 2);
    const bool mix = rng.below(10) < 3;  // ~30% carry an A sentiment word
    Sample s{padded_id("b-test", i), gen_b_text(rng, label, mix), label};
    data.b_test_ids.push_back(s.id);
    data.test.samples.push_back(std::move(s));
  }
  data.train.finalize();
  data.test.finalize();
  return data;
}

bool DemoChecks::all_passed() const {
  return b_is_more_ood() && errors_grow_with_ood() &&
         confidence_drops_with_ood() && wood_below_accuracy() &&
         shifted_domain_gap_larger();
}

DemoChecks run_demo(const DemoOptions& options) {
  if (options.out_dir.empty())
    throw ValidationError("demo needs an output directory");
  if (options.workers < 1)
    throw ValidationError("workers must be at least 1");
  const auto& out = options.out_dir;
  ensure_directory(out);

  TwoDomainData data = generate_two_domain(options.seed);
  ensure_directory(out / "data");
  save_corpus(data.train, out / "data" / "train.jsonl");
  save_corpus(data.test, out / "data" / "test.jsonl");
  write_manifest(data.train, out / "data" / "train.manifest.json");
  write_manifest(data.test, out / "data" / "test.manifest.json");

  BowTrainConfig train_config;
  train_config.seed = options.seed;
  BowClassifier model = train_bow(data.train, train_config);
  ensure_directory(out / "model");
  save_bow(model, out / "model" / "bow_vocab.json",
           out / "model" / "bow_weights.bin");
  PredictionSet preds = predict(model, data.test, "bow");
  ensure_directory(out / "preds");
  save_predictions(preds, out / "preds" / "bow.jsonl");

  SimilarityConfig sim_config;
  sim_config.method = SimilarityMethod::tfidf_cosine;
  const SimilarityMatrix matrix =
      similarity_matrix(data.train, data.test, sim_config, options.workers);
  write_matrix_csv(matrix, out / "matrix.csv");
  write_matrix_cache(matrix, data.train, data.test, sim_config,
                     out / "matrix.bin");

  HardnessConfig hardness;
  hardness.b_percent = 10.0;
  hardness.a = 1.0;
  hardness.num_tiers = 3;
  const HardnessProfile profile = compute_profile(matrix, hardness);
  write_profile_csv(profile, out / "profile.csv");

  const MetricReport headline =
      score_model(preds, data.test, profile, to_string(sim_config.method));

  const std::vector<double> a_grid = {0.5, 1.0, 2.0};
  std::vector<MetricReport> reports = {headline};
  {
    auto sweep_rows =
        sweep(preds, data.test, matrix, a_grid, kDefaultBGrid,
              hardness.num_tiers, to_string(sim_config.method));
    reports.insert(reports.end(), sweep_rows.begin(), sweep_rows.end());
  }

  const size_t window = 20;
  const DiagnosticSeries series = build_series(preds, data.test, profile);
  const auto windows = error_counts_by_window(series, window);
  emit_report(series, windows, reports, window, out / "analysis");

  DemoChecks checks;
  checks.mean_topb_avg_a = mean_topb_avg(profile, data.a_test_ids);
  checks.mean_topb_avg_b = mean_topb_avg(profile, data.b_test_ids);
  checks.tier1_errors = headline.tier_errors.front();
  checks.tierk_errors = headline.tier_errors.back();
  const size_t third = series.size() / 3;
  checks.mean_conf_correct_top_third =
      mean_correct_confidence(series, 0, third);
  checks.mean_conf_correct_bottom_third =
      mean_correct_confidence(series, series.size() - third, series.size());
  checks.plain_accuracy = headline.plain_accuracy;
  checks.wood_normalized = headline.wood_normalized;

  ensure_directory(out / "subsets");
  const struct {
    const char* name;
    std::span<const std::string> ids;
    double* gap;
  } subsets[] = {{"domain_a", data.a_test_ids, &checks.gap_domain_a},
                 {"domain_b", data.b_test_ids, &checks.gap_domain_b}};
  for (const auto& sub : subsets) {
    const Corpus sub_corpus_ = subset_corpus(data.test, sub.ids);
    const PredictionSet sub_preds = subset_predictions(preds, sub.ids);
    const SimilarityMatrix sub_matrix = matrix.row_subset(sub.ids);
    const HardnessProfile sub_profile = compute_profile(sub_matrix, hardness);
    const MetricReport sub_report = score_model(
        sub_preds, sub_corpus_, sub_profile, to_string(sim_config.method));
    *sub.gap = sub_report.plain_accuracy - sub_report.wood_normalized;
    write_report_json(sub_report,
                      out / "subsets" / (std::string(sub.name) + "_report.json"));
  }

  json summary{{"seed", options.seed},
               {"checks",
                {{"mean_topb_avg_a", checks.mean_topb_avg_a},
                 {"mean_topb_avg_b", checks.mean_topb_avg_b},
                 {"tier1_errors", checks.tier1_errors},
                 {"tierk_errors", checks.tierk_errors},
                 {"mean_conf_correct_top_third",
                  checks.mean_conf_correct_top_third},
                 {"mean_conf_correct_bottom_third",
                  checks.mean_conf_correct_bottom_third},
                 {"plain_accuracy", checks.plain_accuracy},
                 {"wood_normalized", checks.wood_normalized},
                 {"gap_domain_a", checks.gap_domain_a},
                 {"gap_domain_b", checks.gap_domain_b}}},
               {"self_checks",
                {{"b_is_more_ood", checks.b_is_more_ood()},
                 {"errors_grow_with_ood", checks.errors_grow_with_ood()},
                 {"confidence_drops_with_ood",
                  checks.confidence_drops_with_ood()},
                 {"wood_below_accuracy", checks.wood_below_accuracy()},
                 {"shifted_domain_gap_larger",
                  checks.shifted_domain_gap_larger()},
                 {"all_passed", checks.all_passed()}}}};
  write_file(out / "demo_summary.json", summary.dump(2) + "\n");
  return checks;
}

}  // namespace demo
}  // namespace wood
