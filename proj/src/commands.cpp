#include "wood/commands.hpp"

#include <functional>
#include <iostream>
#include <set>

#include "wood/analysis.hpp"
#include "wood/corpus.hpp"
#include "wood/demo.hpp"
#include "wood/error.hpp"
#include "wood/metric.hpp"
#include "wood/util.hpp"

namespace wood {
namespace cli {

namespace {

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

void require_file(const std::filesystem::path& path) {
  if (path.empty())
    throw ValidationError("missing a required input path");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError("no such file: " + path.string());
}

CorpusFormat resolve_format(const std::string& format,
                            const std::filesystem::path& path) {
  if (format == "auto") return corpus_format_from_path(path);
  if (format == "jsonl") return CorpusFormat::jsonl;
  if (format == "csv") return CorpusFormat::csv;
  throw ValidationError("unknown corpus format: " + format);
}

struct LoadedCorpora {
  Corpus train;
  Corpus test;
};

// Checks every referenced path before any computation starts.
void check_paths(const CorpusArgs& corpora, const SimilarityConfig& sim,
                 std::span<const std::filesystem::path> predictions = {}) {
  require_file(corpora.train);
  require_file(corpora.test);
  if (sim.method == SimilarityMethod::embedding_cosine)
    require_file(sim.embedding_path);
  for (const auto& p : predictions) require_file(p);
}

LoadedCorpora load_corpora(const CorpusArgs& args) {
  CorpusLoadOptions options;
  options.allow_empty_text = args.allow_empty_text;
  LoadedCorpora out;
  out.train = load_corpus(args.train, resolve_format(args.format, args.train),
                          CorpusRole::train, options);
  out.test = load_corpus(args.test, resolve_format(args.format, args.test),
                         CorpusRole::test, options);
  return out;
}

// Reads a valid cache when one exists, otherwise computes the matrix and, if
// a cache path was given, writes it for the next run.
SimilarityMatrix matrix_for(const ScoreArgs& args, const Corpus& train,
                            const Corpus& test) {
  if (args.matrix_cache) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(*args.matrix_cache, ec))
      return read_matrix_cache(*args.matrix_cache, train, test, args.sim);
  }
  SimilarityMatrix matrix =
      similarity_matrix(train, test, args.sim, args.workers);
  if (args.matrix_cache)
    write_matrix_cache(matrix, train, test, args.sim, *args.matrix_cache);
  return matrix;
}

std::vector<PredictionSet> load_all_predictions(
    std::span<const std::filesystem::path> paths, const Corpus& test) {
  if (paths.empty())
    throw ValidationError("at least one prediction file is required");
  std::vector<PredictionSet> sets;
  std::set<std::string> names;
  for (const auto& path : paths) {
    PredictionSet preds = load_predictions(path, test);
    if (!names.insert(preds.model_name).second)
      throw ValidationError("duplicate model name '" + preds.model_name +
                            "' (from " + path.string() + ")");
    sets.push_back(std::move(preds));
  }
  return sets;
}

}  // namespace

int cmd_similarity(const SimilarityArgs& args) {
  return run_guarded([&] {
    check_paths(args.corpora, args.config);
    args.config.validate();
    const LoadedCorpora corpora = load_corpora(args.corpora);
    const SimilarityMatrix matrix = similarity_matrix(
        corpora.train, corpora.test, args.config, args.workers);
    ensure_directory(args.out_dir);
    write_matrix_csv(matrix, args.out_dir / "matrix.csv");
    write_matrix_cache(matrix, corpora.train, corpora.test, args.config,
                       args.out_dir / "matrix.bin");
    std::cout << "matrix " << matrix.rows() << "x" << matrix.cols()
              << " (method " << to_string(args.config.method) << ") -> "
              << (args.out_dir / "matrix.csv").string() << "\n";
  });
}

int cmd_score(const ScoreArgs& args) {
  return run_guarded([&] {
    check_paths(args.corpora, args.sim, args.predictions);
    args.sim.validate();
    const LoadedCorpora corpora = load_corpora(args.corpora);
    args.hardness.validate(corpora.test.size());
    const auto preds = load_all_predictions(args.predictions, corpora.test);

    const SimilarityMatrix matrix =
        matrix_for(args, corpora.train, corpora.test);
    const HardnessProfile profile = compute_profile(matrix, args.hardness);
    ensure_directory(args.out_dir);
    write_profile_csv(profile, args.out_dir / "profile.csv");

    std::vector<MetricReport> reports;
    for (const auto& p : preds) {
      MetricReport report =
          score_model(p, corpora.test, profile, to_string(args.sim.method));
      write_report_json(report, args.out_dir /
                                    ("report_" + report.model_name + ".json"));
      std::cout << report.model_name
                << ": accuracy=" << format_double(report.plain_accuracy)
                << " wood_normalized="
                << format_double(report.wood_normalized) << "\n";
      reports.push_back(std::move(report));
    }
    write_reports_csv(reports, args.out_dir / "reports.csv");
  });
}

int cmd_sweep(const SweepArgs& args) {
  return run_guarded([&] {
    check_paths(args.base.corpora, args.base.sim, args.base.predictions);
    args.base.sim.validate();
    const LoadedCorpora corpora = load_corpora(args.base.corpora);
    args.base.hardness.validate(corpora.test.size());
    const auto preds =
        load_all_predictions(args.base.predictions, corpora.test);

    const std::vector<double> a_grid =
        args.a_grid.empty() ? std::vector<double>{args.base.hardness.a}
                            : args.a_grid;
    const std::vector<double> b_grid =
        args.b_grid.empty()
            ? std::vector<double>(kDefaultBGrid.begin(), kDefaultBGrid.end())
            : args.b_grid;

    const SimilarityMatrix matrix =
        matrix_for(args.base, corpora.train, corpora.test);
    std::vector<MetricReport> reports;
    for (const auto& p : preds) {
      auto rows = sweep(p, corpora.test, matrix, a_grid, b_grid,
                        args.base.hardness.num_tiers,
                        to_string(args.base.sim.method));
      reports.insert(reports.end(), rows.begin(), rows.end());
    }
    ensure_directory(args.base.out_dir);
    write_reports_csv(reports, args.base.out_dir / "sweep.csv");
    std::cout << "sweep: " << reports.size() << " rows -> "
              << (args.base.out_dir / "sweep.csv").string() << "\n";
  });
}

int cmd_analyze(const AnalyzeArgs& args) {
  return run_guarded([&] {
    check_paths(args.base.corpora, args.base.sim, args.base.predictions);
    if (args.base.predictions.size() != 1)
      throw ValidationError("analyze takes exactly one prediction file");
    args.base.sim.validate();
    const LoadedCorpora corpora = load_corpora(args.base.corpora);
    args.base.hardness.validate(corpora.test.size());
    const PredictionSet preds =
        load_predictions(args.base.predictions.front(), corpora.test);

    const SimilarityMatrix matrix =
        matrix_for(args.base, corpora.train, corpora.test);
    const HardnessProfile profile = compute_profile(matrix, args.base.hardness);

    const MetricReport headline = score_model(
        preds, corpora.test, profile, to_string(args.base.sim.method));
    const std::vector<double> b_grid =
        args.b_grid.empty()
            ? std::vector<double>(kDefaultBGrid.begin(), kDefaultBGrid.end())
            : args.b_grid;
    std::vector<MetricReport> reports = {headline};
    {
      const std::vector<double> a_grid = {args.base.hardness.a};
      auto rows = sweep(preds, corpora.test, matrix, a_grid, b_grid,
                        args.base.hardness.num_tiers,
                        to_string(args.base.sim.method));
      reports.insert(reports.end(), rows.begin(), rows.end());
    }

    const DiagnosticSeries series = build_series(preds, corpora.test, profile);
    const auto windows = error_counts_by_window(series, args.window);
    const auto written =
        emit_report(series, windows, reports, args.window, args.base.out_dir);
    for (const auto& path : written) std::cout << path.string() << "\n";
  });
}

int cmd_train_baseline(const TrainBaselineArgs& args) {
  return run_guarded([&] {
    require_file(args.corpora.train);
    require_file(args.corpora.test);
    const LoadedCorpora corpora = load_corpora(args.corpora);
    const BowClassifier model = train_bow(corpora.train, args.train_config);
    const PredictionSet preds = predict(model, corpora.test, "bow");
    ensure_directory(args.out_dir);
    save_bow(model, args.out_dir / "bow_vocab.json",
             args.out_dir / "bow_weights.bin");
    save_predictions(preds, args.out_dir / "bow.jsonl");
    std::cout << "bow: vocab=" << model.vocabulary.size()
              << " test_accuracy=" << format_double(accuracy(preds, corpora.test))
              << " -> " << (args.out_dir / "bow.jsonl").string() << "\n";
  });
}

int cmd_demo(const DemoArgs& args) {
  int exit_code = run_guarded([&] {
    demo::DemoOptions options;
    options.seed = args.seed;
    options.out_dir = args.out_dir;
    options.workers = args.workers;
    const demo::DemoChecks checks = demo::run_demo(options);

    const auto line = [](const char* name, bool ok) {
      std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    };
    line("domain_b_more_ood", checks.b_is_more_ood());
    line("errors_grow_with_ood", checks.errors_grow_with_ood());
    line("confidence_drops_with_ood", checks.confidence_drops_with_ood());
    line("wood_below_accuracy", checks.wood_below_accuracy());
    line("shifted_domain_gap_larger", checks.shifted_domain_gap_larger());
    std::cout << "accuracy=" << format_double(checks.plain_accuracy)
              << " wood_normalized=" << format_double(checks.wood_normalized)
              << "\n";
    if (!checks.all_passed())
      throw ValidationError("demo self-checks failed");
  });
  return exit_code;
}

}  // namespace cli
}  // namespace wood
