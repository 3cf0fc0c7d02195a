// woodscore: corpus similarity, OOD hardness tiers, and weighted accuracy
// reports from the command line.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wood/commands.hpp"
#include "wood/error.hpp"
#include "wood/similarity.hpp"

namespace {

using namespace wood::cli;

void add_corpus_options(CLI::App* cmd, CorpusArgs& args) {
  cmd->add_option("--train", args.train, "Train corpus (JSONL or CSV)")
      ->required();
  cmd->add_option("--test", args.test, "Test corpus (JSONL or CSV)")
      ->required();
  cmd->add_option("--format", args.format,
                  "Corpus file format: auto, jsonl or csv")
      ->capture_default_str();
  cmd->add_flag("--allow-empty-text", args.allow_empty_text,
                "Accept samples whose text is empty");
}

// Lives as long as the app: CLI11 keeps references into it until parse ends.
struct SimilarityOptionRefs {
  CLI::Option* weights = nullptr;
  std::string method = "tfidf_cosine";
};

void add_similarity_options(CLI::App* cmd, wood::SimilarityConfig& config,
                            SimilarityOptionRefs& refs) {
  cmd->add_option("--method", refs.method,
                  "tfidf_cosine, ngram_jaccard, embedding_cosine or combined")
      ->capture_default_str();
  cmd->add_option("--ngram-orders", config.ngram_orders,
                  "n-gram orders (ngram_jaccard uses the first)")
      ->capture_default_str();
  refs.weights = cmd->add_option("--granularity-weights",
                                 config.granularity_weights,
                                 "Per-order weights for method=combined");
  cmd->add_option("--embeddings", config.embedding_path,
                  "Embedding TSV (id<TAB>v1<TAB>...<TAB>vd)");
  cmd->add_flag("--lowercase,!--no-lowercase", config.lowercase,
                "Lowercase during preprocessing (default on)");
}

// Flags win over defaults; when only --ngram-orders is given, weights follow.
void finish_similarity(wood::SimilarityConfig& config,
                       const SimilarityOptionRefs& refs) {
  config.method = wood::similarity_method_from_string(refs.method);
  if (refs.weights->count() == 0)
    config.granularity_weights.assign(config.ngram_orders.size(), 1.0);
}

void add_hardness_options(CLI::App* cmd, wood::HardnessConfig& config) {
  cmd->add_option("--b", config.b_percent,
                  "Top-b percentage of train samples, in (0,100]")
      ->capture_default_str();
  cmd->add_option("--a", config.a, "Scale of the OOD degree p = a / topb_sum")
      ->capture_default_str();
  cmd->add_option("--tiers", config.num_tiers, "Number of hardness tiers K")
      ->capture_default_str();
  cmd->add_option("--epsilon", config.epsilon,
                  "Denominator clamp for zero-overlap rows")
      ->capture_default_str();
}

void add_score_options(CLI::App* cmd, ScoreArgs& args,
                       SimilarityOptionRefs& sim_refs) {
  add_corpus_options(cmd, args.corpora);
  add_similarity_options(cmd, args.sim, sim_refs);
  add_hardness_options(cmd, args.hardness);
  cmd->add_option("--preds", args.predictions,
                  "Prediction JSONL file (repeatable)")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory")->required();
  cmd->add_option("--matrix-cache", args.matrix_cache,
                  "Binary matrix cache to reuse or create");
  cmd->add_option("--workers", args.workers, "Worker thread cap")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WOOD Score: similarity-weighted evaluation of text classifiers"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Read options from a config file; command-line flags win");

  int rc = kExitOk;

  auto* sim_cmd = app.add_subcommand(
      "similarity", "Compute the test-by-train similarity matrix");
  auto sim_args = std::make_shared<SimilarityArgs>();
  auto sim_refs = std::make_shared<SimilarityOptionRefs>();
  add_corpus_options(sim_cmd, sim_args->corpora);
  add_similarity_options(sim_cmd, sim_args->config, *sim_refs);
  sim_cmd->add_option("--out", sim_args->out_dir, "Output directory")
      ->required();
  sim_cmd->add_option("--workers", sim_args->workers, "Worker thread cap")
      ->capture_default_str();
  sim_cmd->callback([sim_args, sim_refs, &rc] {
    finish_similarity(sim_args->config, *sim_refs);
    rc = cmd_similarity(*sim_args);
  });

  auto* score_cmd = app.add_subcommand(
      "score", "Score prediction files with accuracy and WOOD metrics");
  auto score_args = std::make_shared<ScoreArgs>();
  auto score_refs = std::make_shared<SimilarityOptionRefs>();
  add_score_options(score_cmd, *score_args, *score_refs);
  score_cmd->callback([score_args, score_refs, &rc] {
    finish_similarity(score_args->sim, *score_refs);
    rc = cmd_score(*score_args);
  });

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Score across a grid of (a, b) hyperparameters");
  auto sweep_args = std::make_shared<SweepArgs>();
  auto sweep_refs = std::make_shared<SimilarityOptionRefs>();
  add_score_options(sweep_cmd, sweep_args->base, *sweep_refs);
  sweep_cmd->add_option("--a-grid", sweep_args->a_grid,
                        "a values (default: the single --a value)");
  sweep_cmd->add_option("--b-grid", sweep_args->b_grid,
                        "b values (default: 1 5 10 20 30 40 50 75 100)");
  sweep_cmd->callback([sweep_args, sweep_refs, &rc] {
    finish_similarity(sweep_args->base.sim, *sweep_refs);
    rc = cmd_sweep(*sweep_args);
  });

  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Emit similarity-ranked series, window errors and summaries");
  auto analyze_args = std::make_shared<AnalyzeArgs>();
  auto analyze_refs = std::make_shared<SimilarityOptionRefs>();
  add_score_options(analyze_cmd, analyze_args->base, *analyze_refs);
  analyze_cmd
      ->add_option("--window", analyze_args->window,
                   "Window size for error counts")
      ->capture_default_str();
  analyze_cmd->add_option("--b-grid", analyze_args->b_grid,
                          "b values for sweep.csv rows");
  analyze_cmd->callback([analyze_args, analyze_refs, &rc] {
    finish_similarity(analyze_args->base.sim, *analyze_refs);
    rc = cmd_analyze(*analyze_args);
  });

  auto* train_cmd = app.add_subcommand(
      "train-baseline", "Train the bag-of-words baseline and predict");
  auto train_args = std::make_shared<TrainBaselineArgs>();
  add_corpus_options(train_cmd, train_args->corpora);
  train_cmd->add_option("--out", train_args->out_dir, "Output directory")
      ->required();
  train_cmd
      ->add_option("--epochs", train_args->train_config.epochs,
                   "Training epochs")
      ->capture_default_str();
  train_cmd
      ->add_option("--lr", train_args->train_config.learning_rate,
                   "Learning rate")
      ->capture_default_str();
  train_cmd
      ->add_option("--batch-size", train_args->train_config.batch_size,
                   "Mini-batch size")
      ->capture_default_str();
  train_cmd
      ->add_option("--seed", train_args->train_config.seed,
                   "Shuffling seed")
      ->capture_default_str();
  train_cmd->callback(
      [train_args, &rc] { rc = cmd_train_baseline(*train_args); });

  auto* demo_cmd = app.add_subcommand(
      "demo", "Run the synthetic two-domain experiment end to end");
  auto demo_args = std::make_shared<DemoArgs>();
  demo_cmd->add_option("--seed", demo_args->seed, "Data and training seed")
      ->capture_default_str();
  demo_cmd->add_option("--out", demo_args->out_dir, "Output directory")
      ->required();
  demo_cmd->add_option("--workers", demo_args->workers, "Worker thread cap")
      ->capture_default_str();
  demo_cmd->callback([demo_args, &rc] { rc = cmd_demo(*demo_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const wood::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const wood::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return rc;
}
