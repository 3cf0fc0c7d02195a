#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wood/corpus.hpp"

namespace wood {

struct BowTrainConfig {
  int epochs = 30;
  double learning_rate = 0.5;
  int batch_size = 16;
  uint64_t seed = 0;
};

// Sparse bag-of-words features: (feature index, count) sorted by index.
using SparseFeatures = std::vector<std::pair<int, double>>;

// Fixed design matrix for the logistic regression core. Kept independent of
// Corpus so the gradient math is testable on hand-built instances.
struct BowDataset {
  int num_features = 0;
  int num_classes = 0;
  std::vector<SparseFeatures> x;
  std::vector<int> y;
};

// Mean cross-entropy over the given rows (all rows when `rows` is empty).
double bow_loss(const BowDataset& data, std::span<const double> weights,
                std::span<const double> bias,
                std::span<const size_t> rows = {});

// Analytic gradient of bow_loss into grad_w (C x F, row-major) and grad_b.
// Returns the loss.
double bow_loss_grad(const BowDataset& data, std::span<const double> weights,
                     std::span<const double> bias, std::span<const size_t> rows,
                     std::span<double> grad_w, std::span<double> grad_b);

void softmax_inplace(std::span<double> logits);

// Multinomial logistic regression over bag-of-words counts. Vocabulary is
// built from the train corpus only; weights start at zero, so the seed only
// affects mini-batch shuffling.
struct BowClassifier {
  std::vector<std::string> vocabulary;  // feature index -> token
  std::unordered_map<std::string, int> token_index;
  int num_classes = 0;
  std::vector<double> weights;  // num_classes x vocab, row-major
  std::vector<double> bias;     // num_classes
  BowTrainConfig config;

  SparseFeatures featurize(const std::string& text) const;  // OOV dropped
  std::vector<double> probabilities(const SparseFeatures& features) const;
};

BowClassifier train_bow(const Corpus& train, const BowTrainConfig& config = {});

PredictionSet predict(const BowClassifier& model, const Corpus& test,
                      std::string model_name = "bow");

// Model persistence: vocabulary and config as JSON, weights as a binary blob
// with a JSON header line.
void save_bow(const BowClassifier& model,
              const std::filesystem::path& vocab_path,
              const std::filesystem::path& weights_path);
BowClassifier load_bow(const std::filesystem::path& vocab_path,
                       const std::filesystem::path& weights_path);

}  // namespace wood
