#include "wood/baseline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "wood/error.hpp"
#include "wood/rng.hpp"
#include "wood/text.hpp"
#include "wood/util.hpp"

namespace wood {

using nlohmann::json;

void softmax_inplace(std::span<double> logits) {
  if (logits.empty())
    throw ValidationError("softmax over an empty vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

namespace {

void check_shapes(const BowDataset& data, std::span<const double> weights,
                  std::span<const double> bias) {
  if (data.num_features < 0 || data.num_classes < 1)
    throw ValidationError("invalid dataset shape");
  const auto c = static_cast<size_t>(data.num_classes);
  const auto f = static_cast<size_t>(data.num_features);
  if (weights.size() != c * f)
    throw ValidationError("weight matrix has the wrong size");
  if (bias.size() != c)
    throw ValidationError("bias vector has the wrong size");
  if (data.x.size() != data.y.size())
    throw ValidationError("dataset features and labels differ in length");
}

std::vector<double> row_logits(const BowDataset& data,
                               std::span<const double> weights,
                               std::span<const double> bias, size_t row) {
  const auto f = static_cast<size_t>(data.num_features);
  std::vector<double> logits(bias.begin(), bias.end());
  for (const auto& [idx, v] : data.x[row]) {
    if (idx < 0 || idx >= data.num_features)
      throw ValidationError("feature index out of range");
    for (size_t c = 0; c < logits.size(); ++c)
      logits[c] += weights[c * f + static_cast<size_t>(idx)] * v;
  }
  return logits;
}

// Shared core: accumulates mean loss, and mean gradients when requested.
double loss_impl(const BowDataset& data, std::span<const double> weights,
                 std::span<const double> bias, std::span<const size_t> rows,
                 std::span<double>* grad_w, std::span<double>* grad_b) {
  check_shapes(data, weights, bias);
  std::vector<size_t> all;
  if (rows.empty()) {
    all.resize(data.x.size());
    std::iota(all.begin(), all.end(), 0);
    rows = all;
  }
  if (rows.empty())
    throw ValidationError("loss over an empty dataset");
  if (grad_w) {
    std::fill(grad_w->begin(), grad_w->end(), 0.0);
    std::fill(grad_b->begin(), grad_b->end(), 0.0);
  }

  const auto f = static_cast<size_t>(data.num_features);
  double loss = 0.0;
  for (size_t row : rows) {
    if (row >= data.x.size())
      throw ValidationError("row index out of range");
    const int y = data.y[row];
    if (y < 0 || y >= data.num_classes)
      throw ValidationError("label out of range in dataset");

    std::vector<double> logits = row_logits(data, weights, bias, row);
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
      v = std::exp(v - m);
      sum += v;
    }
    // -log softmax(y): exp(logit_y - m) survived in logits[y]
    loss += std::log(sum) - std::log(logits[static_cast<size_t>(y)]);

    if (grad_w) {
      for (size_t c = 0; c < logits.size(); ++c) {
        const double residual =
            logits[c] / sum - (static_cast<int>(c) == y ? 1.0 : 0.0);
        (*grad_b)[c] += residual;
        for (const auto& [idx, v] : data.x[row])
          (*grad_w)[c * f + static_cast<size_t>(idx)] += residual * v;
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(rows.size());
  if (grad_w) {
    for (double& g : *grad_w) g *= inv_n;
    for (double& g : *grad_b) g *= inv_n;
  }
  return loss * inv_n;
}

}  // namespace

double bow_loss(const BowDataset& data, std::span<const double> weights,
                std::span<const double> bias, std::span<const size_t> rows) {
  return loss_impl(data, weights, bias, rows, nullptr, nullptr);
}

double bow_loss_grad(const BowDataset& data, std::span<const double> weights,
                     std::span<const double> bias, std::span<const size_t> rows,
                     std::span<double> grad_w, std::span<double> grad_b) {
  if (grad_w.size() != weights.size() || grad_b.size() != bias.size())
    throw ValidationError("gradient buffers have the wrong size");
  return loss_impl(data, weights, bias, rows, &grad_w, &grad_b);
}

SparseFeatures BowClassifier::featurize(const std::string& text) const {
  std::vector<int> indices;
  for (const auto& tok : preprocess(text)) {
    auto it = token_index.find(tok);
    if (it != token_index.end()) indices.push_back(it->second);
  }
  std::sort(indices.begin(), indices.end());
  SparseFeatures features;
  for (size_t i = 0; i < indices.size();) {
    size_t j = i;
    while (j < indices.size() && indices[j] == indices[i]) ++j;
    features.emplace_back(indices[i], static_cast<double>(j - i));
    i = j;
  }
  return features;
}

std::vector<double> BowClassifier::probabilities(
    const SparseFeatures& features) const {
  const size_t f = vocabulary.size();
  std::vector<double> logits(bias.begin(), bias.end());
  for (const auto& [idx, v] : features)
    for (size_t c = 0; c < logits.size(); ++c)
      logits[c] += weights[c * f + static_cast<size_t>(idx)] * v;
  softmax_inplace(logits);
  return logits;
}

BowClassifier train_bow(const Corpus& train, const BowTrainConfig& config) {
  if (train.role != CorpusRole::train)
    throw ValidationError("train_bow expects a train-role corpus");
  if (config.epochs < 1)
    throw ValidationError("epochs must be positive");
  if (config.learning_rate < 0.0 || !std::isfinite(config.learning_rate))
    throw ValidationError("learning rate must be non-negative");
  if (config.batch_size < 1)
    throw ValidationError("batch size must be positive");
  {
    std::vector<bool> present(static_cast<size_t>(train.num_classes), false);
    for (const auto& s : train.samples)
      present[static_cast<size_t>(s.label)] = true;
    if (std::count(present.begin(), present.end(), true) < 2)
      throw ValidationError(
          "training requires at least two classes present in the corpus");
  }

  BowClassifier model;
  model.num_classes = train.num_classes;
  model.config = config;
  for (const auto& s : train.samples)
    for (const auto& tok : preprocess(s.text))
      if (model.token_index.emplace(tok, static_cast<int>(
                                             model.vocabulary.size()))
              .second)
        model.vocabulary.push_back(tok);

  BowDataset data;
  data.num_features = static_cast<int>(model.vocabulary.size());
  data.num_classes = model.num_classes;
  data.x.reserve(train.size());
  data.y.reserve(train.size());
  for (const auto& s : train.samples) {
    data.x.push_back(model.featurize(s.text));
    data.y.push_back(s.label);
  }

  const size_t c = static_cast<size_t>(model.num_classes);
  const size_t f = model.vocabulary.size();
  model.weights.assign(c * f, 0.0);
  model.bias.assign(c, 0.0);

  std::vector<double> grad_w(c * f);
  std::vector<double> grad_b(c);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(config.seed);
  const auto batch = static_cast<size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t end = std::min(start + batch, order.size());
      std::span<const size_t> rows(order.data() + start, end - start);
      bow_loss_grad(data, model.weights, model.bias, rows, grad_w, grad_b);
      for (size_t i = 0; i < model.weights.size(); ++i)
        model.weights[i] -= config.learning_rate * grad_w[i];
      for (size_t i = 0; i < model.bias.size(); ++i)
        model.bias[i] -= config.learning_rate * grad_b[i];
    }
  }
  return model;
}

PredictionSet predict(const BowClassifier& model, const Corpus& test,
                      std::string model_name) {
  PredictionSet preds;
  preds.model_name = std::move(model_name);
  for (const auto& s : test.samples) {
    PredictionRecord rec;
    rec.sample_id = s.id;
    rec.probabilities = model.probabilities(model.featurize(s.text));
    rec.predicted_label = argmax(rec.probabilities);
    preds.records.emplace(s.id, std::move(rec));
  }
  return preds;
}

namespace {

void append_f64_le(std::string& buf, double v) {
  const uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int shift = 0; shift < 64; shift += 8)
    buf.push_back(static_cast<char>((bits >> shift) & 0xff));
}

double read_f64_le(const unsigned char* bytes) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_bow(const BowClassifier& model,
              const std::filesystem::path& vocab_path,
              const std::filesystem::path& weights_path) {
  json vocab{{"format", "wood-bow-vocab-v1"},
             {"num_classes", model.num_classes},
             {"vocabulary", model.vocabulary},
             {"config",
              {{"epochs", model.config.epochs},
               {"learning_rate", model.config.learning_rate},
               {"batch_size", model.config.batch_size},
               {"seed", model.config.seed}}}};
  write_file(vocab_path, vocab.dump(2) + "\n");

  json header{{"format", "wood-bow-weights-v1"},
              {"num_classes", model.num_classes},
              {"num_features", model.vocabulary.size()}};
  std::string buf = header.dump();
  buf.push_back('\n');
  buf.reserve(buf.size() + (model.weights.size() + model.bias.size()) * 8);
  for (double v : model.weights) append_f64_le(buf, v);
  for (double v : model.bias) append_f64_le(buf, v);
  write_file(weights_path, buf);
}

BowClassifier load_bow(const std::filesystem::path& vocab_path,
                       const std::filesystem::path& weights_path) {
  BowClassifier model;
  try {
    const json vocab = json::parse(read_file(vocab_path));
    if (vocab.value("format", "") != "wood-bow-vocab-v1")
      throw ValidationError(vocab_path.string() +
                            ": unknown vocabulary format");
    model.num_classes = vocab.at("num_classes").get<int>();
    model.vocabulary = vocab.at("vocabulary").get<std::vector<std::string>>();
    const json& cfg = vocab.at("config");
    model.config.epochs = cfg.at("epochs").get<int>();
    model.config.learning_rate = cfg.at("learning_rate").get<double>();
    model.config.batch_size = cfg.at("batch_size").get<int>();
    model.config.seed = cfg.at("seed").get<uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(vocab_path.string() + ": bad vocabulary file: " +
                          e.what());
  }
  for (size_t i = 0; i < model.vocabulary.size(); ++i)
    model.token_index.emplace(model.vocabulary[i], static_cast<int>(i));

  const std::string blob = read_file(weights_path);
  const size_t nl = blob.find('\n');
  if (nl == std::string::npos)
    throw IoError(weights_path.string() + ": weight blob has no header line");
  json header;
  try {
    header = json::parse(blob.substr(0, nl));
  } catch (const json::exception& e) {
    throw IoError(weights_path.string() + ": bad weight header: " + e.what());
  }
  if (header.value("format", "") != "wood-bow-weights-v1")
    throw ValidationError(weights_path.string() + ": unknown weight format");
  const auto c = header.at("num_classes").get<size_t>();
  const auto f = header.at("num_features").get<size_t>();
  if (c != static_cast<size_t>(model.num_classes) ||
      f != model.vocabulary.size())
    throw ValidationError(weights_path.string() +
                          ": weight shapes do not match the vocabulary file");
  const size_t n = c * f + c;
  if (blob.size() - nl - 1 != n * 8)
    throw IoError(weights_path.string() + ": weight blob is truncated");
  const auto* bytes =
      reinterpret_cast<const unsigned char*>(blob.data() + nl + 1);
  model.weights.resize(c * f);
  model.bias.resize(c);
  for (size_t i = 0; i < c * f; ++i)
    model.weights[i] = read_f64_le(bytes + 8 * i);
  for (size_t i = 0; i < c; ++i)
    model.bias[i] = read_f64_le(bytes + 8 * (c * f + i));
  return model;
}

}  // namespace wood
