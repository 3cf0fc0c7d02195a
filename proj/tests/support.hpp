#pragma once

// Shared fixtures and independent reference implementations ("oracles") used
// to cross-check the library. The oracles deliberately use different
// algorithms than the production code.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "wood/corpus.hpp"
#include "wood/rng.hpp"
#include "wood/similarity.hpp"

namespace support {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("wood-test-" + std::to_string(stamp) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline wood::Corpus make_corpus(wood::CorpusRole role,
                                const std::vector<std::string>& texts,
                                const std::vector<int>& labels = {},
                                int num_classes = 0) {
  wood::Corpus corpus;
  corpus.role = role;
  int max_label = 0;
  for (size_t i = 0; i < texts.size(); ++i) {
    const int label = labels.empty() ? 0 : labels[i];
    max_label = std::max(max_label, label);
    corpus.samples.push_back(
        {(role == wood::CorpusRole::train ? "t" : "s") + std::to_string(i),
         texts[i], label});
  }
  corpus.num_classes = num_classes > 0 ? num_classes : max_label + 1;
  corpus.finalize();
  return corpus;
}

// A one-record-per-sample prediction set; prob mass `confidence` on the
// predicted class, the remainder spread uniformly.
inline wood::PredictionSet make_predictions(
    const wood::Corpus& test, const std::vector<int>& predicted,
    double confidence = 0.9, std::string model_name = "m") {
  wood::PredictionSet preds;
  preds.model_name = std::move(model_name);
  const int c = test.num_classes;
  for (size_t i = 0; i < test.size(); ++i) {
    wood::PredictionRecord rec;
    rec.sample_id = test.samples[i].id;
    rec.predicted_label = predicted[i];
    rec.probabilities.assign(c, c > 1 ? (1.0 - confidence) / (c - 1) : 1.0);
    if (c > 1) rec.probabilities[predicted[i]] = confidence;
    preds.records.emplace(rec.sample_id, rec);
  }
  return preds;
}

// Matrix over a dyadic grid: every entry is k/1024, so double sums are exact
// and the values are float32-representable. min_k=1 keeps sums above any
// epsilon clamp.
inline wood::SimilarityMatrix random_matrix(wood::SplitMix64& rng, size_t rows,
                                            size_t cols, uint64_t min_k = 0) {
  wood::SimilarityMatrix m;
  for (size_t i = 0; i < rows; ++i) m.test_ids.push_back("s" + std::to_string(i));
  for (size_t j = 0; j < cols; ++j) m.train_ids.push_back("t" + std::to_string(j));
  m.values.resize(rows * cols);
  for (auto& v : m.values)
    v = static_cast<double>(min_k + rng.below(1025 - min_k)) / 1024.0;
  return m;
}

namespace oracle {

// Selection-based top-count sum: repeatedly extract the maximum. Adds values
// in the same descending order as the library, by a different algorithm.
inline double topb_sum(std::vector<double> v, size_t count) {
  double sum = 0.0;
  for (size_t i = 0; i < count; ++i) {
    auto it = std::max_element(v.begin() + static_cast<ptrdiff_t>(i), v.end());
    std::iter_swap(v.begin() + static_cast<ptrdiff_t>(i), it);
    sum += v[i];
  }
  return sum;
}

inline size_t topb_count(size_t train_size, double b_percent) {
  auto count = static_cast<size_t>(
      std::floor(b_percent * static_cast<double>(train_size) / 100.0));
  return std::min(std::max<size_t>(count, 1), train_size);
}

}  // namespace oracle

inline std::vector<std::filesystem::path> files_under(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> rel;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      rel.push_back(std::filesystem::relative(entry.path(), dir));
  std::sort(rel.begin(), rel.end());
  return rel;
}

}  // namespace support
