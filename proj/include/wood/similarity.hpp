#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wood/corpus.hpp"

namespace wood {

enum class SimilarityMethod { tfidf_cosine, ngram_jaccard, embedding_cosine, combined };

SimilarityMethod similarity_method_from_string(std::string_view name);
const char* to_string(SimilarityMethod method);

struct SimilarityConfig {
  SimilarityMethod method = SimilarityMethod::tfidf_cosine;
  // n-gram granularities for ngram_jaccard (first entry) and combined (all).
  std::vector<int> ngram_orders = {1, 2, 3};
  std::vector<double> granularity_weights = {1.0, 1.0, 1.0};
  bool lowercase = true;
  std::filesystem::path embedding_path;  // required for embedding_cosine

  void validate() const;
  // Canonical fingerprint of everything that affects matrix values,
  // including the embedding file content when that backend is active.
  std::string digest() const;
};

// Dense test-by-train similarity matrix. Entries are in [0,1] and are
// float32-representable, so the binary cache round-trips bit exactly.
struct SimilarityMatrix {
  std::vector<std::string> test_ids;
  std::vector<std::string> train_ids;
  std::vector<double> values;  // row-major, |test| x |train|

  size_t rows() const { return test_ids.size(); }
  size_t cols() const { return train_ids.size(); }
  double at(size_t i, size_t j) const { return values[i * cols() + j]; }
  std::span<const double> row(size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
  // Rows for the given subset of test ids, in the given order.
  SimilarityMatrix row_subset(std::span<const std::string> subset_ids) const;
};

// Computes similarity for every (test, train) pair. TF-IDF document
// frequencies are fitted on the train corpus only. Rows are computed in
// parallel; the result is identical for any worker count.
SimilarityMatrix similarity_matrix(const Corpus& train, const Corpus& test,
                                   const SimilarityConfig& config,
                                   int workers = 1);

// Jaccard index of the two n-gram sets; 0 if either set is empty.
double ngram_similarity(std::span<const std::string> a,
                        std::span<const std::string> b, int order);

// Weighted arithmetic mean with weights normalized to sum 1.
double combine_granularities(std::span<const double> scores,
                             std::span<const double> weights);

// Loads TSV `id<TAB>v1...<TAB>vd` and L2-normalizes each vector. Every
// expected id must be present; dimensions must agree; zero vectors rejected.
std::map<std::string, std::vector<double>> load_embeddings(
    const std::filesystem::path& path,
    std::span<const std::string> expected_ids);

void write_matrix_csv(const SimilarityMatrix& matrix,
                      const std::filesystem::path& path);
SimilarityMatrix read_matrix_csv(const std::filesystem::path& path);

// Binary cache: one JSON header line (shape plus corpus/config digests), then
// row-major little-endian float32 values.
void write_matrix_cache(const SimilarityMatrix& matrix,
                        const Corpus& train, const Corpus& test,
                        const SimilarityConfig& config,
                        const std::filesystem::path& path);

// Reads the cache back, verifying the header digests against the given
// corpora and config. Ids are restored from the corpora.
SimilarityMatrix read_matrix_cache(const std::filesystem::path& path,
                                   const Corpus& train, const Corpus& test,
                                   const SimilarityConfig& config);

}  // namespace wood
