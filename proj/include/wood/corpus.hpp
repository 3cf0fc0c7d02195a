#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wood {

enum class CorpusRole { train, test };
enum class CorpusFormat { jsonl, csv };

const char* to_string(CorpusRole role);

struct Sample {
  std::string id;
  std::string text;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

// A validated, immutable-after-load collection of labeled texts. Sample order
// is file order and is preserved everywhere downstream.
struct Corpus {
  CorpusRole role = CorpusRole::train;
  int num_classes = 0;
  std::vector<Sample> samples;
  std::vector<std::string> label_names;  // optional, from the manifest

  size_t size() const { return samples.size(); }
  bool contains(std::string_view id) const;
  const Sample& at(std::string_view id) const;
  std::vector<std::string> ids() const;

  // Rebuilds the id index and checks every invariant: non-empty, unique ids,
  // labels in [0, num_classes). Call after building a corpus by hand.
  void finalize(bool allow_empty_text = false);

  // Digest over (id, text, label) of every sample, in order.
  std::string content_digest() const;
  std::string ids_digest() const;

 private:
  std::unordered_map<std::string, size_t> index_;
};

struct CorpusLoadOptions {
  bool allow_empty_text = false;
  // Explicit manifest path. When unset, `<stem>.manifest.json` next to the
  // corpus file is used if it exists.
  std::optional<std::filesystem::path> manifest;
};

// Loads and validates a corpus. JSONL records are {"id","text","label"}; CSV
// needs a header `id,text,label`. num_classes comes from the manifest when
// present, otherwise max(label)+1.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   CorpusRole role, const CorpusLoadOptions& options = {});

// Writes JSONL that load_corpus reads back field-for-field identical.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

CorpusFormat corpus_format_from_path(const std::filesystem::path& path);

struct PredictionRecord {
  std::string sample_id;
  int predicted_label = 0;
  std::vector<double> probabilities;

  // Probability of the predicted class; equals the max by the argmax rule.
  double confidence() const;

  bool operator==(const PredictionRecord&) const = default;
};

// One model's predictions over a test corpus. Records are keyed by sample id,
// so any on-disk ordering produces the same set.
struct PredictionSet {
  std::string model_name;
  std::map<std::string, PredictionRecord> records;
};

// Lowest index attaining the maximum.
int argmax(std::span<const double> values);

// Checks one record: probability vector length, range, sum within 1e-6 of 1,
// and predicted_label == argmax with lowest-index tie break.
void validate_record(const PredictionRecord& record, int num_classes);

// Loads JSONL predictions {"id","predicted_label","probabilities"} and
// validates every record against the test corpus. Fails on unknown, missing,
// or duplicate ids. model_name defaults to the file stem.
PredictionSet load_predictions(const std::filesystem::path& path,
                               const Corpus& test_corpus,
                               std::string model_name = "");

void save_predictions(const PredictionSet& preds,
                      const std::filesystem::path& path);

struct AlignmentReport {
  std::vector<std::string> missing;  // corpus ids absent from the predictions
  std::vector<std::string> extra;    // prediction ids absent from the corpus

  bool aligned() const { return missing.empty() && extra.empty(); }
};

// Report-only comparison of corpus ids vs prediction ids.
AlignmentReport validate_alignment(const Corpus& corpus,
                                   const PredictionSet& preds);

}  // namespace wood
