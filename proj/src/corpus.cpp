#include "wood/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "wood/csv.hpp"
#include "wood/error.hpp"
#include "wood/util.hpp"

namespace wood {

using nlohmann::json;

const char* to_string(CorpusRole role) {
  return role == CorpusRole::train ? "train" : "test";
}

bool Corpus::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

const Sample& Corpus::at(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw ValidationError("unknown sample id: " + std::string(id));
  return samples[it->second];
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.id);
  return out;
}

void Corpus::finalize(bool allow_empty_text) {
  if (samples.empty()) throw ValidationError("corpus has no samples");
  if (num_classes <= 0) throw ValidationError("num_classes must be positive");
  if (!label_names.empty() &&
      label_names.size() != static_cast<size_t>(num_classes))
    throw ValidationError("label_names size does not match num_classes");
  index_.clear();
  index_.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.id.empty()) throw ValidationError("sample with empty id");
    if (!index_.emplace(s.id, i).second)
      throw ValidationError("duplicate sample id: " + s.id);
    if (s.text.empty() && !allow_empty_text)
      throw ValidationError("empty text for sample id: " + s.id);
    if (s.label < 0 || s.label >= num_classes)
      throw ValidationError("label out of range for sample id: " + s.id +
                            " (label " + std::to_string(s.label) + ", " +
                            std::to_string(num_classes) + " classes)");
  }
}

std::string Corpus::content_digest() const {
  Fnv64 h;
  for (const auto& s : samples) {
    h.update(s.id);
    h.update("\x1f");
    h.update(s.text);
    h.update("\x1f");
    h.update(std::to_string(s.label));
    h.update("\n");
  }
  return h.hex();
}

std::string Corpus::ids_digest() const {
  Fnv64 h;
  for (const auto& s : samples) {
    h.update(s.id);
    h.update("\n");
  }
  return h.hex();
}

namespace {

int parse_label(const std::string& raw, const std::string& where) {
  size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(raw, &pos);
  } catch (const std::exception&) {
    throw ValidationError("invalid label '" + raw + "' at " + where);
  }
  if (pos != raw.size() || value < 0)
    throw ValidationError("invalid label '" + raw + "' at " + where);
  return value;
}

std::vector<Sample> parse_jsonl_samples(const std::string& content,
                                        const std::string& path) {
  std::vector<Sample> samples;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t nl = content.find('\n', pos);
    std::string_view line(content.data() + pos,
                          (nl == std::string::npos ? content.size() : nl) - pos);
    pos = (nl == std::string::npos) ? content.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": invalid JSON: " + e.what());
    }
    const std::string where = path + ":" + std::to_string(line_no);
    if (!rec.is_object())
      throw ValidationError(where + ": record is not an object");
    for (const char* key : {"id", "text", "label"})
      if (!rec.contains(key))
        throw ValidationError(where + ": missing required field '" +
                              std::string(key) + "'");
    if (!rec["id"].is_string() || !rec["text"].is_string())
      throw ValidationError(where + ": 'id' and 'text' must be strings");
    if (!rec["label"].is_number_integer() ||
        rec["label"].get<long long>() < 0)
      throw ValidationError(where +
                            ": 'label' must be a non-negative integer");
    samples.push_back(Sample{rec["id"].get<std::string>(),
                             rec["text"].get<std::string>(),
                             rec["label"].get<int>()});
  }
  return samples;
}

std::vector<Sample> parse_csv_samples(const std::string& content,
                                      const std::string& path) {
  auto rows = parse_csv(content);
  if (rows.empty())
    throw ValidationError("empty corpus file: " + path);
  const auto& header = rows.front();
  if (header.size() < 3 || header[0] != "id" || header[1] != "text" ||
      header[2] != "label")
    throw ValidationError(path + ": CSV header must be id,text,label");
  std::vector<Sample> samples;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + ":row " + std::to_string(r + 1);
    if (row.size() < 3)
      throw ValidationError(where + ": missing required field");
    samples.push_back(Sample{row[0], row[1], parse_label(row[2], where)});
  }
  return samples;
}

std::optional<std::filesystem::path> default_manifest_path(
    const std::filesystem::path& corpus_path) {
  std::filesystem::path candidate = corpus_path;
  candidate.replace_extension(".manifest.json");
  if (std::filesystem::exists(candidate)) return candidate;
  return std::nullopt;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   CorpusRole role, const CorpusLoadOptions& options) {
  const std::string content = read_file(path);
  if (content.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ValidationError("empty corpus file: " + path.string());

  Corpus corpus;
  corpus.role = role;
  corpus.samples = format == CorpusFormat::jsonl
                       ? parse_jsonl_samples(content, path.string())
                       : parse_csv_samples(content, path.string());
  if (corpus.samples.empty())
    throw ValidationError("empty corpus file: " + path.string());

  auto manifest_path =
      options.manifest ? options.manifest : default_manifest_path(path);
  if (manifest_path) {
    json manifest;
    try {
      manifest = json::parse(read_file(*manifest_path));
    } catch (const json::exception& e) {
      throw ValidationError(manifest_path->string() +
                            ": invalid manifest JSON: " + e.what());
    }
    if (manifest.contains("num_classes")) {
      if (!manifest["num_classes"].is_number_integer() ||
          manifest["num_classes"].get<int>() <= 0)
        throw ValidationError(manifest_path->string() +
                              ": num_classes must be a positive integer");
      corpus.num_classes = manifest["num_classes"].get<int>();
    }
    if (manifest.contains("label_names"))
      corpus.label_names =
          manifest["label_names"].get<std::vector<std::string>>();
  }
  if (corpus.num_classes == 0) {
    int max_label = 0;
    for (const auto& s : corpus.samples)
      max_label = std::max(max_label, s.label);
    corpus.num_classes = max_label + 1;
  }
  corpus.finalize(options.allow_empty_text);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& s : corpus.samples) {
    json rec{{"id", s.id}, {"text", s.text}, {"label", s.label}};
    out += rec.dump();
    out += '\n';
  }
  write_file(path, out);
}

CorpusFormat corpus_format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".csv") return CorpusFormat::csv;
  return CorpusFormat::jsonl;
}

double PredictionRecord::confidence() const {
  if (predicted_label < 0 ||
      static_cast<size_t>(predicted_label) >= probabilities.size())
    return 0.0;
  return probabilities[static_cast<size_t>(predicted_label)];
}

int argmax(std::span<const double> values) {
  if (values.empty())
    throw ValidationError("argmax of an empty vector");
  int best = 0;
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = static_cast<int>(i);
  return best;
}

void validate_record(const PredictionRecord& record, int num_classes) {
  const std::string& id = record.sample_id;
  if (record.probabilities.size() != static_cast<size_t>(num_classes))
    throw ValidationError("prediction for '" + id + "': expected " +
                          std::to_string(num_classes) + " probabilities, got " +
                          std::to_string(record.probabilities.size()));
  double sum = 0.0;
  for (double p : record.probabilities) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("prediction for '" + id +
                            "': probability out of [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError("prediction for '" + id +
                          "': probabilities sum to " + format_double(sum));
  if (record.predicted_label < 0 || record.predicted_label >= num_classes)
    throw ValidationError("prediction for '" + id +
                          "': predicted_label out of range");
  if (record.predicted_label != argmax(record.probabilities))
    throw ValidationError("prediction for '" + id +
                          "': predicted_label is not the argmax of the "
                          "probabilities (ties resolve to the lowest index)");
}

PredictionSet load_predictions(const std::filesystem::path& path,
                               const Corpus& test_corpus,
                               std::string model_name) {
  if (test_corpus.role != CorpusRole::test)
    throw ValidationError("predictions must be loaded against a test corpus");
  const std::string content = read_file(path);

  PredictionSet set;
  set.model_name = model_name.empty() ? path.stem().string() : model_name;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t nl = content.find('\n', pos);
    std::string_view line(content.data() + pos,
                          (nl == std::string::npos ? content.size() : nl) - pos);
    pos = (nl == std::string::npos) ? content.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(where + ": invalid JSON: " + e.what());
    }
    for (const char* key : {"id", "predicted_label", "probabilities"})
      if (!rec.contains(key))
        throw ValidationError(where + ": missing required field '" +
                              std::string(key) + "'");
    PredictionRecord record;
    if (!rec["id"].is_string())
      throw ValidationError(where + ": 'id' must be a string");
    record.sample_id = rec["id"].get<std::string>();
    if (!rec["predicted_label"].is_number_integer())
      throw ValidationError(where + ": 'predicted_label' must be an integer");
    record.predicted_label = rec["predicted_label"].get<int>();
    if (!rec["probabilities"].is_array())
      throw ValidationError(where + ": 'probabilities' must be an array");
    record.probabilities = rec["probabilities"].get<std::vector<double>>();

    if (!test_corpus.contains(record.sample_id))
      throw ValidationError(where + ": unknown sample id '" +
                            record.sample_id + "'");
    validate_record(record, test_corpus.num_classes);
    if (!set.records.emplace(record.sample_id, std::move(record)).second)
      throw ValidationError(where + ": duplicate prediction for sample id");
  }

  auto report = validate_alignment(test_corpus, set);
  if (!report.missing.empty())
    throw ValidationError(path.string() + ": missing predictions for " +
                          std::to_string(report.missing.size()) +
                          " sample(s), first: '" + report.missing.front() +
                          "'");
  return set;
}

void save_predictions(const PredictionSet& preds,
                      const std::filesystem::path& path) {
  std::string out;
  for (const auto& [id, record] : preds.records) {
    json rec{{"id", id},
             {"predicted_label", record.predicted_label},
             {"probabilities", record.probabilities}};
    out += rec.dump();
    out += '\n';
  }
  write_file(path, out);
}

AlignmentReport validate_alignment(const Corpus& corpus,
                                   const PredictionSet& preds) {
  AlignmentReport report;
  for (const auto& s : corpus.samples)
    if (preds.records.find(s.id) == preds.records.end())
      report.missing.push_back(s.id);
  for (const auto& [id, record] : preds.records)
    if (!corpus.contains(id)) report.extra.push_back(id);
  return report;
}

}  // namespace wood
