#include "wood/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "wood/csv.hpp"
#include "wood/error.hpp"
#include "wood/parallel.hpp"
#include "wood/text.hpp"
#include "wood/util.hpp"

namespace wood {

using nlohmann::json;

SimilarityMethod similarity_method_from_string(std::string_view name) {
  if (name == "tfidf_cosine") return SimilarityMethod::tfidf_cosine;
  if (name == "ngram_jaccard") return SimilarityMethod::ngram_jaccard;
  if (name == "embedding_cosine") return SimilarityMethod::embedding_cosine;
  if (name == "combined") return SimilarityMethod::combined;
  throw ValidationError("unknown similarity method: " + std::string(name));
}

const char* to_string(SimilarityMethod method) {
  switch (method) {
    case SimilarityMethod::tfidf_cosine: return "tfidf_cosine";
    case SimilarityMethod::ngram_jaccard: return "ngram_jaccard";
    case SimilarityMethod::embedding_cosine: return "embedding_cosine";
    case SimilarityMethod::combined: return "combined";
  }
  return "unknown";
}

void SimilarityConfig::validate() const {
  if (ngram_orders.empty())
    throw ValidationError("ngram_orders must not be empty");
  for (size_t i = 0; i < ngram_orders.size(); ++i) {
    if (ngram_orders[i] < 1)
      throw ValidationError("ngram orders must be >= 1");
    if (i > 0 && ngram_orders[i] <= ngram_orders[i - 1])
      throw ValidationError("ngram_orders must be strictly increasing");
  }
  if (granularity_weights.size() != ngram_orders.size())
    throw ValidationError(
        "granularity_weights must match ngram_orders in length");
  double weight_sum = 0.0;
  for (double w : granularity_weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw ValidationError("granularity weights must be non-negative");
    weight_sum += w;
  }
  if (method == SimilarityMethod::combined && weight_sum <= 0.0)
    throw ValidationError(
        "granularity_weights must have a positive sum for method=combined");
  if (method == SimilarityMethod::embedding_cosine && embedding_path.empty())
    throw ValidationError("embedding_cosine requires an embedding file");
}

std::string SimilarityConfig::digest() const {
  std::string canon = std::string("method=") + to_string(method);
  canon += ";orders=";
  for (int o : ngram_orders) canon += std::to_string(o) + ",";
  canon += ";weights=";
  for (double w : granularity_weights) canon += format_double(w) + ",";
  canon += ";lowercase=";
  canon += lowercase ? "1" : "0";
  if (method == SimilarityMethod::embedding_cosine)
    canon += ";embeddings=" + fnv64_hex(read_file(embedding_path));
  return fnv64_hex(canon);
}

namespace {

// Clamp to [0,1], then round through float32 so the in-memory matrix equals
// the binary cache bit for bit.
double quantize_entry(double v) {
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return static_cast<double>(static_cast<float>(v));
}

using TokenList = std::vector<std::string>;

std::vector<TokenList> tokenize_corpus(const Corpus& corpus, bool lowercase) {
  std::vector<TokenList> out;
  out.reserve(corpus.samples.size());
  for (const auto& s : corpus.samples)
    out.push_back(preprocess(s.text, lowercase));
  return out;
}

void reject_all_empty(const std::vector<TokenList>& docs, const char* side) {
  for (const auto& d : docs)
    if (!d.empty()) return;
  throw ValidationError(std::string("degenerate corpus: every ") + side +
                        " text is empty after preprocessing");
}

// --- TF-IDF backend -------------------------------------------------------

using SparseVec = std::vector<std::pair<int, double>>;  // sorted by index

struct TfidfVectorizer {
  std::unordered_map<std::string, int> vocab;  // fitted on train only
  std::vector<double> idf;

  void fit(const std::vector<TokenList>& train_docs) {
    std::vector<int> df;
    std::unordered_set<int> seen;
    for (const auto& doc : train_docs) {
      seen.clear();
      for (const auto& tok : doc) {
        auto [it, inserted] = vocab.emplace(tok, static_cast<int>(df.size()));
        if (inserted) df.push_back(0);
        if (seen.insert(it->second).second) ++df[it->second];
      }
    }
    const double n = static_cast<double>(train_docs.size());
    idf.resize(df.size());
    for (size_t i = 0; i < df.size(); ++i)
      idf[i] = std::log((1.0 + n) / (1.0 + df[i])) + 1.0;
  }

  // Raw-count TF times IDF, L2-normalized. OOV tokens contribute nothing.
  SparseVec transform(const TokenList& doc) const {
    std::vector<int> indices;
    indices.reserve(doc.size());
    for (const auto& tok : doc) {
      auto it = vocab.find(tok);
      if (it != vocab.end()) indices.push_back(it->second);
    }
    std::sort(indices.begin(), indices.end());
    SparseVec vec;
    for (size_t i = 0; i < indices.size();) {
      size_t j = i;
      while (j < indices.size() && indices[j] == indices[i]) ++j;
      double count = static_cast<double>(j - i);
      vec.emplace_back(indices[i], count * idf[indices[i]]);
      i = j;
    }
    double norm_sq = 0.0;
    for (const auto& [idx, w] : vec) norm_sq += w * w;
    if (norm_sq <= 0.0) return {};
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (auto& [idx, w] : vec) w *= inv_norm;
    return vec;
  }
};

double sparse_dot(const SparseVec& a, const SparseVec& b) {
  double dot = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return dot;
}

// --- n-gram backend -------------------------------------------------------

// Sorted unique n-grams, each joined with a separator no token can contain
// (0x1f never survives tokenization).
std::vector<std::string> ngram_set(std::span<const std::string> tokens,
                                   int order) {
  std::vector<std::string> grams;
  if (order < 1 || tokens.size() < static_cast<size_t>(order)) return grams;
  grams.reserve(tokens.size() - order + 1);
  for (size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string g = tokens[i];
    for (int k = 1; k < order; ++k) {
      g.push_back('\x1f');
      g += tokens[i + k];
    }
    grams.push_back(std::move(g));
  }
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

double jaccard_sorted(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  size_t inter = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = a[i].compare(b[j]);
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::vector<std::string>> ngram_sets_for(
    const std::vector<TokenList>& docs, int order) {
  std::vector<std::vector<std::string>> sets;
  sets.reserve(docs.size());
  for (const auto& doc : docs) sets.push_back(ngram_set(doc, order));
  return sets;
}

}  // namespace

double ngram_similarity(std::span<const std::string> a,
                        std::span<const std::string> b, int order) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  return jaccard_sorted(ngram_set(a, order), ngram_set(b, order));
}

double combine_granularities(std::span<const double> scores,
                             std::span<const double> weights) {
  if (scores.size() != weights.size())
    throw ValidationError("scores and weights must have the same length");
  double weight_sum = 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (weights[i] < 0.0)
      throw ValidationError("granularity weights must be non-negative");
    acc += weights[i] * scores[i];
    weight_sum += weights[i];
  }
  if (weight_sum <= 0.0)
    throw ValidationError("granularity weights must have a positive sum");
  return acc / weight_sum;
}

std::map<std::string, std::vector<double>> load_embeddings(
    const std::filesystem::path& path,
    std::span<const std::string> expected_ids) {
  const std::string content = read_file(path);
  std::map<std::string, std::vector<double>> table;
  size_t dim = 0;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t nl = content.find('\n', pos);
    std::string_view line(content.data() + pos,
                          (nl == std::string::npos ? content.size() : nl) - pos);
    pos = (nl == std::string::npos) ? content.size() + 1 : nl + 1;
    ++line_no;
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);

    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ValidationError(where + ": expected id<TAB>values");
    std::string id(line.substr(0, tab));
    std::vector<double> vec;
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      size_t next = rest.find('\t');
      std::string field(rest.substr(0, next));
      try {
        size_t used = 0;
        vec.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ValidationError(where + ": invalid number '" + field + "'");
      }
      if (next == std::string_view::npos) break;
      rest.remove_prefix(next + 1);
    }
    if (vec.empty())
      throw ValidationError(where + ": vector has no components");
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim)
      throw ValidationError(where + ": dimension mismatch (expected " +
                            std::to_string(dim) + ", got " +
                            std::to_string(vec.size()) + ")");
    double norm_sq = 0.0;
    for (double v : vec) norm_sq += v * v;
    if (!(norm_sq > 0.0) || !std::isfinite(norm_sq))
      throw ValidationError(where + ": zero or non-finite vector for id '" +
                            id + "'");
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (double& v : vec) v *= inv_norm;
    if (!table.emplace(std::move(id), std::move(vec)).second)
      throw ValidationError(where + ": duplicate embedding id");
  }
  for (const auto& id : expected_ids)
    if (table.find(id) == table.end())
      throw ValidationError(path.string() + ": missing embedding for id '" +
                            id + "'");
  return table;
}

SimilarityMatrix SimilarityMatrix::row_subset(
    std::span<const std::string> subset_ids) const {
  std::unordered_map<std::string_view, size_t> row_of;
  row_of.reserve(test_ids.size());
  for (size_t i = 0; i < test_ids.size(); ++i) row_of.emplace(test_ids[i], i);

  SimilarityMatrix out;
  out.train_ids = train_ids;
  out.test_ids.reserve(subset_ids.size());
  out.values.reserve(subset_ids.size() * cols());
  for (const auto& id : subset_ids) {
    auto it = row_of.find(id);
    if (it == row_of.end())
      throw ValidationError("row_subset: unknown test id '" + id + "'");
    out.test_ids.push_back(id);
    auto r = row(it->second);
    out.values.insert(out.values.end(), r.begin(), r.end());
  }
  return out;
}

SimilarityMatrix similarity_matrix(const Corpus& train, const Corpus& test,
                                   const SimilarityConfig& config,
                                   int workers) {
  config.validate();
  if (train.samples.empty() || test.samples.empty())
    throw ValidationError("similarity_matrix requires non-empty corpora");

  SimilarityMatrix m;
  m.train_ids = train.ids();
  m.test_ids = test.ids();
  const size_t rows = m.test_ids.size();
  const size_t cols = m.train_ids.size();
  m.values.assign(rows * cols, 0.0);

  switch (config.method) {
    case SimilarityMethod::tfidf_cosine: {
      auto train_docs = tokenize_corpus(train, config.lowercase);
      auto test_docs = tokenize_corpus(test, config.lowercase);
      reject_all_empty(train_docs, "train");
      reject_all_empty(test_docs, "test");

      TfidfVectorizer vectorizer;
      vectorizer.fit(train_docs);
      std::vector<SparseVec> train_vecs(cols);
      for (size_t j = 0; j < cols; ++j)
        train_vecs[j] = vectorizer.transform(train_docs[j]);

      parallel_chunks(rows, workers, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
          const SparseVec test_vec = vectorizer.transform(test_docs[i]);
          double* out = m.values.data() + i * cols;
          for (size_t j = 0; j < cols; ++j)
            out[j] = quantize_entry(sparse_dot(test_vec, train_vecs[j]));
        }
      });
      break;
    }
    case SimilarityMethod::ngram_jaccard:
    case SimilarityMethod::combined: {
      auto train_docs = tokenize_corpus(train, config.lowercase);
      auto test_docs = tokenize_corpus(test, config.lowercase);
      reject_all_empty(train_docs, "train");
      reject_all_empty(test_docs, "test");

      const bool combined = config.method == SimilarityMethod::combined;
      std::vector<int> orders =
          combined ? config.ngram_orders
                   : std::vector<int>{config.ngram_orders.front()};
      std::vector<double> weights =
          combined ? config.granularity_weights : std::vector<double>{1.0};

      std::vector<std::vector<std::vector<std::string>>> train_sets;
      std::vector<std::vector<std::vector<std::string>>> test_sets;
      for (int order : orders) {
        train_sets.push_back(ngram_sets_for(train_docs, order));
        test_sets.push_back(ngram_sets_for(test_docs, order));
      }

      parallel_chunks(rows, workers, [&](size_t begin, size_t end) {
        std::vector<double> scores(orders.size());
        for (size_t i = begin; i < end; ++i) {
          double* out = m.values.data() + i * cols;
          for (size_t j = 0; j < cols; ++j) {
            for (size_t o = 0; o < orders.size(); ++o)
              scores[o] = jaccard_sorted(test_sets[o][i], train_sets[o][j]);
            double s = combined ? combine_granularities(scores, weights)
                                : scores[0];
            out[j] = quantize_entry(s);
          }
        }
      });
      break;
    }
    case SimilarityMethod::embedding_cosine: {
      std::vector<std::string> expected = m.train_ids;
      {
        std::unordered_set<std::string_view> seen(expected.begin(),
                                                  expected.end());
        for (const auto& id : m.test_ids)
          if (seen.insert(id).second) expected.push_back(id);
      }
      auto table = load_embeddings(config.embedding_path, expected);

      std::vector<const std::vector<double>*> train_vecs(cols);
      for (size_t j = 0; j < cols; ++j)
        train_vecs[j] = &table.at(m.train_ids[j]);

      parallel_chunks(rows, workers, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
          const auto& test_vec = table.at(m.test_ids[i]);
          double* out = m.values.data() + i * cols;
          for (size_t j = 0; j < cols; ++j) {
            const auto& tv = *train_vecs[j];
            double dot = 0.0;
            for (size_t d = 0; d < tv.size(); ++d) dot += test_vec[d] * tv[d];
            out[j] = quantize_entry(dot);  // negative cosine clamps to 0
          }
        }
      });
      break;
    }
  }
  return m;
}

// --- matrix serialization --------------------------------------------------

void write_matrix_csv(const SimilarityMatrix& matrix,
                      const std::filesystem::path& path) {
  CsvWriter csv;
  std::vector<std::string> header;
  header.reserve(matrix.cols() + 1);
  header.push_back("id");
  for (const auto& id : matrix.train_ids) header.push_back(id);
  csv.row(header);
  std::vector<std::string> row(matrix.cols() + 1);
  for (size_t i = 0; i < matrix.rows(); ++i) {
    row[0] = matrix.test_ids[i];
    for (size_t j = 0; j < matrix.cols(); ++j)
      row[j + 1] = format_double(matrix.at(i, j));
    csv.row(row);
  }
  csv.save(path);
}

SimilarityMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto rows = parse_csv(read_file(path));
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "id")
    throw ValidationError(path.string() + ": not a similarity matrix CSV");
  SimilarityMatrix m;
  m.train_ids.assign(rows[0].begin() + 1, rows[0].end());
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw ValidationError(path.string() + ": ragged row " +
                            std::to_string(r + 1));
    m.test_ids.push_back(rows[r][0]);
    for (size_t j = 1; j < rows[r].size(); ++j) {
      try {
        size_t used = 0;
        m.values.push_back(std::stod(rows[r][j], &used));
        if (used != rows[r][j].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ValidationError(path.string() + ": invalid value '" +
                              rows[r][j] + "'");
      }
    }
  }
  return m;
}

namespace {

json cache_header(const SimilarityMatrix& matrix, const Corpus& train,
                  const Corpus& test, const SimilarityConfig& config) {
  return json{{"format", "wood-matrix-cache-v1"},
              {"rows", matrix.rows()},
              {"cols", matrix.cols()},
              {"test_ids_digest", test.ids_digest()},
              {"train_ids_digest", train.ids_digest()},
              {"test_content_digest", test.content_digest()},
              {"train_content_digest", train.content_digest()},
              {"config_digest", config.digest()}};
}

}  // namespace

void write_matrix_cache(const SimilarityMatrix& matrix, const Corpus& train,
                        const Corpus& test, const SimilarityConfig& config,
                        const std::filesystem::path& path) {
  std::string buf = cache_header(matrix, train, test, config).dump();
  buf.push_back('\n');
  buf.reserve(buf.size() + matrix.values.size() * 4);
  for (double v : matrix.values) {
    const uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(v));
    buf.push_back(static_cast<char>(bits & 0xff));
    buf.push_back(static_cast<char>((bits >> 8) & 0xff));
    buf.push_back(static_cast<char>((bits >> 16) & 0xff));
    buf.push_back(static_cast<char>((bits >> 24) & 0xff));
  }
  write_file(path, buf);
}

SimilarityMatrix read_matrix_cache(const std::filesystem::path& path,
                                   const Corpus& train, const Corpus& test,
                                   const SimilarityConfig& config) {
  const std::string content = read_file(path);
  const size_t nl = content.find('\n');
  if (nl == std::string::npos)
    throw IoError(path.string() + ": matrix cache has no header line");
  json header;
  try {
    header = json::parse(content.substr(0, nl));
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": bad matrix cache header: " + e.what());
  }
  if (header.value("format", "") != "wood-matrix-cache-v1")
    throw ValidationError(path.string() + ": unknown matrix cache format");

  SimilarityMatrix m;
  m.train_ids = train.ids();
  m.test_ids = test.ids();
  json expected = cache_header(m, train, test, config);
  for (auto& [key, value] : expected.items())
    if (header.value(key, json{}) != value)
      throw ValidationError(path.string() +
                            ": matrix cache does not match the given corpora "
                            "and config (stale '" + key + "')");

  const size_t n = m.rows() * m.cols();
  if (content.size() - nl - 1 != n * 4)
    throw IoError(path.string() + ": matrix cache is truncated");
  m.values.resize(n);
  const auto* bytes =
      reinterpret_cast<const unsigned char*>(content.data() + nl + 1);
  for (size_t i = 0; i < n; ++i) {
    uint32_t bits = static_cast<uint32_t>(bytes[4 * i]) |
                    (static_cast<uint32_t>(bytes[4 * i + 1]) << 8) |
                    (static_cast<uint32_t>(bytes[4 * i + 2]) << 16) |
                    (static_cast<uint32_t>(bytes[4 * i + 3]) << 24);
    m.values[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return m;
}

}  // namespace wood
