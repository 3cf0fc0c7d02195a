#include "wood/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wood/csv.hpp"
#include "wood/error.hpp"
#include "wood/util.hpp"

namespace wood {

void HardnessConfig::validate(size_t test_size) const {
  if (!(b_percent > 0.0) || b_percent > 100.0)
    throw ValidationError("b_percent must be in (0, 100]");
  if (!(a > 0.0) || !std::isfinite(a))
    throw ValidationError("a must be a positive finite number");
  if (num_tiers < 2)
    throw ValidationError("num_tiers must be at least 2");
  if (static_cast<size_t>(num_tiers) > test_size)
    throw ValidationError("num_tiers (" + std::to_string(num_tiers) +
                          ") exceeds the number of test samples (" +
                          std::to_string(test_size) + ")");
  if (!(epsilon > 0.0))
    throw ValidationError("epsilon must be positive");
}

size_t topb_count(size_t train_size, double b_percent) {
  if (train_size == 0)
    throw ValidationError("topb_count requires a non-empty train corpus");
  auto count = static_cast<size_t>(
      std::floor(b_percent * static_cast<double>(train_size) / 100.0));
  if (count < 1) count = 1;
  if (count > train_size) count = train_size;
  return count;
}

TopbSelection topb_select(std::span<const double> row, double b_percent) {
  TopbSelection sel;
  sel.count = topb_count(row.size(), b_percent);
  // Full descending sort, then a left-to-right sum: the fixed association
  // order keeps single runs and sweeps bitwise identical.
  std::vector<double> values(row.begin(), row.end());
  std::sort(values.begin(), values.end(), std::greater<>());
  for (size_t i = 0; i < sel.count; ++i) sel.sum += values[i];
  sel.avg = sel.sum / static_cast<double>(sel.count);
  return sel;
}

OodDegree degree_of_ood(double topb_sum, const HardnessConfig& config) {
  if (topb_sum < 0.0)
    throw ValidationError("topb_sum must be non-negative");
  OodDegree d;
  d.zero_overlap = topb_sum < config.epsilon;
  d.p = config.a / std::max(topb_sum, config.epsilon);
  return d;
}

std::vector<int> assign_tiers(std::span<const std::string> ids,
                              std::span<const double> topb_avg, int k) {
  const size_t n = ids.size();
  if (topb_avg.size() != n)
    throw ValidationError("assign_tiers: ids and topb_avg differ in length");
  if (k < 1 || static_cast<size_t>(k) > n)
    throw ValidationError("assign_tiers: k must be in [1, sample count]");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t lhs, size_t rhs) {
    if (topb_avg[lhs] != topb_avg[rhs]) return topb_avg[lhs] > topb_avg[rhs];
    return ids[lhs] < ids[rhs];
  });

  // N = qK + r: the first r tiers take q+1 samples each.
  const size_t q = n / static_cast<size_t>(k);
  const size_t r = n % static_cast<size_t>(k);
  std::vector<int> tiers(n, 0);
  size_t pos = 0;
  for (int tier = 1; tier <= k; ++tier) {
    const size_t size = q + (static_cast<size_t>(tier) <= r ? 1 : 0);
    for (size_t s = 0; s < size; ++s) tiers[order[pos++]] = tier;
  }
  return tiers;
}

const HardnessSample& HardnessProfile::at(std::string_view id) const {
  for (const auto& s : samples)
    if (s.sample_id == id) return s;
  throw ValidationError("hardness profile has no sample '" + std::string(id) +
                        "'");
}

std::vector<size_t> HardnessProfile::tier_sizes() const {
  std::vector<size_t> sizes(static_cast<size_t>(num_tiers), 0);
  for (const auto& s : samples) sizes[static_cast<size_t>(s.tier - 1)]++;
  return sizes;
}

HardnessProfile compute_profile(const SimilarityMatrix& matrix,
                                const HardnessConfig& config) {
  config.validate(matrix.rows());
  if (matrix.cols() == 0)
    throw ValidationError("similarity matrix has no train columns");

  HardnessProfile profile;
  profile.b_percent = config.b_percent;
  profile.a = config.a;
  profile.num_tiers = config.num_tiers;
  profile.topb_count = topb_count(matrix.cols(), config.b_percent);

  const size_t n = matrix.rows();
  std::vector<double> avgs(n);
  profile.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const TopbSelection sel = topb_select(matrix.row(i), config.b_percent);
    const OodDegree deg = degree_of_ood(sel.sum, config);
    auto& s = profile.samples[i];
    s.sample_id = matrix.test_ids[i];
    s.topb_sum = sel.sum;
    s.topb_avg = sel.avg;
    s.p = deg.p;
    s.zero_overlap = deg.zero_overlap;
    avgs[i] = sel.avg;
  }
  const auto tiers = assign_tiers(matrix.test_ids, avgs, config.num_tiers);
  for (size_t i = 0; i < n; ++i) profile.samples[i].tier = tiers[i];
  return profile;
}

std::vector<HardnessProfile> sweep_b(const SimilarityMatrix& matrix,
                                     std::span<const double> b_values,
                                     const HardnessConfig& base) {
  if (b_values.empty())
    throw ValidationError("sweep_b requires at least one b value");
  if (matrix.cols() == 0)
    throw ValidationError("similarity matrix has no train columns");

  std::vector<HardnessConfig> configs;
  configs.reserve(b_values.size());
  for (double b : b_values) {
    HardnessConfig cfg = base;
    cfg.b_percent = b;
    cfg.validate(matrix.rows());
    configs.push_back(cfg);
  }

  const size_t n = matrix.rows();
  const size_t n_b = b_values.size();
  std::vector<size_t> counts(n_b);
  size_t max_count = 0;
  for (size_t bi = 0; bi < n_b; ++bi) {
    counts[bi] = topb_count(matrix.cols(), b_values[bi]);
    max_count = std::max(max_count, counts[bi]);
  }

  // One descending sort per row; running prefix sums reproduce the exact
  // left-to-right additions of topb_select for every b.
  std::vector<std::vector<double>> sums(n_b, std::vector<double>(n));
  std::vector<double> values;
  for (size_t i = 0; i < n; ++i) {
    auto row = matrix.row(i);
    values.assign(row.begin(), row.end());
    std::sort(values.begin(), values.end(), std::greater<>());
    std::vector<double> prefix(max_count + 1, 0.0);
    for (size_t c = 0; c < max_count; ++c) prefix[c + 1] = prefix[c] + values[c];
    for (size_t bi = 0; bi < n_b; ++bi) sums[bi][i] = prefix[counts[bi]];
  }

  std::vector<HardnessProfile> profiles;
  profiles.reserve(n_b);
  for (size_t bi = 0; bi < n_b; ++bi) {
    HardnessProfile profile;
    profile.b_percent = b_values[bi];
    profile.a = base.a;
    profile.num_tiers = base.num_tiers;
    profile.topb_count = counts[bi];
    profile.samples.resize(n);
    std::vector<double> avgs(n);
    for (size_t i = 0; i < n; ++i) {
      const double sum = sums[bi][i];
      const OodDegree deg = degree_of_ood(sum, configs[bi]);
      auto& s = profile.samples[i];
      s.sample_id = matrix.test_ids[i];
      s.topb_sum = sum;
      s.topb_avg = sum / static_cast<double>(counts[bi]);
      s.p = deg.p;
      s.zero_overlap = deg.zero_overlap;
      avgs[i] = s.topb_avg;
    }
    const auto tiers = assign_tiers(matrix.test_ids, avgs, base.num_tiers);
    for (size_t i = 0; i < n; ++i) profile.samples[i].tier = tiers[i];
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

void write_profile_csv(const HardnessProfile& profile,
                       const std::filesystem::path& path) {
  CsvWriter csv;
  csv.row({"sample_id", "topb_sum", "topb_avg", "p", "tier", "zero_overlap"});
  for (const auto& s : profile.samples)
    csv.row({s.sample_id, format_double(s.topb_sum), format_double(s.topb_avg),
             format_double(s.p), std::to_string(s.tier),
             s.zero_overlap ? "1" : "0"});
  csv.save(path);
}

}  // namespace wood
