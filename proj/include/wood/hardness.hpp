#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wood/similarity.hpp"

namespace wood {

// Nine-step default grid of top-b percentages.
inline constexpr std::array<double, 9> kDefaultBGrid = {1,  5,  10, 20, 30,
                                                        40, 50, 75, 100};

struct HardnessConfig {
  double b_percent = 100.0;  // share of train samples in (0,100]
  double a = 1.0;            // scale of the OOD degree p = a / topb_sum
  int num_tiers = 3;         // K
  double epsilon = 1e-9;     // denominator clamp for zero-overlap rows

  void validate(size_t test_size) const;
};

struct TopbSelection {
  double sum = 0.0;   // sum of the `count` largest similarities
  size_t count = 0;   // max(1, floor(b_percent * |train| / 100))
  double avg = 0.0;   // sum / count
};

// Number of train samples selected at b_percent.
size_t topb_count(size_t train_size, double b_percent);

// Selects the top b% similarities of one row. Ties broken by lower train
// index (which leaves the selected value sequence, and thus the sum, unique).
TopbSelection topb_select(std::span<const double> row, double b_percent);

struct OodDegree {
  double p = 0.0;
  bool zero_overlap = false;  // topb_sum fell below epsilon
};

// p = a / max(topb_sum, epsilon).
OodDegree degree_of_ood(double topb_sum, const HardnessConfig& config);

// Sorts samples by topb_avg descending (ties: id ascending) and splits them
// into K contiguous tiers; with N = qK + r the first r tiers get q+1 samples.
// Returns the 1-based tier of each input position. Tier 1 is least OOD.
std::vector<int> assign_tiers(std::span<const std::string> ids,
                              std::span<const double> topb_avg, int k);

struct HardnessSample {
  std::string sample_id;
  double topb_sum = 0.0;
  double topb_avg = 0.0;
  double p = 0.0;
  int tier = 0;
  bool zero_overlap = false;
};

struct HardnessProfile {
  double b_percent = 100.0;
  double a = 1.0;
  int num_tiers = 0;
  size_t topb_count = 0;
  std::vector<HardnessSample> samples;  // matrix row order

  const HardnessSample& at(std::string_view id) const;
  std::vector<size_t> tier_sizes() const;
};

HardnessProfile compute_profile(const SimilarityMatrix& matrix,
                                const HardnessConfig& config);

// One profile per b value, sharing a single sort pass per row. Results are
// bitwise identical to independent compute_profile runs.
std::vector<HardnessProfile> sweep_b(const SimilarityMatrix& matrix,
                                     std::span<const double> b_values,
                                     const HardnessConfig& base);

void write_profile_csv(const HardnessProfile& profile,
                       const std::filesystem::path& path);

}  // namespace wood
