#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wood/corpus.hpp"

namespace wood {
namespace demo {

// Synthetic two-domain sentiment data. Domain A: short templated reviews.
// Domain B: longer reviews over a shifted vocabulary that only partially
// overlaps A; a fraction of B reviews carry an A sentiment word, which gives
// the classifier (and the similarity profile) a gradient inside B.
struct TwoDomainData {
  Corpus train;        // domain A only
  Corpus test;         // A-test followed by B-test
  std::vector<std::string> a_test_ids;
  std::vector<std::string> b_test_ids;
};

TwoDomainData generate_two_domain(uint64_t seed);

struct DemoOptions {
  uint64_t seed = 7;
  std::filesystem::path out_dir;
  int workers = 1;
};

struct DemoChecks {
  double mean_topb_avg_a = 0.0;
  double mean_topb_avg_b = 0.0;
  size_t tier1_errors = 0;
  size_t tierk_errors = 0;
  double mean_conf_correct_top_third = 0.0;
  double mean_conf_correct_bottom_third = 0.0;
  double plain_accuracy = 0.0;
  double wood_normalized = 0.0;
  double gap_domain_a = 0.0;  // accuracy - wood_normalized within A-test
  double gap_domain_b = 0.0;  // same within B-test

  bool b_is_more_ood() const { return mean_topb_avg_b < mean_topb_avg_a; }
  bool errors_grow_with_ood() const { return tierk_errors > tier1_errors; }
  bool confidence_drops_with_ood() const {
    return mean_conf_correct_top_third > mean_conf_correct_bottom_third;
  }
  bool wood_below_accuracy() const { return wood_normalized < plain_accuracy; }
  bool shifted_domain_gap_larger() const { return gap_domain_b > gap_domain_a; }
  bool all_passed() const;
};

// Runs the whole pipeline on generated data and writes every artifact under
// out_dir. Fixed seed means byte-identical output for any worker count.
DemoChecks run_demo(const DemoOptions& options);

}  // namespace demo
}  // namespace wood
