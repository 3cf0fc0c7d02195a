// Acceptance gate: one self-contained check per criterion, one PASS/FAIL line
// each, nonzero exit if anything fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wood/analysis.hpp"
#include "wood/baseline.hpp"
#include "wood/corpus.hpp"
#include "wood/demo.hpp"
#include "wood/hardness.hpp"
#include "wood/metric.hpp"
#include "wood/rng.hpp"
#include "wood/similarity.hpp"
#include "wood/util.hpp"

using namespace wood;

namespace {

int failures = 0;

void report(int number, const char* title, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, title,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

void run(int number, const char* title,
         const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(number, title, ok, ok ? "" : detail);
}

// Profile whose tiers follow id order: topb_avg strictly decreases.
HardnessProfile block_profile(const std::vector<std::string>& ids, int k,
                              const std::vector<double>& p) {
  HardnessProfile profile;
  profile.num_tiers = k;
  profile.topb_count = 1;
  std::vector<double> avgs;
  for (size_t i = 0; i < ids.size(); ++i)
    avgs.push_back(1.0 - static_cast<double>(i) / (2.0 * ids.size()));
  const auto tiers = assign_tiers(ids, avgs, k);
  for (size_t i = 0; i < ids.size(); ++i)
    profile.samples.push_back(
        {ids[i], avgs[i], avgs[i], p.empty() ? 1.0 : p[i], tiers[i], false});
  return profile;
}

bool criterion_formula(std::string& detail) {
  const auto s = wood_accuracy(std::vector<double>{0.9, 0.6, 0.3});
  if (std::fabs(s.raw - 3.0) > 1e-12 || std::fabs(s.normalized - 0.5) > 1e-12) {
    detail = "raw=" + format_double(s.raw) +
             " normalized=" + format_double(s.normalized);
    return false;
  }
  return true;
}

bool criterion_bound(std::string& detail) {
  SplitMix64 rng(2024);
  const size_t tier_size = 16;  // power of two keeps every quantity exact
  for (int instance = 0; instance < 1000; ++instance) {
    const int k = 2 + static_cast<int>(rng.below(6));
    std::vector<uint64_t> counts(static_cast<size_t>(k));
    if (instance % 50 == 0) {
      counts.assign(counts.size(), rng.below(tier_size + 1));
    } else {
      for (auto& c : counts) c = rng.below(tier_size + 1);
      std::sort(counts.rbegin(), counts.rend());
    }

    const size_t n = tier_size * static_cast<size_t>(k);
    std::vector<std::string> texts(n, "x");
    std::vector<int> labels(n, 0);
    const Corpus corpus =
        support::make_corpus(CorpusRole::test, texts, labels, 2);
    std::vector<int> guesses(n, 1);
    for (int t = 0; t < k; ++t)
      for (uint64_t j = 0; j < counts[static_cast<size_t>(t)]; ++j)
        guesses[static_cast<size_t>(t) * tier_size + j] = 0;

    const auto profile = block_profile(corpus.ids(), k, {});
    const auto r = score_model(support::make_predictions(corpus, guesses),
                               corpus, profile);
    const bool all_equal =
        std::adjacent_find(counts.begin(), counts.end(),
                           std::not_equal_to<>()) == counts.end();
    if (r.wood_normalized > r.plain_accuracy) {
      detail = "instance " + std::to_string(instance) + ": wood " +
               format_double(r.wood_normalized) + " > accuracy " +
               format_double(r.plain_accuracy);
      return false;
    }
    if (!all_equal && !(r.wood_normalized < r.plain_accuracy)) {
      detail = "instance " + std::to_string(instance) +
               ": bound not strict despite differing tier accuracies";
      return false;
    }
  }
  return true;
}

// Criteria 3 and 4 share the same random matrices.
bool criterion_topb_oracle(std::string& detail) {
  SplitMix64 rng(77);
  for (int m = 0; m < 100; ++m) {
    const auto matrix = support::random_matrix(rng, 50, 50);
    for (size_t i = 0; i < matrix.rows(); ++i) {
      const auto row = matrix.row(i);
      for (double b : kDefaultBGrid) {
        const auto got = topb_select(row, b);
        // naive full-sort oracle
        std::vector<double> sorted(row.begin(), row.end());
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        const size_t count = support::oracle::topb_count(sorted.size(), b);
        double sum = 0.0;
        for (size_t j = 0; j < count; ++j) sum += sorted[j];
        if (got.count != count || got.sum != sum ||
            got.avg != sum / static_cast<double>(count)) {
          detail = "matrix " + std::to_string(m) + " row " + std::to_string(i) +
                   " b=" + format_double(b);
          return false;
        }
      }
    }
  }
  return true;
}

bool criterion_monotone(std::string& detail) {
  SplitMix64 rng(77);  // same stream as criterion 3
  for (int m = 0; m < 100; ++m) {
    const auto matrix = support::random_matrix(rng, 50, 50);
    for (size_t i = 0; i < matrix.rows(); ++i) {
      double prev = 2.0;  // above any average
      for (double b : kDefaultBGrid) {
        const double avg = topb_select(matrix.row(i), b).avg;
        if (avg > prev) {
          detail = "matrix " + std::to_string(m) + " row " + std::to_string(i) +
                   " b=" + format_double(b);
          return false;
        }
        prev = avg;
      }
    }
  }
  return true;
}

bool criterion_invariance(std::string& detail) {
  SplitMix64 rng(501);
  const auto matrix = support::random_matrix(rng, 30, 40, 1);
  HardnessConfig config;
  config.b_percent = 10.0;
  config.num_tiers = 3;
  const auto base = compute_profile(matrix, config);

  for (double c : {0.5, 2.0, 10.0}) {
    auto scaled = matrix;
    for (auto& v : scaled.values) v *= c;
    const auto other = compute_profile(scaled, config);
    for (size_t i = 0; i < base.samples.size(); ++i) {
      if (other.samples[i].tier != base.samples[i].tier) {
        detail = "tier changed at scale " + format_double(c);
        return false;
      }
      if (std::fabs(other.samples[i].p - base.samples[i].p / c) > 1e-9) {
        detail = "p not scaled by 1/" + format_double(c) + " at sample " +
                 base.samples[i].sample_id;
        return false;
      }
    }
  }

  // shuffled prediction files must yield byte-identical reports
  support::TempDir dir;
  std::vector<std::string> texts(matrix.rows(), "x");
  std::vector<int> labels, guesses;
  for (size_t i = 0; i < matrix.rows(); ++i) {
    labels.push_back(static_cast<int>(i % 2));
    guesses.push_back(static_cast<int>(rng.below(2)));
  }
  const Corpus corpus = support::make_corpus(CorpusRole::test, texts, labels, 2);
  save_predictions(support::make_predictions(corpus, guesses), dir / "a.jsonl");

  std::istringstream lines_in(read_file(dir / "a.jsonl"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(lines_in, line);) lines.push_back(line);
  rng.shuffle(lines);
  std::string shuffled;
  for (const auto& line : lines) shuffled += line + "\n";
  write_file(dir / "b.jsonl", shuffled);

  const auto ra = score_model(load_predictions(dir / "a.jsonl", corpus, "m"),
                              corpus, base);
  const auto rb = score_model(load_predictions(dir / "b.jsonl", corpus, "m"),
                              corpus, base);
  write_report_json(ra, dir / "ra.json");
  write_report_json(rb, dir / "rb.json");
  if (read_file(dir / "ra.json") != read_file(dir / "rb.json")) {
    detail = "report JSON differs after shuffling the prediction file";
    return false;
  }
  const std::vector<MetricReport> va = {ra}, vb = {rb};
  if (reports_to_csv(va) != reports_to_csv(vb)) {
    detail = "report CSV differs after shuffling the prediction file";
    return false;
  }
  return true;
}

bool criterion_generic_agreement(std::string& detail) {
  std::vector<std::string> ids;
  std::vector<double> p;
  for (int i = 0; i < 12; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "s%02d", i);
    ids.emplace_back(buf);
    p.push_back(static_cast<double>(i / 4 + 1));  // p equals the tier weight
  }
  const auto profile = block_profile(ids, 3, p);

  for (int mask = 0; mask < (1 << 12); ++mask) {
    std::vector<PerSampleScore> scores;
    std::vector<double> tier_acc(3, 0.0);
    for (int i = 0; i < 12; ++i) {
      const double e = (mask >> i) & 1 ? 1.0 : 0.0;
      scores.push_back({ids[static_cast<size_t>(i)], e});
      tier_acc[static_cast<size_t>(i / 4)] += e / 4.0;
    }
    const double generic = wood_generic(scores, profile, true);
    const double tiered = wood_accuracy(tier_acc).normalized;
    if (std::fabs(generic - tiered) > 1e-12) {
      detail = "mask " + std::to_string(mask) + ": generic " +
               format_double(generic) + " vs tiered " + format_double(tiered);
      return false;
    }
  }
  return true;
}

bool criterion_demo_patterns(std::string& detail) {
  support::TempDir dir;
  demo::DemoOptions options;
  options.seed = 7;
  options.out_dir = dir / "demo";
  const auto checks = demo::run_demo(options);
  if (!checks.errors_grow_with_ood()) {
    detail = "tier errors: least-OOD " + std::to_string(checks.tier1_errors) +
             ", most-OOD " + std::to_string(checks.tierk_errors);
    return false;
  }
  if (!checks.confidence_drops_with_ood()) {
    detail = "correct-prediction confidence: top third " +
             format_double(checks.mean_conf_correct_top_third) +
             ", bottom third " +
             format_double(checks.mean_conf_correct_bottom_third);
    return false;
  }
  if (!checks.wood_below_accuracy()) {
    detail = "wood " + format_double(checks.wood_normalized) +
             " not below accuracy " + format_double(checks.plain_accuracy);
    return false;
  }
  if (!checks.shifted_domain_gap_larger()) {
    detail = "gap: shifted domain " + format_double(checks.gap_domain_b) +
             ", original domain " + format_double(checks.gap_domain_a);
    return false;
  }
  return true;
}

bool criterion_gradient(std::string& detail) {
  BowDataset data;
  data.num_features = 6;
  data.num_classes = 3;
  data.x = {{{0, 2.0}, {2, 1.0}, {5, 1.0}},
            {{1, 1.0}, {3, 2.0}},
            {{0, 1.0}, {1, 1.0}, {4, 3.0}},
            {{3, 1.0}, {5, 2.0}},
            {{2, 2.0}, {4, 1.0}}};
  data.y = {0, 1, 2, 1, 0};

  const size_t wn = 18;
  std::vector<double> w(wn), b(3);
  SplitMix64 rng(4242);
  for (auto& v : w) v = rng.unit() - 0.5;
  for (auto& v : b) v = rng.unit() - 0.5;

  std::vector<double> grad_w(wn), grad_b(3);
  bow_loss_grad(data, w, b, {}, grad_w, grad_b);

  const double h = 1e-5;
  const auto relative_gap = [](double analytic, double numeric) {
    return std::fabs(analytic - numeric) /
           std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
  };
  for (size_t i = 0; i < wn + 3; ++i) {
    auto lo_w = w, hi_w = w, lo_b = b, hi_b = b;
    double analytic = 0.0;
    if (i < wn) {
      lo_w[i] -= h;
      hi_w[i] += h;
      analytic = grad_w[i];
    } else {
      lo_b[i - wn] -= h;
      hi_b[i - wn] += h;
      analytic = grad_b[i - wn];
    }
    const double numeric =
        (bow_loss(data, hi_w, hi_b) - bow_loss(data, lo_w, lo_b)) / (2 * h);
    if (relative_gap(analytic, numeric) > 1e-4) {
      detail = "parameter " + std::to_string(i) + ": analytic " +
               format_double(analytic) + " vs numeric " +
               format_double(numeric);
      return false;
    }
  }
  return true;
}

bool criterion_determinism(std::string& detail) {
  support::TempDir dir;
  const auto run_once = [&](const char* name, int workers) {
    demo::DemoOptions options;
    options.seed = 7;
    options.out_dir = dir / name;
    options.workers = workers;
    demo::run_demo(options);
    return dir / name;
  };
  const auto first = run_once("one", 1);
  const auto second = run_once("two", 1);
  const auto third = run_once("three", 3);

  const auto listing = support::files_under(first);
  for (const auto* other : {"two", "three"}) {
    if (support::files_under(dir / other) != listing) {
      detail = std::string("file listing differs for run '") + other + "'";
      return false;
    }
    for (const auto& rel : listing) {
      if (read_file(first / rel) != read_file(dir / other / rel)) {
        detail = std::string("file '") + rel.string() +
                 "' differs for run '" + other + "'";
        return false;
      }
    }
  }
  return true;
}

}  // namespace

int main() {
  run(1, "tier-weighted score formula on (0.9, 0.6, 0.3)", criterion_formula);
  run(2, "weighted score never exceeds plain accuracy on non-increasing tiers",
      criterion_bound);
  run(3, "top-b selection matches the full-sort oracle", criterion_topb_oracle);
  run(4, "top-b average is non-increasing in b", criterion_monotone);
  run(5, "similarity scaling and prediction-order invariance",
      criterion_invariance);
  run(6, "generic and tier-weighted forms agree on equal tiers",
      criterion_generic_agreement);
  run(7, "two-domain demo reproduces the hardness patterns",
      criterion_demo_patterns);
  run(8, "baseline gradient matches central finite differences",
      criterion_gradient);
  run(9, "demo output is byte-identical across reruns and worker counts",
      criterion_determinism);

  if (failures > 0) {
    std::printf("%d of 9 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
