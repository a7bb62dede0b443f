// SPDX-License-Identifier: Apache-2.0
#include "sardet/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "sardet/errors.hpp"

namespace sardet {

namespace {

double floor_two_decimals(double t) { return std::floor(t * 100.0 + 1e-9) / 100.0; }

struct Candidate {
  RocPoint point;
  bool observed = true;
};

// Highest-threshold winner among ties; sentinel candidates (0 and 1,
// never observed scores) lose ties so that e.g. a single repeated score
// is returned as-is.
template <typename Better>
double pick(const std::vector<Candidate>& cands, Better better) {
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!best) {
      best = &c;
      continue;
    }
    if (better(c, *best)) best = &c;
  }
  return best->point.threshold;
}

ThresholdChoice choose(const std::vector<Candidate>& cands) {
  auto j_of = [](const Candidate& c) { return c.point.tpr - c.point.fpr; };
  auto d_of = [](const Candidate& c) {
    return std::hypot(1.0 - c.point.tpr, c.point.fpr);
  };
  auto tie_break = [](const Candidate& a, const Candidate& b) {
    if (a.observed != b.observed) return a.observed;
    return a.point.threshold > b.point.threshold;
  };
  ThresholdChoice choice;
  choice.youden = pick(cands, [&](const Candidate& a, const Candidate& b) {
    if (j_of(a) != j_of(b)) return j_of(a) > j_of(b);
    return tie_break(a, b);
  });
  choice.min_distance = pick(cands, [&](const Candidate& a, const Candidate& b) {
    if (d_of(a) != d_of(b)) return d_of(a) < d_of(b);
    return tie_break(a, b);
  });
  choice.threshold = floor_two_decimals(std::min(choice.youden, choice.min_distance));
  return choice;
}

}  // namespace

ThresholdChoice select_threshold_from_roc(const std::vector<RocPoint>& roc) {
  if (roc.empty()) {
    ThresholdChoice c;
    c.degenerate = true;
    return c;
  }
  std::vector<Candidate> cands;
  cands.reserve(roc.size());
  for (const auto& p : roc) cands.push_back({p, true});
  return choose(cands);
}

ThresholdChoice select_threshold(const std::vector<ScoredFlag>& flagged,
                                 std::int64_t total_positives, std::int64_t total_negatives) {
  std::int64_t pos_seen = 0, neg_seen = 0;
  for (const auto& f : flagged) (f.is_tp ? pos_seen : neg_seen)++;
  const std::int64_t P = total_positives < 0 ? pos_seen : total_positives;
  const std::int64_t N = total_negatives < 0 ? neg_seen : total_negatives;
  if (P <= 0 || N <= 0) {
    ThresholdChoice c;
    c.degenerate = true;
    return c;
  }

  std::vector<double> scores;
  scores.reserve(flagged.size());
  for (const auto& f : flagged) scores.push_back(f.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  std::vector<Candidate> cands;
  auto add = [&](double t, bool observed) {
    std::int64_t kept_pos = 0, kept_neg = 0;
    for (const auto& f : flagged) {
      if (f.score >= t) (f.is_tp ? kept_pos : kept_neg)++;
    }
    Candidate c;
    c.point.threshold = t;
    c.point.tpr = static_cast<double>(kept_pos) / static_cast<double>(P);
    c.point.fpr = static_cast<double>(kept_neg) / static_cast<double>(N);
    c.observed = observed;
    cands.push_back(c);
  };
  for (double s : scores) add(s, true);
  if (scores.empty() || scores.front() > 0.0) add(0.0, false);
  if (scores.empty() || scores.back() < 1.0) add(1.0, false);
  return choose(cands);
}

}  // namespace sardet
