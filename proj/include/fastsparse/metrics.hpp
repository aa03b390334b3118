#ifndef FASTSPARSE_METRICS_HPP
#define FASTSPARSE_METRICS_HPP

#include <algorithm>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "core.hpp"

namespace fastsparse {

/// Area under the ROC curve in the Mann-Whitney form: the fraction of
/// (positive, negative) pairs ranked correctly, ties counted 1/2.
inline double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InputError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos = 0.0, neg = 0.0;
  // Twice the midrank sum over positives keeps everything integral.
  double twice_rank_sum = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && scores[idx[end]] == scores[idx[start]]) ++end;
    const double twice_mid = static_cast<double>(start + 1 + end);  // 2 * mean of ranks start+1..end
    for (std::size_t k = start; k < end; ++k) {
      if (labels[idx[k]] > 0) {
        pos += 1.0;
        twice_rank_sum += twice_mid;
      } else {
        neg += 1.0;
      }
    }
    start = end;
  }
  if (pos == 0.0 || neg == 0.0) throw InputError("auc needs both positive and negative labels");
  const double twice_u = twice_rank_sum - pos * (pos + 1.0);
  return twice_u / (2.0 * pos * neg);
}

/// Fraction of observations with sign(score - threshold) == label; sign(0) = +1.
inline double accuracy(std::span<const double> scores, std::span<const double> labels,
                       double threshold = 0.0) {
  if (scores.size() != labels.size())
    throw InputError("accuracy: scores and labels differ in length");
  if (scores.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double pred = scores[i] - threshold >= 0.0 ? 1.0 : -1.0;
    if (pred == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

struct SupportComparison {
  std::vector<std::size_t> estimated;
  std::vector<std::size_t> truth;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline SupportComparison compare_support(std::span<const std::size_t> estimated,
                                         std::span<const std::size_t> truth) {
  const std::set<std::size_t> est(estimated.begin(), estimated.end());
  const std::set<std::size_t> tru(truth.begin(), truth.end());
  if (tru.empty()) throw InputError("recovery F1 needs a nonempty true support");
  SupportComparison out;
  out.estimated.assign(est.begin(), est.end());
  out.truth.assign(tru.begin(), tru.end());
  std::size_t common = 0;
  for (std::size_t j : est) common += tru.count(j);
  out.recall = static_cast<double>(common) / static_cast<double>(tru.size());
  // An empty estimate recovers nothing: P = 0 and F1 = 0.
  out.precision = est.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(est.size());
  out.f1 = common == 0 ? 0.0 : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

inline double recovery_f1(std::span<const std::size_t> estimated,
                          std::span<const std::size_t> truth) {
  return compare_support(estimated, truth).f1;
}

}  // namespace fastsparse

#endif  // FASTSPARSE_METRICS_HPP
