#ifndef FASTSPARSE_DESCENT_HPP
#define FASTSPARSE_DESCENT_HPP

// Cyclic coordinate descent passes shared by the warm start and by the
// support-restricted reoptimization that follows every accepted swap.

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "exponential.hpp"
#include "logistic.hpp"

namespace fastsparse {

inline constexpr int kReoptimizeMaxSweeps = 100;

namespace detail {

// Cached sigma(-m_i), refreshed only after a coefficient moves.
class SigmoidCache {
 public:
  explicit SigmoidCache(const ModelState& s) { refresh(s); }
  void refresh(const ModelState& s) {
    const auto m = s.margins();
    v_.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v_[i] = sigmoid(-m[i]);
  }
  double grad(const DesignMatrix& data, std::size_t j, double wj, double lambda2) const {
    const auto x = data.col(j);
    const auto y = data.y();
    double g = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) g -= y[i] * x[i] * v_[i];
    return g + 2.0 * lambda2 * wj;
  }

 private:
  std::vector<double> v_;
};

}  // namespace detail

/// One cyclic pass of thresholding steps over `coords` with the given L0
/// strength. Returns the largest absolute coefficient change.
inline double logistic_sweep(ModelState& state, const DesignMatrix& data,
                             const std::vector<std::size_t>& coords, double lambda0,
                             double lambda2) {
  detail::SigmoidCache cache(state);
  double max_change = 0.0;
  for (std::size_t j : coords) {
    const double L = lipschitz_j(data, j, lambda2);
    if (L <= 0.0) continue;  // inert zero column
    const double wj = state.w(j);
    const double next = threshold_value(wj, cache.grad(data, j, wj, lambda2), L, lambda0);
    if (next != wj) {
      max_change = std::max(max_change, std::abs(next - wj));
      state.set_coef(data, j, next);
      cache.refresh(state);
    }
  }
  return max_change;
}

inline double exponential_sweep(ExpState& state, const DesignMatrix& data,
                                const std::vector<std::size_t>& coords, double lambda0) {
  double max_change = 0.0;
  for (std::size_t j : coords) {
    const double before = state.model().w(j);
    const double after = exp_coordinate_update(state, data, j, lambda0);
    max_change = std::max(max_change, std::abs(after - before));
  }
  return max_change;
}

/// Support-fixed cyclic descent plus intercept refits until the per-sweep
/// objective change drops below `hp.objective_tol` or the sweep cap is hit.
inline void reoptimize_logistic(ModelState& state, const DesignMatrix& data, const HyperParams& hp,
                                int max_sweeps = kReoptimizeMaxSweeps) {
  double prev = logistic_loss(state, hp.lambda2);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const std::vector<std::size_t> coords = state.support();
    logistic_sweep(state, data, coords, 0.0, hp.lambda2);
    refit_intercept_logistic(state, data);
    const double cur = logistic_loss(state, hp.lambda2);
    if (prev - cur < hp.objective_tol) break;
    prev = cur;
  }
  state.refresh(data);
}

inline void reoptimize_exponential(ExpState& state, const DesignMatrix& data,
                                   const HyperParams& hp, int max_sweeps = kReoptimizeMaxSweeps) {
  double prev = state.total();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const std::vector<std::size_t> coords = state.model().support();
    for (std::size_t j : coords) state.set_coef(data, j, exp_line_search(state, data, j));
    refit_intercept_exponential(state, data);
    const double cur = state.total();
    if (prev - cur < hp.objective_tol) break;
    prev = cur;
  }
  state.refresh(data);
}

}  // namespace fastsparse

#endif  // FASTSPARSE_DESCENT_HPP
