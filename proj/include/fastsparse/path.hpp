#ifndef FASTSPARSE_PATH_HPP
#define FASTSPARSE_PATH_HPP

// Warm-started regularization paths over (lambda0, lambda2) grids.

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "descent.hpp"
#include "exponential.hpp"
#include "swap_search.hpp"

namespace fastsparse {

struct WarmStartOptions {
  int max_sweeps = 500;
  /// A full sweep moving no coefficient by more than this ends the descent.
  double coef_tol = 1e-10;
};

/// Thresholded cyclic coordinate descent (L0 penalty active) from `init`, or
/// from zero, until a full sweep leaves every coefficient in place. Between
/// full sweeps the current support is iterated to convergence first.
inline ModelState warm_start(const DesignMatrix& data, const HyperParams& hp,
                             const std::optional<ModelState>& init = std::nullopt,
                             const WarmStartOptions& opts = {}) {
  hp.validate();
  ModelState state = init ? *init : ModelState(data);
  if (state.p() != data.p() || state.margins().size() != data.n())
    throw InputError("warm start state does not match the design matrix");
  state.refresh(data);

  std::vector<std::size_t> all(data.p());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;

  int sweeps = 0;
  if (hp.loss == LossKind::logistic) {
    refit_intercept_logistic(state, data);
    while (sweeps < opts.max_sweeps) {
      const auto before = state.support();
      const double change = logistic_sweep(state, data, all, hp.lambda0, hp.lambda2);
      refit_intercept_logistic(state, data);
      ++sweeps;
      if (change <= opts.coef_tol && before == state.support()) break;
      while (sweeps < opts.max_sweeps) {
        const std::vector<std::size_t> active = state.support();
        const double c = logistic_sweep(state, data, active, hp.lambda0, hp.lambda2);
        refit_intercept_logistic(state, data);
        ++sweeps;
        if (c <= opts.coef_tol) break;
      }
    }
    state.refresh(data);
    return state;
  }

  ExpState es(std::move(state), data);
  refit_intercept_exponential(es, data);
  while (sweeps < opts.max_sweeps) {
    const auto before = es.model().support();
    const double change = exponential_sweep(es, data, all, hp.lambda0);
    refit_intercept_exponential(es, data);
    ++sweeps;
    if (change <= opts.coef_tol && before == es.model().support()) break;
    while (sweeps < opts.max_sweeps) {
      const std::vector<std::size_t> active = es.model().support();
      const double c = exponential_sweep(es, data, active, hp.lambda0);
      refit_intercept_exponential(es, data);
      ++sweeps;
      if (c <= opts.coef_tol) break;
    }
  }
  es.refresh(data);
  return std::move(es).release();
}

namespace detail {

inline std::string grid_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

struct PathSpec {
  std::vector<double> lambda0_grid;  // strictly descending
  std::vector<double> lambda2_grid;
  HyperParams base;                  // loss, tolerances, candidate limit
  SearchOptions search;

  void validate() const {
    if (lambda0_grid.empty()) throw ConfigError("lambda0 grid is empty");
    if (lambda2_grid.empty()) throw ConfigError("lambda2 grid is empty");
    for (std::size_t i = 0; i < lambda0_grid.size(); ++i) {
      if (!(lambda0_grid[i] > 0.0)) throw ConfigError("lambda0 grid values must be positive");
      if (i > 0 && !(lambda0_grid[i] < lambda0_grid[i - 1]))
        throw ConfigError("lambda0 grid must be strictly descending");
    }
    for (double l2 : lambda2_grid)
      if (!(l2 >= 0.0)) throw ConfigError("lambda2 grid values must be nonnegative");
  }
};

struct PathPoint {
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  ModelState state;
  std::size_t support_size = 0;
  double objective = 0.0;
  double smooth_loss = 0.0;
  double wall_ms = 0.0;
  std::size_t swap_evals = 0;
  std::size_t cut_prunes = 0;
  std::optional<std::string> error;
};

struct PathResult {
  std::vector<PathPoint> points;  // grid order: lambda2 outer, lambda0 inner
};

/// One grid point: warm start followed by the swap search.
inline ModelState fit_point(const DesignMatrix& data, const HyperParams& hp,
                            const SearchOptions& search, const std::optional<ModelState>& init,
                            SearchStats* stats = nullptr) {
  const ModelState start = warm_start(data, hp, init);
  return fit_swap_1opt(start, data, hp, search, stats);
}

/// Runs every lambda2 chain cold-started, each chain warm-started down the
/// descending lambda0 grid. A failing point records its error and the chain
/// continues from the last good solution.
inline PathResult fit_path(const DesignMatrix& data, const PathSpec& spec) {
  spec.validate();
  if (spec.base.loss == LossKind::exponential && !data.binary())
    throw ConfigError("the exponential loss requires binary {-1,+1} features");
  PathResult result;
  for (double l2 : spec.lambda2_grid) {
    std::optional<ModelState> prev;
    for (double l0 : spec.lambda0_grid) {
      PathPoint pt;
      pt.lambda0 = l0;
      pt.lambda2 = l2;
      HyperParams hp = spec.base;
      hp.lambda0 = l0;
      hp.lambda2 = l2;
      SearchStats stats;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        pt.state = fit_point(data, hp, spec.search, prev, &stats);
        pt.support_size = pt.state.support().size();
        pt.objective = objective(pt.state, data, hp);
        pt.smooth_loss = hp.loss == LossKind::logistic ? logistic_loss(pt.state, hp.lambda2)
                                                       : exponential_loss(pt.state);
        prev = pt.state;
      } catch (const std::exception& e) {
        pt.error = "lambda0=" + detail::grid_label(l0) + " lambda2=" + detail::grid_label(l2) + ": " +
                   e.what();
      }
      pt.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      pt.swap_evals = stats.swap_calls;
      pt.cut_prunes = stats.cut_prunes;
      result.points.push_back(std::move(pt));
    }
  }
  return result;
}

}  // namespace fastsparse

#endif  // FASTSPARSE_PATH_HPP
