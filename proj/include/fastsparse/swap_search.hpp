#ifndef FASTSPARSE_SWAP_SEARCH_HPP
#define FASTSPARSE_SWAP_SEARCH_HPP

// Swap-1-OPT local search. The outer loop walks the support in an order set
// by failed-swap counts; for each support feature it tries deleting it, then
// swapping it for an outside feature screened with cut lower bounds.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "core.hpp"
#include "descent.hpp"
#include "exponential.hpp"
#include "logistic.hpp"

namespace fastsparse {

enum class Ordering { dynamic, sequential };
enum class CutMode { lin, quad, automatic };

inline Ordering parse_ordering(const std::string& s) {
  if (s == "dynamic") return Ordering::dynamic;
  if (s == "sequential") return Ordering::sequential;
  throw ConfigError("unknown ordering '" + s + "'");
}

inline CutMode parse_cut_mode(const std::string& s) {
  if (s == "lin") return CutMode::lin;
  if (s == "quad") return CutMode::quad;
  if (s == "auto") return CutMode::automatic;
  throw ConfigError("unknown cut mode '" + s + "'");
}

/// Resolves `automatic` (quad iff lambda2 > 0) and rejects quad without lambda2.
inline CutMode resolve_cut_mode(CutMode mode, double lambda2) {
  if (mode == CutMode::automatic) return lambda2 > 0.0 ? CutMode::quad : CutMode::lin;
  if (mode == CutMode::quad && !(lambda2 > 0.0))
    throw ConfigError("quadratic cuts require lambda2 > 0");
  return mode;
}

struct SearchOptions {
  Ordering ordering = Ordering::dynamic;
  CutMode cut = CutMode::automatic;
  /// After the screened search stops, re-check every swap with the whole
  /// support refit and continue from any that improves. Costs one
  /// reoptimization per (support feature, candidate) pair.
  bool verify_swaps = false;
};

struct SearchStats {
  std::size_t swap_calls = 0;       // TryDeleteOrSwap invocations
  std::size_t candidates = 0;       // TryAdd evaluations
  std::size_t cut_prunes = 0;       // candidates discarded by a lower bound
  std::size_t line_searches = 0;    // candidates that reached the line search
  std::size_t deletions = 0;
  std::size_t swaps = 0;
  std::size_t verify_refits = 0;    // reoptimizations run by swap verification
  std::size_t verified_swaps = 0;   // swaps found only by verification
};

/// Per-feature failed-swap tallies; support features are visited in
/// ascending order of failures, ties by feature index.
class FailureQueue {
 public:
  explicit FailureQueue(std::size_t p = 0) : counts_(p, 0) {}

  void record_failure(std::size_t j) { ++counts_.at(j); }
  std::size_t count(std::size_t j) const { return counts_.at(j); }
  const std::vector<std::size_t>& counts() const { return counts_; }

  std::vector<std::size_t> order(const std::vector<std::size_t>& support) const {
    std::vector<std::size_t> out = support;
    std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
      if (counts_[a] != counts_[b]) return counts_[a] < counts_[b];
      return a < b;
    });
    return out;
  }

 private:
  std::vector<std::size_t> counts_;
};

struct TryAddResult {
  bool accepted = false;
  double coef = 0.0;
  bool pruned = false;          // rejected by a lower bound
  bool line_search_ran = false;
  double loss = 0.0;            // f(coef) when the line search ran
};

namespace detail {

template <class F>
CutPoint eval_point(const F& f, double x) {
  if constexpr (requires { f.value_and_slope(x); }) {
    const auto [v, s] = f.value_and_slope(x);
    return {x, v, s};
  } else {
    return cut_point(f, x);
  }
}

template <CoordinateFunction F>
TryAddResult line_search_decision(const F& f, double lipschitz, int iters, double L_best) {
  TryAddResult r;
  r.line_search_ran = true;
  r.coef = find_new_coefficient(f, lipschitz, iters, 0.0);
  r.loss = f.value(r.coef);
  r.accepted = r.loss < L_best;
  return r;
}

inline TryAddResult pruned() {
  TryAddResult r;
  r.pruned = true;
  return r;
}

}  // namespace detail

/// Screens candidate feature j' (currently at 0) with quadratic cuts, then
/// line-searches it. `at_zero` is f evaluated at 0. Accepts iff the line
/// search reaches a loss below L_best.
template <CoordinateFunction F>
TryAddResult try_add_quad(const F& f, const CutPoint& at_zero, double lipschitz, double lambda2,
                          int iters, double L_best) {
  if (quad_cut_one(at_zero, lambda2) >= L_best) return detail::pruned();
  const double g0 = at_zero.slope;
  const double T = -g0 / lipschitz;
  if (T == 0.0 || !std::isfinite(T)) return {};
  auto crosses = [&](const CutPoint& p) { return g0 * p.slope < 0.0; };

  CutPoint a, b = detail::eval_point(f, 2.0 * T);
  if (crosses(b)) {
    a = detail::eval_point(f, T);
    const CutPoint c = detail::eval_point(f, 0.5 * (a.x + b.x));
    if (quad_cut_one(c, lambda2) >= L_best) return detail::pruned();
    if (crosses(c))
      b = c;
    else
      a = c;
  } else {
    a = b;
    if (quad_cut_one(a, lambda2) >= L_best) return detail::pruned();
    b = detail::eval_point(f, 3.0 * T);
    if (!crosses(b)) {
      if (quad_cut_one(b, lambda2) >= L_best) return detail::pruned();
      return detail::line_search_decision(f, lipschitz, iters, L_best);
    }
  }
  if (quad_cut_two(a, b, lambda2) >= L_best) return detail::pruned();
  return detail::line_search_decision(f, lipschitz, iters, L_best);
}

/// As try_add_quad with the tangent-line cut as the only prune.
template <CoordinateFunction F>
TryAddResult try_add_lincut(const F& f, const CutPoint& at_zero, double lipschitz, int iters,
                            double L_best) {
  const double g0 = at_zero.slope;
  const double T = -g0 / lipschitz;
  if (T == 0.0 || !std::isfinite(T)) return {};
  auto crosses = [&](const CutPoint& p) { return g0 * p.slope < 0.0; };

  CutPoint a, b = detail::eval_point(f, 2.0 * T);
  if (crosses(b)) {
    a = detail::eval_point(f, T);
    const CutPoint c = detail::eval_point(f, 0.5 * (a.x + b.x));
    if (crosses(c))
      b = c;
    else
      a = c;
  } else {
    a = b;
    b = detail::eval_point(f, 3.0 * T);
    // Minimum is far from the start: go straight to the line search.
    if (!crosses(b)) return detail::line_search_decision(f, lipschitz, iters, L_best);
  }
  if (lin_cut(a, b) >= L_best) return detail::pruned();
  return detail::line_search_decision(f, lipschitz, iters, L_best);
}

template <CoordinateFunction F>
TryAddResult try_add_quad(const F& f, double lipschitz, double lambda2, int iters, double L_best) {
  return try_add_quad(f, detail::eval_point(f, 0.0), lipschitz, lambda2, iters, L_best);
}

template <CoordinateFunction F>
TryAddResult try_add_lincut(const F& f, double lipschitz, int iters, double L_best) {
  return try_add_lincut(f, detail::eval_point(f, 0.0), lipschitz, iters, L_best);
}

inline TryAddResult try_add_quad(const ModelState& state_without_j, const DesignMatrix& data,
                                 const HyperParams& hp, std::size_t j_new, double L_best) {
  if (state_without_j.w(j_new) != 0.0)
    throw std::invalid_argument("try_add_quad: candidate coefficient must be zero");
  LogisticProbe f(state_without_j, data, j_new, hp.lambda2);
  return try_add_quad(f, f.lipschitz(), hp.lambda2, hp.max_inner_iter, L_best);
}

inline TryAddResult try_add_lincut(const ModelState& state_without_j, const DesignMatrix& data,
                                   const HyperParams& hp, std::size_t j_new, double L_best) {
  if (state_without_j.w(j_new) != 0.0)
    throw std::invalid_argument("try_add_lincut: candidate coefficient must be zero");
  LogisticProbe f(state_without_j, data, j_new, hp.lambda2);
  return try_add_lincut(f, f.lipschitz(), hp.max_inner_iter, L_best);
}

enum class SwapKind { no_change, deleted, swapped };

struct SwapOutcome {
  SwapKind kind = SwapKind::no_change;
  std::optional<std::size_t> removed;
  std::optional<std::size_t> added;
  ModelState new_state;
};

namespace detail {

// Complement of the support ranked by |gradient| at the reduced state,
// descending, ties by index, truncated to the candidate limit.
inline std::vector<std::size_t> rank_candidates(const std::vector<double>& abs_grad,
                                                const std::vector<std::size_t>& complement,
                                                const std::optional<std::size_t>& limit) {
  std::vector<std::size_t> order = complement;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return abs_grad[a] > abs_grad[b]; });
  if (limit && order.size() > *limit) order.resize(*limit);
  return order;
}

inline std::vector<std::size_t> complement_of(const ModelState& s) {
  std::vector<std::size_t> out;
  out.reserve(s.p() - s.support().size());
  for (std::size_t k = 0; k < s.p(); ++k)
    if (!s.in_support(k)) out.push_back(k);
  return out;
}

inline SwapOutcome logistic_delete_or_swap(const ModelState& state, const DesignMatrix& data,
                                           const HyperParams& hp, CutMode cut, std::size_t j,
                                           SearchStats& stats) {
  const double L_best = logistic_loss(state, hp.lambda2);
  ModelState reduced = state;
  reduced.set_coef(data, j, 0.0);
  const double L_drop = logistic_loss(reduced, hp.lambda2);
  if (L_drop <= L_best) {
    reoptimize_logistic(reduced, data, hp);
    ++stats.deletions;
    return {SwapKind::deleted, j, std::nullopt, std::move(reduced)};
  }

  std::vector<std::size_t> complement = complement_of(state);
  SigmoidCache cache(reduced);
  std::vector<double> grad(data.p(), 0.0), abs_grad(data.p(), 0.0);
  for (std::size_t k : complement) {
    grad[k] = cache.grad(data, k, 0.0, hp.lambda2);
    abs_grad[k] = std::abs(grad[k]);
  }
  const double threshold = L_best - hp.objective_tol;
  for (std::size_t k : rank_candidates(abs_grad, complement, hp.candidate_limit)) {
    const double L = lipschitz_j(data, k, hp.lambda2);
    if (L <= 0.0) continue;
    ++stats.candidates;
    LogisticProbe f(reduced, data, k, hp.lambda2);
    const CutPoint at_zero{0.0, L_drop, grad[k]};
    const TryAddResult r = cut == CutMode::quad
                               ? try_add_quad(f, at_zero, L, hp.lambda2, hp.max_inner_iter, threshold)
                               : try_add_lincut(f, at_zero, L, hp.max_inner_iter, threshold);
    if (r.pruned) ++stats.cut_prunes;
    if (r.line_search_ran) ++stats.line_searches;
    if (r.accepted) {
      reduced.set_coef(data, k, r.coef);
      reoptimize_logistic(reduced, data, hp);
      ++stats.swaps;
      return {SwapKind::swapped, j, k, std::move(reduced)};
    }
  }
  return {SwapKind::no_change, std::nullopt, std::nullopt, state};
}

// Exponential variant: the coordinate minimum is analytical, so no cuts.
inline SwapKind exponential_delete_or_swap(ExpState& state, const DesignMatrix& data,
                                           const HyperParams& hp, std::size_t j,
                                           SearchStats& stats, std::optional<std::size_t>& added) {
  const double L_best = state.total();
  ExpState reduced = state;
  reduced.set_coef(data, j, 0.0);
  const double H_drop = reduced.total();
  if (H_drop <= L_best) {
    reoptimize_exponential(reduced, data, hp);
    state = std::move(reduced);
    ++stats.deletions;
    return SwapKind::deleted;
  }

  std::vector<std::size_t> complement = complement_of(state.model());
  std::vector<double> dm(data.p(), 0.5), abs_grad(data.p(), 0.0);
  for (std::size_t k : complement) {
    const auto cw = coordinate_weights(reduced, data, k, false);
    dm[k] = cw.d_minus;
    abs_grad[k] = cw.total * std::abs(2.0 * cw.d_minus - 1.0);
  }
  const double threshold = L_best - hp.objective_tol;
  for (std::size_t k : rank_candidates(abs_grad, complement, hp.candidate_limit)) {
    ++stats.candidates;
    ++stats.line_searches;
    const double x = exp_line_search(dm[k]);
    if (x == 0.0) continue;
    if (exp_loss_along(H_drop, dm[k], x) < threshold) {
      reduced.set_coef(data, k, x);
      reoptimize_exponential(reduced, data, hp);
      state = std::move(reduced);
      added = k;
      ++stats.swaps;
      return SwapKind::swapped;
    }
  }
  return SwapKind::no_change;
}

// Swap search with the support refit for every candidate. Returns true and
// updates `state` on the first swap that lowers the smooth loss.
inline bool verify_logistic_swaps(ModelState& state, const DesignMatrix& data, const HyperParams& hp,
                                  std::size_t j, SearchStats& stats) {
  const double threshold = logistic_loss(state, hp.lambda2) - hp.objective_tol;
  ModelState reduced = state;
  reduced.set_coef(data, j, 0.0);
  const std::vector<std::size_t> complement = complement_of(state);
  SigmoidCache cache(reduced);
  std::vector<double> abs_grad(data.p(), 0.0);
  for (std::size_t k : complement) abs_grad[k] = std::abs(cache.grad(data, k, 0.0, hp.lambda2));
  for (std::size_t k : rank_candidates(abs_grad, complement, hp.candidate_limit)) {
    if (lipschitz_j(data, k, hp.lambda2) <= 0.0) continue;
    const double x = find_new_coefficient(reduced, data, k, hp);
    if (x == 0.0) continue;
    ModelState trial = reduced;
    trial.set_coef(data, k, x);
    reoptimize_logistic(trial, data, hp);
    ++stats.verify_refits;
    if (logistic_loss(trial, hp.lambda2) < threshold && trial.in_support(k)) {
      state = std::move(trial);
      ++stats.verified_swaps;
      return true;
    }
  }
  return false;
}

inline bool verify_exponential_swaps(ExpState& state, const DesignMatrix& data, const HyperParams& hp,
                                     std::size_t j, SearchStats& stats) {
  const double threshold = state.total() - hp.objective_tol;
  ExpState reduced = state;
  reduced.set_coef(data, j, 0.0);
  const std::vector<std::size_t> complement = complement_of(state.model());
  std::vector<double> dm(data.p(), 0.5), abs_grad(data.p(), 0.0);
  for (std::size_t k : complement) {
    const auto cw = coordinate_weights(reduced, data, k, false);
    dm[k] = cw.d_minus;
    abs_grad[k] = cw.total * std::abs(2.0 * cw.d_minus - 1.0);
  }
  for (std::size_t k : rank_candidates(abs_grad, complement, hp.candidate_limit)) {
    const double x = exp_line_search(dm[k]);
    if (x == 0.0) continue;
    ExpState trial = reduced;
    trial.set_coef(data, k, x);
    reoptimize_exponential(trial, data, hp);
    ++stats.verify_refits;
    if (trial.total() < threshold && trial.model().in_support(k)) {
      state = std::move(trial);
      ++stats.verified_swaps;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Tries to delete support feature j, else to swap it for the first
/// outside feature (in |gradient| order) that lowers the smooth loss.
inline SwapOutcome try_delete_or_swap(const ModelState& state, const DesignMatrix& data,
                                      const HyperParams& hp, std::size_t j,
                                      const SearchOptions& opts = {},
                                      SearchStats* stats = nullptr) {
  hp.validate();
  if (!state.in_support(j)) throw std::invalid_argument("try_delete_or_swap: j not in support");
  SearchStats local;
  SearchStats& st = stats ? *stats : local;
  ++st.swap_calls;
  if (hp.loss == LossKind::logistic)
    return detail::logistic_delete_or_swap(state, data, hp, resolve_cut_mode(opts.cut, hp.lambda2),
                                           j, st);
  ExpState es(state, data);
  std::optional<std::size_t> added;
  const SwapKind kind = detail::exponential_delete_or_swap(es, data, hp, j, st, added);
  if (kind == SwapKind::no_change) return {kind, std::nullopt, std::nullopt, state};
  return {kind, j, added, std::move(es).release()};
}

/// Runs the swap search from `initial` until no support feature can be
/// deleted or swapped. `queue`, when given, receives the final failure counts.
inline ModelState fit_swap_1opt(const ModelState& initial, const DesignMatrix& data,
                                const HyperParams& hp, const SearchOptions& opts = {},
                                SearchStats* stats = nullptr, FailureQueue* queue = nullptr) {
  hp.validate();
  SearchStats local;
  SearchStats& st = stats ? *stats : local;
  FailureQueue q(data.p());
  const bool logistic = hp.loss == LossKind::logistic;
  const CutMode cut = logistic ? resolve_cut_mode(opts.cut, hp.lambda2) : CutMode::lin;

  ModelState lstate;
  ExpState estate;
  if (logistic)
    lstate = initial;
  else
    estate = ExpState(initial, data);
  auto current = [&]() -> const ModelState& { return logistic ? lstate : estate.model(); };

  for (;;) {
    const std::vector<std::size_t> order = opts.ordering == Ordering::dynamic
                                               ? q.order(current().support())
                                               : current().support();
    bool changed = false;
    for (std::size_t j : order) {
      ++st.swap_calls;
      if (logistic) {
        SwapOutcome out = detail::logistic_delete_or_swap(lstate, data, hp, cut, j, st);
        if (out.kind != SwapKind::no_change) {
          lstate = std::move(out.new_state);
          changed = true;
        }
      } else {
        std::optional<std::size_t> added;
        changed = detail::exponential_delete_or_swap(estate, data, hp, j, st, added) !=
                  SwapKind::no_change;
      }
      if (changed) break;
      q.record_failure(j);
    }
    if (!changed && opts.verify_swaps) {
      for (std::size_t j : current().support()) {
        changed = logistic ? detail::verify_logistic_swaps(lstate, data, hp, j, st)
                           : detail::verify_exponential_swaps(estate, data, hp, j, st);
        if (changed) break;
      }
    }
    if (!changed) break;
  }
  if (queue) *queue = q;
  return logistic ? lstate : std::move(estate).release();
}

}  // namespace fastsparse

#endif  // FASTSPARSE_SWAP_SEARCH_HPP
