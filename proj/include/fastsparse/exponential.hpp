#ifndef FASTSPARSE_EXPONENTIAL_HPP
#define FASTSPARSE_EXPONENTIAL_HPP

// Exponential-loss coordinate updates on {-1,+1} features. The line search
// along one coordinate has a closed form, and the per-observation weights
// c_i = exp(-m_i) are maintained multiplicatively, as in AdaBoost.

#include <cmath>
#include <utility>
#include <vector>

#include "core.hpp"

namespace fastsparse {

/// Coefficients whose weighted error is exactly 0 or 1 are clamped to
/// +-(1/2) ln((1 - eps) / eps).
inline constexpr double kSeparationEps = 1e-10;

/// Number of multiplicative updates between exact recomputations of c and H.
inline constexpr int kWeightRefreshInterval = 64;

/// A ModelState plus the weights c_i = exp(-y_i (w^T x_i + b)) and their sum H.
class ExpState {
 public:
  ExpState() = default;
  ExpState(ModelState model, const DesignMatrix& data) : model_(std::move(model)) {
    if (!data.binary())
      throw InputError("the exponential loss requires a binary {-1,+1} design matrix");
    refresh(data);
  }

  const ModelState& model() const { return model_; }
  ModelState release() && { return std::move(model_); }
  std::span<const double> weights() const { return c_; }
  double total() const { return H_; }

  double set_coef(const DesignMatrix& data, std::size_t j, double value) {
    const double delta = model_.set_coef(data, j, value);
    if (delta == 0.0) return 0.0;
    const double up = std::exp(-delta), down = std::exp(delta);
    const auto x = data.col(j);
    const auto y = data.y();
    double h = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      c_[i] *= (y[i] * x[i] > 0.0) ? up : down;
      h += c_[i];
    }
    H_ = h;
    bump(data);
    return delta;
  }

  double set_intercept(const DesignMatrix& data, double b) {
    const double delta = model_.set_intercept(data, b);
    if (delta == 0.0) return 0.0;
    const double up = std::exp(-delta), down = std::exp(delta);
    const auto y = data.y();
    double h = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      c_[i] *= y[i] > 0.0 ? up : down;
      h += c_[i];
    }
    H_ = h;
    bump(data);
    return delta;
  }

  /// Exact recomputation of margins, weights and H.
  void refresh(const DesignMatrix& data) {
    model_.refresh(data);
    const auto m = model_.margins();
    c_.resize(m.size());
    double h = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      c_[i] = std::exp(-m[i]);
      h += c_[i];
    }
    H_ = h;
    updates_ = 0;
  }

 private:
  void bump(const DesignMatrix& data) {
    if (++updates_ >= kWeightRefreshInterval) refresh(data);
  }

  ModelState model_;
  std::vector<double> c_;
  double H_ = 0.0;
  int updates_ = 0;
};

/// Weighted fraction of observations with z_ij = -1 and the total weight it
/// is normalized by. With `exclude_own`, weights are re-expressed with w_j = 0
/// so `total` is H(w - w_j e_j).
struct CoordinateWeights {
  double d_minus;
  double total;
};

inline CoordinateWeights coordinate_weights(const ExpState& state, const DesignMatrix& data,
                                            std::size_t j, bool exclude_own) {
  const auto x = data.col(j);
  const auto y = data.y();
  const auto c = state.weights();
  double neg = 0.0, pos = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (y[i] * x[i] < 0.0)
      neg += c[i];
    else
      pos += c[i];
  }
  const double wj = state.model().w(j);
  if (exclude_own && wj != 0.0) {
    // c_i exp(w_j z_ij): positives scale by e^{w_j}, negatives by e^{-w_j}.
    pos *= std::exp(wj);
    neg *= std::exp(-wj);
  }
  const double total = pos + neg;
  return {total > 0.0 ? neg / total : 0.5, total};
}

inline double d_minus(const ExpState& state, const DesignMatrix& data, std::size_t j,
                      bool exclude_own) {
  return coordinate_weights(state, data, j, exclude_own).d_minus;
}

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Range of d_minus for which a coordinate cannot repay its L0 penalty. Once
/// lambda0 >= H no loss reduction can reach lambda0 and the whole of [0, 1]
/// is returned.
inline Interval zero_interval(double H_ref, double lambda0) {
  if (lambda0 >= H_ref) return {0.0, 1.0};
  const double half = std::sqrt(lambda0 * (2.0 * H_ref - lambda0)) / (2.0 * H_ref);
  return {0.5 - half, 0.5 + half};
}

/// (1/2) ln((1 - d) / d) with the separation clamp.
inline double exp_line_search(double d_minus) {
  const double cap = 0.5 * std::log((1.0 - kSeparationEps) / kSeparationEps);
  if (d_minus <= kSeparationEps) return cap;
  if (d_minus >= 1.0 - kSeparationEps) return -cap;
  return 0.5 * std::log((1.0 - d_minus) / d_minus);
}

/// Loss along the coordinate at x, relative to weights normalized by H_ref.
inline double exp_loss_along(double H_ref, double d_minus, double x) {
  return H_ref * ((1.0 - d_minus) * std::exp(-x) + d_minus * std::exp(x));
}

/// Unpenalized minimizer of H along coordinate j (others fixed).
inline double exp_line_search(const ExpState& state, const DesignMatrix& data, std::size_t j) {
  return exp_line_search(coordinate_weights(state, data, j, true).d_minus);
}

/// One L0-penalized coordinate update. Returns the new w_j.
inline double exp_coordinate_update(ExpState& state, const DesignMatrix& data, std::size_t j,
                                    double lambda0) {
  const auto cw = coordinate_weights(state, data, j, true);
  double next = 0.0;
  if (!zero_interval(cw.total, lambda0).contains(cw.d_minus)) next = exp_line_search(cw.d_minus);
  state.set_coef(data, j, next);
  return next;
}

/// Exact minimization of H over the intercept.
inline double refit_intercept_exponential(ExpState& state, const DesignMatrix& data) {
  const auto y = data.y();
  const auto c = state.weights();
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) (y[i] > 0.0 ? pos : neg) += c[i];
  if (pos + neg == 0.0) return state.model().intercept();
  const double delta = exp_line_search(neg / (pos + neg));
  state.set_intercept(data, state.model().intercept() + delta);
  return state.model().intercept();
}

}  // namespace fastsparse

#endif  // FASTSPARSE_EXPONENTIAL_HPP
