#ifndef FASTSPARSE_LOGISTIC_HPP
#define FASTSPARSE_LOGISTIC_HPP

// Logistic-loss coordinate machinery: gradients, Lipschitz constants, the
// thresholding step, iterated line search and the linear / quadratic cut
// lower bounds used to discard swap candidates.

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"

namespace fastsparse {

/// A one-dimensional convex function with a derivative, e.g. the restriction
/// of the smooth loss to one coordinate.
template <class F>
concept CoordinateFunction = requires(const F& f, double x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.slope(x) } -> std::convertible_to<double>;
};

/// j-th component of grad G at the current state.
inline double grad_j(const ModelState& state, const DesignMatrix& data, std::size_t j,
                     double lambda2) {
  const auto x = data.col(j);
  const auto y = data.y();
  const auto m = state.margins();
  double g = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) g -= y[i] * x[i] * sigmoid(-m[i]);
  return g + 2.0 * lambda2 * state.w(j);
}

/// (1/4) sum_i x_ij^2 + 2 lambda2. Zero means the coordinate is inert.
inline double lipschitz_j(const DesignMatrix& data, std::size_t j, double lambda2) {
  if (data.binary()) return 0.25 * static_cast<double>(data.n()) + 2.0 * lambda2;
  double s = 0.0;
  for (double v : data.col(j)) s += v * v;
  return 0.25 * s + 2.0 * lambda2;
}

/// Minimizer of the quadratic surrogate plus the L0 penalty: keeps
/// c = w - g/L when |c| >= sqrt(2 lambda0 / L), else 0.
inline double threshold_value(double w, double g, double L, double lambda0) {
  const double c = w - g / L;
  if (lambda0 == 0.0) return c;
  return std::abs(c) >= std::sqrt(2.0 * lambda0 / L) ? c : 0.0;
}

inline double threshold_step(const ModelState& state, const DesignMatrix& data, std::size_t j,
                             const HyperParams& hp) {
  const double L = lipschitz_j(data, j, hp.lambda2);
  if (L <= 0.0) return state.w(j);
  return threshold_value(state.w(j), grad_j(state, data, j, hp.lambda2), L, hp.lambda0);
}

/// f(x) = G(w - w_j e_j + x e_j): the smooth logistic loss along coordinate j
/// with every other coefficient (and the intercept) held fixed.
class LogisticProbe {
 public:
  LogisticProbe(const ModelState& state, const DesignMatrix& data, std::size_t j, double lambda2)
      : x_(data.col(j)), y_(data.y()), lambda2_(lambda2), lipschitz_(lipschitz_j(data, j, lambda2)) {
    const double wj = state.w(j);
    if (wj == 0.0) {
      base_ = state.margins();
    } else {
      owned_.assign(state.margins().begin(), state.margins().end());
      for (std::size_t i = 0; i < owned_.size(); ++i) owned_[i] -= wj * y_[i] * x_[i];
      base_ = owned_;
    }
    double r = 0.0;
    for (std::size_t k : state.support())
      if (k != j) r += state.w(k) * state.w(k);
    penalty_rest_ = lambda2 * r;
  }

  double value(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < base_.size(); ++i)
      s += detail::log1pexp(-(base_[i] + t * y_[i] * x_[i]));
    return s + penalty_rest_ + lambda2_ * t * t;
  }

  double slope(double t) const {
    double g = 0.0;
    for (std::size_t i = 0; i < base_.size(); ++i) {
      const double z = y_[i] * x_[i];
      g -= z * sigmoid(-(base_[i] + t * z));
    }
    return g + 2.0 * lambda2_ * t;
  }

  /// value(t) and slope(t) from one pass over the observations.
  std::pair<double, double> value_and_slope(double t) const {
    double v = 0.0, g = 0.0;
    for (std::size_t i = 0; i < base_.size(); ++i) {
      const double z = y_[i] * x_[i];
      const double u = -(base_[i] + t * z);
      const double e = std::exp(-std::abs(u));
      // log(1 + e^u) and sigma(u), sharing e^{-|u|}
      v += (u > 0 ? u : 0.0) + std::log1p(e);
      g -= z * (u >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e));
    }
    return {v + penalty_rest_ + lambda2_ * t * t, g + 2.0 * lambda2_ * t};
  }

  double lipschitz() const { return lipschitz_; }
  double lambda2() const { return lambda2_; }

 private:
  std::span<const double> x_;
  std::span<const double> y_;
  std::span<const double> base_;
  std::vector<double> owned_;
  double lambda2_;
  double lipschitz_;
  double penalty_rest_ = 0.0;
};

/// Iterates the support-fixed thresholding step x <- x - f'(x)/L `iters` times.
template <CoordinateFunction F>
double find_new_coefficient(const F& f, double lipschitz, int iters, double start = 0.0) {
  double x = start;
  if (lipschitz <= 0.0) return x;
  for (int t = 0; t < iters; ++t) x -= f.slope(x) / lipschitz;
  return x;
}

inline double find_new_coefficient(const ModelState& state, const DesignMatrix& data,
                                   std::size_t j, const HyperParams& hp) {
  LogisticProbe probe(state, data, j, hp.lambda2);
  return find_new_coefficient(probe, probe.lipschitz(), hp.max_inner_iter, state.w(j));
}

/// Function value and slope at a point.
struct CutPoint {
  double x;
  double f;
  double slope;
};

template <CoordinateFunction F>
CutPoint cut_point(const F& f, double x) {
  return {x, f.value(x), f.slope(x)};
}

/// Tangent-line intersection below min f. Requires slopes of opposite sign.
inline double lin_cut(const CutPoint& p1, const CutPoint& p2) {
  const double a1 = p1.slope, a2 = p2.slope;
  if (a1 * a2 > 0.0) throw std::logic_error("lin_cut: slopes must not share a sign");
  if (a1 == a2) return p1.f;  // both zero: p1 is a minimizer
  return (a1 * p2.f - a2 * p1.f + a1 * a2 * (p1.x - p2.x)) / (a1 - a2);
}

template <CoordinateFunction F>
double lin_cut(double x1, double x2, const F& f) {
  return lin_cut(cut_point(f, x1), cut_point(f, x2));
}

/// Minimum of the strong-convexity minorant at one point: f(x1) - f'(x1)^2 / (4 lambda2).
inline double quad_cut_one(const CutPoint& p, double lambda2) {
  if (!(lambda2 > 0.0)) throw std::invalid_argument("quad_cut_one requires lambda2 > 0");
  return p.f - p.slope * p.slope / (4.0 * lambda2);
}

template <CoordinateFunction F>
double quad_cut_one(double x1, const F& f, double lambda2) {
  return quad_cut_one(cut_point(f, x1), lambda2);
}

namespace detail {

// q(x) = f(x_k) + f'(x_k)(x - x_k) + lambda2 (x - x_k)^2, a global minorant of f.
inline double minorant(const CutPoint& p, double lambda2, double x) {
  const double d = x - p.x;
  return p.f + p.slope * d + lambda2 * d * d;
}

}  // namespace detail

/// Lower bound from the two quadratic minorants at bracketing points. The
/// minorants cross at x_hat; their pointwise maximum is minimized either at
/// x_hat (where the value is f(x1) + a1 (x_hat - x1) + lambda2 (x_hat - x1)^2)
/// or at the vertex of one branch, and that minimum is returned.
inline double quad_cut_two(const CutPoint& p1, const CutPoint& p2, double lambda2) {
  if (!(lambda2 > 0.0)) throw std::invalid_argument("quad_cut_two requires lambda2 > 0");
  if (p1.slope * p2.slope > 0.0) throw std::logic_error("quad_cut_two: slopes must not share a sign");
  const double denom = p1.slope - p2.slope - 2.0 * lambda2 * (p1.x - p2.x);
  if (std::abs(denom) <= 1e-12)
    return std::max(quad_cut_one(p1, lambda2), quad_cut_one(p2, lambda2));
  const double x_hat = (-p1.f + p2.f + p1.slope * p1.x - p2.slope * p2.x -
                        lambda2 * (p1.x * p1.x - p2.x * p2.x)) /
                       denom;
  auto upper = [&](double x) {
    return std::max(detail::minorant(p1, lambda2, x), detail::minorant(p2, lambda2, x));
  };
  const double at_cross = detail::minorant(p1, lambda2, x_hat);
  const double v1 = p1.x - p1.slope / (2.0 * lambda2);
  const double v2 = p2.x - p2.slope / (2.0 * lambda2);
  return std::min({at_cross, upper(v1), upper(v2)});
}

template <CoordinateFunction F>
double quad_cut_two(double x1, double x2, const F& f, double lambda2) {
  return quad_cut_two(cut_point(f, x1), cut_point(f, x2), lambda2);
}

}  // namespace fastsparse

#endif  // FASTSPARSE_LOGISTIC_HPP
