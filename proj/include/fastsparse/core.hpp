#ifndef FASTSPARSE_CORE_HPP
#define FASTSPARSE_CORE_HPP

// Shared data model: design matrices, coefficient states, hyperparameters and
// the two objectives (logistic, exponential) the engines build on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace fastsparse {

// Error categories map one-to-one onto CLI exit codes (2, 3, 4).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LossKind { logistic, exponential };

inline const char* to_string(LossKind loss) {
  return loss == LossKind::logistic ? "logistic" : "exponential";
}

inline LossKind parse_loss(const std::string& s) {
  if (s == "logistic") return LossKind::logistic;
  if (s == "exponential") return LossKind::exponential;
  throw ConfigError("unknown loss '" + s + "'");
}

namespace detail {

// log(1 + e^m), stable for large |m|.
inline double log1pexp(double m) {
  if (m > 0) return m + std::log1p(std::exp(-m));
  return std::log1p(std::exp(m));
}

}  // namespace detail

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Dense observations x features matrix stored column-major, with labels in
/// {-1,+1}. Immutable after construction.
class DesignMatrix {
 public:
  DesignMatrix() = default;

  /// `columns` holds p columns of length n each. Labels in {0,1} are remapped
  /// to {-1,+1}; any other label value is rejected.
  DesignMatrix(std::vector<std::vector<double>> columns, std::vector<double> labels,
               std::vector<std::string> feature_names)
      : n_(labels.size()), p_(columns.size()), names_(std::move(feature_names)) {
    if (names_.size() != p_)
      throw InputError("feature_names has " + std::to_string(names_.size()) +
                       " entries, expected " + std::to_string(p_));
    std::unordered_set<std::string> seen;
    for (const auto& nm : names_)
      if (!seen.insert(nm).second) throw InputError("duplicate feature name '" + nm + "'");

    y_ = normalize_labels(std::move(labels));

    x_.reserve(n_ * p_);
    binary_ = true;
    for (std::size_t j = 0; j < p_; ++j) {
      if (columns[j].size() != n_)
        throw InputError("column '" + names_[j] + "' has " + std::to_string(columns[j].size()) +
                         " rows, expected " + std::to_string(n_));
      for (double v : columns[j]) {
        if (!std::isfinite(v)) throw InputError("non-finite entry in column '" + names_[j] + "'");
        if (v != 1.0 && v != -1.0) binary_ = false;
        x_.push_back(v);
      }
    }
    if (p_ == 0) binary_ = true;
  }

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }
  bool binary() const { return binary_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  std::span<const double> y() const { return y_; }
  std::span<const double> col(std::size_t j) const { return {x_.data() + j * n_, n_}; }
  double at(std::size_t i, std::size_t j) const { return x_[j * n_ + i]; }

  /// Signed design entry z_ij = y_i x_ij.
  double z(std::size_t i, std::size_t j) const { return y_[i] * at(i, j); }

  std::vector<double> row(std::size_t i) const {
    std::vector<double> r(p_);
    for (std::size_t j = 0; j < p_; ++j) r[j] = at(i, j);
    return r;
  }

 private:
  static std::vector<double> normalize_labels(std::vector<double> labels) {
    const bool has_zero = std::find(labels.begin(), labels.end(), 0.0) != labels.end();
    for (double& v : labels) {
      if (has_zero) {
        if (v == 0.0)
          v = -1.0;
        else if (v != 1.0)
          throw InputError("labels must be all in {0,1} or all in {-1,+1}");
      } else if (v != 1.0 && v != -1.0) {
        throw InputError("labels must be in {-1,+1} or {0,1}");
      }
    }
    return labels;
  }

  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<std::string> names_;
  bool binary_ = true;
};

/// Coefficients, support set, intercept, and the per-observation margin cache
/// m_i = y_i (w^T x_i + b). All mutation goes through the setters so the
/// cache and the support stay consistent with w.
class ModelState {
 public:
  ModelState() = default;
  explicit ModelState(const DesignMatrix& data)
      : w_(data.p(), 0.0), margins_(data.n(), 0.0) {}

  std::span<const double> w() const { return w_; }
  double w(std::size_t j) const { return w_[j]; }
  double intercept() const { return intercept_; }
  /// Sorted ascending.
  const std::vector<std::size_t>& support() const { return support_; }
  std::span<const double> margins() const { return margins_; }
  std::size_t p() const { return w_.size(); }
  bool in_support(std::size_t j) const { return w_[j] != 0.0; }

  /// Sets w_j and incrementally updates the margin cache. Returns the change.
  double set_coef(const DesignMatrix& data, std::size_t j, double value) {
    const double delta = value - w_[j];
    if (delta == 0.0) return 0.0;
    const bool was = w_[j] != 0.0;
    w_[j] = value;
    const auto x = data.col(j);
    const auto y = data.y();
    for (std::size_t i = 0; i < margins_.size(); ++i) margins_[i] += delta * y[i] * x[i];
    const bool now = value != 0.0;
    if (was != now) {
      auto it = std::lower_bound(support_.begin(), support_.end(), j);
      if (now)
        support_.insert(it, j);
      else
        support_.erase(it);
    }
    return delta;
  }

  double set_intercept(const DesignMatrix& data, double b) {
    const double delta = b - intercept_;
    if (delta == 0.0) return 0.0;
    intercept_ = b;
    const auto y = data.y();
    for (std::size_t i = 0; i < margins_.size(); ++i) margins_[i] += delta * y[i];
    return delta;
  }

  /// Recomputes margins from scratch.
  void refresh(const DesignMatrix& data) {
    const auto y = data.y();
    std::fill(margins_.begin(), margins_.end(), intercept_);
    for (std::size_t j : support_) {
      const auto x = data.col(j);
      for (std::size_t i = 0; i < margins_.size(); ++i) margins_[i] += w_[j] * x[i];
    }
    for (std::size_t i = 0; i < margins_.size(); ++i) margins_[i] *= y[i];
  }

  /// Raw score f(x) = w^T x + b for one observation.
  double score(std::span<const double> x) const {
    if (x.size() != w_.size())
      throw InputError("observation has " + std::to_string(x.size()) + " features, model has " +
                       std::to_string(w_.size()));
    double f = intercept_;
    for (std::size_t j : support_) f += w_[j] * x[j];
    return f;
  }

  /// Raw scores for every row of `data`, derived from the margin cache.
  std::vector<double> scores(const DesignMatrix& data) const {
    std::vector<double> s(margins_.size());
    const auto y = data.y();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = margins_[i] * y[i];
    return s;
  }

 private:
  std::vector<double> w_;
  std::vector<std::size_t> support_;
  double intercept_ = 0.0;
  std::vector<double> margins_;
};

struct HyperParams {
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  LossKind loss = LossKind::logistic;
  int max_inner_iter = 10;
  double objective_tol = 1e-8;
  /// Swap candidates examined per support feature; nullopt means all of S^c.
  std::optional<std::size_t> candidate_limit;

  void validate() const {
    if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) throw ConfigError("lambda0 must be >= 0");
    if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw ConfigError("lambda2 must be >= 0");
    if (loss == LossKind::exponential && lambda2 != 0.0)
      throw ConfigError("the exponential loss takes no L2 penalty (lambda2 must be 0)");
    if (max_inner_iter <= 0) throw ConfigError("max_inner_iter must be positive");
    if (!(objective_tol > 0.0)) throw ConfigError("objective_tol must be positive");
    if (candidate_limit && *candidate_limit == 0)
      throw ConfigError("candidate_limit must be positive");
  }
};

inline double l2_norm_sq(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

/// Smooth logistic part G(w) = sum log(1 + exp(-m_i)) + lambda2 ||w||^2.
inline double logistic_loss(const ModelState& state, double lambda2) {
  double s = 0.0;
  for (double m : state.margins()) s += detail::log1pexp(-m);
  if (lambda2 != 0.0) {
    double r = 0.0;
    for (std::size_t j : state.support()) r += state.w(j) * state.w(j);
    s += lambda2 * r;
  }
  return s;
}

/// Smooth exponential part H(w) = sum exp(-m_i).
inline double exponential_loss(const ModelState& state) {
  double s = 0.0;
  for (double m : state.margins()) s += std::exp(-m);
  return s;
}

inline double logistic_objective(const ModelState& state, const DesignMatrix& /*data*/,
                                 const HyperParams& hp) {
  return logistic_loss(state, hp.lambda2) +
         hp.lambda0 * static_cast<double>(state.support().size());
}

inline double exponential_objective(const ModelState& state, const DesignMatrix& data,
                                    const HyperParams& hp) {
  if (!data.binary())
    throw InputError("the exponential loss requires a binary {-1,+1} design matrix");
  return exponential_loss(state) + hp.lambda0 * static_cast<double>(state.support().size());
}

inline double objective(const ModelState& state, const DesignMatrix& data, const HyperParams& hp) {
  return hp.loss == LossKind::logistic ? logistic_objective(state, data, hp)
                                       : exponential_objective(state, data, hp);
}

/// Probability of y = +1 from a raw score: sigma(f) under the logistic loss,
/// sigma(2f) under the exponential loss.
inline double probability_from_score(double f, LossKind loss) {
  return loss == LossKind::logistic ? sigmoid(f) : sigmoid(2.0 * f);
}

inline double predict_probability(const ModelState& state, std::span<const double> x,
                                  LossKind loss) {
  return probability_from_score(state.score(x), loss);
}

/// Exact minimization of the logistic loss over the intercept alone:
/// Newton steps on the derivative, kept inside a sign bracket. Returns the
/// new intercept.
inline double refit_intercept_logistic(ModelState& state, const DesignMatrix& data) {
  const auto y = data.y();
  const auto m = state.margins();
  const std::size_t n = data.n();
  if (n == 0) return state.intercept();
  const double tol = 1e-13 * static_cast<double>(n);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double delta = 0.0;
  for (int it = 0; it < 200; ++it) {
    double g = 0.0, h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sigmoid(-(m[i] + delta * y[i]));
      g -= y[i] * s;
      h += s * (1.0 - s);
    }
    if (std::abs(g) <= tol) break;
    (g < 0.0 ? lo : hi) = delta;
    double next = delta + std::clamp(h > 0.0 ? -g / h : (g < 0.0 ? 10.0 : -10.0), -10.0, 10.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == delta) break;
    delta = next;
  }
  state.set_intercept(data, state.intercept() + delta);
  return state.intercept();
}

}  // namespace fastsparse

#endif  // FASTSPARSE_CORE_HPP
