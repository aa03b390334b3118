#ifndef FASTSPARSE_SYNTH_HPP
#define FASTSPARSE_SYNTH_HPP

// Correlated Gaussian classification data with a planted sparse logistic model.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"

namespace fastsparse {

struct SynthSpec {
  std::size_t n = 960;
  std::size_t p = 1000;
  std::size_t k = 25;
  double rho = 0.9;
  std::uint64_t seed = 0;

  void validate() const {
    if (n == 0 || p == 0 || k == 0) throw ConfigError("synthetic n, p and k must be positive");
    if (k > p) throw ConfigError("synthetic k must not exceed p");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("synthetic rho must lie in [0, 1)");
  }
};

struct SynthData {
  DesignMatrix data;
  std::vector<std::size_t> truth;  // 0-based planted support
  std::vector<double> w_true;
};

/// 0-based positions of the planted coefficients: the 1-based indices i with
/// i mod (p/k) == 0, i.e. p/k, 2p/k, ..., k p/k.
inline std::vector<std::size_t> planted_support(std::size_t p, std::size_t k) {
  const std::size_t step = p / k;
  std::vector<std::size_t> out;
  for (std::size_t m = 1; m <= k; ++m) out.push_back(m * step - 1);
  return out;
}

/// Rows follow an AR(1) recurrence x_j = rho x_{j-1} + sqrt(1 - rho^2) e_j,
/// which gives Cov(x_i, x_j) = rho^|i-j|. Labels are Bernoulli with
/// P(y = +1 | x) = 1 / (1 + exp(-w^T x)).
inline SynthData gen_classification(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double innov = std::sqrt(1.0 - spec.rho * spec.rho);

  SynthData out;
  out.truth = planted_support(spec.p, spec.k);
  out.w_true.assign(spec.p, 0.0);
  for (std::size_t j : out.truth) out.w_true[j] = 1.0;

  std::vector<std::vector<double>> cols(spec.p, std::vector<double>(spec.n));
  std::vector<double> labels(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    double prev = normal(rng);
    cols[0][i] = prev;
    for (std::size_t j = 1; j < spec.p; ++j) {
      prev = spec.rho * prev + innov * normal(rng);
      cols[j][i] = prev;
    }
    double f = 0.0;
    for (std::size_t j : out.truth) f += cols[j][i];
    labels[i] = unif(rng) < sigmoid(f) ? 1.0 : -1.0;
  }
  std::vector<std::string> names(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) names[j] = "x" + std::to_string(j + 1);
  out.data = DesignMatrix(std::move(cols), std::move(labels), std::move(names));
  return out;
}

}  // namespace fastsparse

#endif  // FASTSPARSE_SYNTH_HPP
