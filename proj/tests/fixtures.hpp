#pragma once

#include <random>
#include <string>
#include <vector>

#include <fastsparse/core.hpp>

namespace fixture {

/// Gaussian features, labels from a random sparse logistic model.
inline fastsparse::DesignMatrix random_logistic(std::size_t n, std::size_t p, unsigned seed,
                                                std::size_t planted = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  for (auto& c : cols)
    for (double& v : c) v = N(rng);
  std::vector<double> w(p, 0.0);
  for (std::size_t k = 0; k < std::min(planted, p); ++k) w[(k * 7) % p] = N(rng) * 1.5;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < p; ++j) f += w[j] * cols[j][i];
    y[i] = U(rng) < 1.0 / (1.0 + std::exp(-f)) ? 1.0 : -1.0;
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
  return fastsparse::DesignMatrix(std::move(cols), std::move(y), std::move(names));
}

/// Random {-1,+1} features, labels correlated with a few of them.
inline fastsparse::DesignMatrix random_binary(std::size_t n, std::size_t p, unsigned seed,
                                              std::size_t planted = 3) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  for (auto& c : cols)
    for (double& v : c) v = coin(rng) ? 1.0 : -1.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t k = 0; k < std::min(planted, p); ++k) f += 0.8 * cols[(k * 5) % p][i];
    y[i] = U(rng) < 1.0 / (1.0 + std::exp(-2.0 * f)) ? 1.0 : -1.0;
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("b" + std::to_string(j));
  return fastsparse::DesignMatrix(std::move(cols), std::move(y), std::move(names));
}

}  // namespace fixture
