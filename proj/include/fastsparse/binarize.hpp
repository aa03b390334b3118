#ifndef FASTSPARSE_BINARIZE_HPP
#define FASTSPARSE_BINARIZE_HPP

// Threshold dummy variables for continuous features, and the additive
// scorecard a model fitted on them exports to.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace fastsparse {

enum class Direction { le, ge };
enum class Encoding { zero_one, plus_minus };

inline const char* to_string(Direction d) { return d == Direction::le ? "<=" : ">="; }
inline const char* to_string(Encoding e) { return e == Encoding::zero_one ? "zero_one" : "plus_minus"; }

inline Encoding parse_encoding(const std::string& s) {
  if (s == "zero_one") return Encoding::zero_one;
  if (s == "plus_minus") return Encoding::plus_minus;
  throw InputError("unknown encoding '" + s + "'");
}

namespace detail {

inline std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Shortest %g rendering that parses back to the same double.
inline std::string shortest_repr(double v) {
  for (int digits = 1; digits < 17; ++digits) {
    std::string s = format_double(v, digits);
    if (std::strtod(s.c_str(), nullptr) == v) return s;
  }
  return format_double(v, 17);
}

}  // namespace detail

struct ThresholdGroup {
  std::string feature;
  std::size_t source = 0;           // column in the continuous matrix
  std::vector<double> thresholds;   // strictly increasing
  std::vector<std::size_t> columns; // dummy columns, parallel to thresholds
};

struct ThresholdMap {
  Direction direction = Direction::le;
  Encoding encoding = Encoding::zero_one;
  std::vector<ThresholdGroup> groups;
  std::vector<std::string> dropped_constant;

  std::size_t column_count() const {
    std::size_t c = 0;
    for (const auto& g : groups) c += g.columns.size();
    return c;
  }
};

struct Binarized {
  DesignMatrix data;
  ThresholdMap map;
};

/// Name of the dummy column for `feature` at threshold `theta`.
inline std::string dummy_name(const std::string& feature, Direction d, double theta) {
  return feature + to_string(d) + detail::shortest_repr(theta);
}

/// Thresholds for one feature: its distinct realized values, or `max_thresholds`
/// equally spaced quantiles of them (realized values, deduplicated).
inline std::vector<double> feature_thresholds(std::span<const double> values,
                                              std::optional<std::size_t> max_thresholds) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (!max_thresholds || distinct.size() <= *max_thresholds) return distinct;
  const std::size_t m = *max_thresholds;
  const std::size_t n = sorted.size();
  std::vector<double> out;
  for (std::size_t q = 1; q <= m; ++q) {
    // type-1 empirical quantile at level q/m
    std::size_t rank = (q * n + m - 1) / m;
    const double v = sorted[std::max<std::size_t>(rank, 1) - 1];
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

/// Replaces every continuous feature with one indicator column per threshold.
/// Constant features produce no columns and are listed in `dropped_constant`.
inline Binarized binarize(const DesignMatrix& data, Direction direction = Direction::le,
                          Encoding encoding = Encoding::zero_one,
                          std::optional<std::size_t> max_thresholds = std::nullopt) {
  if (data.n() == 0) throw InputError("cannot binarize an empty dataset");
  if (max_thresholds && *max_thresholds == 0)
    throw ConfigError("max thresholds per feature must be positive");
  ThresholdMap map;
  map.direction = direction;
  map.encoding = encoding;
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  const double off = encoding == Encoding::zero_one ? 0.0 : -1.0;
  for (std::size_t j = 0; j < data.p(); ++j) {
    const auto x = data.col(j);
    const auto& fname = data.feature_names()[j];
    std::vector<double> th = feature_thresholds(x, max_thresholds);
    if (th.size() <= 1) {
      map.dropped_constant.push_back(fname);
      continue;
    }
    ThresholdGroup g;
    g.feature = fname;
    g.source = j;
    for (double theta : th) {
      std::vector<double> c(data.n());
      for (std::size_t i = 0; i < data.n(); ++i) {
        const bool hit = direction == Direction::le ? x[i] <= theta : x[i] >= theta;
        c[i] = hit ? 1.0 : off;
      }
      g.thresholds.push_back(theta);
      g.columns.push_back(cols.size());
      names.push_back(dummy_name(fname, direction, theta));
      cols.push_back(std::move(c));
    }
    map.groups.push_back(std::move(g));
  }
  std::vector<double> labels(data.y().begin(), data.y().end());
  return {DesignMatrix(std::move(cols), std::move(labels), std::move(names)), std::move(map)};
}

struct ScorecardTerm {
  std::string feature;
  std::string op;  // "<=", ">=", or "*" for a plain linear term
  double threshold = 0.0;
  double weight = 0.0;

  bool operator==(const ScorecardTerm&) const = default;
};

/// Sparse additive model: intercept plus weighted indicator (or linear) terms.
struct Scorecard {
  std::vector<ScorecardTerm> terms;
  double intercept = 0.0;
  LossKind loss = LossKind::logistic;
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  Encoding encoding = Encoding::zero_one;

  bool operator==(const Scorecard&) const = default;

  double term_value(const ScorecardTerm& t, double x) const {
    if (t.op == "*") return x;
    const bool hit = t.op == "<=" ? x <= t.threshold : x >= t.threshold;
    if (encoding == Encoding::zero_one) return hit ? 1.0 : 0.0;
    return hit ? 1.0 : -1.0;
  }

  /// Raw scores on a matrix of source features, matched by name.
  std::vector<double> scores(const DesignMatrix& raw) const {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < raw.p(); ++j) index.emplace(raw.feature_names()[j], j);
    std::vector<std::size_t> src(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
      auto it = index.find(terms[t].feature);
      if (it == index.end()) throw InputError("data has no feature named '" + terms[t].feature + "'");
      src[t] = it->second;
    }
    std::vector<double> out(raw.n(), intercept);
    for (std::size_t i = 0; i < raw.n(); ++i) {
      double s = intercept;
      for (std::size_t t = 0; t < terms.size(); ++t)
        s += terms[t].weight * term_value(terms[t], raw.at(i, src[t]));
      out[i] = s;
    }
    return out;
  }
};

/// Scorecard for a state fitted on the matrix `map` produced. Terms are
/// grouped by source feature in threshold order; zero weights are omitted.
inline Scorecard export_scorecard(const ModelState& state, const ThresholdMap& map,
                                  const std::vector<std::string>& names, const HyperParams& hp) {
  if (state.p() != map.column_count() || names.size() != map.column_count())
    throw InputError("model has " + std::to_string(state.p()) + " coefficients and " +
                     std::to_string(names.size()) + " names, threshold map has " +
                     std::to_string(map.column_count()) + " columns");
  Scorecard sc;
  sc.intercept = state.intercept();
  sc.loss = hp.loss;
  sc.lambda0 = hp.lambda0;
  sc.lambda2 = hp.lambda2;
  sc.encoding = map.encoding;
  for (const auto& g : map.groups)
    for (std::size_t t = 0; t < g.columns.size(); ++t) {
      const double w = state.w(g.columns[t]);
      if (w != 0.0) sc.terms.push_back({g.feature, to_string(map.direction), g.thresholds[t], w});
    }
  return sc;
}

/// Plain linear model in the same container: one "*" term per nonzero weight.
inline Scorecard export_linear(const ModelState& state, const std::vector<std::string>& names,
                               const HyperParams& hp) {
  if (state.p() != names.size()) throw InputError("feature name count does not match the model");
  Scorecard sc;
  sc.intercept = state.intercept();
  sc.loss = hp.loss;
  sc.lambda0 = hp.lambda0;
  sc.lambda2 = hp.lambda2;
  for (std::size_t j : state.support()) sc.terms.push_back({names[j], "*", 0.0, state.w(j)});
  return sc;
}

/// JSON text with every number printed to 17 significant digits.
inline std::string to_json(const Scorecard& sc) {
  auto num = [](double v) { return detail::format_double(v, 17); };
  auto str = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::ostringstream os;
  os << "{\n";
  os << "  \"loss\": " << str(to_string(sc.loss)) << ",\n";
  os << "  \"lambda0\": " << num(sc.lambda0) << ",\n";
  os << "  \"lambda2\": " << num(sc.lambda2) << ",\n";
  os << "  \"encoding\": " << str(to_string(sc.encoding)) << ",\n";
  os << "  \"intercept\": " << num(sc.intercept) << ",\n";
  os << "  \"terms\": [";
  for (std::size_t t = 0; t < sc.terms.size(); ++t) {
    const auto& term = sc.terms[t];
    os << (t ? ",\n" : "\n") << "    {\"feature\": " << str(term.feature)
       << ", \"op\": " << str(term.op) << ", \"threshold\": " << num(term.threshold)
       << ", \"weight\": " << num(term.weight) << "}";
  }
  os << (sc.terms.empty() ? "]\n" : "\n  ]\n") << "}\n";
  return os.str();
}

inline Scorecard scorecard_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
  try {
    Scorecard sc;
    const std::string loss = j.at("loss").get<std::string>();
    if (loss != "logistic" && loss != "exponential") throw InputError("unknown loss '" + loss + "'");
    sc.loss = loss == "logistic" ? LossKind::logistic : LossKind::exponential;
    sc.lambda0 = j.at("lambda0").get<double>();
    sc.lambda2 = j.at("lambda2").get<double>();
    sc.encoding = j.contains("encoding") ? parse_encoding(j.at("encoding").get<std::string>())
                                         : Encoding::zero_one;
    sc.intercept = j.at("intercept").get<double>();
    for (const auto& t : j.at("terms")) {
      ScorecardTerm term{t.at("feature").get<std::string>(), t.at("op").get<std::string>(),
                         t.at("threshold").get<double>(), t.at("weight").get<double>()};
      if (term.op != "<=" && term.op != ">=" && term.op != "*")
        throw InputError("unknown term operator '" + term.op + "'");
      sc.terms.push_back(std::move(term));
    }
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace fastsparse

#endif  // FASTSPARSE_BINARIZE_HPP
