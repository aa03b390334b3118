#pragma once

// Subcommands of the fastsparse command-line tool. `run` is the whole program
// minus process setup, so tests can drive it in-process.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fastsparse/fastsparse.hpp>

namespace fscli {

using namespace fastsparse;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumeric = 4;

struct RunConfig {
  std::string data, model, out, truth;
  std::string loss = "logistic";
  double lambda0 = 1.0;
  double lambda2 = 0.0;
  std::string cut = "auto";
  std::string ordering = "dynamic";
  bool binarize = false;
  bool verify_swaps = false;
  std::string max_thresholds = "all";
  std::string candidate_limit = "all";
  std::uint64_t seed = 0;
  std::vector<double> lambda0_grid = {7, 6, 5, 4, 3, 2, 1, 0.8};
  std::vector<double> lambda2_grid = {0.0};
  SynthSpec synth;
};

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::optional<std::size_t> parse_limit(const std::string& s, const char* flag) {
  if (s == "all") return std::nullopt;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size() && v > 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(flag) + " expects a positive integer or 'all', got '" + s + "'");
}

inline HyperParams hyper_params(const RunConfig& c) {
  HyperParams hp;
  hp.loss = parse_loss(c.loss);
  hp.lambda0 = c.lambda0;
  hp.lambda2 = c.lambda2;
  hp.candidate_limit = parse_limit(c.candidate_limit, "--candidate-limit");
  hp.validate();
  return hp;
}

inline SearchOptions search_options(const RunConfig& c) {
  return {parse_ordering(c.ordering), parse_cut_mode(c.cut), c.verify_swaps};
}

/// Training data as the solver sees it, plus what is needed to map a fit
/// back to the raw columns.
struct Prepared {
  DesignMatrix raw;
  DesignMatrix fit;
  std::optional<ThresholdMap> map;
};

inline Prepared prepare(const RunConfig& c, LossKind loss, std::optional<Encoding> force = std::nullopt) {
  if (c.data.empty()) throw ConfigError("--data is required");
  const CsvTable table = read_csv_file(c.data);
  if (!table.labels) throw InputError("'" + c.data + "' has no 'y' column");
  Prepared p{table.matrix(), {}, std::nullopt};
  if (p.raw.n() == 0) throw InputError("'" + c.data + "' has no rows");
  if (c.binarize) {
    const Encoding enc = force ? *force : loss == LossKind::exponential ? Encoding::plus_minus : Encoding::zero_one;
    Binarized b = binarize(p.raw, Direction::le, enc, parse_limit(c.max_thresholds, "--max-thresholds"));
    p.fit = std::move(b.data);
    p.map = std::move(b.map);
  } else {
    if (c.max_thresholds != "all") throw ConfigError("--max-thresholds requires --binarize");
    p.fit = p.raw;
  }
  if (loss == LossKind::exponential && !p.fit.binary())
    throw ConfigError("the exponential loss needs {-1,+1} features; pass --binarize");
  return p;
}

inline Scorecard to_model(const ModelState& s, const Prepared& p, const HyperParams& hp) {
  return p.map ? export_scorecard(s, *p.map, p.fit.feature_names(), hp)
               : export_linear(s, p.fit.feature_names(), hp);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
  if (!f) throw InputError("failed writing '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::optional<double> safe_auc(std::span<const double> s, std::span<const double> y) {
  bool pos = false, neg = false;
  for (double v : y) (v > 0 ? pos : neg) = true;
  if (!pos || !neg) return std::nullopt;
  return auc(s, y);
}

inline std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline int cmd_fit(const RunConfig& c, std::ostream& out) {
  const HyperParams hp = hyper_params(c);
  const SearchOptions so = search_options(c);
  resolve_cut_mode(so.cut, hp.lambda2);
  const Prepared p = prepare(c, hp.loss);
  const auto t0 = std::chrono::steady_clock::now();
  SearchStats stats;
  const ModelState s = fit_point(p.fit, hp, so, std::nullopt, &stats);
  const double ms = elapsed_ms(t0);
  const Scorecard model = to_model(s, p, hp);
  // Metrics come from the exported model so that predict reproduces them.
  const auto scores = model.scores(p.raw);
  out << "objective " << num(objective(s, p.fit, hp)) << '\n'
      << "support_size " << s.support().size() << '\n'
      << "intercept " << num(s.intercept()) << '\n'
      << "wall_ms " << num(ms) << '\n'
      << "swap_evals " << stats.swap_calls << '\n'
      << "cut_prunes " << stats.cut_prunes << '\n'
      << "train_accuracy " << num(accuracy(scores, p.raw.y())) << '\n'
      << "train_auc " << opt_num(safe_auc(scores, p.raw.y())) << '\n';
  if (!c.out.empty()) write_text(c.out, to_json(model));
  return kExitOk;
}

inline int cmd_predict(const RunConfig& c, std::ostream& out) {
  if (c.model.empty()) throw ConfigError("--model is required");
  if (c.data.empty()) throw ConfigError("--data is required");
  const Scorecard model = scorecard_from_json(read_text(c.model));
  const CsvTable table = read_csv_file(c.data);
  const DesignMatrix raw = table.matrix();
  const auto scores = model.scores(raw);
  std::ostringstream csv;
  csv << "score,probability,label\n";
  for (double f : scores)
    csv << num(f) << ',' << num(probability_from_score(f, model.loss)) << ',' << (f >= 0 ? 1 : -1) << '\n';
  if (c.out.empty())
    out << csv.str();
  else
    write_text(c.out, csv.str());
  if (table.labels) {
    out << "accuracy " << num(accuracy(scores, raw.y())) << '\n'
        << "auc " << opt_num(safe_auc(scores, raw.y())) << '\n';
  }
  return kExitOk;
}

inline PathSpec path_spec(const RunConfig& c, const HyperParams& hp, const SearchOptions& so) {
  PathSpec spec;
  spec.lambda0_grid = c.lambda0_grid;
  spec.lambda2_grid = c.lambda2_grid;
  spec.base = hp;
  spec.search = so;
  spec.validate();
  return spec;
}

inline int cmd_path(const RunConfig& c, std::ostream& out) {
  const HyperParams hp = hyper_params(c);
  const SearchOptions so = search_options(c);
  const PathSpec spec = path_spec(c, hp, so);
  for (double l2 : spec.lambda2_grid) {
    HyperParams check = hp;
    check.lambda2 = l2;
    check.validate();
  }
  const Prepared p = prepare(c, hp.loss);
  const PathResult res = fit_path(p.fit, spec);
  std::ostringstream csv;
  csv << "lambda0,lambda2,support_size,objective,train_auc,wall_ms,swap_evals,cut_prunes,error\n";
  for (const auto& pt : res.points) {
    csv << num(pt.lambda0) << ',' << num(pt.lambda2) << ',';
    if (pt.error) {
      std::string e = *pt.error;
      for (char& ch : e)
        if (ch == ',' || ch == '\n') ch = ';';
      csv << ",,," << num(pt.wall_ms) << ',' << pt.swap_evals << ',' << pt.cut_prunes << ',' << e << '\n';
      continue;
    }
    const auto scores = pt.state.scores(p.fit);
    csv << pt.support_size << ',' << num(pt.objective) << ',' << opt_num(safe_auc(scores, p.fit.y()))
        << ',' << num(pt.wall_ms) << ',' << pt.swap_evals << ',' << pt.cut_prunes << ",\n";
  }
  if (c.out.empty())
    out << csv.str();
  else
    write_text(c.out, csv.str());
  return kExitOk;
}

inline int cmd_bench(const RunConfig& c, std::ostream& out) {
  const HyperParams base = hyper_params(c);
  const Prepared p = prepare(c, LossKind::logistic, Encoding::plus_minus);
  struct Cell {
    LossKind loss;
    CutMode cut;
    Ordering ordering;
  };
  std::vector<Cell> cells;
  for (CutMode cm : {CutMode::lin, CutMode::quad})
    for (Ordering o : {Ordering::sequential, Ordering::dynamic}) cells.push_back({LossKind::logistic, cm, o});
  if (p.fit.binary())
    for (Ordering o : {Ordering::sequential, Ordering::dynamic})
      cells.push_back({LossKind::exponential, CutMode::automatic, o});

  std::ostringstream csv;
  csv << "loss,cut,ordering,lambda0,lambda2,support_size,objective,wall_ms,swap_evals,cut_prunes,error\n";
  auto cut_name = [](const Cell& cell) -> std::string {
    if (cell.loss == LossKind::exponential) return "none";
    return cell.cut == CutMode::lin ? "lin" : "quad";
  };
  for (const Cell& cell : cells) {
    for (double l2 : c.lambda2_grid) {
      const std::string head = std::string(to_string(cell.loss)) + ',' + cut_name(cell) + ',' +
                               (cell.ordering == Ordering::dynamic ? "dynamic" : "sequential") + ',';
      if (cell.loss == LossKind::exponential && l2 != 0.0) continue;
      if (cell.cut == CutMode::quad && !(l2 > 0.0)) continue;
      PathSpec spec;
      spec.lambda0_grid = c.lambda0_grid;
      spec.lambda2_grid = {l2};
      spec.base = base;
      spec.base.loss = cell.loss;
      spec.search = {cell.ordering, cell.cut};
      spec.validate();
      const PathResult res = fit_path(p.fit, spec);
      for (const auto& pt : res.points) {
        csv << head << num(pt.lambda0) << ',' << num(pt.lambda2) << ',';
        if (pt.error)
          csv << ",," << num(pt.wall_ms) << ",,," << *pt.error << '\n';
        else
          csv << pt.support_size << ',' << num(pt.objective) << ',' << num(pt.wall_ms) << ','
              << pt.swap_evals << ',' << pt.cut_prunes << ",\n";
      }
    }
  }
  if (c.out.empty())
    out << csv.str();
  else
    write_text(c.out, csv.str());
  return kExitOk;
}

inline int cmd_synth(const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("--out is required");
  SynthSpec spec = c.synth;
  spec.seed = c.seed;
  const SynthData sd = gen_classification(spec);
  std::ostringstream csv;
  write_csv(csv, sd.data);
  write_text(c.out, csv.str());
  std::ostringstream truth;
  for (std::size_t j : sd.truth) truth << sd.data.feature_names()[j] << '\n';
  const std::string truth_path = c.truth.empty() ? c.out + ".truth" : c.truth;
  write_text(truth_path, truth.str());
  out << "rows " << sd.data.n() << "\nfeatures " << sd.data.p() << "\ntruth " << truth_path << '\n';
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Sparse L0 logistic / exponential-loss classification with swap search"};
  app.require_subcommand(1);

  auto model_flags = [&c](CLI::App* s) {
    s->add_option("--data", c.data, "CSV with header and a 'y' label column");
    s->add_option("--loss", c.loss, "logistic | exponential");
    s->add_option("--lambda2", c.lambda2, "L2 penalty");
    s->add_option("--cut", c.cut, "lin | quad | auto");
    s->add_option("--ordering", c.ordering, "dynamic | sequential");
    s->add_flag("--binarize", c.binarize, "replace features with threshold indicators");
    s->add_flag("--verify-swaps", c.verify_swaps, "re-check swaps with the support refit before stopping");
    s->add_option("--max-thresholds", c.max_thresholds, "thresholds per feature, or 'all'");
    s->add_option("--candidate-limit", c.candidate_limit, "swap candidates per feature, or 'all'");
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--out", c.out, "output path");
  };

  auto* fit = app.add_subcommand("fit", "fit one model and write it as JSON");
  model_flags(fit);
  fit->add_option("--lambda0", c.lambda0, "L0 penalty");

  auto* predict = app.add_subcommand("predict", "score a CSV with a saved model");
  predict->add_option("--model", c.model, "model JSON")->required();
  predict->add_option("--data", c.data, "CSV to score")->required();
  predict->add_option("--out", c.out, "output CSV (default stdout)");
  predict->add_option("--seed", c.seed, "random seed");

  auto* path = app.add_subcommand("path", "fit a (lambda0, lambda2) grid with warm starts");
  model_flags(path);
  path->add_option("--lambda0-grid", c.lambda0_grid, "descending lambda0 values")->delimiter(',');
  path->add_option("--lambda2-grid", c.lambda2_grid, "lambda2 values")->delimiter(',');

  auto* bench = app.add_subcommand("bench", "cut / ordering / loss ablation over a grid");
  model_flags(bench);
  bench->add_option("--lambda0-grid", c.lambda0_grid, "descending lambda0 values")->delimiter(',');
  bench->add_option("--lambda2-grid", c.lambda2_grid, "lambda2 values")->delimiter(',');

  auto* synth = app.add_subcommand("synth", "write synthetic correlated classification data");
  synth->add_option("--n", c.synth.n, "rows");
  synth->add_option("--p", c.synth.p, "features");
  synth->add_option("--k", c.synth.k, "true support size");
  synth->add_option("--rho", c.synth.rho, "AR(1) correlation");
  synth->add_option("--seed", c.seed, "random seed");
  synth->add_option("--out", c.out, "output CSV")->required();
  synth->add_option("--truth", c.truth, "true support file (default <out>.truth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*fit) return cmd_fit(c, out);
    if (*predict) return cmd_predict(c, out);
    if (*path) return cmd_path(c, out);
    if (*bench) return cmd_bench(c, out);
    if (*synth) return cmd_synth(c, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace fscli
