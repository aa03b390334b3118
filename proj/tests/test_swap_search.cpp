#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <fastsparse/path.hpp>
#include <fastsparse/swap_search.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace fastsparse;

namespace {

struct Fun {
  std::function<double(double)> v, d;
  double value(double x) const { return v(x); }
  double slope(double x) const { return d(x); }
};

}  // namespace

TEST(CutMode, Resolution) {
  EXPECT_EQ(resolve_cut_mode(CutMode::automatic, 0.0), CutMode::lin);
  EXPECT_EQ(resolve_cut_mode(CutMode::automatic, 1e-3), CutMode::quad);
  EXPECT_THROW(resolve_cut_mode(CutMode::quad, 0.0), ConfigError);
  EXPECT_THROW(parse_cut_mode("cubic"), ConfigError);
  EXPECT_THROW(parse_ordering("random"), ConfigError);
}

TEST(FailureQueue, OrdersByCountThenIndex) {
  FailureQueue q(6);
  q.record_failure(1);
  q.record_failure(1);
  q.record_failure(4);
  EXPECT_EQ(q.order({1, 2, 4, 5}), (std::vector<std::size_t>{2, 5, 4, 1}));
}

TEST(TryAddQuad, PrunedByFirstCut) {
  // f(x) = x^2 + 10, lambda2 = 1: quad_cut_one at 0 is 10 - 0 >= L_best = 9
  const Fun f{[](double x) { return (x - 0.1) * (x - 0.1) + 10; }, [](double x) { return 2 * (x - 0.1); }};
  const auto r = try_add_quad(f, 2.0, 1.0, 10, 9.0);
  EXPECT_TRUE(r.pruned);
  EXPECT_FALSE(r.line_search_ran);
  EXPECT_FALSE(r.accepted);
}

TEST(TryAddQuad, AcceptsLargeReduction) {
  const DesignMatrix d = fixture::random_binary(200, 3, 41, 1);
  ModelState s(d);
  LogisticProbe f(s, d, 0, 1e-3);
  const double L_best = f.value(0.0) - 1.0;
  const auto r = try_add_quad(s, d, HyperParams{0.0, 1e-3}, 0, L_best);
  ASSERT_TRUE(r.accepted);
  const auto g = oracle::grid_min([&](double x) { return f.value(x); }, -10, 10);
  EXPECT_NEAR(r.coef, g.x, 1e-3);
}

TEST(TryAddLinCut, PrunedAfterBracket) {
  // minimum 1 at x = 1, start slope -2 so T = 1 with L = 2; bracket [1, 2] -> cut 1 >= L_best
  const Fun f{[](double x) { return (x - 1) * (x - 1) + 1; }, [](double x) { return 2 * (x - 1); }};
  const auto r = try_add_lincut(f, 4.0, 10, 0.9);
  EXPECT_TRUE(r.pruned);
  EXPECT_FALSE(r.line_search_ran);
}

TEST(TryAddLinCut, DistantMinimumFallsThrough) {
  // Very flat start: 3T does not reach the minimum at x = 100.
  const Fun f{[](double x) { return 0.01 * (x - 100) * (x - 100); }, [](double x) { return 0.02 * (x - 100); }};
  const auto r = try_add_lincut(f, 1.0, 10, 99.0);
  EXPECT_FALSE(r.pruned);
  EXPECT_TRUE(r.line_search_ran);
  const auto ex = oracle::exhaustive_try_add(f.v, f.d, 1.0, 10, 99.0);
  EXPECT_EQ(r.accepted, ex.accepted);
}

TEST(TryAdd, PruningNeverRejectsAnImprovingCandidate) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (unsigned t = 0; t < 200; ++t) {
    const DesignMatrix d = fixture::random_logistic(40, 4, 900 + t);
    ModelState s(d);
    s.set_coef(d, 1, U(rng) * 2 - 1);
    s.set_coef(d, 2, U(rng) * 2 - 1);
    const double l2 = t % 2 ? 1e-3 : 0.0;
    HyperParams hp{0.0, l2};
    LogisticProbe f(s, d, 0, l2);
    const double f0 = f.value(0.0);
    const auto g = oracle::grid_min([&](double x) { return f.value(x); }, -30, 30);
    const double L_best = g.f + (f0 - g.f) * (U(rng) * 1.4 - 0.2);
    const auto r = l2 > 0 ? try_add_quad(s, d, hp, 0, L_best) : try_add_lincut(s, d, hp, 0, L_best);
    if (r.pruned) EXPECT_GE(g.f, L_best - 1e-8);
  }
}

TEST(TryDeleteOrSwap, DuplicatedColumnIsDeleted) {
  // Column "a2" is an exact copy of "a" and carries a negligible share of the
  // weight, so dropping it leaves the loss unchanged.
  const auto base = fixture::random_logistic(100, 3, 12, 2);
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < 3; ++j) cols.emplace_back(base.col(j).begin(), base.col(j).end());
  cols.push_back(cols[0]);
  const DesignMatrix d(cols, std::vector<double>(base.y().begin(), base.y().end()), {"a", "b", "c", "a2"});
  const HyperParams hp{0.5, 0.0};
  ModelState s(d);
  s.set_coef(d, 0, 0.6);
  reoptimize_logistic(s, d, hp, 1000);
  s.set_coef(d, 3, 1e-300);
  const auto out = try_delete_or_swap(s, d, hp, 3);
  EXPECT_EQ(out.kind, SwapKind::deleted);
  EXPECT_EQ(out.new_state.support(), (std::vector<std::size_t>{0}));
}

TEST(TryDeleteOrSwap, PlantedSwap) {
  const auto sc = scenario::two_improvable(3);
  const auto out = try_delete_or_swap(sc.start, sc.data, sc.hp, 3);
  ASSERT_EQ(out.kind, SwapKind::swapped);
  EXPECT_EQ(*out.added, 5u);
  EXPECT_LT(objective(out.new_state, sc.data, sc.hp), objective(sc.start, sc.data, sc.hp));
}

TEST(TryDeleteOrSwap, StrongFeatureUnchanged) {
  const auto sc = scenario::two_improvable(3);
  const auto out = try_delete_or_swap(sc.start, sc.data, sc.hp, 1);
  EXPECT_EQ(out.kind, SwapKind::no_change);
  EXPECT_EQ(out.new_state.support(), sc.start.support());
}

TEST(FitSwap, AlreadyOptimalStateCountsEachFeatureOnce) {
  const auto sc = scenario::two_improvable(3);
  ModelState opt(sc.data);
  for (std::size_t j : {1, 5, 7, 10, 11, 15}) opt.set_coef(sc.data, j, 0.5);
  reoptimize_logistic(opt, sc.data, sc.hp, 1000);
  FailureQueue q;
  SearchStats st;
  const ModelState out = fit_swap_1opt(opt, sc.data, sc.hp, {}, &st, &q);
  EXPECT_EQ(out.support(), opt.support());
  EXPECT_EQ(st.swap_calls, 6u);
  for (std::size_t j : {1, 5, 7, 10, 11, 15}) EXPECT_EQ(q.count(j), 1u);
}

TEST(FitSwap, TwoImprovableScenario) {
  const auto sc = scenario::two_improvable(3);
  SearchStats dyn, seq;
  const ModelState a = fit_swap_1opt(sc.start, sc.data, sc.hp, {Ordering::dynamic}, &dyn);
  const ModelState b = fit_swap_1opt(sc.start, sc.data, sc.hp, {Ordering::sequential}, &seq);
  const std::vector<std::size_t> expect = {1, 5, 7, 10, 11, 15};
  EXPECT_EQ(a.support(), expect);
  EXPECT_EQ(b.support(), expect);
  EXPECT_EQ(seq.swap_calls, 12u);
  EXPECT_EQ(dyn.swap_calls, 11u);
  EXPECT_NEAR(objective(a, sc.data, sc.hp), objective(b, sc.data, sc.hp), 1e-6);
}

TEST(FitSwap, ObjectiveNeverIncreases) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const DesignMatrix d = fixture::random_logistic(80, 12, 60 + seed, 4);
    HyperParams hp{1.0, seed % 2 ? 1e-3 : 0.0};
    const ModelState w = warm_start(d, hp);
    const ModelState s = fit_swap_1opt(w, d, hp);
    EXPECT_LE(objective(s, d, hp), objective(w, d, hp) + 1e-9);
  }
}

TEST(FitSwap, SwapCertificateSmall) {
  const DesignMatrix d = fixture::random_logistic(60, 10, 777, 3);
  HyperParams hp{1.0, 1e-3};
  const ModelState s = fit_swap_1opt(warm_start(d, hp), d, hp);
  if (s.support().empty()) GTEST_SKIP();
  const auto best = oracle::best_single_swap(oracle::dense(d), d.p(), s.support(), hp.lambda0, hp.lambda2);
  EXPECT_GE(best.objective, objective(s, d, hp) - 1e-6);
}

TEST(FitSwap, VerificationFindsSwapsTheScreenMisses) {
  // Here the best swap only pays off once the other coefficients are refit.
  const DesignMatrix d = fixture::random_logistic(120, 13, 303, 4);
  const HyperParams hp{0.5, 0.0};
  const ModelState w = warm_start(d, hp);
  const ModelState plain = fit_swap_1opt(w, d, hp);
  SearchOptions opts;
  opts.verify_swaps = true;
  SearchStats st;
  const ModelState s = fit_swap_1opt(w, d, hp, opts, &st);
  EXPECT_GE(st.verified_swaps, 1u);
  EXPECT_GT(st.verify_refits, 0u);
  EXPECT_LT(objective(s, d, hp), objective(plain, d, hp) - 1e-3);
  const auto best = oracle::best_single_swap(oracle::dense(d), d.p(), s.support(), hp.lambda0, hp.lambda2);
  EXPECT_GE(best.objective, objective(s, d, hp) - 1e-6);
}

TEST(FitSwap, ExponentialVerificationNeverWorsens) {
  const DesignMatrix d = fixture::random_binary(200, 12, 5, 3);
  HyperParams hp;
  hp.loss = LossKind::exponential;
  hp.lambda0 = 2.0;
  const ModelState w = warm_start(d, hp);
  SearchOptions opts;
  opts.verify_swaps = true;
  const ModelState plain = fit_swap_1opt(w, d, hp);
  const ModelState s = fit_swap_1opt(w, d, hp, opts);
  EXPECT_LE(objective(s, d, hp), objective(plain, d, hp) + 1e-9);
}

TEST(FitSwap, ExponentialLossRuns) {
  const DesignMatrix d = fixture::random_binary(200, 12, 5, 3);
  HyperParams hp;
  hp.loss = LossKind::exponential;
  hp.lambda0 = 2.0;
  const ModelState w = warm_start(d, hp);
  SearchStats st;
  const ModelState s = fit_swap_1opt(w, d, hp, {}, &st);
  EXPECT_LE(objective(s, d, hp), objective(w, d, hp) + 1e-9);
  EXPECT_EQ(st.cut_prunes, 0u);
}
