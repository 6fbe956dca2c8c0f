#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "generators.hpp"
#include "valuepilot/ranking.hpp"

using namespace valuepilot;
using doctest::Approx;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  Matrix x(n, m);
  for (auto& v : x.data()) v = testgen::uniform(rng, -1, 1);
  return x;
}

ValueVector random_weights(std::mt19937_64& rng, std::size_t m) {
  ValueVector w(m);
  for (auto& v : w) v = testgen::uniform(rng, 0.01, 1.0);
  return w;
}

}  // namespace

TEST_CASE("two-action PROMETHEE flows by hand") {
  const auto c = from_rows({{0.2}, {0.0}});
  const ValueVector w{1.0};
  auto r = rank_criteria(c, w);
  REQUIRE(r.flows);
  CHECK(r.order == std::vector<std::size_t>{0, 1});
  CHECK(std::abs(r.flows->positive[0] - 0.274916998656239) < 1e-12);
  CHECK(std::abs(r.flows->negative[0] - 0.225083001343761) < 1e-12);
  CHECK(std::abs(r.flows->net[0] - 0.049833997312478) < 1e-12);
  CHECK(r.flows->net[1] == -r.flows->net[0]);
}

TEST_CASE("pairwise preferences are antisymmetric") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_matrix(rng, testgen::pick(rng, 1, 8), testgen::pick(rng, 1, 6));
    const auto v = pairwise_preferences(x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t q = 0; q < x.rows(); ++q) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
          CHECK(std::abs(v(i, q, j) + v(q, i, j) - 1.0) < 1e-12);
        }
      }
      CHECK(v(i, i, 0) == 0.5);
    }
  }
}

TEST_CASE("net flows sum to zero and divisors agree on order") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = testgen::pick(rng, 1, 10), m = testgen::pick(rng, 1, 6);
    const auto x = random_matrix(rng, n, m);
    const auto w = random_weights(rng, m);
    const auto a = rank_criteria(x, w, Backend::promethee, FlowDivisor::action_count);
    const auto b = rank_criteria(x, w, Backend::promethee, FlowDivisor::opponent_count);
    const double total = std::accumulate(a.flows->net.begin(), a.flows->net.end(), 0.0);
    CHECK(std::abs(total) < 1e-9);
    CHECK(a.order == b.order);
  }
}

TEST_CASE("single action ranks alone with zero flow") {
  const auto r = rank_criteria(from_rows({{0.3, -0.2}}), ValueVector{1.0, 1.0});
  CHECK(r.order == std::vector<std::size_t>{0});
  CHECK(r.flows->net[0] == 0.0);
}

TEST_CASE("duplicate actions tie and keep their input order") {
  const auto x = from_rows({{0.1, 0.4}, {0.7, -0.3}, {0.1, 0.4}, {0.7, -0.3}});
  const ValueVector w{0.9, 0.4};
  for (auto b : all_backends()) {
    const auto r = rank_criteria(x, w, b);
    CHECK(r.scores[0] == r.scores[2]);
    CHECK(r.scores[1] == r.scores[3]);
    auto pos = [&](std::size_t i) {
      return std::find(r.order.begin(), r.order.end(), i) - r.order.begin();
    };
    CHECK(pos(0) < pos(2));
    CHECK(pos(1) < pos(3));
  }
}

TEST_CASE("order_by_score is a stable descending sort") {
  const ValueVector s{0.1, 0.5, 0.1, 0.5, -1.0};
  CHECK(order_by_score(s) == std::vector<std::size_t>{1, 3, 0, 2, 4});
}

TEST_CASE("per-dimension shifts leave every backend's PROMETHEE order alone") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = testgen::pick(rng, 1, 10), m = testgen::pick(rng, 1, 6);
    auto x = random_matrix(rng, n, m);
    const auto w = random_weights(rng, m);
    const auto before = rank_criteria(x, w).order;
    for (std::size_t j = 0; j < m; ++j) {
      const double shift = testgen::uniform(rng, -3, 3);
      for (std::size_t i = 0; i < n; ++i) x(i, j) += shift;
    }
    CHECK(rank_criteria(x, w).order == before);
  }
}

TEST_CASE("MAUT, TOPSIS and AHP small cases") {
  CHECK(maut_utilities(from_rows({{0.5, -0.5}}), ValueVector{2.0, 1.0})[0] == 0.5);

  const auto t = topsis_closeness(from_rows({{3.0}, {4.0}}), ValueVector{1.0});
  CHECK(t[0] == Approx(0.0));
  CHECK(t[1] == Approx(1.0));
  const auto sym = topsis_closeness(from_rows({{1.0, 0.0}, {0.0, 1.0}}), ValueVector{1, 1});
  CHECK(sym[0] == Approx(0.5));
  CHECK(sym[1] == Approx(0.5));
  const auto flat = topsis_closeness(from_rows({{0.2}, {0.2}}), ValueVector{1.0});
  CHECK(flat[0] == 1.0);
  CHECK(topsis_closeness(Matrix(0, 2), ValueVector{1, 1}).empty());

  const auto a = ahp_priorities(from_rows({{0.3}, {-0.3}}), ValueVector{1.0});
  CHECK(std::abs(a.global[0] - 0.645656306225795) < 1e-12);
  CHECK(std::abs(a.global[0] + a.global[1] - 1.0) < 1e-12);
}

TEST_CASE("AHP local priorities are normalized and consistent") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = testgen::pick(rng, 1, 9), m = testgen::pick(rng, 1, 6);
    const auto x = random_matrix(rng, n, m);
    const auto a = ahp_priorities(x, random_weights(rng, m));
    for (std::size_t j = 0; j < m; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) col += a.local(i, j);
      CHECK(col == Approx(1.0));
      CHECK(a.consistency[j] < kAhpConsistencyThreshold);
    }
    CHECK(std::accumulate(a.global.begin(), a.global.end(), 0.0) == Approx(1.0));
  }
  CHECK(ahp_random_index(3) == Approx(0.58));
  CHECK(ahp_random_index(2) == 0.0);
}

TEST_CASE("weights are validated") {
  const auto x = from_rows({{0.1, 0.2}});
  CHECK_THROWS_AS(rank_criteria(x, ValueVector{1.0}), StructuralError);
  CHECK_THROWS_AS(rank_criteria(x, ValueVector{1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(topsis_closeness(x, ValueVector{0.0, 0.0}), ValidationError);
  CHECK_THROWS(rank_criteria(Matrix(0, 2), ValueVector{1, 1}));
}

TEST_CASE("rank wires the trace, weights and criteria by variant") {
  std::mt19937_64 rng(29);
  auto inst = testgen::random_instance(rng, 5, 4);
  auto profile = PreferenceProfile::from_raw(inst.preferences);

  ScoringConfig cfg;
  const auto full = rank(inst.scenario, profile, cfg);
  REQUIRE(full.trace);
  const auto expect = rank_criteria(full.trace->contextualized, profile.transformed());
  CHECK(full.order == expect.order);
  CHECK(full.scores == expect.scores);

  cfg.variant = Variant::only_action;
  const auto oa = rank(inst.scenario, profile, cfg);
  const ValueVector ones(4, 1.0);
  CHECK(oa.scores == rank_criteria(oa.trace->action_relevance, ones).scores);

  cfg.variant = Variant::no_preference;
  const auto np = rank(inst.scenario, profile, cfg);
  CHECK(np.scores == rank_criteria(np.trace->contextualized, ones).scores);

  cfg.variant = Variant::full;
  RankOptions raw;
  raw.criteria = CriteriaSource::raw;
  raw.backend = Backend::maut;
  const auto r = rank(inst.scenario, profile, cfg, raw);
  CHECK(r.scores == maut_utilities(r.trace->action_relevance, profile.transformed()));
  CHECK_FALSE(r.flows);
}

TEST_CASE("backend and criteria names") {
  for (auto b : all_backends()) {
    CHECK(parse_backend(to_string(b)) == b);
    CHECK_FALSE(method_note(b).empty());
  }
  CHECK_THROWS_AS(parse_backend("electre"), ConfigError);
  CHECK(parse_criteria_source("raw") == CriteriaSource::raw);
  CHECK_THROWS_AS(parse_criteria_source("mixed"), ConfigError);
}

TEST_CASE("pairwise and aggregate worked values") {
  const auto v = pairwise_preferences(from_rows({{0.3, 1.0}, {0.3, 0.0}}));
  CHECK(v(0, 1, 0) == 0.5);
  CHECK(std::abs(v(0, 1, 1) - 0.731058578630005) < 1e-12);
  const auto single = pairwise_preferences(from_rows({{0.9, -0.9, 0.0}}));
  for (std::size_t j = 0; j < 3; ++j) CHECK(single(0, 0, j) == 0.5);

  PairwisePreferenceTensor one(2, 1);
  one(0, 1, 0) = 0.8;
  const ValueVector half{0.5};
  CHECK(std::abs(aggregate_preferences(one, half)(0, 1) - 0.4) < 1e-15);

  const auto agg = aggregate_preferences(
      pairwise_preferences(from_rows({{0.2, -0.1}, {0.5, 0.3}, {-0.4, 0.0}})),
      ValueVector{0.6, 0.9});
  const double expect[3][3] = {
      {0.75, 0.61651559581179781, 0.81491251500443128},
      {0.88348440418820219, 0.75, 0.94356796670549547},
      {0.68508748499556872, 0.55643203329450453, 0.75}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(agg(i, k) - expect[i][k]) < 1e-12);
  }
}

TEST_CASE("flow worked values") {
  Matrix agg(2, 2);
  agg(0, 1) = 0.7;
  agg(1, 0) = 0.3;
  const auto f = promethee_flows(agg);
  CHECK(std::abs(f.net[0] - 0.2) < 1e-15);
  CHECK(std::abs(f.net[1] + 0.2) < 1e-15);

  Matrix sym(3, 3, 0.4);
  CHECK(promethee_flows(sym).net == std::vector<double>(3, 0.0));
  CHECK(promethee_flows(Matrix(1, 1, 0.5)).net == std::vector<double>{0.0});
}

TEST_CASE("uniform preferences rank like no_preference") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 200; ++k) {
    auto inst = testgen::random_instance(rng);
    const double c = testgen::uniform(rng, 0, 1);
    std::fill(inst.preferences.begin(), inst.preferences.end(), c);
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    ScoringConfig np;
    np.variant = Variant::no_preference;
    CHECK(rank(inst.scenario, profile).order == rank(inst.scenario, profile, np).order);
  }
}

TEST_CASE("permuting actions permutes order and flows") {
  std::mt19937_64 rng(39);
  for (int k = 0; k < 200; ++k) {
    auto inst = testgen::random_instance(rng);
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    const auto base = rank(inst.scenario, profile);
    std::vector<std::size_t> perm(inst.scenario.actions.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    AnnotatedScenario shuffled = inst.scenario;
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled.actions[i] = inst.scenario.actions[perm[i]];
    const auto moved = rank(shuffled, profile);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      CHECK(std::abs(moved.flows->net[i] - base.flows->net[perm[i]]) < 1e-12);
    }
    // Ignore tie order, which follows input position by contract.
    for (std::size_t pos = 0; pos < perm.size(); ++pos) {
      CHECK(std::abs(base.scores[base.order[pos]] - moved.scores[moved.order[pos]]) < 1e-12);
    }
  }
}

TEST_CASE("an action dominating every other ranks first") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = testgen::pick(rng, 2, 10), m = testgen::pick(rng, 1, 6);
    auto x = random_matrix(rng, n, m);
    const std::size_t top = testgen::pick(rng, 0, n - 1);
    for (std::size_t j = 0; j < m; ++j) {
      double best = -1e9;
      for (std::size_t i = 0; i < n; ++i) best = std::max(best, x(i, j));
      x(top, j) = best + (j == 0 ? 0.01 : 0.0);
    }
    for (auto b : all_backends()) {
      CHECK(rank_criteria(x, random_weights(rng, m), b).order.front() == top);
    }
  }
}
