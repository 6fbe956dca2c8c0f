// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "faults.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "valuepilot/brute_force.hpp"
#include "valuepilot/dataset.hpp"
#include "valuepilot/metrics.hpp"
#include "valuepilot/ranking.hpp"

using namespace valuepilot;

namespace {

const std::string kFixtures = VALUEPILOT_FIXTURE_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::vector<testgen::Instance> oracle_instances() {
  std::mt19937_64 rng(20240601);
  std::vector<testgen::Instance> out;
  for (int k = 0; k < 1000; ++k) out.push_back(testgen::random_instance(rng));
  return out;
}

std::vector<std::string> ids(std::initializer_list<int> xs) {
  std::vector<std::string> out;
  for (int x : xs) out.push_back(std::to_string(x));
  return out;
}

Outcome os_sim_golden() {
  Outcome o;
  const auto a = ids({1, 2, 3, 4, 5});
  const RankingPair p1(ids({5, 3, 1, 4, 2}), ids({3, 1, 5, 4, 2}));
  const RankingPair p2(a, ids({1, 2, 3, 5, 4}));
  const RankingPair p3(a, ids({2, 1, 3, 4, 5}));
  o.require(std::abs(os_sim(p1) - 0.7) < 1e-12, "os_sim example 1");
  o.require(std::abs(os_sim(p2) - 0.95) < 1e-12, "os_sim(A, B)");
  o.require(std::abs(os_sim(p3) - 0.80) < 1e-12, "os_sim(A, C)");
  const int reps = 1000;
  double sink = 0.0;
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) sink += os_sim(p1) + os_sim(p2) + os_sim(p3);
  const double per_call = seconds_since(start) / (3.0 * reps);
  o.require(sink > 0.0 && per_call < 1e-3, "os_sim slower than 1 ms");
  o.detail = o.pass ? "per call " + std::to_string(per_call * 1e6) + " us" : o.detail;
  return o;
}

Outcome oracle_equivalence(const std::vector<testgen::Instance>& instances) {
  Outcome o;
  std::size_t agree = 0;
  const auto start = Clock::now();
  for (const auto& inst : instances) {
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    const auto fast = rank(inst.scenario, profile);
    const auto slow = brute_force_rank(inst.scenario, profile);
    agree += fast.order == slow.order ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  o.require(agree == instances.size(),
            std::to_string(instances.size() - agree) + " orders differ");
  o.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(agree) + "/" + std::to_string(instances.size()) +
               " in " + std::to_string(elapsed) + " s";
  }
  return o;
}

Outcome flow_conservation(const std::vector<testgen::Instance>& instances) {
  Outcome o;
  for (const auto& inst : instances) {
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    const auto r = rank(inst.scenario, profile);
    const double total = std::accumulate(r.flows->net.begin(), r.flows->net.end(), 0.0);
    o.require(std::abs(total) < 1e-9, "net flows sum to " + std::to_string(total));
    const auto v = pairwise_preferences(r.trace->contextualized);
    for (std::size_t i = 0; i < v.action_count(); ++i) {
      for (std::size_t k = 0; k < v.action_count(); ++k) {
        for (std::size_t j = 0; j < v.dimension_count(); ++j) {
          o.require(std::abs(v(i, k, j) + v(k, i, j) - 1.0) < 1e-12,
                    "V antisymmetry violated");
        }
      }
    }
  }
  return o;
}

Outcome translation_invariance() {
  Outcome o;
  std::mt19937_64 rng(404);
  for (int k = 0; k < 200; ++k) {
    auto inst = testgen::random_instance(rng);
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    const auto base = rank(inst.scenario, profile);
    Matrix shifted = base.trace->contextualized;
    for (std::size_t j = 0; j < shifted.cols(); ++j) {
      const double c = testgen::uniform(rng, -2.0, 2.0);
      for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, j) += c;
    }
    const auto moved = rank_criteria(shifted, profile.transformed());
    o.require(moved.order == base.order, "shift changed the order");
  }
  return o;
}

Outcome divisor_neutrality(const std::vector<testgen::Instance>& instances) {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& inst : instances) {
    if (inst.scenario.actions.size() < 2) continue;
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    RankOptions by_n, by_opponents;
    by_opponents.divisor = FlowDivisor::opponent_count;
    const auto a = rank(inst.scenario, profile, {}, by_n);
    const auto b = rank(inst.scenario, profile, {}, by_opponents);
    o.require(a.order == b.order, "divisors disagree");
    ++checked;
  }
  if (o.pass) o.detail = std::to_string(checked) + " instances with n >= 2";
  return o;
}

Outcome ablation_contracts() {
  Outcome o;
  std::mt19937_64 rng(606);
  for (int k = 0; k < 200; ++k) {
    auto inst = testgen::random_instance(rng);
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    for (auto v : all_variants()) {
      ScoringConfig cfg;
      cfg.variant = v;
      const auto fast = rank(inst.scenario, profile, cfg);
      const auto slow = brute_force_rank(inst.scenario, profile, cfg);
      o.require(fast.order == slow.order,
                std::string(to_string(v)) + " differs from its transcription");
      for (std::size_t i = 0; i < fast.scores.size(); ++i) {
        o.require(std::abs(fast.scores[i] - slow.scores[i]) < 1e-9,
                  std::string(to_string(v)) + " flows differ");
      }
    }
  }
  const auto corpus = load_corpus(kFixtures + "/corpus.json");
  const auto* scenario = corpus.find("free-evening");
  auto profile = PreferenceProfile::from_raw({0.95, 0.05, 0.5, 0.5, 0.5, 0.5});
  ScoringConfig full, unweighted;
  unweighted.variant = Variant::no_preference;
  o.require(rank(*scenario, profile, full).order != rank(*scenario, profile, unweighted).order,
            "preference-sensitive fixture: full == no_preference");
  return o;
}

Outcome numeric_pins() {
  Outcome o;
  const std::vector<double> one{1.0};
  o.require(std::abs(preprocess_preferences(one)[0] - 0.9933071490) < 1e-9,
            "preprocess_preferences(1.0)");
  std::mt19937_64 rng(707);
  for (int k = 0; k < 10000; ++k) {
    const double c = context_scale(testgen::uniform(rng, -1.0, 1.0));
    o.require(c >= 0.5 && c <= 0.7310586, "scaling coefficient out of range");
  }
  return o;
}

Outcome metric_contracts() {
  Outcome o;
  auto column = [](std::vector<double> v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  };
  const ScorePredictionBatch edge(column({0.25, 0.5}), column({0.0, 0.0}));
  o.require(avg_acc(edge, 0.25) == 0.0, "|diff| == t must count as incorrect");
  o.require(avg_acc(edge, 0.5) == 0.5, "strict threshold");
  const ScorePredictionBatch same(column({0.1, -0.3}), column({0.1, -0.3}));
  o.require(mae(same) == 0.0, "mae of equal batches");
  const ScorePredictionBatch near(column({0.1, -0.3}), column({0.1, -0.3 + 1e-12}));
  o.require(mae(near) > 0.0, "mae of unequal batches");
  const auto a = ids({1, 2, 3});
  const std::vector<RankingPair> hit{{a, ids({1, 3, 2})}};
  const std::vector<RankingPair> miss{{a, ids({3, 1, 2})}};
  const std::vector<RankingPair> half{{a, ids({1, 2, 3})}, {a, ids({2, 1, 3})}};
  o.require(first_acc(hit) == 1.0, "first_acc hit");
  o.require(first_acc(miss) == 0.0, "first_acc miss");
  o.require(first_acc(half) == 0.5, "first_acc half");
  return o;
}

Outcome dataset_round_trip() {
  Outcome o;
  std::mt19937_64 rng(909);
  for (int k = 0; k < 100; ++k) {
    const auto c = testgen::random_corpus(rng);
    o.require(parse_corpus(write_corpus(c)) == c, "round trip changed a corpus");
  }
  const auto battery = testgen::fault_battery(910, 25);
  std::size_t caught = 0;
  for (const auto& f : battery) caught += testgen::violations_found(f) > 0 ? 1 : 0;
  o.require(caught == battery.size(),
            "caught " + std::to_string(caught) + "/" + std::to_string(battery.size()));
  if (o.pass) o.detail = "100 corpora, " + std::to_string(battery.size()) + " faults caught";
  return o;
}

Outcome pareto_dominance() {
  Outcome o;
  std::mt19937_64 rng(1010);
  for (int k = 0; k < 100; ++k) {
    auto inst = testgen::random_instance(rng, testgen::pick(rng, 2, 10),
                                         testgen::pick(rng, 1, 6));
    auto& actions = inst.scenario.actions;
    const std::size_t better = testgen::pick(rng, 0, actions.size() - 1);
    std::size_t worse = testgen::pick(rng, 0, actions.size() - 2);
    if (worse >= better) ++worse;
    auto& w = actions[worse].relevance;
    const auto& b = actions[better].relevance;
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] = testgen::pick(rng, 0, 2) == 0 ? b[j] : testgen::uniform(rng, -1.0, b[j]);
    }
    const std::size_t strict = testgen::pick(rng, 0, w.size() - 1);
    w[strict] = b[strict] - testgen::uniform(rng, 0.05, 0.5);
    if (w[strict] < -1.0) w[strict] = -1.0;
    if (w[strict] >= b[strict]) continue;
    auto profile = PreferenceProfile::from_raw(inst.preferences);
    for (auto backend : all_backends()) {
      RankOptions opt;
      opt.backend = backend;
      const auto r = rank(inst.scenario, profile, {}, opt);
      const auto pos = [&](std::size_t i) {
        return std::find(r.order.begin(), r.order.end(), i) - r.order.begin();
      };
      o.require(pos(better) < pos(worse),
                std::string(to_string(backend)) + " ranked a dominated action higher");
    }
  }
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_golden() {
  Outcome o;
  const std::string corpus = kFixtures + "/corpus.json";
  const std::string study = kFixtures + "/study.json";
  const std::string prefs = "0.95,0.05,0.5,0.5,0.5,0.5";

  std::ostringstream out, err;
  int code = cli::run({"valuepilot", "rank", "--corpus", corpus, "--scenario",
                       "free-evening", "--prefs", prefs, "--explain", "--format",
                       "structured"},
                      out, err);
  o.require(code == 0, "rank exited " + std::to_string(code) + ": " + err.str());
  o.require(out.str() == read_file(kFixtures + "/golden/rank.json"),
            "rank report differs from golden");

  const auto report = nlohmann::json::parse(read_file(kFixtures + "/golden/rank.json"));
  const auto c = load_corpus(corpus);
  auto profile = PreferenceProfile::from_raw({0.95, 0.05, 0.5, 0.5, 0.5, 0.5});
  const auto oracle = brute_force_rank(*c.find("free-evening"), profile);
  for (std::size_t pos = 0; pos < oracle.order.size(); ++pos) {
    const auto& row = report["ranking"][pos];
    o.require(row["index"].get<std::size_t>() == oracle.order[pos],
              "golden order differs from brute force");
    o.require(std::abs(row["score"].get<double>() - oracle.scores[oracle.order[pos]]) < 1e-12,
              "golden flow differs from brute force");
  }

  std::ostringstream uout, uerr;
  code = cli::run({"valuepilot", "rank", "--corpus", corpus, "--scenario", "lost-wallet",
                   "--prefs", "0.5,0.5,0.5,0.5,0.5,0.5", "--format", "structured"},
                  uout, uerr);
  o.require(code == 0, "uniform rank exited " + std::to_string(code) + ": " + uerr.str());
  o.require(uout.str() == read_file(kFixtures + "/golden/rank_uniform.json"),
            "uniform rank report differs from golden");
  const auto uniform = nlohmann::json::parse(read_file(kFixtures + "/golden/rank_uniform.json"));
  const auto uniform_oracle = brute_force_rank(
      *c.find("lost-wallet"), PreferenceProfile::from_raw(ValueVector(6, 0.5)));
  for (std::size_t pos = 0; pos < uniform_oracle.order.size(); ++pos) {
    o.require(uniform["ranking"][pos]["index"].get<std::size_t>() == uniform_oracle.order[pos],
              "uniform golden order differs from brute force");
  }

  std::ostringstream eout, eerr;
  code = cli::run({"valuepilot", "evaluate", "--corpus", corpus, "--study", study,
                   "--ablations", "--format", "structured"},
                  eout, eerr);
  o.require(code == 0, "evaluate exited " + std::to_string(code) + ": " + eerr.str());
  o.require(eout.str() == read_file(kFixtures + "/golden/evaluate.json"),
            "evaluate report differs from golden");

  const auto evaluation = nlohmann::json::parse(read_file(kFixtures + "/golden/evaluate.json"));
  const auto subjects = load_study(study, c);
  const std::map<std::pair<std::string, std::string>, double> worked{
      {{"s1", "lost-wallet"}, 0.7}, {{"s1", "rainy-weekend"}, 0.95}, {{"s2", "rainy-weekend"}, 0.8}};
  std::size_t matched = 0;
  for (const auto& item : evaluation["runs"][0]["items"]) {
    const std::string subject = item["subject"];
    const std::string scenario_id = item["scenario"];
    if (auto w = worked.find({subject, scenario_id}); w != worked.end()) {
      o.require(std::abs(item["os_sim"].get<double>() - w->second) < 1e-12,
                "evaluate golden misses a worked OS-Sim value");
      ++matched;
    }
    const auto& s = *c.find(scenario_id);
    const auto sub = std::find_if(subjects.begin(), subjects.end(),
                                  [&](const auto& r) { return r.subject_id == subject; });
    const auto ref = brute_force_rank(s, PreferenceProfile::from_raw(sub->preferences));
    for (std::size_t pos = 0; pos < ref.order.size(); ++pos) {
      o.require(item["predicted"][pos] == s.actions[ref.order[pos]].id,
                "evaluate golden order differs from brute force");
    }
  }
  o.require(matched == worked.size(), "evaluate golden lacks worked items");
  return o;
}

}  // namespace

int main() {
  const auto instances = oracle_instances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"os_sim worked examples", os_sim_golden},
      {"PROMETHEE matches brute-force oracle", [&] { return oracle_equivalence(instances); }},
      {"flow conservation and antisymmetry", [&] { return flow_conservation(instances); }},
      {"translation invariance", translation_invariance},
      {"flow divisor neutrality", [&] { return divisor_neutrality(instances); }},
      {"ablation contracts", ablation_contracts},
      {"preference and scaling pins", numeric_pins},
      {"metric contracts", metric_contracts},
      {"dataset round trip and fault battery", dataset_round_trip},
      {"Pareto dominance across backends", pareto_dominance},
      {"CLI golden reports", cli_golden},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] "
              << criteria[i].first;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << "\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
