#include "valuepilot/brute_force.hpp"

#include <cmath>
#include <vector>

// Self-contained: nothing here calls into values.cpp or ranking.cpp.

namespace valuepilot {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

RankingResult brute_force_rank(const AnnotatedScenario& scenario,
                               const PreferenceProfile& profile,
                               const ScoringConfig& config) {
  const std::size_t n = scenario.actions.size();
  const std::size_t m = profile.raw().size();
  if (n > kBruteForceMaxActions) {
    throw GuardError("brute_force_rank is limited to " +
                     std::to_string(kBruteForceMaxActions) + " actions, got " +
                     std::to_string(n));
  }
  if (n == 0) throw ValidationError("scenario has no actions");
  if (scenario.relevance.size() != m) {
    throw StructuralError("dimension count mismatch");
  }
  for (const auto& a : scenario.actions) {
    if (a.relevance.size() != m) {
      throw StructuralError("dimension count mismatch");
    }
  }

  const Variant variant = config.variant;
  const double ws = config.scenario_weight;
  const double wa = config.action_weight;

  // Preprocessed preferences.
  std::vector<double> p(m);
  for (std::size_t j = 0; j < m; ++j) {
    p[j] = 1.0 / (1.0 + std::exp(-(profile.raw()[j] - 0.5) * config.steepness));
  }

  // Part 1: subjective bias and combined ratings.
  std::vector<double> rs(m);
  std::vector<std::vector<double>> ra(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double rho_s = scenario.relevance[j];
      const double rho_a = scenario.actions[i].relevance[j];
      const double ds = 1.0 - std::fabs(std::fabs(rho_s) - p[j]);
      const double da = 1.0 - std::fabs(std::fabs(rho_a) - p[j]);
      if (variant == Variant::no_subjective) {
        rs[j] = rho_s;
        ra[i][j] = rho_a;
      } else {
        rs[j] = (ds * ws) + (rho_s * (1.0 - ws));
        ra[i][j] = (da * wa) + (rho_a * (1.0 - wa));
      }
    }
  }

  // Part 2: individual ratings.
  std::vector<std::vector<double>> r(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (variant == Variant::no_scenario) {
        r[i][j] = ra[i][j];
      } else {
        r[i][j] = 1.0 / (1.0 + std::exp(-std::fabs(rs[j]))) * ra[i][j];
      }
    }
  }

  // Pairwise preferences. Only-action compares raw action relevances.
  std::vector<std::vector<std::vector<double>>> v(
      n, std::vector<std::vector<double>>(n, std::vector<double>(m)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        if (variant == Variant::only_action) {
          v[i][k][j] = logistic(scenario.actions[i].relevance[j] -
                                scenario.actions[k].relevance[j]);
        } else {
          v[i][k][j] = 1.0 / (1.0 + std::exp(-(r[i][j] - r[k][j])));
        }
      }
    }
  }

  // Weighted preferences.
  std::vector<std::vector<double>> vt(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const bool unweighted = variant == Variant::only_action ||
                                variant == Variant::no_preference;
        vt[i][k] += (unweighted ? 1.0 : p[j]) * v[i][k][j];
      }
    }
  }

  FlowSummary flows;
  flows.positive.assign(n, 0.0);
  flows.negative.assign(n, 0.0);
  flows.net.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      plus += vt[i][k];
      minus += vt[k][i];
    }
    flows.positive[i] = plus / static_cast<double>(n);
    flows.negative[i] = minus / static_cast<double>(n);
    flows.net[i] = flows.positive[i] - flows.negative[i];
  }

  // Rank: selection sort on net flow, earliest index wins ties.
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> order;
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (best == n || flows.net[i] > flows.net[best]) best = i;
    }
    taken[best] = true;
    order.push_back(best);
  }

  RankingResult result;
  result.order = std::move(order);
  result.scores = flows.net;
  result.flows = std::move(flows);
  result.backend = Backend::promethee;
  return result;
}

}  // namespace valuepilot
