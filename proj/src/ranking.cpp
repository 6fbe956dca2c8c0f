#include "valuepilot/ranking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace valuepilot {

namespace {

constexpr std::array<Backend, 4> kBackends = {Backend::promethee, Backend::ahp,
                                              Backend::maut, Backend::topsis};

void check_weights(const Matrix& criteria, std::span<const double> weights) {
  if (weights.size() != criteria.cols()) {
    throw StructuralError("expected " + std::to_string(criteria.cols()) +
                          " weights, got " + std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("aggregation weights must be finite and "
                            "non-negative");
    }
  }
}

}  // namespace

PairwisePreferenceTensor pairwise_preferences(const Matrix& scores) {
  const std::size_t n = scores.rows();
  const std::size_t m = scores.cols();
  PairwisePreferenceTensor v(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        v(i, k, j) = sigmoid(scores(i, j) - scores(k, j));
      }
    }
  }
  return v;
}

PairwisePreferenceTensor pairwise_preferences(const ScoreTrace& trace) {
  return pairwise_preferences(trace.variant == Variant::only_action
                                  ? trace.action_relevance
                                  : trace.contextualized);
}

ValueVector aggregation_weights(const PreferenceProfile& profile,
                                Variant variant) {
  switch (variant) {
    case Variant::no_preference:
    case Variant::only_action:
      return ValueVector(profile.size(), 1.0);
    case Variant::full:
    case Variant::no_subjective:
    case Variant::no_scenario:
      return profile.transformed();
  }
  throw ConfigError("unknown variant");
}

Matrix aggregate_preferences(const PairwisePreferenceTensor& preferences,
                             std::span<const double> weights) {
  const std::size_t n = preferences.action_count();
  const std::size_t m = preferences.dimension_count();
  if (weights.size() != m) {
    throw StructuralError("expected " + std::to_string(m) + " weights, got " +
                          std::to_string(weights.size()));
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) sum += weights[j] * preferences(i, k, j);
      out(i, k) = sum;
    }
  }
  return out;
}

Matrix aggregate_preferences(const PairwisePreferenceTensor& preferences,
                             const PreferenceProfile& profile,
                             Variant variant) {
  return aggregate_preferences(preferences,
                               aggregation_weights(profile, variant));
}

FlowSummary promethee_flows(const Matrix& aggregated, FlowDivisor divisor) {
  const std::size_t n = aggregated.rows();
  if (aggregated.cols() != n) {
    throw StructuralError("aggregated preference matrix must be square");
  }
  FlowSummary flows;
  flows.positive.assign(n, 0.0);
  flows.negative.assign(n, 0.0);
  flows.net.assign(n, 0.0);
  if (n < 2) return flows;

  const double scale =
      1.0 / static_cast<double>(divisor == FlowDivisor::action_count ? n : n - 1);
  // Row and column sums minus the diagonal.
  for (std::size_t i = 0; i < n; ++i) {
    double out_sum = 0.0;
    double in_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      out_sum += aggregated(i, k);
      in_sum += aggregated(k, i);
    }
    flows.positive[i] = (out_sum - aggregated(i, i)) * scale;
    flows.negative[i] = (in_sum - aggregated(i, i)) * scale;
    flows.net[i] = flows.positive[i] - flows.negative[i];
  }
  return flows;
}

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::promethee: return "promethee";
    case Backend::maut: return "maut";
    case Backend::topsis: return "topsis";
    case Backend::ahp: return "ahp";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  for (auto b : kBackends) {
    if (to_string(b) == name) return b;
  }
  throw ConfigError("unknown backend \"" + std::string(name) +
                    "\" (expected promethee, ahp, maut or topsis)");
}

std::span<const Backend> all_backends() noexcept { return kBackends; }

std::string_view method_note(Backend backend) noexcept {
  switch (backend) {
    case Backend::promethee:
      return "reference method: sigmoid pairwise preferences, preference-"
             "weighted, net outranking flow";
    case Backend::maut:
      return "convention: additive utility sum_j w_j * score_ij";
    case Backend::topsis:
      return "convention: vector-normalized TOPSIS, all criteria benefits, "
             "weights normalized to sum 1";
    case Backend::ahp:
      return "convention: AHP with a_ik = exp(score_ij - score_kj), principal "
             "eigenvector priorities, weights normalized to sum 1";
  }
  return "";
}

std::string_view to_string(CriteriaSource source) noexcept {
  return source == CriteriaSource::raw ? "raw" : "contextualized";
}

CriteriaSource parse_criteria_source(std::string_view name) {
  if (name == "contextualized") return CriteriaSource::contextualized;
  if (name == "raw") return CriteriaSource::raw;
  throw ConfigError("unknown criteria source \"" + std::string(name) +
                    "\" (expected contextualized or raw)");
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

std::vector<double> maut_utilities(const Matrix& criteria,
                                   std::span<const double> weights) {
  check_weights(criteria, weights);
  std::vector<double> out(criteria.rows(), 0.0);
  for (std::size_t i = 0; i < criteria.rows(); ++i) {
    for (std::size_t j = 0; j < criteria.cols(); ++j) {
      out[i] += weights[j] * criteria(i, j);
    }
  }
  return out;
}

namespace {

std::vector<double> normalized_weights(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    throw ValidationError("aggregation weights must not all be zero");
  }
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= total;
  return out;
}

}  // namespace

std::vector<double> topsis_closeness(const Matrix& criteria,
                                     std::span<const double> weights) {
  check_weights(criteria, weights);
  const std::size_t n = criteria.rows();
  const std::size_t m = criteria.cols();
  if (n == 0) return {};
  const auto w = normalized_weights(weights);

  Matrix weighted(n, m);
  std::vector<double> ideal(m), anti_ideal(m);
  for (std::size_t j = 0; j < m; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += criteria(i, j) * criteria(i, j);
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < n; ++i) {
      weighted(i, j) = norm > 0.0 ? w[j] * criteria(i, j) / norm : 0.0;
    }
    ideal[j] = weighted(0, j);
    anti_ideal[j] = weighted(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      ideal[j] = std::max(ideal[j], weighted(i, j));
      anti_ideal[j] = std::min(anti_ideal[j], weighted(i, j));
    }
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double to_ideal = 0.0;
    double to_anti = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      to_ideal += std::pow(weighted(i, j) - ideal[j], 2);
      to_anti += std::pow(weighted(i, j) - anti_ideal[j], 2);
    }
    to_ideal = std::sqrt(to_ideal);
    to_anti = std::sqrt(to_anti);
    // Every action sits on the ideal point when both distances vanish.
    out[i] = (to_ideal + to_anti) > 0.0 ? to_anti / (to_ideal + to_anti) : 1.0;
  }
  return out;
}

double ahp_random_index(std::size_t n) noexcept {
  static constexpr std::array<double, 16> kIndex = {
      0.0,  0.0,  0.0,  0.58, 0.90, 1.12, 1.24, 1.32,
      1.41, 1.45, 1.49, 1.51, 1.48, 1.56, 1.57, 1.59};
  return n < kIndex.size() ? kIndex[n] : kIndex.back();
}

AhpPriorities ahp_priorities(const Matrix& criteria,
                             std::span<const double> weights) {
  check_weights(criteria, weights);
  const std::size_t n = criteria.rows();
  const std::size_t m = criteria.cols();
  const auto w = normalized_weights(weights);

  AhpPriorities out;
  out.global.assign(n, 0.0);
  out.local = Matrix(n, m);
  out.consistency.assign(m, 0.0);

  Matrix comparison(n, n);
  std::vector<double> x(n), y(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        comparison(i, k) = std::exp(criteria(i, j) - criteria(k, j));
      }
    }

    std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(n));
    for (int iter = 0; iter < 1000; ++iter) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = 0.0;
        for (std::size_t k = 0; k < n; ++k) y[i] += comparison(i, k) * x[k];
        total += y[i];
      }
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] /= total;
        change = std::max(change, std::abs(y[i] - x[i]));
      }
      std::swap(x, y);
      if (change < 1e-15) break;
    }

    double lambda_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double ax = 0.0;
      for (std::size_t k = 0; k < n; ++k) ax += comparison(i, k) * x[k];
      lambda_max += ax / x[i];
    }
    lambda_max /= static_cast<double>(n);
    if (n >= 3) {
      const double ci =
          (lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1);
      out.consistency[j] = std::max(0.0, ci / ahp_random_index(n));
    }

    for (std::size_t i = 0; i < n; ++i) {
      out.local(i, j) = x[i];
      out.global[i] += w[j] * x[i];
    }
  }
  return out;
}

RankingResult rank_criteria(const Matrix& criteria,
                            std::span<const double> weights, Backend backend,
                            FlowDivisor divisor) {
  check_weights(criteria, weights);
  if (criteria.rows() == 0 || criteria.cols() == 0) {
    throw ValidationError("cannot rank without actions and dimensions");
  }
  RankingResult result;
  result.backend = backend;
  switch (backend) {
    case Backend::promethee: {
      auto flows = promethee_flows(
          aggregate_preferences(pairwise_preferences(criteria), weights),
          divisor);
      result.scores = flows.net;
      result.flows = std::move(flows);
      break;
    }
    case Backend::maut:
      result.scores = maut_utilities(criteria, weights);
      break;
    case Backend::topsis:
      result.scores = topsis_closeness(criteria, weights);
      break;
    case Backend::ahp: {
      auto priorities = ahp_priorities(criteria, weights);
      const double worst = *std::max_element(priorities.consistency.begin(),
                                             priorities.consistency.end());
      result.consistency_ratio = worst;
      if (worst > kAhpConsistencyThreshold) {
        result.warnings.push_back(
            "AHP consistency ratio " + std::to_string(worst) +
            " exceeds " + std::to_string(kAhpConsistencyThreshold));
      }
      result.scores = std::move(priorities.global);
      break;
    }
  }
  result.order = order_by_score(result.scores);
  return result;
}

RankingResult rank(const AnnotatedScenario& scenario,
                   const PreferenceProfile& profile,
                   const ScoringConfig& config, const RankOptions& options) {
  auto trace = score_scenario(scenario, profile, config);
  const bool use_raw = config.variant == Variant::only_action ||
                       options.criteria == CriteriaSource::raw;
  auto result = rank_criteria(
      use_raw ? trace.action_relevance : trace.contextualized,
      aggregation_weights(profile, config.variant), options.backend,
      options.divisor);
  if (options.keep_trace) result.trace = std::move(trace);
  return result;
}

}  // namespace valuepilot
