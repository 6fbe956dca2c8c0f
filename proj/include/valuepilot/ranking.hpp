#pragma once

// PROMETHEE ranking over contextualized scores, plus MAUT, TOPSIS and AHP
// backends that consume the same criteria matrix and weights.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuepilot/matrix.hpp"
#include "valuepilot/values.hpp"

namespace valuepilot {

/// n x n x m pairwise preference degrees V[i][k][j] = sigmoid(s_ij - s_kj).
class PairwisePreferenceTensor {
 public:
  PairwisePreferenceTensor(std::size_t actions, std::size_t dimensions)
      : n_(actions), m_(dimensions), data_(actions * actions * dimensions) {}

  std::size_t action_count() const noexcept { return n_; }
  std::size_t dimension_count() const noexcept { return m_; }

  double operator()(std::size_t i, std::size_t k, std::size_t j) const {
    return data_[(i * n_ + k) * m_ + j];
  }
  double& operator()(std::size_t i, std::size_t k, std::size_t j) {
    return data_[(i * n_ + k) * m_ + j];
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> data_;
};

PairwisePreferenceTensor pairwise_preferences(const Matrix& scores);

/// Uses the contextualized scores, except for Variant::only_action which
/// compares raw action relevances.
PairwisePreferenceTensor pairwise_preferences(const ScoreTrace& trace);

/// Per-dimension weights each variant aggregates with: p' for full,
/// no_subjective and no_scenario; all ones for no_preference and only_action.
ValueVector aggregation_weights(const PreferenceProfile& profile,
                                Variant variant);

/// Weighted sum over dimensions of V, giving the n x n matrix whose (i, k)
/// entry is the overall preference of action i over action k.
Matrix aggregate_preferences(const PairwisePreferenceTensor& preferences,
                             std::span<const double> weights);
Matrix aggregate_preferences(const PairwisePreferenceTensor& preferences,
                             const PreferenceProfile& profile, Variant variant);

/// Divisor applied to the positive and negative flow sums. The flows average
/// over n - 1 opponents but the reference formula divides by n; both give
/// the same order.
enum class FlowDivisor {
  action_count,
  opponent_count,
};

struct FlowSummary {
  std::vector<double> positive;
  std::vector<double> negative;
  std::vector<double> net;
};

FlowSummary promethee_flows(const Matrix& aggregated,
                            FlowDivisor divisor = FlowDivisor::action_count);

enum class Backend {
  promethee,
  maut,
  topsis,
  ahp,
};

std::string_view to_string(Backend backend) noexcept;
Backend parse_backend(std::string_view name);
std::span<const Backend> all_backends() noexcept;

/// One-line description of how the backend aggregates, printed in reports.
/// Only PROMETHEE is the reference method; the others are conventions.
std::string_view method_note(Backend backend) noexcept;

/// Which action matrix feeds the aggregation. Variant::only_action always
/// uses raw relevances.
enum class CriteriaSource {
  contextualized,
  raw,
};

std::string_view to_string(CriteriaSource source) noexcept;
CriteriaSource parse_criteria_source(std::string_view name);

struct RankOptions {
  Backend backend = Backend::promethee;
  CriteriaSource criteria = CriteriaSource::contextualized;
  FlowDivisor divisor = FlowDivisor::action_count;
  bool keep_trace = true;
};

struct RankingResult {
  std::vector<std::size_t> order;  // best first
  std::vector<double> scores;      // per original action index
  std::optional<FlowSummary> flows;
  Backend backend = Backend::promethee;
  std::optional<ScoreTrace> trace;
  std::vector<std::string> warnings;
  std::optional<double> consistency_ratio;  // AHP only
};

/// Indices sorted by descending score; equal scores keep ascending index.
std::vector<std::size_t> order_by_score(std::span<const double> scores);

/// Ranks rows of `criteria` with the given backend and weights.
RankingResult rank_criteria(const Matrix& criteria,
                            std::span<const double> weights,
                            Backend backend = Backend::promethee,
                            FlowDivisor divisor = FlowDivisor::action_count);

RankingResult rank(const AnnotatedScenario& scenario,
                   const PreferenceProfile& profile,
                   const ScoringConfig& config = {},
                   const RankOptions& options = {});

// Backends. All take an n x m criteria matrix and m non-negative weights.

/// Weighted additive utility sum_j w_j * c_ij.
std::vector<double> maut_utilities(const Matrix& criteria,
                                   std::span<const double> weights);

/// Closeness coefficient to the ideal solution after vector normalization
/// of each column and weighting by w_j / sum(w). All criteria are benefits.
std::vector<double> topsis_closeness(const Matrix& criteria,
                                     std::span<const double> weights);

struct AhpPriorities {
  std::vector<double> global;
  Matrix local;                     // n x m, columns sum to 1
  std::vector<double> consistency;  // consistency ratio per dimension
};

/// Per dimension, the pairwise comparison matrix a_ik = exp(c_ij - c_kj)
/// is reduced to its principal eigenvector by power iteration. Local
/// priorities are then combined with normalized weights.
AhpPriorities ahp_priorities(const Matrix& criteria,
                             std::span<const double> weights);

/// Saaty random consistency index for an n x n comparison matrix.
double ahp_random_index(std::size_t n) noexcept;

inline constexpr double kAhpConsistencyThreshold = 0.1;

}  // namespace valuepilot
