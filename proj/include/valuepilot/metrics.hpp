#pragma once

// Score-prediction metrics (threshold accuracy, MAE) and ranking agreement
// metrics (order-sensitive prefix similarity, first-choice accuracy).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valuepilot/matrix.hpp"

namespace valuepilot {

/// Predicted vs labelled scores, one row per sample, one column per
/// dimension.
class ScorePredictionBatch {
 public:
  ScorePredictionBatch(Matrix predictions, Matrix labels);

  const Matrix& predictions() const noexcept { return predictions_; }
  const Matrix& labels() const noexcept { return labels_; }
  std::size_t sample_count() const noexcept { return predictions_.rows(); }
  std::size_t dimension_count() const noexcept { return predictions_.cols(); }

 private:
  Matrix predictions_;
  Matrix labels_;
};

/// Fraction of entries with |prediction - label| < threshold. The boundary
/// counts as wrong.
double avg_acc(const ScorePredictionBatch& batch, double threshold);

double mae(const ScorePredictionBatch& batch);

/// Two orderings of the same set of action ids.
class RankingPair {
 public:
  RankingPair(std::vector<std::string> predicted,
              std::vector<std::string> reference);

  const std::vector<std::string>& predicted() const noexcept {
    return predicted_;
  }
  const std::vector<std::string>& reference() const noexcept {
    return reference_;
  }
  std::size_t size() const noexcept { return predicted_.size(); }

 private:
  std::vector<std::string> predicted_;
  std::vector<std::string> reference_;
};

/// |prefix_d(S) ∩ prefix_d(T)| / d for d = 1..n.
std::vector<double> prefix_similarities(const RankingPair& pair);

/// Mean of prefix_similarities. 1 for identical orders; early
/// disagreements cost more than late ones.
double os_sim(const RankingPair& pair);

double mean_os_sim(std::span<const RankingPair> pairs);

/// Fraction of pairs whose first elements agree.
double first_acc(std::span<const RankingPair> pairs);

// Rank correlations, reported next to os_sim for comparison only.
double spearman_rho(const RankingPair& pair);
double kendall_tau(const RankingPair& pair);

struct Spread {
  std::size_t count = 0;
  double mean = 0.0;
  std::optional<double> sample_std;  // undefined below two values
};

Spread summarize(std::span<const double> values);

}  // namespace valuepilot
