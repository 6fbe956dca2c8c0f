#include "valuepilot/metrics.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "valuepilot/errors.hpp"

namespace valuepilot {

ScorePredictionBatch::ScorePredictionBatch(Matrix predictions, Matrix labels)
    : predictions_(std::move(predictions)), labels_(std::move(labels)) {
  if (predictions_.rows() != labels_.rows() ||
      predictions_.cols() != labels_.cols()) {
    throw StructuralError("prediction and label shapes differ");
  }
  for (std::size_t i = 0; i < predictions_.rows(); ++i) {
    for (std::size_t j = 0; j < predictions_.cols(); ++j) {
      if (!std::isfinite(predictions_(i, j)) || !std::isfinite(labels_(i, j))) {
        throw ValidationError("non-finite score at sample " +
                              std::to_string(i) + ", dimension " +
                              std::to_string(j));
      }
    }
  }
}

namespace {

void require_non_empty(const ScorePredictionBatch& batch, const char* metric) {
  if (batch.predictions().empty()) {
    throw UndefinedMetricError(std::string(metric) +
                               " is undefined for an empty batch");
  }
}

}  // namespace

double avg_acc(const ScorePredictionBatch& batch, double threshold) {
  require_non_empty(batch, "AvgAcc");
  if (!(threshold > 0.0)) {
    throw ValidationError("AvgAcc threshold must be positive");
  }
  const auto pred = batch.predictions().data();
  const auto label = batch.labels().data();
  std::size_t hits = 0;
  for (std::size_t e = 0; e < pred.size(); ++e) {
    if (std::abs(pred[e] - label[e]) < threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double mae(const ScorePredictionBatch& batch) {
  require_non_empty(batch, "MAE");
  const auto pred = batch.predictions().data();
  const auto label = batch.labels().data();
  double total = 0.0;
  for (std::size_t e = 0; e < pred.size(); ++e) {
    total += std::abs(pred[e] - label[e]);
  }
  return total / static_cast<double>(pred.size());
}

RankingPair::RankingPair(std::vector<std::string> predicted,
                         std::vector<std::string> reference)
    : predicted_(std::move(predicted)), reference_(std::move(reference)) {
  if (predicted_.empty()) throw ValidationError("ranking pair is empty");
  if (predicted_.size() != reference_.size()) {
    throw ValidationError("rankings have different lengths (" +
                          std::to_string(predicted_.size()) + " vs " +
                          std::to_string(reference_.size()) + ")");
  }
  std::unordered_set<std::string> ids;
  for (const auto& id : predicted_) {
    if (!ids.insert(id).second) {
      throw ValidationError("predicted ranking repeats id \"" + id + "\"");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : reference_) {
    if (!seen.insert(id).second) {
      throw ValidationError("reference ranking repeats id \"" + id + "\"");
    }
    if (!ids.contains(id)) {
      throw ValidationError("reference ranking has id \"" + id +
                            "\" missing from the predicted ranking");
    }
  }
}

std::vector<double> prefix_similarities(const RankingPair& pair) {
  const auto& s = pair.predicted();
  const auto& t = pair.reference();
  std::unordered_set<std::string_view> in_s;
  std::unordered_set<std::string_view> in_t;
  std::vector<double> out(s.size());
  std::size_t shared = 0;
  for (std::size_t d = 0; d < s.size(); ++d) {
    in_s.insert(s[d]);
    if (in_t.contains(s[d])) ++shared;
    in_t.insert(t[d]);
    if (in_s.contains(t[d])) ++shared;
    out[d] = static_cast<double>(shared) / static_cast<double>(d + 1);
  }
  return out;
}

double os_sim(const RankingPair& pair) {
  const auto sims = prefix_similarities(pair);
  return std::accumulate(sims.begin(), sims.end(), 0.0) /
         static_cast<double>(sims.size());
}

double mean_os_sim(std::span<const RankingPair> pairs) {
  if (pairs.empty()) {
    throw UndefinedMetricError("mean OS-Sim is undefined for no pairs");
  }
  double total = 0.0;
  for (const auto& p : pairs) total += os_sim(p);
  return total / static_cast<double>(pairs.size());
}

double first_acc(std::span<const RankingPair> pairs) {
  if (pairs.empty()) {
    throw UndefinedMetricError("First-Acc is undefined for no pairs");
  }
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    if (p.predicted().front() == p.reference().front()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

namespace {

// Position of every reference id inside the predicted order.
std::vector<std::size_t> reference_positions(const RankingPair& pair) {
  std::unordered_map<std::string_view, std::size_t> pos;
  for (std::size_t i = 0; i < pair.size(); ++i) pos[pair.predicted()[i]] = i;
  std::vector<std::size_t> out(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    out[i] = pos.at(pair.reference()[i]);
  }
  return out;
}

}  // namespace

double spearman_rho(const RankingPair& pair) {
  const std::size_t n = pair.size();
  if (n < 2) return 1.0;
  const auto pos = reference_positions(pair);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(pos[i]);
    d2 += d * d;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

double kendall_tau(const RankingPair& pair) {
  const std::size_t n = pair.size();
  if (n < 2) return 1.0;
  const auto pos = reference_positions(pair);
  long concordant = 0;
  long discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      (pos[i] < pos[k] ? concordant : discordant) += 1;
    }
  }
  return static_cast<double>(concordant - discordant) /
         static_cast<double>(concordant + discordant);
}

Spread summarize(std::span<const double> values) {
  if (values.empty()) {
    throw UndefinedMetricError("summary of an empty list is undefined");
  }
  Spread out;
  out.count = values.size();
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sample_std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace valuepilot
