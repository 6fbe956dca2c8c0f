#pragma once

// Domain types and the contextualized scoring pipeline: preference
// preprocessing, discrepancy, objective/subjective blending and scenario
// scaling.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuepilot/errors.hpp"
#include "valuepilot/matrix.hpp"

namespace valuepilot {

using ValueVector = std::vector<double>;

inline constexpr double kDefaultSteepness = 10.0;
inline constexpr double kDefaultBlendWeight = 0.3;

/// What to do with a score outside its domain.
enum class ValidationMode {
  strict,  // reject
  clamp,   // clamp into range and record a warning
};

/// Ordered, unique, non-empty dimension labels.
class DimensionSet {
 public:
  explicit DimensionSet(std::vector<std::string> names);

  /// curiosity, energy, security, happiness, intimacy, fairness
  static DimensionSet standard();

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& operator[](std::size_t j) const { return names_[j]; }

  bool operator==(const DimensionSet&) const = default;

 private:
  std::vector<std::string> names_;
};

double sigmoid(double x) noexcept;

/// Logistic transform of raw preferences in [0,1]:
/// p'_j = 1 / (1 + exp(-steepness * (p_j - 0.5))).
/// Out-of-range entries throw ValidationError in strict mode and are clamped
/// in clamp mode. `dimensions`, when given, is used to name offenders.
ValueVector preprocess_preferences(std::span<const double> raw,
                                   double steepness = kDefaultSteepness,
                                   ValidationMode mode = ValidationMode::strict,
                                   const DimensionSet* dimensions = nullptr);

/// 1 - ||relevance| - preference_t|, always in [0,1].
double discrepancy(double relevance, double preference_t);

/// discrepancy * weight + objective * (1 - weight).
double blend(double objective, double discrepancy, double weight);

/// Scaling coefficient sigmoid(|scenario_blend|), in [0.5, sigmoid(1)] for
/// blends in [-1,1].
double context_scale(double scenario_blend) noexcept;

double contextualize(double action_blend, double scenario_blend) noexcept;

class PreferenceProfile {
 public:
  static PreferenceProfile from_raw(
      ValueVector raw, double steepness = kDefaultSteepness,
      ValidationMode mode = ValidationMode::strict,
      const DimensionSet* dimensions = nullptr);

  const ValueVector& raw() const noexcept { return raw_; }
  const ValueVector& transformed() const noexcept { return transformed_; }
  double steepness() const noexcept { return steepness_; }
  std::size_t size() const noexcept { return raw_.size(); }

 private:
  PreferenceProfile(ValueVector raw, ValueVector transformed, double steepness)
      : raw_(std::move(raw)),
        transformed_(std::move(transformed)),
        steepness_(steepness) {}

  ValueVector raw_;
  ValueVector transformed_;
  double steepness_;
};

struct AnnotatedAction {
  std::string id;
  std::string text;
  ValueVector relevance;

  bool operator==(const AnnotatedAction&) const = default;
};

struct AnnotatedScenario {
  std::string id;
  std::string text;
  ValueVector relevance;
  std::vector<AnnotatedAction> actions;
  std::optional<int> agent_count;
  // Free-form note about where the record came from; not interpreted.
  std::optional<std::string> provenance;

  std::size_t action_count() const noexcept { return actions.size(); }

  bool operator==(const AnnotatedScenario&) const = default;
};

/// Every rule a scenario must satisfy against `dimension_count`: at least
/// one action, unique action ids, vector lengths, scores in [-1,1].
std::vector<Violation> check_scenario(const AnnotatedScenario& scenario,
                                      std::size_t dimension_count,
                                      const std::string& location = "scenario",
                                      const DimensionSet* dimensions = nullptr);

enum class Variant {
  full,
  only_action,
  no_preference,
  no_subjective,
  no_scenario,
};

std::string_view to_string(Variant variant) noexcept;
Variant parse_variant(std::string_view name);
std::span<const Variant> all_variants() noexcept;

struct ScoringConfig {
  double scenario_weight = kDefaultBlendWeight;
  double action_weight = kDefaultBlendWeight;
  double steepness = kDefaultSteepness;
  Variant variant = Variant::full;

  void validate() const;
};

/// Every intermediate of the scoring pipeline for one scenario. Rows of the
/// matrices are actions, columns are dimensions.
struct ScoreTrace {
  Variant variant = Variant::full;
  ValueVector preference;  // p', the transformed profile

  ValueVector scenario_relevance;
  ValueVector scenario_discrepancy;
  ValueVector scenario_blend;

  Matrix action_relevance;
  Matrix action_discrepancy;
  Matrix action_blend;
  Matrix contextualized;

  std::size_t action_count() const noexcept { return action_relevance.rows(); }
  std::size_t dimension_count() const noexcept { return preference.size(); }

  bool operator==(const ScoreTrace&) const = default;
};

/// Runs discrepancy, blending and scenario scaling for every action and
/// dimension. Variant effects at this stage:
///   no_subjective  blended score is the objective score
///   no_scenario    contextualized score is the action blend, unscaled
/// The other variants only change aggregation and share the full trace.
ScoreTrace score_scenario(const AnnotatedScenario& scenario,
                          const PreferenceProfile& profile,
                          const ScoringConfig& config = {});

}  // namespace valuepilot
