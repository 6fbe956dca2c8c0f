#include "valuepilot/values.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace valuepilot {

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string dimension_label(std::size_t j, const DimensionSet* dimensions) {
  if (dimensions != nullptr && j < dimensions->size()) {
    return "dimension \"" + (*dimensions)[j] + "\"";
  }
  return "dimension " + std::to_string(j);
}

bool in_closed(double v, double lo, double hi) {
  return std::isfinite(v) && v >= lo && v <= hi;
}

}  // namespace

DimensionSet::DimensionSet(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) {
    throw ValidationError("dimension set must contain at least one label");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw ValidationError("dimension label is empty");
    if (!seen.insert(name).second) {
      throw ValidationError("duplicate dimension label \"" + name + "\"");
    }
  }
}

DimensionSet DimensionSet::standard() {
  return DimensionSet({"curiosity", "energy", "security", "happiness",
                       "intimacy", "fairness"});
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

ValueVector preprocess_preferences(std::span<const double> raw,
                                   double steepness, ValidationMode mode,
                                   const DimensionSet* dimensions) {
  if (!(steepness > 0.0) || !std::isfinite(steepness)) {
    throw ConfigError("steepness must be a positive finite number, got " +
                      describe(steepness));
  }
  if (dimensions != nullptr && dimensions->size() != raw.size()) {
    throw StructuralError("expected " + std::to_string(dimensions->size()) +
                          " preference values, got " +
                          std::to_string(raw.size()));
  }
  std::vector<Violation> violations;
  ValueVector out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    double p = raw[j];
    if (!in_closed(p, 0.0, 1.0)) {
      if (mode == ValidationMode::strict || std::isnan(p)) {
        violations.push_back({dimension_label(j, dimensions),
                              "preference " + describe(p) +
                                  " outside [0, 1]"});
        continue;
      }
      p = std::clamp(p, 0.0, 1.0);
    }
    out[j] = sigmoid(steepness * (p - 0.5));
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return out;
}

double discrepancy(double relevance, double preference_t) {
  if (!in_closed(relevance, -1.0, 1.0)) {
    throw ValidationError("relevance " + describe(relevance) +
                          " outside [-1, 1]");
  }
  if (!in_closed(preference_t, 0.0, 1.0)) {
    throw ValidationError("transformed preference " + describe(preference_t) +
                          " outside [0, 1]");
  }
  return 1.0 - std::abs(std::abs(relevance) - preference_t);
}

double blend(double objective, double discrepancy, double weight) {
  if (!in_closed(weight, 0.0, 1.0)) {
    throw ValidationError("blend weight " + describe(weight) +
                          " outside [0, 1]");
  }
  return discrepancy * weight + objective * (1.0 - weight);
}

double context_scale(double scenario_blend) noexcept {
  return sigmoid(std::abs(scenario_blend));
}

double contextualize(double action_blend, double scenario_blend) noexcept {
  return context_scale(scenario_blend) * action_blend;
}

PreferenceProfile PreferenceProfile::from_raw(ValueVector raw,
                                              double steepness,
                                              ValidationMode mode,
                                              const DimensionSet* dimensions) {
  auto transformed = preprocess_preferences(raw, steepness, mode, dimensions);
  if (mode == ValidationMode::clamp) {
    for (auto& p : raw) p = std::clamp(p, 0.0, 1.0);
  }
  return PreferenceProfile(std::move(raw), std::move(transformed), steepness);
}

std::vector<Violation> check_scenario(const AnnotatedScenario& scenario,
                                      std::size_t dimension_count,
                                      const std::string& location,
                                      const DimensionSet* dimensions) {
  std::vector<Violation> out;
  const std::string sid = "scenario \"" + scenario.id + "\"";
  if (scenario.id.empty()) out.push_back({location, "scenario id is empty"});

  auto check_vector = [&](const ValueVector& v, const std::string& where,
                          const std::string& owner) {
    if (v.size() != dimension_count) {
      out.push_back({where, owner + ": expected " +
                                std::to_string(dimension_count) +
                                " scores, got " + std::to_string(v.size())});
      return;
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (!in_closed(v[j], -1.0, 1.0)) {
        out.push_back({where + ".relevance[" + std::to_string(j) + "]",
                       owner + " " + dimension_label(j, dimensions) +
                           ": score " + describe(v[j]) +
                           " outside [-1, 1]"});
      }
    }
  };

  check_vector(scenario.relevance, location, sid);
  if (scenario.agent_count && *scenario.agent_count < 1) {
    out.push_back({location, sid + ": agent_count must be positive, got " +
                                 std::to_string(*scenario.agent_count)});
  }
  if (scenario.actions.empty()) {
    out.push_back({location, sid + ": must have at least one action"});
  }
  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < scenario.actions.size(); ++i) {
    const auto& action = scenario.actions[i];
    const std::string where = location + ".actions[" + std::to_string(i) + "]";
    const std::string owner = sid + " action \"" + action.id + "\"";
    if (action.id.empty()) out.push_back({where, sid + ": action id is empty"});
    auto [it, inserted] = first_seen.emplace(action.id, i);
    if (!inserted) {
      out.push_back({where, sid + ": duplicate action id \"" + action.id +
                                "\" (first at actions[" +
                                std::to_string(it->second) + "])"});
    }
    check_vector(action.relevance, where, owner);
  }
  return out;
}

namespace {
constexpr std::array<Variant, 5> kVariants = {
    Variant::full, Variant::only_action, Variant::no_preference,
    Variant::no_subjective, Variant::no_scenario};
}

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::full: return "full";
    case Variant::only_action: return "only_action";
    case Variant::no_preference: return "no_preference";
    case Variant::no_subjective: return "no_subjective";
    case Variant::no_scenario: return "no_scenario";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (auto v : kVariants) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown variant \"" + std::string(name) +
                    "\" (expected full, only_action, no_preference, "
                    "no_subjective or no_scenario)");
}

std::span<const Variant> all_variants() noexcept { return kVariants; }

void ScoringConfig::validate() const {
  if (!in_closed(scenario_weight, 0.0, 1.0)) {
    throw ConfigError("scenario weight " + describe(scenario_weight) +
                      " outside [0, 1]");
  }
  if (!in_closed(action_weight, 0.0, 1.0)) {
    throw ConfigError("action weight " + describe(action_weight) +
                      " outside [0, 1]");
  }
  if (!(steepness > 0.0) || !std::isfinite(steepness)) {
    throw ConfigError("steepness must be a positive finite number");
  }
}

ScoreTrace score_scenario(const AnnotatedScenario& scenario,
                          const PreferenceProfile& profile,
                          const ScoringConfig& config) {
  config.validate();
  const std::size_t m = profile.size();
  if (scenario.relevance.size() != m) {
    throw StructuralError("scenario \"" + scenario.id + "\" has " +
                          std::to_string(scenario.relevance.size()) +
                          " dimensions but the profile has " +
                          std::to_string(m));
  }
  if (auto violations = check_scenario(scenario, m); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  if (profile.steepness() != config.steepness) {
    throw ConfigError("profile was preprocessed with steepness " +
                      describe(profile.steepness()) +
                      " but the scoring config uses " +
                      describe(config.steepness));
  }

  const auto& pref = profile.transformed();
  const bool subjective = config.variant != Variant::no_subjective;
  const bool scale_by_scenario = config.variant != Variant::no_scenario;
  const std::size_t n = scenario.actions.size();

  ScoreTrace t;
  t.variant = config.variant;
  t.preference = pref;
  t.scenario_relevance = scenario.relevance;
  t.scenario_discrepancy.resize(m);
  t.scenario_blend.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double rho = scenario.relevance[j];
    t.scenario_discrepancy[j] = discrepancy(rho, pref[j]);
    t.scenario_blend[j] =
        subjective
            ? blend(rho, t.scenario_discrepancy[j], config.scenario_weight)
            : rho;
  }

  t.action_relevance = Matrix(n, m);
  t.action_discrepancy = Matrix(n, m);
  t.action_blend = Matrix(n, m);
  t.contextualized = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double rho = scenario.actions[i].relevance[j];
      const double d = discrepancy(rho, pref[j]);
      const double r = subjective ? blend(rho, d, config.action_weight) : rho;
      t.action_relevance(i, j) = rho;
      t.action_discrepancy(i, j) = d;
      t.action_blend(i, j) = r;
      t.contextualized(i, j) =
          scale_by_scenario ? contextualize(r, t.scenario_blend[j]) : r;
    }
  }
  return t;
}

}  // namespace valuepilot
