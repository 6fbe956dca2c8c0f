#pragma once

#include <cstddef>

#include "valuepilot/ranking.hpp"
#include "valuepilot/values.hpp"

namespace valuepilot {

inline constexpr std::size_t kBruteForceMaxActions = 12;

/// Independent reference for rank() with the PROMETHEE backend. Recomputes
/// the whole pipeline, preference transform included, from
/// `profile.raw()` with plain nested loops and shares no code with the
/// production path. Handles every Variant. The result carries net flows in
/// `scores` and `flows`, but no trace.
///
/// Throws GuardError when the scenario has more than
/// kBruteForceMaxActions actions.
RankingResult brute_force_rank(const AnnotatedScenario& scenario,
                               const PreferenceProfile& profile,
                               const ScoringConfig& config = {});

}  // namespace valuepilot
