#pragma once

// Sources of relevance scores for a scenario and its actions. The engine
// only needs numbers in [-1, 1]; where they come from is pluggable:
// stored annotations, a constant stub, or a remote model server speaking
// the assess/1 protocol (docs/formats.md).

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valuepilot/dataset.hpp"
#include "valuepilot/values.hpp"

namespace valuepilot {

inline constexpr std::string_view kAssessProtocol = "assess/1";
inline constexpr std::string_view kAssessPath = "/assess/1";

struct AssessorRequest {
  std::string scenario_text;
  std::vector<std::string> action_texts;
  DimensionSet dimensions = DimensionSet::standard();
  // Needed by the annotation source only.
  std::optional<std::string> scenario_id;
  std::vector<std::string> action_ids;

  void validate() const;
};

/// Builds a request carrying both the texts and the ids of `scenario`.
AssessorRequest make_request(const AnnotatedScenario& scenario,
                             const DimensionSet& dimensions);

struct AssessorResponse {
  ValueVector scenario_scores;
  std::vector<ValueVector> action_scores;
  int attempts = 1;  // requests issued; always 1 for local sources
  std::vector<std::string> warnings;
};

class Assessor {
 public:
  virtual ~Assessor() = default;
  virtual AssessorResponse assess(const AssessorRequest& request) const = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// Fills every score with the same value (default 0).
class ConstantAssessor final : public Assessor {
 public:
  explicit ConstantAssessor(double fill = 0.0);
  AssessorResponse assess(const AssessorRequest& request) const override;
  std::string_view name() const noexcept override { return "constant"; }

 private:
  double fill_;
};

/// Returns the stored scores of a loaded corpus, looked up by id.
class AnnotationAssessor final : public Assessor {
 public:
  explicit AnnotationAssessor(std::shared_ptr<const CorpusFile> corpus);
  AssessorResponse assess(const AssessorRequest& request) const override;
  std::string_view name() const noexcept override { return "annotations"; }

 private:
  std::shared_ptr<const CorpusFile> corpus_;
};

struct RemoteConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080
  std::chrono::milliseconds timeout{10000};
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{200};
  std::uint64_t jitter_seed = 0x5eed;
  ValidationMode mode = ValidationMode::strict;

  /// Applies VALUEPILOT_ASSESSOR_URL, VALUEPILOT_ASSESSOR_TIMEOUT_MS and
  /// VALUEPILOT_ASSESSOR_RETRIES when set.
  static RemoteConfig from_environment();
  static RemoteConfig from_environment(RemoteConfig defaults);
};

/// Request body for `request` (JSON, see docs/formats.md).
std::string encode_assess_request(const AssessorRequest& request);

/// Parses and validates a response body for a request with
/// `dimension_count` dimensions and `action_count` actions. Throws
/// ProtocolError on malformed bodies or shape mismatches. Out-of-range
/// scores throw ValidationError naming their index in strict mode and are
/// clamped with a warning in clamp mode.
AssessorResponse decode_assess_response(std::string_view body,
                                        std::size_t dimension_count,
                                        std::size_t action_count,
                                        ValidationMode mode);

/// HTTP client for a remote assessor. Transport failures, 408, 429 and 5xx
/// responses are retried up to max_retries times with jittered exponential
/// backoff; other statuses fail immediately.
class RemoteAssessor final : public Assessor {
 public:
  explicit RemoteAssessor(RemoteConfig config);
  AssessorResponse assess(const AssessorRequest& request) const override;
  std::string_view name() const noexcept override { return "remote"; }

  const RemoteConfig& config() const noexcept { return config_; }

 private:
  RemoteConfig config_;
};

/// Copy of `scenario` whose relevance vectors come from `response`.
AnnotatedScenario with_scores(const AnnotatedScenario& scenario,
                              const AssessorResponse& response);

}  // namespace valuepilot
