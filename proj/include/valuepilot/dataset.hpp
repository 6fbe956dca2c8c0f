#pragma once

// On-disk corpus and study formats, validation, statistics and splitting.
// File formats are documented in docs/formats.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valuepilot/errors.hpp"
#include "valuepilot/values.hpp"

namespace valuepilot {

inline constexpr std::string_view kCorpusFormat = "valuepilot-corpus/1";
inline constexpr std::string_view kStudyFormat = "valuepilot-study/1";

/// Scores are written with this many fractional digits.
inline constexpr int kScoreDecimals = 6;

struct CorpusFile {
  std::string version{kCorpusFormat};
  DimensionSet dimensions = DimensionSet::standard();
  std::vector<AnnotatedScenario> scenarios;

  const AnnotatedScenario* find(std::string_view scenario_id) const;

  bool operator==(const CorpusFile&) const = default;
};

/// Parses and validates a corpus document. Throws ParseError (with line and
/// column) for malformed text and ValidationError listing every violation
/// otherwise. Nothing is returned unless the whole document is valid.
CorpusFile parse_corpus(std::string_view text);
CorpusFile load_corpus(const std::filesystem::path& path);

/// All violations in a corpus document; a parse failure is reported as a
/// single violation located at "line L, column C".
std::vector<Violation> validate_corpus(std::string_view text);

/// Serializes with scores rounded to kScoreDecimals fractional digits.
std::string write_corpus(const CorpusFile& corpus);
void save_corpus(const CorpusFile& corpus, const std::filesystem::path& path);

double round_score(double value) noexcept;

inline constexpr std::size_t kHistogramBins = 20;  // width 0.1 over [-1, 1]

struct DimensionCounts {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  std::vector<std::size_t> zero;
};

struct CorpusStats {
  std::size_t scenario_count = 0;
  std::size_t action_count = 0;
  DimensionCounts action_scores;    // per dimension, over every action
  DimensionCounts scenario_scores;  // per dimension, over scenario vectors
  // Action scores in bins [-1.0,-0.9), ..., [0.9,1.0]; the last bin is
  // closed.
  std::vector<std::size_t> score_histogram;
  std::map<int, std::size_t> agent_counts;
  std::size_t unspecified_agent_count = 0;
  std::map<std::size_t, std::size_t> actions_per_scenario;

  bool operator==(const CorpusStats&) const = default;
};

/// Bin index for a score in [-1, 1].
std::size_t histogram_bin(double score) noexcept;

CorpusStats corpus_stats(const CorpusFile& corpus);

struct CorpusSplit {
  CorpusFile train;
  CorpusFile test;
  std::vector<std::string> warnings;
};

/// Seeded shuffle of scenarios, then the first floor(ratio * N) go to
/// train. Never splits a scenario's actions.
CorpusSplit split_corpus(const CorpusFile& corpus, double ratio,
                         std::uint64_t seed);

struct StudyRecord {
  std::string subject_id;
  ValueVector preferences;  // raw, in [0,1]
  // Reference action order keyed by scenario id.
  std::map<std::string, std::vector<std::string>> rankings;

  bool operator==(const StudyRecord&) const = default;
};

/// Records are returned in ascending subject id order.
std::vector<StudyRecord> parse_study(std::string_view text,
                                     const CorpusFile& corpus);
std::vector<StudyRecord> load_study(const std::filesystem::path& path,
                                    const CorpusFile& corpus);
std::vector<Violation> validate_study(std::string_view text,
                                      const CorpusFile& corpus);

std::string write_study(const std::vector<StudyRecord>& records);

/// Whole file as a string; IoError when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace valuepilot
