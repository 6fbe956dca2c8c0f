#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "valuepilot/assessor.hpp"
#include "valuepilot/dataset.hpp"
#include "valuepilot/metrics.hpp"
#include "valuepilot/ranking.hpp"
#include "valuepilot/values.hpp"

namespace valuepilot::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- options

struct ScoringFlags {
  double scenario_weight = kDefaultBlendWeight;
  double action_weight = kDefaultBlendWeight;
  double steepness = kDefaultSteepness;
  std::string variant = "full";
  std::string backend = "promethee";
  std::string criteria = "contextualized";
  std::string assessor = "annotations";
  double fill = 0.0;
  std::string assessor_url;
  long long timeout_ms = 0;
  int retries = -1;
  bool clamp = false;

  ScoringConfig config() const {
    ScoringConfig c;
    c.scenario_weight = scenario_weight;
    c.action_weight = action_weight;
    c.steepness = steepness;
    c.variant = parse_variant(variant);
    c.validate();
    return c;
  }

  RankOptions options() const {
    RankOptions o;
    o.backend = parse_backend(backend);
    o.criteria = parse_criteria_source(criteria);
    return o;
  }

  ValidationMode mode() const {
    return clamp ? ValidationMode::clamp : ValidationMode::strict;
  }
};

struct OutputFlags {
  std::string format = "text";
  bool timestamp = false;

  bool structured() const { return format == "structured"; }
};

void add_scoring_flags(CLI::App* cmd, ScoringFlags& f, bool with_backend) {
  cmd->add_option("--ws", f.scenario_weight, "scenario subjective weight")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--wa", f.action_weight, "action subjective weight")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--steepness", f.steepness, "preference sigmoid steepness");
  cmd->add_option("--variant", f.variant,
                  "full, only_action, no_preference, no_subjective, "
                  "no_scenario");
  if (with_backend) {
    cmd->add_option("--backend", f.backend, "promethee, ahp, maut, topsis");
  }
  cmd->add_option("--criteria", f.criteria,
                  "criteria matrix: contextualized or raw");
  cmd->add_option("--assessor", f.assessor,
                  "score source: annotations, constant or remote");
  cmd->add_option("--fill", f.fill, "constant assessor fill value");
  cmd->add_option("--assessor-url", f.assessor_url,
                  "remote assessor base URL (or VALUEPILOT_ASSESSOR_URL)");
  cmd->add_option("--timeout-ms", f.timeout_ms, "remote assessor timeout");
  cmd->add_option("--retries", f.retries, "remote assessor retries");
  cmd->add_flag("--clamp", f.clamp,
                "clamp out-of-range preferences and remote scores instead of "
                "rejecting them");
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--format", f.format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  cmd->add_flag("--timestamp", f.timestamp,
                "print a generation time in text reports");
}

// ---------------------------------------------------------------- helpers

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::vector<double> parse_prefs(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) {
      throw ValidationError("preference \"" + item + "\" is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json input_entry(const std::string& path) {
  return {{"file", fs::path(path).filename().string()},
          {"sha256", file_sha256(path)}};
}

ordered_json manifest(const std::string& command, ordered_json config,
                      const std::vector<std::string>& inputs) {
  ordered_json m;
  m["tool"] = "valuepilot";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = std::move(config);
  ordered_json files = ordered_json::array();
  for (const auto& p : inputs) files.push_back(input_entry(p));
  m["inputs"] = std::move(files);
  return m;
}

ordered_json scoring_config_json(const ScoringFlags& f) {
  ordered_json c;
  c["scenario_weight"] = f.scenario_weight;
  c["action_weight"] = f.action_weight;
  c["steepness"] = f.steepness;
  c["variant"] = f.variant;
  c["criteria"] = f.criteria;
  c["assessor"] = f.assessor;
  if (f.assessor == "constant") c["fill"] = f.fill;
  c["validation"] = f.clamp ? "clamp" : "strict";
  return c;
}

void print_header(std::ostream& out, const std::string& command,
                  const OutputFlags& flags) {
  out << "valuepilot " << kToolVersion << " " << command << "\n";
  if (flags.timestamp) out << "generated: " << utc_now() << "\n";
}

// Resolves the relevance scores a scenario is ranked with. Remote failures
// of any kind surface as RemoteError.
class ScoreSource {
 public:
  ScoreSource(const ScoringFlags& flags,
              std::shared_ptr<const CorpusFile> corpus)
      : corpus_(std::move(corpus)) {
    if (flags.assessor == "annotations") {
      assessor_ = std::make_unique<AnnotationAssessor>(corpus_);
    } else if (flags.assessor == "constant") {
      assessor_ = std::make_unique<ConstantAssessor>(flags.fill);
    } else if (flags.assessor == "remote") {
      RemoteConfig cfg = RemoteConfig::from_environment();
      if (!flags.assessor_url.empty()) cfg.base_url = flags.assessor_url;
      if (flags.timeout_ms > 0) cfg.timeout = std::chrono::milliseconds(flags.timeout_ms);
      if (flags.retries >= 0) cfg.max_retries = flags.retries;
      cfg.mode = flags.mode();
      assessor_ = std::make_unique<RemoteAssessor>(std::move(cfg));
      remote_ = true;
    } else {
      throw ConfigError("unknown assessor \"" + flags.assessor +
                        "\" (expected annotations, constant or remote)");
    }
  }

  const AnnotatedScenario& resolve(const AnnotatedScenario& scenario,
                                   std::vector<std::string>& warnings) {
    if (auto it = cache_.find(scenario.id); it != cache_.end()) return it->second;
    AssessorResponse response;
    try {
      response = assessor_->assess(make_request(scenario, corpus_->dimensions));
    } catch (const RemoteError&) {
      throw;
    } catch (const Error& e) {
      if (remote_) throw RemoteError(e.what(), 1);
      throw;
    }
    for (auto& w : response.warnings) {
      warnings.push_back("scenario \"" + scenario.id + "\": " + w);
    }
    return cache_.emplace(scenario.id, with_scores(scenario, response))
        .first->second;
  }

 private:
  std::shared_ptr<const CorpusFile> corpus_;
  std::unique_ptr<Assessor> assessor_;
  bool remote_ = false;
  std::map<std::string, AnnotatedScenario> cache_;
};

std::shared_ptr<const CorpusFile> load_shared_corpus(const std::string& path) {
  return std::make_shared<const CorpusFile>(load_corpus(path));
}

std::vector<std::string> action_ids(const AnnotatedScenario& s,
                                    const std::vector<std::size_t>& order) {
  std::vector<std::string> out;
  for (auto i : order) out.push_back(s.actions[i].id);
  return out;
}

// ---------------------------------------------------------------- rank

struct RankArgs {
  std::string corpus;
  std::string scenario;
  std::string prefs;
  std::string study;
  std::string subject;
  bool explain = false;
  ScoringFlags scoring;
  OutputFlags output;
};

ordered_json trace_json(const ScoreTrace& t, const AnnotatedScenario& s) {
  ordered_json j;
  j["preference_transformed"] = t.preference;
  ordered_json scen;
  scen["relevance"] = t.scenario_relevance;
  scen["discrepancy"] = t.scenario_discrepancy;
  scen["blend"] = t.scenario_blend;
  std::vector<double> scale;
  for (double b : t.scenario_blend) scale.push_back(context_scale(b));
  scen["scale"] = scale;
  j["scenario"] = std::move(scen);
  ordered_json actions = ordered_json::array();
  for (std::size_t i = 0; i < t.action_count(); ++i) {
    auto row = [&](const Matrix& mtx) {
      auto r = mtx.row(i);
      return std::vector<double>(r.begin(), r.end());
    };
    ordered_json a;
    a["id"] = s.actions[i].id;
    a["relevance"] = row(t.action_relevance);
    a["discrepancy"] = row(t.action_discrepancy);
    a["blend"] = row(t.action_blend);
    a["contextualized"] = row(t.contextualized);
    actions.push_back(std::move(a));
  }
  j["actions"] = std::move(actions);
  return j;
}

void print_trace_text(std::ostream& out, const ScoreTrace& t,
                      const AnnotatedScenario& s, const DimensionSet& dims) {
  out << "\ntrace (variant " << to_string(t.variant) << ")\n";
  out << std::left << std::setw(12) << "dimension" << std::right
      << std::setw(11) << "p'" << std::setw(11) << "rho_s" << std::setw(11)
      << "d_s" << std::setw(11) << "r_s" << std::setw(11) << "scale" << "\n";
  for (std::size_t j = 0; j < t.dimension_count(); ++j) {
    out << std::left << std::setw(12) << dims[j] << std::right
        << std::setw(11) << fixed(t.preference[j]) << std::setw(11)
        << fixed(t.scenario_relevance[j]) << std::setw(11)
        << fixed(t.scenario_discrepancy[j]) << std::setw(11)
        << fixed(t.scenario_blend[j]) << std::setw(11)
        << fixed(context_scale(t.scenario_blend[j])) << "\n";
  }
  out << "contextualized scores r_ij\n";
  out << std::left << std::setw(12) << "action" << std::right;
  for (std::size_t j = 0; j < t.dimension_count(); ++j) {
    out << std::setw(11) << dims[j].substr(0, 10);
  }
  out << "\n";
  for (std::size_t i = 0; i < t.action_count(); ++i) {
    out << std::left << std::setw(12) << s.actions[i].id << std::right;
    for (std::size_t j = 0; j < t.dimension_count(); ++j) {
      out << std::setw(11) << fixed(t.contextualized(i, j));
    }
    out << "\n";
  }
}

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  auto corpus = load_shared_corpus(a.corpus);
  const AnnotatedScenario* scenario = corpus->find(a.scenario);
  if (scenario == nullptr) {
    err << "error: unknown scenario id \"" << a.scenario << "\"\n";
    return kExitValidation;
  }
  const auto config = a.scoring.config();
  const auto options = a.scoring.options();
  ValueVector raw_prefs;
  std::vector<std::string> inputs{a.corpus};
  if (!a.prefs.empty()) {
    if (!a.study.empty() || !a.subject.empty()) {
      throw ConfigError("give either --prefs or --study with --subject, not both");
    }
    raw_prefs = parse_prefs(a.prefs);
  } else {
    if (a.study.empty() || a.subject.empty()) {
      throw ConfigError("preferences are required: --prefs, or --study with --subject");
    }
    const auto study = load_study(a.study, *corpus);
    auto it = std::find_if(study.begin(), study.end(), [&](const StudyRecord& r) {
      return r.subject_id == a.subject;
    });
    if (it == study.end()) {
      throw ValidationError("study has no subject \"" + a.subject + "\"");
    }
    raw_prefs = it->preferences;
    inputs.push_back(a.study);
  }
  auto profile = PreferenceProfile::from_raw(std::move(raw_prefs),
                                             config.steepness, a.scoring.mode(),
                                             &corpus->dimensions);

  std::vector<std::string> warnings;
  ScoreSource source(a.scoring, corpus);
  const AnnotatedScenario& scored = source.resolve(*scenario, warnings);
  auto result = rank(scored, profile, config, options);
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  if (a.output.structured()) {
    auto cfg = scoring_config_json(a.scoring);
    cfg["backend"] = a.scoring.backend;
    cfg["scenario"] = a.scenario;
    if (!a.subject.empty()) cfg["subject"] = a.subject;
    cfg["preferences"] = profile.raw();
    ordered_json report;
    report["manifest"] = manifest("rank", std::move(cfg), inputs);
    report["scenario"] = {{"id", scored.id}, {"text", scored.text}};
    report["backend"] = to_string(options.backend);
    report["method"] = method_note(options.backend);
    report["variant"] = to_string(config.variant);
    if (result.consistency_ratio) {
      report["consistency_ratio"] = *result.consistency_ratio;
    }
    ordered_json ranking = ordered_json::array();
    for (std::size_t pos = 0; pos < result.order.size(); ++pos) {
      const auto i = result.order[pos];
      ordered_json row;
      row["rank"] = pos + 1;
      row["action"] = scored.actions[i].id;
      row["index"] = i;
      row["score"] = result.scores[i];
      if (result.flows) {
        row["positive_flow"] = result.flows->positive[i];
        row["negative_flow"] = result.flows->negative[i];
      }
      ranking.push_back(std::move(row));
    }
    report["ranking"] = std::move(ranking);
    report["warnings"] = warnings;
    if (a.explain && result.trace) report["trace"] = trace_json(*result.trace, scored);
    out << report.dump(2) << "\n";
    return kExitOk;
  }

  print_header(out, "rank", a.output);
  out << "scenario: " << scored.id << "  " << scored.text << "\n";
  out << "backend:  " << to_string(options.backend) << " ("
      << method_note(options.backend) << ")\n";
  out << "variant:  " << to_string(config.variant) << "\n";
  out << "preferences:";
  for (double p : profile.raw()) out << " " << fixed(p, 3);
  out << "\n\n";
  const bool flows = result.flows.has_value();
  out << std::left << std::setw(6) << "rank" << std::setw(12) << "action"
      << std::right << std::setw(12) << (flows ? "net_flow" : "score");
  if (flows) out << std::setw(12) << "phi+" << std::setw(12) << "phi-";
  out << "  text\n";
  for (std::size_t pos = 0; pos < result.order.size(); ++pos) {
    const auto i = result.order[pos];
    out << std::left << std::setw(6) << pos + 1 << std::setw(12)
        << scored.actions[i].id << std::right << std::setw(12)
        << fixed(result.scores[i]);
    if (flows) {
      out << std::setw(12) << fixed(result.flows->positive[i]) << std::setw(12)
          << fixed(result.flows->negative[i]);
    }
    out << "  " << scored.actions[i].text << "\n";
  }
  if (a.explain && result.trace) {
    print_trace_text(out, *result.trace, scored, corpus->dimensions);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvalItem {
  std::string subject;
  std::string scenario;
  std::vector<std::string> predicted;
  std::vector<std::string> reference;
  double os_sim = 0.0;
  bool first_match = false;
  double spearman = 0.0;
  double kendall = 0.0;
};

struct EvalRun {
  Variant variant = Variant::full;
  Backend backend = Backend::promethee;
  std::vector<EvalItem> items;
};

// Items come out ordered by subject id, then scenario id.
EvalRun evaluate_study(const CorpusFile& corpus,
                       const std::vector<StudyRecord>& study,
                       const ScoringFlags& flags, Variant variant,
                       Backend backend, ScoreSource& source,
                       std::vector<std::string>& warnings) {
  auto config = flags.config();
  config.variant = variant;
  auto options = flags.options();
  options.backend = backend;
  options.keep_trace = false;

  EvalRun run{variant, backend, {}};
  for (const auto& subject : study) {
    auto profile = PreferenceProfile::from_raw(
        subject.preferences, config.steepness, flags.mode(), &corpus.dimensions);
    for (const auto& [scenario_id, reference] : subject.rankings) {
      const AnnotatedScenario& scored =
          source.resolve(*corpus.find(scenario_id), warnings);
      auto result = rank(scored, profile, config, options);
      for (const auto& w : result.warnings) {
        warnings.push_back("subject \"" + subject.subject_id + "\" scenario \"" +
                           scenario_id + "\": " + w);
      }
      RankingPair pair(action_ids(scored, result.order), reference);
      EvalItem item;
      item.subject = subject.subject_id;
      item.scenario = scenario_id;
      item.predicted = pair.predicted();
      item.reference = pair.reference();
      item.os_sim = os_sim(pair);
      item.first_match = pair.predicted().front() == pair.reference().front();
      item.spearman = spearman_rho(pair);
      item.kendall = kendall_tau(pair);
      run.items.push_back(std::move(item));
    }
  }
  return run;
}

struct EvalSummary {
  Spread per_question;
  double first_acc = 0.0;
  Spread per_subject;
  struct Subject {
    std::string id;
    Spread os_sim;
    double first_acc = 0.0;
  };
  std::vector<Subject> subjects;
};

EvalSummary summarize_run(const EvalRun& run) {
  EvalSummary s;
  if (run.items.empty()) {
    throw UndefinedMetricError("study contains no ranked questions");
  }
  std::vector<double> all;
  std::size_t hits = 0;
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> by_subject;
  for (const auto& item : run.items) {
    all.push_back(item.os_sim);
    hits += item.first_match ? 1 : 0;
    auto& slot = by_subject[item.subject];
    slot.first.push_back(item.os_sim);
    slot.second += item.first_match ? 1 : 0;
  }
  s.per_question = summarize(all);
  s.first_acc = static_cast<double>(hits) / static_cast<double>(all.size());
  std::vector<double> subject_means;
  for (const auto& [id, slot] : by_subject) {
    EvalSummary::Subject sub;
    sub.id = id;
    sub.os_sim = summarize(slot.first);
    sub.first_acc =
        static_cast<double>(slot.second) / static_cast<double>(slot.first.size());
    subject_means.push_back(sub.os_sim.mean);
    s.subjects.push_back(std::move(sub));
  }
  s.per_subject = summarize(subject_means);
  return s;
}

constexpr const char* kSpreadNote =
    "spread is the sample standard deviation (n - 1 denominator); null when "
    "fewer than two values";

ordered_json run_json(const EvalRun& run, const EvalSummary& s,
                      bool with_items) {
  ordered_json j;
  j["variant"] = to_string(run.variant);
  j["backend"] = to_string(run.backend);
  j["method"] = method_note(run.backend);
  j["headline"] = {{"grouping", "per_question"},
                   {"items", s.per_question.count},
                   {"mean_os_sim", s.per_question.mean},
                   {"os_sim_sample_std", optional_number(s.per_question.sample_std)},
                   {"first_acc", s.first_acc}};
  j["per_subject_grouping"] = {
      {"subjects", s.per_subject.count},
      {"mean_os_sim", s.per_subject.mean},
      {"os_sim_sample_std", optional_number(s.per_subject.sample_std)}};
  ordered_json subjects = ordered_json::array();
  for (const auto& sub : s.subjects) {
    subjects.push_back({{"subject", sub.id},
                        {"questions", sub.os_sim.count},
                        {"mean_os_sim", sub.os_sim.mean},
                        {"os_sim_sample_std", optional_number(sub.os_sim.sample_std)},
                        {"first_acc", sub.first_acc}});
  }
  j["subjects"] = std::move(subjects);
  if (with_items) {
    ordered_json items = ordered_json::array();
    for (const auto& item : run.items) {
      items.push_back({{"subject", item.subject},
                       {"scenario", item.scenario},
                       {"predicted", item.predicted},
                       {"reference", item.reference},
                       {"os_sim", item.os_sim},
                       {"first_match", item.first_match},
                       {"spearman_rho", item.spearman},
                       {"kendall_tau", item.kendall}});
    }
    j["items"] = std::move(items);
  }
  return j;
}

std::string std_text(const std::optional<double>& v) {
  return v ? fixed(*v, 4) : std::string("n/a");
}

struct EvaluateArgs {
  std::string corpus;
  std::string study;
  bool ablations = false;
  ScoringFlags scoring;
  OutputFlags output;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  auto corpus = load_shared_corpus(a.corpus);
  const auto study = load_study(a.study, *corpus);
  const auto options = a.scoring.options();
  std::vector<Variant> variants;
  if (a.ablations) {
    variants.assign(all_variants().begin(), all_variants().end());
  } else {
    variants.push_back(a.scoring.config().variant);
  }

  std::vector<std::string> warnings;
  ScoreSource source(a.scoring, corpus);
  std::vector<std::pair<EvalRun, EvalSummary>> runs;
  for (auto v : variants) {
    auto run = evaluate_study(*corpus, study, a.scoring, v, options.backend,
                              source, warnings);
    auto summary = summarize_run(run);
    runs.emplace_back(std::move(run), std::move(summary));
  }
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  if (a.output.structured()) {
    auto cfg = scoring_config_json(a.scoring);
    cfg["backend"] = a.scoring.backend;
    cfg["ablations"] = a.ablations;
    ordered_json report;
    report["manifest"] = manifest("evaluate", std::move(cfg), {a.corpus, a.study});
    report["spread"] = kSpreadNote;
    ordered_json rs = ordered_json::array();
    for (const auto& [run, summary] : runs) rs.push_back(run_json(run, summary, true));
    report["runs"] = std::move(rs);
    report["warnings"] = warnings;
    out << report.dump(2) << "\n";
    return kExitOk;
  }

  print_header(out, "evaluate", a.output);
  out << "backend: " << to_string(options.backend) << "\n";
  out << "headline: mean over all (subject, question) items; " << kSpreadNote
      << "\n\n";
  out << std::left << std::setw(16) << "variant" << std::right << std::setw(8)
      << "items" << std::setw(12) << "os_sim" << std::setw(10) << "std"
      << std::setw(12) << "first_acc" << std::setw(16) << "subject_os_sim"
      << std::setw(10) << "std" << "\n";
  for (const auto& [run, s] : runs) {
    out << std::left << std::setw(16) << to_string(run.variant) << std::right
        << std::setw(8) << s.per_question.count << std::setw(12)
        << fixed(s.per_question.mean, 4) << std::setw(10)
        << std_text(s.per_question.sample_std) << std::setw(12)
        << fixed(s.first_acc, 4) << std::setw(16) << fixed(s.per_subject.mean, 4)
        << std::setw(10) << std_text(s.per_subject.sample_std) << "\n";
  }
  const auto& [first_run, first_summary] = runs.front();
  out << "\nper subject (" << to_string(first_run.variant) << ")\n";
  out << std::left << std::setw(16) << "subject" << std::right << std::setw(11)
      << "questions" << std::setw(12) << "os_sim" << std::setw(12)
      << "first_acc" << "\n";
  for (const auto& sub : first_summary.subjects) {
    out << std::left << std::setw(16) << sub.id << std::right << std::setw(11)
        << sub.os_sim.count << std::setw(12) << fixed(sub.os_sim.mean, 4)
        << std::setw(12) << fixed(sub.first_acc, 4) << "\n";
  }
  out << "\nitems (" << to_string(first_run.variant) << ")\n";
  out << std::left << std::setw(16) << "subject" << std::setw(16) << "scenario"
      << std::right << std::setw(10) << "os_sim" << std::setw(8) << "first"
      << std::setw(10) << "spearman" << std::setw(10) << "kendall" << "\n";
  for (const auto& item : first_run.items) {
    out << std::left << std::setw(16) << item.subject << std::setw(16)
        << item.scenario << std::right << std::setw(10) << fixed(item.os_sim, 4)
        << std::setw(8) << (item.first_match ? "yes" : "no") << std::setw(10)
        << fixed(item.spearman, 4) << std::setw(10) << fixed(item.kendall, 4)
        << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  auto corpus = load_shared_corpus(a.corpus);
  const auto study = load_study(a.study, *corpus);
  const auto variant = a.scoring.config().variant;

  std::vector<std::string> warnings;
  ScoreSource source(a.scoring, corpus);
  std::vector<std::pair<EvalRun, EvalSummary>> runs;
  for (auto b : all_backends()) {
    auto run = evaluate_study(*corpus, study, a.scoring, variant, b, source,
                              warnings);
    auto summary = summarize_run(run);
    runs.emplace_back(std::move(run), std::move(summary));
  }
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  if (a.output.structured()) {
    ordered_json report;
    report["manifest"] = manifest("compare-mcda", scoring_config_json(a.scoring),
                                  {a.corpus, a.study});
    report["spread"] = kSpreadNote;
    ordered_json rows = ordered_json::array();
    for (const auto& [run, s] : runs) rows.push_back(run_json(run, s, false));
    report["backends"] = std::move(rows);
    report["warnings"] = warnings;
    out << report.dump(2) << "\n";
    return kExitOk;
  }

  print_header(out, "compare-mcda", a.output);
  out << "variant: " << to_string(variant) << "\n\n";
  out << std::left << std::setw(12) << "backend" << std::right << std::setw(12)
      << "os_sim" << std::setw(10) << "std" << std::setw(12) << "first_acc"
      << "  method\n";
  for (const auto& [run, s] : runs) {
    out << std::left << std::setw(12) << to_string(run.backend) << std::right
        << std::setw(12) << fixed(s.per_question.mean, 4) << std::setw(10)
        << std_text(s.per_question.sample_std) << std::setw(12)
        << fixed(s.first_acc, 4) << "  " << method_note(run.backend) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string corpus;
  std::string study;
  OutputFlags output;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream&) {
  struct Found {
    std::string file;
    Violation violation;
  };
  std::vector<Found> found;
  std::vector<std::string> inputs{a.corpus};

  const std::string corpus_text = read_text_file(a.corpus);
  for (auto& v : validate_corpus(corpus_text)) found.push_back({a.corpus, v});
  bool study_checked = false;
  if (!a.study.empty()) {
    const std::string study_text = read_text_file(a.study);
    inputs.push_back(a.study);
    if (found.empty()) {
      const auto corpus = parse_corpus(corpus_text);
      for (auto& v : validate_study(study_text, corpus)) found.push_back({a.study, v});
      study_checked = true;
    }
  }

  if (a.output.structured()) {
    ordered_json report;
    report["manifest"] = manifest("validate", ordered_json::object(), inputs);
    ordered_json vs = ordered_json::array();
    for (const auto& f : found) {
      vs.push_back({{"file", fs::path(f.file).filename().string()},
                    {"location", f.violation.location},
                    {"message", f.violation.message}});
    }
    report["violations"] = std::move(vs);
    report["count"] = found.size();
    if (!a.study.empty()) report["study_checked"] = study_checked;
    out << report.dump(2) << "\n";
  } else {
    print_header(out, "validate", a.output);
    for (const auto& f : found) {
      out << fs::path(f.file).filename().string() << ": " << f.violation.location
          << ": " << f.violation.message << "\n";
    }
    if (!a.study.empty() && !study_checked) {
      out << "study not checked: corpus is invalid\n";
    }
    out << found.size() << (found.size() == 1 ? " violation" : " violations")
        << "\n";
  }
  return found.empty() ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string corpus;
  OutputFlags output;
};

ordered_json counts_json(const DimensionCounts& c, const DimensionSet& dims) {
  ordered_json out = ordered_json::array();
  for (std::size_t j = 0; j < dims.size(); ++j) {
    out.push_back({{"dimension", dims[j]},
                   {"positive", c.positive[j]},
                   {"negative", c.negative[j]},
                   {"zero", c.zero[j]}});
  }
  return out;
}

std::string bin_label(std::size_t b) {
  const double lo = -1.0 + 0.1 * static_cast<double>(b);
  return "[" + fixed(lo, 1) + ", " + fixed(lo + 0.1, 1) +
         (b + 1 == kHistogramBins ? "]" : ")");
}

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream&) {
  const auto corpus = load_corpus(a.corpus);
  const auto st = corpus_stats(corpus);
  const auto& dims = corpus.dimensions;

  if (a.output.structured()) {
    ordered_json report;
    report["manifest"] = manifest("stats", ordered_json::object(), {a.corpus});
    report["scenario_count"] = st.scenario_count;
    report["action_count"] = st.action_count;
    report["action_scores"] = counts_json(st.action_scores, dims);
    report["scenario_scores"] = counts_json(st.scenario_scores, dims);
    ordered_json hist = ordered_json::array();
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      hist.push_back({{"bin", bin_label(b)}, {"count", st.score_histogram[b]}});
    }
    report["score_histogram"] = std::move(hist);
    ordered_json agents = ordered_json::array();
    for (const auto& [k, n] : st.agent_counts) agents.push_back({{"agents", k}, {"scenarios", n}});
    report["agent_counts"] = std::move(agents);
    report["unspecified_agent_count"] = st.unspecified_agent_count;
    ordered_json per = ordered_json::array();
    for (const auto& [k, n] : st.actions_per_scenario) per.push_back({{"actions", k}, {"scenarios", n}});
    report["actions_per_scenario"] = std::move(per);
    out << report.dump(2) << "\n";
    return kExitOk;
  }

  print_header(out, "stats", a.output);
  out << "scenarios: " << st.scenario_count << "\n";
  out << "actions:   " << st.action_count << "\n\n";
  auto table = [&](const char* title, const DimensionCounts& c) {
    out << title << "\n";
    out << std::left << std::setw(12) << "dimension" << std::right
        << std::setw(10) << "positive" << std::setw(10) << "negative"
        << std::setw(10) << "zero" << "\n";
    for (std::size_t j = 0; j < dims.size(); ++j) {
      out << std::left << std::setw(12) << dims[j] << std::right << std::setw(10)
          << c.positive[j] << std::setw(10) << c.negative[j] << std::setw(10)
          << c.zero[j] << "\n";
    }
    out << "\n";
  };
  table("action scores by dimension", st.action_scores);
  table("scenario scores by dimension", st.scenario_scores);
  out << "action score histogram\n";
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    out << std::left << std::setw(14) << bin_label(b) << std::right
        << std::setw(8) << st.score_histogram[b] << "\n";
  }
  out << "\nagents per scenario\n";
  for (const auto& [k, n] : st.agent_counts) {
    out << std::left << std::setw(14) << k << std::right << std::setw(8) << n << "\n";
  }
  if (st.unspecified_agent_count > 0) {
    out << std::left << std::setw(14) << "unspecified" << std::right
        << std::setw(8) << st.unspecified_agent_count << "\n";
  }
  out << "\nactions per scenario\n";
  for (const auto& [k, n] : st.actions_per_scenario) {
    out << std::left << std::setw(14) << k << std::right << std::setw(8) << n << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- split

struct SplitArgs {
  std::string corpus;
  double ratio = 0.8;
  std::uint64_t seed = 0;
  std::string train_out;
  std::string test_out;
};

int cmd_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus(a.corpus);
  const auto split = split_corpus(corpus, a.ratio, a.seed);
  for (const auto& w : split.warnings) err << "warning: " << w << "\n";
  save_corpus(split.train, a.train_out);
  save_corpus(split.test, a.test_out);
  out << "train: " << split.train.scenarios.size() << " scenarios -> "
      << a.train_out << "\n";
  out << "test:  " << split.test.scenarios.size() << " scenarios -> "
      << a.test_out << "\n";
  return kExitOk;
}

}  // namespace

std::string file_sha256(const std::string& path) {
  const std::string bytes = read_text_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Value-driven action ranking and evaluation", "valuepilot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "rank the actions of one scenario");
  rank_cmd->add_option("--corpus", rank_args.corpus, "corpus file")->required();
  rank_cmd->add_option("--scenario", rank_args.scenario, "scenario id")->required();
  rank_cmd->add_option("--prefs", rank_args.prefs,
                       "comma-separated preferences in [0,1], corpus "
                       "dimension order");
  rank_cmd->add_option("--study", rank_args.study,
                       "study file to take preferences from");
  rank_cmd->add_option("--subject", rank_args.subject,
                       "subject id in --study");
  rank_cmd->add_flag("--explain", rank_args.explain, "include the score trace");
  add_scoring_flags(rank_cmd, rank_args.scoring, true);
  add_output_flags(rank_cmd, rank_args.output);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "compare engine rankings with a study");
  eval_cmd->add_option("--corpus", eval_args.corpus, "corpus file")->required();
  eval_cmd->add_option("--study", eval_args.study, "study file")->required();
  eval_cmd->add_flag("--ablations", eval_args.ablations, "evaluate every variant");
  add_scoring_flags(eval_cmd, eval_args.scoring, true);
  add_output_flags(eval_cmd, eval_args.output);

  EvaluateArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare-mcda", "OS-Sim per ranking backend");
  cmp_cmd->add_option("--corpus", cmp_args.corpus, "corpus file")->required();
  cmp_cmd->add_option("--study", cmp_args.study, "study file")->required();
  add_scoring_flags(cmp_cmd, cmp_args.scoring, false);
  add_output_flags(cmp_cmd, cmp_args.output);

  ValidateArgs val_args;
  auto* val_cmd = app.add_subcommand("validate", "list every violation in the inputs");
  val_cmd->add_option("--corpus", val_args.corpus, "corpus file")->required();
  val_cmd->add_option("--study", val_args.study, "study file");
  add_output_flags(val_cmd, val_args.output);

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");
  stats_cmd->add_option("--corpus", stats_args.corpus, "corpus file")->required();
  add_output_flags(stats_cmd, stats_args.output);

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "seeded train/test split by scenario");
  split_cmd->add_option("--corpus", split_args.corpus, "corpus file")->required();
  split_cmd->add_option("--ratio", split_args.ratio, "train fraction");
  split_cmd->add_option("--seed", split_args.seed, "shuffle seed");
  split_cmd->add_option("--train-out", split_args.train_out)->required();
  split_cmd->add_option("--test-out", split_args.test_out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*rank_cmd) return cmd_rank(rank_args, out, err);
    if (*eval_cmd) return cmd_evaluate(eval_args, out, err);
    if (*cmp_cmd) return cmd_compare(cmp_args, out, err);
    if (*val_cmd) return cmd_validate(val_args, out, err);
    if (*stats_cmd) return cmd_stats(stats_args, out, err);
    if (*split_cmd) return cmd_split(split_args, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const RemoteError& e) {
    err << "error: remote assessor failed after " << e.attempts()
        << " attempt(s): " << e.what() << "\n";
    return kExitRemote;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace valuepilot::cli
