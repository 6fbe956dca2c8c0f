#include "valuepilot/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace valuepilot {

using nlohmann::json;

namespace {

using ordered_json = nlohmann::ordered_json;

std::string in_quotes(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// 1-based line and column of the byte at 1-based offset `byte`.
std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte);
    std::string what = e.what();
    // Drop nlohmann's "[json.exception.parse_error.101] parse error at ..."
    // prefix; line and column already locate the problem.
    if (auto pos = what.find(": syntax error"); pos != std::string::npos) {
      what = what.substr(pos + 2);
    }
    throw ParseError(what, line, column);
  }
}

// Collects violations while pulling typed fields out of a JSON document.
class Reader {
 public:
  std::vector<Violation> violations;

  void fail(const std::string& where, std::string message) {
    violations.push_back({where, std::move(message)});
  }

  const json* field(const json& obj, const char* key, const std::string& where,
                    bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(where, std::string("missing field \"") + key + "\"");
      return nullptr;
    }
    return &*it;
  }

  void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                      const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(known.begin(), known.end(),
                       [&](const char* k) { return it.key() == k; })) {
        fail(where, "unknown field " + in_quotes(it.key()));
      }
    }
  }

  std::optional<std::string> string_field(const json& obj, const char* key,
                                          const std::string& where,
                                          bool required = true) {
    const json* v = field(obj, key, where, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
      fail(where, std::string("field \"") + key + "\" must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<ValueVector> number_array(const json& obj, const char* key,
                                          const std::string& where) {
    const json* v = field(obj, key, where);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) {
      fail(where, std::string("field \"") + key + "\" must be an array");
      return std::nullopt;
    }
    ValueVector out;
    for (std::size_t j = 0; j < v->size(); ++j) {
      const auto& e = (*v)[j];
      if (!e.is_number()) {
        fail(where + "." + key + "[" + std::to_string(j) + "]",
             "score must be a number");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<std::vector<std::string>> string_array(
      const json& v, const std::string& where) {
    if (!v.is_array()) {
      fail(where, "must be an array of strings");
      return std::nullopt;
    }
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) {
        fail(where, "must be an array of strings");
        return std::nullopt;
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }
};

struct CorpusParse {
  CorpusFile corpus;
  std::vector<Violation> violations;
};

std::optional<AnnotatedAction> read_action(Reader& rd, const json& obj,
                                           const std::string& where) {
  if (!obj.is_object()) {
    rd.fail(where, "action must be an object");
    return std::nullopt;
  }
  rd.reject_unknown(obj, {"id", "text", "relevance"}, where);
  auto id = rd.string_field(obj, "id", where);
  auto text = rd.string_field(obj, "text", where);
  auto relevance = rd.number_array(obj, "relevance", where);
  if (!id || !text || !relevance) return std::nullopt;
  return AnnotatedAction{*id, *text, *relevance};
}

std::optional<AnnotatedScenario> read_scenario(Reader& rd, const json& obj,
                                               const std::string& where) {
  if (!obj.is_object()) {
    rd.fail(where, "scenario must be an object");
    return std::nullopt;
  }
  rd.reject_unknown(
      obj, {"id", "text", "relevance", "actions", "agent_count", "provenance"},
      where);
  AnnotatedScenario s;
  bool ok = true;
  if (auto id = rd.string_field(obj, "id", where)) s.id = *id; else ok = false;
  if (auto text = rd.string_field(obj, "text", where)) s.text = *text; else ok = false;
  if (auto rel = rd.number_array(obj, "relevance", where)) s.relevance = *rel; else ok = false;
  if (const json* ac = rd.field(obj, "agent_count", where, false)) {
    if (ac->is_number_integer()) {
      s.agent_count = ac->get<int>();
    } else {
      rd.fail(where, "field \"agent_count\" must be an integer");
      ok = false;
    }
  }
  s.provenance = rd.string_field(obj, "provenance", where, false);
  if (const json* actions = rd.field(obj, "actions", where)) {
    if (!actions->is_array()) {
      rd.fail(where, "field \"actions\" must be an array");
      ok = false;
    } else {
      for (std::size_t i = 0; i < actions->size(); ++i) {
        auto a = read_action(rd, (*actions)[i],
                             where + ".actions[" + std::to_string(i) + "]");
        if (a) s.actions.push_back(std::move(*a)); else ok = false;
      }
    }
  } else {
    ok = false;
  }
  if (!ok) return std::nullopt;
  return s;
}

CorpusParse read_corpus(const json& doc) {
  CorpusParse out;
  Reader rd;
  if (!doc.is_object()) {
    rd.fail("document", "corpus must be a JSON object");
    out.violations = std::move(rd.violations);
    return out;
  }
  rd.reject_unknown(doc, {"format", "dimensions", "scenarios"}, "document");
  if (auto fmt = rd.string_field(doc, "format", "document")) {
    if (*fmt != kCorpusFormat) {
      rd.fail("document.format", "unsupported format " + in_quotes(*fmt) +
                                     " (expected " + in_quotes(kCorpusFormat) +
                                     ")");
    }
    out.corpus.version = *fmt;
  }

  std::optional<DimensionSet> dims;
  std::size_t m = 0;
  if (const json* d = rd.field(doc, "dimensions", "document")) {
    if (auto names = rd.string_array(*d, "document.dimensions")) {
      m = names->size();
      try {
        dims.emplace(*names);
      } catch (const ValidationError& e) {
        rd.fail("document.dimensions", e.what());
      }
    }
  }

  std::unordered_map<std::string, std::size_t> first_index;
  if (const json* scenarios = rd.field(doc, "scenarios", "document")) {
    if (!scenarios->is_array()) {
      rd.fail("document", "field \"scenarios\" must be an array");
    } else {
      for (std::size_t i = 0; i < scenarios->size(); ++i) {
        const std::string where = "scenarios[" + std::to_string(i) + "]";
        auto s = read_scenario(rd, (*scenarios)[i], where);
        if (!s) continue;
        auto [it, inserted] = first_index.emplace(s->id, i);
        if (!inserted) {
          rd.fail(where, "duplicate scenario id " + in_quotes(s->id) +
                             " (also at scenarios[" +
                             std::to_string(it->second) + "])");
        }
        auto found = check_scenario(*s, m, where, dims ? &*dims : nullptr);
        rd.violations.insert(rd.violations.end(), found.begin(), found.end());
        out.corpus.scenarios.push_back(std::move(*s));
      }
    }
  }
  if (dims) out.corpus.dimensions = std::move(*dims);
  out.violations = std::move(rd.violations);
  return out;
}

}  // namespace

const AnnotatedScenario* CorpusFile::find(std::string_view scenario_id) const {
  for (const auto& s : scenarios) {
    if (s.id == scenario_id) return &s;
  }
  return nullptr;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

CorpusFile parse_corpus(std::string_view text) {
  auto parsed = read_corpus(parse_json(text));
  if (!parsed.violations.empty()) {
    throw ValidationError(std::move(parsed.violations));
  }
  return std::move(parsed.corpus);
}

CorpusFile load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_text_file(path));
}

std::vector<Violation> validate_corpus(std::string_view text) {
  try {
    return read_corpus(parse_json(text)).violations;
  } catch (const ParseError& e) {
    return {{"line " + std::to_string(e.line()) + ", column " +
                 std::to_string(e.column()),
             e.what()}};
  }
}

double round_score(double value) noexcept {
  const double scale = std::pow(10.0, kScoreDecimals);
  const double r = std::round(value * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no "-0.0" on disk
}

namespace {

ordered_json scores_json(const ValueVector& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(round_score(x));
  return out;
}

}  // namespace

std::string write_corpus(const CorpusFile& corpus) {
  ordered_json doc;
  doc["format"] = corpus.version;
  doc["dimensions"] = corpus.dimensions.names();
  ordered_json scenarios = ordered_json::array();
  for (const auto& s : corpus.scenarios) {
    ordered_json js;
    js["id"] = s.id;
    js["text"] = s.text;
    if (s.agent_count) js["agent_count"] = *s.agent_count;
    if (s.provenance) js["provenance"] = *s.provenance;
    js["relevance"] = scores_json(s.relevance);
    ordered_json actions = ordered_json::array();
    for (const auto& a : s.actions) {
      ordered_json ja;
      ja["id"] = a.id;
      ja["text"] = a.text;
      ja["relevance"] = scores_json(a.relevance);
      actions.push_back(std::move(ja));
    }
    js["actions"] = std::move(actions);
    scenarios.push_back(std::move(js));
  }
  doc["scenarios"] = std::move(scenarios);
  return doc.dump(2) + "\n";
}

void save_corpus(const CorpusFile& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << write_corpus(corpus);
  if (!out) throw IoError("error writing " + path.string());
}

std::size_t histogram_bin(double score) noexcept {
  // Binned in integer micro-units.
  const long long micro = std::llround(std::clamp(score, -1.0, 1.0) * 1e6);
  const auto bin = static_cast<std::size_t>((micro + 1000000) / 100000);
  return std::min(bin, kHistogramBins - 1);
}

CorpusStats corpus_stats(const CorpusFile& corpus) {
  const std::size_t m = corpus.dimensions.size();
  CorpusStats st;
  for (auto* counts : {&st.action_scores, &st.scenario_scores}) {
    counts->positive.assign(m, 0);
    counts->negative.assign(m, 0);
    counts->zero.assign(m, 0);
  }
  st.score_histogram.assign(kHistogramBins, 0);

  auto count = [m](DimensionCounts& c, const ValueVector& v) {
    for (std::size_t j = 0; j < m && j < v.size(); ++j) {
      if (v[j] > 0.0) ++c.positive[j];
      else if (v[j] < 0.0) ++c.negative[j];
      else ++c.zero[j];
    }
  };

  st.scenario_count = corpus.scenarios.size();
  for (const auto& s : corpus.scenarios) {
    count(st.scenario_scores, s.relevance);
    st.action_count += s.actions.size();
    ++st.actions_per_scenario[s.actions.size()];
    if (s.agent_count) ++st.agent_counts[*s.agent_count];
    else ++st.unspecified_agent_count;
    for (const auto& a : s.actions) {
      count(st.action_scores, a.relevance);
      for (double x : a.relevance) ++st.score_histogram[histogram_bin(x)];
    }
  }
  return st;
}

CorpusSplit split_corpus(const CorpusFile& corpus, double ratio,
                         std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie strictly between 0 and 1, got " +
                          describe(ratio));
  }
  const std::size_t n = corpus.scenarios.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});

  // Fisher-Yates with an unbiased bounded draw.
  std::mt19937_64 rng(seed);
  auto bounded = [&rng](std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = rng();
      if (x >= threshold) return x % bound;
    }
  };
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[bounded(i)]);
  }

  const auto cut = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(n)));
  CorpusSplit out{corpus, corpus, {}};
  out.train.scenarios.clear();
  out.test.scenarios.clear();
  for (std::size_t i = 0; i < n; ++i) {
    auto& side = i < cut ? out.train : out.test;
    side.scenarios.push_back(corpus.scenarios[idx[i]]);
  }
  if (out.train.scenarios.empty()) out.warnings.push_back("train split is empty");
  if (out.test.scenarios.empty()) out.warnings.push_back("test split is empty");
  return out;
}

namespace {

struct StudyParse {
  std::vector<StudyRecord> records;
  std::vector<Violation> violations;
};

void check_ranking(Reader& rd, const StudyRecord& rec,
                   const AnnotatedScenario& scenario,
                   const std::vector<std::string>& order,
                   const std::string& where) {
  const std::string owner = "subject " + in_quotes(rec.subject_id) +
                            " scenario " + in_quotes(scenario.id);
  std::unordered_set<std::string> expected;
  for (const auto& a : scenario.actions) expected.insert(a.id);
  std::unordered_set<std::string> seen;
  for (const auto& id : order) {
    if (!seen.insert(id).second) {
      rd.fail(where, owner + ": ranking is not a permutation, action id " +
                         in_quotes(id) + " repeats");
    } else if (!expected.contains(id)) {
      rd.fail(where, owner + ": ranking names unknown action id " + in_quotes(id));
    }
  }
  for (const auto& a : scenario.actions) {
    if (!seen.contains(a.id)) {
      rd.fail(where, owner + ": ranking is not a permutation, action id " +
                         in_quotes(a.id) + " is missing");
    }
  }
}

StudyParse read_study(const json& doc, const CorpusFile& corpus) {
  StudyParse out;
  Reader rd;
  const std::size_t m = corpus.dimensions.size();
  if (!doc.is_object()) {
    rd.fail("document", "study must be a JSON object");
    out.violations = std::move(rd.violations);
    return out;
  }
  rd.reject_unknown(doc, {"format", "subjects"}, "document");
  if (auto fmt = rd.string_field(doc, "format", "document")) {
    if (*fmt != kStudyFormat) {
      rd.fail("document.format", "unsupported format " + in_quotes(*fmt) +
                                     " (expected " + in_quotes(kStudyFormat) +
                                     ")");
    }
  }
  const json* subjects = rd.field(doc, "subjects", "document");
  if (subjects != nullptr && !subjects->is_array()) {
    rd.fail("document", "field \"subjects\" must be an array");
    subjects = nullptr;
  }
  std::unordered_map<std::string, std::size_t> first_index;
  for (std::size_t i = 0; subjects != nullptr && i < subjects->size(); ++i) {
    const std::string where = "subjects[" + std::to_string(i) + "]";
    const json& obj = (*subjects)[i];
    if (!obj.is_object()) {
      rd.fail(where, "subject must be an object");
      continue;
    }
    rd.reject_unknown(obj, {"id", "preferences", "rankings"}, where);
    StudyRecord rec;
    bool ok = true;
    if (auto id = rd.string_field(obj, "id", where)) rec.subject_id = *id; else ok = false;
    if (ok) {
      auto [it, inserted] = first_index.emplace(rec.subject_id, i);
      if (!inserted) {
        rd.fail(where, "duplicate subject id " + in_quotes(rec.subject_id) +
                           " (also at subjects[" + std::to_string(it->second) +
                           "])");
      }
    }
    if (auto prefs = rd.number_array(obj, "preferences", where)) {
      rec.preferences = *prefs;
      if (prefs->size() != m) {
        rd.fail(where, "subject " + in_quotes(rec.subject_id) + ": expected " +
                           std::to_string(m) + " preferences, got " +
                           std::to_string(prefs->size()));
      }
      for (std::size_t j = 0; j < prefs->size(); ++j) {
        const double p = (*prefs)[j];
        if (!(p >= 0.0 && p <= 1.0)) {
          const std::string dim =
              j < m ? in_quotes(corpus.dimensions[j]) : std::to_string(j);
          rd.fail(where + ".preferences[" + std::to_string(j) + "]",
                  "subject " + in_quotes(rec.subject_id) + " dimension " + dim +
                      ": preference " + describe(p) + " outside [0, 1]");
        }
      }
    } else {
      ok = false;
    }
    if (const json* rankings = rd.field(obj, "rankings", where)) {
      if (!rankings->is_object()) {
        rd.fail(where, "field \"rankings\" must be an object keyed by "
                       "scenario id");
        ok = false;
      } else {
        for (auto it = rankings->begin(); it != rankings->end(); ++it) {
          const std::string rwhere = where + ".rankings." + it.key();
          auto order = rd.string_array(it.value(), rwhere);
          if (!order) {
            ok = false;
            continue;
          }
          const AnnotatedScenario* scenario = corpus.find(it.key());
          if (scenario == nullptr) {
            rd.fail(rwhere, "subject " + in_quotes(rec.subject_id) +
                                " references unknown scenario " +
                                in_quotes(it.key()));
          } else {
            check_ranking(rd, rec, *scenario, *order, rwhere);
          }
          rec.rankings.emplace(it.key(), std::move(*order));
        }
      }
    } else {
      ok = false;
    }
    if (ok) out.records.push_back(std::move(rec));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const StudyRecord& a, const StudyRecord& b) {
              return a.subject_id < b.subject_id;
            });
  out.violations = std::move(rd.violations);
  return out;
}

}  // namespace

std::vector<StudyRecord> parse_study(std::string_view text,
                                     const CorpusFile& corpus) {
  auto parsed = read_study(parse_json(text), corpus);
  if (!parsed.violations.empty()) {
    throw ValidationError(std::move(parsed.violations));
  }
  return std::move(parsed.records);
}

std::vector<StudyRecord> load_study(const std::filesystem::path& path,
                                    const CorpusFile& corpus) {
  return parse_study(read_text_file(path), corpus);
}

std::vector<Violation> validate_study(std::string_view text,
                                      const CorpusFile& corpus) {
  try {
    return read_study(parse_json(text), corpus).violations;
  } catch (const ParseError& e) {
    return {{"line " + std::to_string(e.line()) + ", column " +
                 std::to_string(e.column()),
             e.what()}};
  }
}

std::string write_study(const std::vector<StudyRecord>& records) {
  ordered_json doc;
  doc["format"] = std::string(kStudyFormat);
  ordered_json subjects = ordered_json::array();
  for (const auto& r : records) {
    ordered_json js;
    js["id"] = r.subject_id;
    js["preferences"] = scores_json(r.preferences);
    ordered_json rankings = ordered_json::object();
    for (const auto& [scenario, order] : r.rankings) rankings[scenario] = order;
    js["rankings"] = std::move(rankings);
    subjects.push_back(std::move(js));
  }
  doc["subjects"] = std::move(subjects);
  return doc.dump(2) + "\n";
}

}  // namespace valuepilot
