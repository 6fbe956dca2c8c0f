#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "valuepilot/brute_force.hpp"
#include "valuepilot/dataset.hpp"
#include "valuepilot/metrics.hpp"
#include "valuepilot/ranking.hpp"
#include "valuepilot/values.hpp"

namespace py = pybind11;
using namespace valuepilot;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw StructuralError("ragged criteria matrix");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

ScoringConfig make_config(const std::string& variant, double scenario_weight,
                          double action_weight, double steepness) {
  ScoringConfig c;
  c.variant = parse_variant(variant);
  c.scenario_weight = scenario_weight;
  c.action_weight = action_weight;
  c.steepness = steepness;
  c.validate();
  return c;
}

py::dict result_dict(const RankingResult& r, const AnnotatedScenario* scenario) {
  py::dict d;
  d["order"] = r.order;
  if (scenario != nullptr) {
    std::vector<std::string> ids;
    for (auto i : r.order) ids.push_back(scenario->actions[i].id);
    d["action_ids"] = ids;
  }
  d["scores"] = r.scores;
  d["backend"] = std::string(to_string(r.backend));
  if (r.flows) {
    d["positive_flows"] = r.flows->positive;
    d["negative_flows"] = r.flows->negative;
  }
  if (r.consistency_ratio) d["consistency_ratio"] = *r.consistency_ratio;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Value-driven action ranking engine";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<GuardError>(m, "GuardError", base);

  py::class_<AnnotatedAction>(m, "Action")
      .def(py::init<std::string, std::string, ValueVector>(), py::arg("id"),
           py::arg("text"), py::arg("relevance"))
      .def_readwrite("id", &AnnotatedAction::id)
      .def_readwrite("text", &AnnotatedAction::text)
      .def_readwrite("relevance", &AnnotatedAction::relevance)
      .def("__repr__", [](const AnnotatedAction& a) { return "<Action " + a.id + ">"; });

  py::class_<AnnotatedScenario>(m, "Scenario")
      .def(py::init([](std::string id, std::string text, ValueVector relevance,
                       std::vector<AnnotatedAction> actions) {
             return AnnotatedScenario{std::move(id), std::move(text),
                                      std::move(relevance), std::move(actions), {}, {}};
           }),
           py::arg("id"), py::arg("text"), py::arg("relevance"), py::arg("actions"))
      .def_readwrite("id", &AnnotatedScenario::id)
      .def_readwrite("text", &AnnotatedScenario::text)
      .def_readwrite("relevance", &AnnotatedScenario::relevance)
      .def_readwrite("actions", &AnnotatedScenario::actions)
      .def_readwrite("agent_count", &AnnotatedScenario::agent_count)
      .def("__repr__", [](const AnnotatedScenario& s) { return "<Scenario " + s.id + ">"; });

  py::class_<CorpusFile>(m, "Corpus")
      .def_property_readonly("dimensions",
                             [](const CorpusFile& c) { return c.dimensions.names(); })
      .def_readonly("scenarios", &CorpusFile::scenarios)
      .def("scenario",
           [](const CorpusFile& c, const std::string& id) {
             const auto* s = c.find(id);
             if (s == nullptr) throw py::key_error(id);
             return *s;
           })
      .def("to_json", &write_corpus)
      .def("__len__", [](const CorpusFile& c) { return c.scenarios.size(); });

  m.def("load_corpus", &load_corpus, py::arg("path"));
  m.def("parse_corpus", [](const std::string& text) { return parse_corpus(text); },
        py::arg("text"));
  m.def("validate_corpus",
        [](const std::string& text) {
          std::vector<std::pair<std::string, std::string>> out;
          for (const auto& v : validate_corpus(text)) out.emplace_back(v.location, v.message);
          return out;
        },
        py::arg("text"));

  m.def("sigmoid", &sigmoid, py::arg("x"));
  m.def("preprocess_preferences",
        [](const ValueVector& raw, double steepness, bool clamp) {
          return preprocess_preferences(
              raw, steepness, clamp ? ValidationMode::clamp : ValidationMode::strict);
        },
        py::arg("raw"), py::arg("steepness") = kDefaultSteepness, py::arg("clamp") = false);

  m.def("variants", [] {
    std::vector<std::string> out;
    for (auto v : all_variants()) out.emplace_back(to_string(v));
    return out;
  });
  m.def("backends", [] {
    std::vector<std::string> out;
    for (auto b : all_backends()) out.emplace_back(to_string(b));
    return out;
  });

  m.def("score",
        [](const AnnotatedScenario& s, const ValueVector& prefs, const std::string& variant,
           double ws, double wa, double steepness) {
          const auto cfg = make_config(variant, ws, wa, steepness);
          const auto trace =
              score_scenario(s, PreferenceProfile::from_raw(prefs, steepness), cfg);
          py::dict d;
          d["preference"] = trace.preference;
          d["scenario_blend"] = trace.scenario_blend;
          d["action_blend"] = to_rows(trace.action_blend);
          d["contextualized"] = to_rows(trace.contextualized);
          return d;
        },
        py::arg("scenario"), py::arg("preferences"), py::arg("variant") = "full",
        py::arg("scenario_weight") = kDefaultBlendWeight,
        py::arg("action_weight") = kDefaultBlendWeight,
        py::arg("steepness") = kDefaultSteepness);

  m.def("rank",
        [](const AnnotatedScenario& s, const ValueVector& prefs, const std::string& variant,
           const std::string& backend, const std::string& criteria, double ws, double wa,
           double steepness) {
          const auto cfg = make_config(variant, ws, wa, steepness);
          RankOptions opt;
          opt.backend = parse_backend(backend);
          opt.criteria = parse_criteria_source(criteria);
          opt.keep_trace = false;
          const auto r = rank(s, PreferenceProfile::from_raw(prefs, steepness), cfg, opt);
          return result_dict(r, &s);
        },
        py::arg("scenario"), py::arg("preferences"), py::arg("variant") = "full",
        py::arg("backend") = "promethee", py::arg("criteria") = "contextualized",
        py::arg("scenario_weight") = kDefaultBlendWeight,
        py::arg("action_weight") = kDefaultBlendWeight,
        py::arg("steepness") = kDefaultSteepness);

  m.def("brute_force_rank",
        [](const AnnotatedScenario& s, const ValueVector& prefs, const std::string& variant) {
          const auto cfg = make_config(variant, kDefaultBlendWeight, kDefaultBlendWeight,
                                       kDefaultSteepness);
          return result_dict(brute_force_rank(s, PreferenceProfile::from_raw(prefs), cfg), &s);
        },
        py::arg("scenario"), py::arg("preferences"), py::arg("variant") = "full");

  m.def("rank_criteria",
        [](const std::vector<std::vector<double>>& criteria, const ValueVector& weights,
           const std::string& backend) {
          return result_dict(rank_criteria(to_matrix(criteria), weights, parse_backend(backend)),
                             nullptr);
        },
        py::arg("criteria"), py::arg("weights"), py::arg("backend") = "promethee");

  m.def("os_sim",
        [](std::vector<std::string> predicted, std::vector<std::string> reference) {
          return os_sim(RankingPair(std::move(predicted), std::move(reference)));
        },
        py::arg("predicted"), py::arg("reference"));
  m.def("first_acc",
        [](const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs) {
          std::vector<RankingPair> ps;
          for (const auto& [p, r] : pairs) ps.emplace_back(p, r);
          return first_acc(ps);
        },
        py::arg("pairs"));
  m.def("avg_acc",
        [](const std::vector<std::vector<double>>& predictions,
           const std::vector<std::vector<double>>& labels, double threshold) {
          return avg_acc(ScorePredictionBatch(to_matrix(predictions), to_matrix(labels)),
                         threshold);
        },
        py::arg("predictions"), py::arg("labels"), py::arg("threshold"));
  m.def("mae",
        [](const std::vector<std::vector<double>>& predictions,
           const std::vector<std::vector<double>>& labels) {
          return mae(ScorePredictionBatch(to_matrix(predictions), to_matrix(labels)));
        },
        py::arg("predictions"), py::arg("labels"));
}
