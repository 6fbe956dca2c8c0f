#include "valuepilot/assessor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace valuepilot {

using nlohmann::json;

void AssessorRequest::validate() const {
  if (scenario_text.empty()) {
    throw ValidationError("assessor request has an empty scenario text");
  }
  if (!action_ids.empty() && action_ids.size() != action_texts.size()) {
    throw StructuralError("assessor request has " +
                          std::to_string(action_texts.size()) +
                          " action texts but " +
                          std::to_string(action_ids.size()) + " action ids");
  }
}

AssessorRequest make_request(const AnnotatedScenario& scenario,
                             const DimensionSet& dimensions) {
  AssessorRequest req;
  req.scenario_text = scenario.text;
  req.dimensions = dimensions;
  req.scenario_id = scenario.id;
  for (const auto& a : scenario.actions) {
    req.action_texts.push_back(a.text);
    req.action_ids.push_back(a.id);
  }
  return req;
}

ConstantAssessor::ConstantAssessor(double fill) : fill_(fill) {
  if (!(fill >= -1.0 && fill <= 1.0)) {
    throw ConfigError("constant assessor fill must lie in [-1, 1]");
  }
}

AssessorResponse ConstantAssessor::assess(const AssessorRequest& request) const {
  request.validate();
  const std::size_t m = request.dimensions.size();
  AssessorResponse out;
  out.scenario_scores.assign(m, fill_);
  out.action_scores.assign(request.action_texts.size(), ValueVector(m, fill_));
  return out;
}

AnnotationAssessor::AnnotationAssessor(std::shared_ptr<const CorpusFile> corpus)
    : corpus_(std::move(corpus)) {
  if (!corpus_) throw ConfigError("annotation assessor needs a corpus");
}

AssessorResponse AnnotationAssessor::assess(
    const AssessorRequest& request) const {
  request.validate();
  if (!request.scenario_id) {
    throw ValidationError("annotation assessor needs a scenario id");
  }
  if (request.dimensions != corpus_->dimensions) {
    throw StructuralError("request dimensions differ from the corpus");
  }
  const AnnotatedScenario* s = corpus_->find(*request.scenario_id);
  if (s == nullptr) {
    throw ValidationError("unknown scenario id \"" + *request.scenario_id +
                          "\"");
  }
  AssessorResponse out;
  out.scenario_scores = s->relevance;
  if (request.action_ids.empty()) {
    if (request.action_texts.size() != s->actions.size()) {
      throw StructuralError("request lists " +
                            std::to_string(request.action_texts.size()) +
                            " actions, scenario has " +
                            std::to_string(s->actions.size()));
    }
    for (const auto& a : s->actions) out.action_scores.push_back(a.relevance);
    return out;
  }
  for (const auto& id : request.action_ids) {
    auto it = std::find_if(s->actions.begin(), s->actions.end(),
                           [&](const AnnotatedAction& a) { return a.id == id; });
    if (it == s->actions.end()) {
      throw ValidationError("scenario \"" + s->id + "\" has no action \"" +
                            id + "\"");
    }
    out.action_scores.push_back(it->relevance);
  }
  return out;
}

namespace {

template <typename T>
std::optional<T> env_number(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::string_view text(raw);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(name) + " is not a valid number: " + raw);
  }
  return value;
}

}  // namespace

RemoteConfig RemoteConfig::from_environment() {
  return from_environment(RemoteConfig{});
}

RemoteConfig RemoteConfig::from_environment(RemoteConfig defaults) {
  if (const char* url = std::getenv("VALUEPILOT_ASSESSOR_URL");
      url != nullptr && *url != '\0') {
    defaults.base_url = url;
  }
  if (auto ms = env_number<long long>("VALUEPILOT_ASSESSOR_TIMEOUT_MS")) {
    if (*ms <= 0) throw ConfigError("VALUEPILOT_ASSESSOR_TIMEOUT_MS must be positive");
    defaults.timeout = std::chrono::milliseconds(*ms);
  }
  if (auto retries = env_number<int>("VALUEPILOT_ASSESSOR_RETRIES")) {
    if (*retries < 0) throw ConfigError("VALUEPILOT_ASSESSOR_RETRIES must be >= 0");
    defaults.max_retries = *retries;
  }
  return defaults;
}

std::string encode_assess_request(const AssessorRequest& request) {
  nlohmann::ordered_json body;
  body["protocol"] = std::string(kAssessProtocol);
  body["dimensions"] = request.dimensions.names();
  body["scenario"] = {{"text", request.scenario_text}};
  auto actions = nlohmann::ordered_json::array();
  for (const auto& text : request.action_texts) actions.push_back({{"text", text}});
  body["actions"] = std::move(actions);
  return body.dump();
}

namespace {

ValueVector decode_vector(const json& v, std::size_t m, const std::string& where,
                          ValidationMode mode, AssessorResponse& out) {
  if (!v.is_array()) throw ProtocolError(where + " must be an array", 1);
  if (v.size() != m) {
    throw ProtocolError(where + " has " + std::to_string(v.size()) +
                            " scores, expected " + std::to_string(m),
                        1);
  }
  ValueVector scores(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::string at = where + "[" + std::to_string(j) + "]";
    if (!v[j].is_number()) throw ProtocolError(at + " is not a number", 1);
    double x = v[j].get<double>();
    if (!std::isfinite(x)) throw ProtocolError(at + " is not finite", 1);
    if (x < -1.0 || x > 1.0) {
      if (mode == ValidationMode::strict) {
        throw ValidationError(std::vector<Violation>{
            {at, "score " + v[j].dump() + " outside [-1, 1]"}});
      }
      out.warnings.push_back("clamped " + at + " from " + v[j].dump());
      x = std::clamp(x, -1.0, 1.0);
    }
    scores[j] = x;
  }
  return scores;
}

}  // namespace

AssessorResponse decode_assess_response(std::string_view body,
                                        std::size_t dimension_count,
                                        std::size_t action_count,
                                        ValidationMode mode) {
  json doc;
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed response body: ") + e.what(), 1);
  }
  if (!doc.is_object()) throw ProtocolError("response must be a JSON object", 1);
  if (auto it = doc.find("protocol"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != kAssessProtocol) {
      throw ProtocolError("response protocol is not \"assess/1\"", 1);
    }
  }
  auto scen = doc.find("scenario_scores");
  auto acts = doc.find("action_scores");
  if (scen == doc.end() || acts == doc.end()) {
    throw ProtocolError(
        "response needs \"scenario_scores\" and \"action_scores\"", 1);
  }
  if (!acts->is_array()) throw ProtocolError("action_scores must be an array", 1);
  if (acts->size() != action_count) {
    throw ProtocolError("response scores " + std::to_string(acts->size()) +
                            " actions, request had " +
                            std::to_string(action_count),
                        1);
  }
  AssessorResponse out;
  out.scenario_scores =
      decode_vector(*scen, dimension_count, "scenario_scores", mode, out);
  for (std::size_t i = 0; i < action_count; ++i) {
    out.action_scores.push_back(decode_vector(
        (*acts)[i], dimension_count,
        "action_scores[" + std::to_string(i) + "]", mode, out));
  }
  return out;
}

RemoteAssessor::RemoteAssessor(RemoteConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw ConfigError("remote assessor needs a base URL "
                      "(set VALUEPILOT_ASSESSOR_URL)");
  }
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (config_.timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

AssessorResponse RemoteAssessor::assess(const AssessorRequest& request) const {
  request.validate();
  httplib::Client client(config_.base_url);
  if (!client.is_valid()) {
    throw ConfigError("unsupported assessor URL \"" + config_.base_url + "\"");
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const std::string body = encode_assess_request(request);
  std::mt19937_64 jitter(config_.jitter_seed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);

  std::string last_failure;
  int attempts = 0;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = static_cast<double>(config_.backoff_base.count()) *
                           std::pow(2.0, attempt - 1) * unit(jitter);
      std::this_thread::sleep_for(
          std::chrono::microseconds(static_cast<long long>(delay * 1000.0)));
    }
    ++attempts;
    auto res = client.Post(std::string(kAssessPath), body, "application/json");
    if (!res) {
      last_failure = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 200) {
      try {
        auto out = decode_assess_response(res->body, request.dimensions.size(),
                                          request.action_texts.size(),
                                          config_.mode);
        out.attempts = attempts;
        return out;
      } catch (const ProtocolError& e) {
        throw ProtocolError(e.what(), attempts);
      }
    }
    last_failure = "HTTP status " + std::to_string(status);
    const bool retryable = status == 408 || status == 429 || status >= 500;
    if (!retryable) {
      throw ProtocolError("assessor rejected the request with " + last_failure,
                          attempts);
    }
  }
  throw TransportError("assessor unavailable after " + std::to_string(attempts) +
                           " attempts (" + last_failure + ")",
                       attempts);
}

AnnotatedScenario with_scores(const AnnotatedScenario& scenario,
                              const AssessorResponse& response) {
  if (response.action_scores.size() != scenario.actions.size()) {
    throw StructuralError("assessor returned " +
                          std::to_string(response.action_scores.size()) +
                          " action vectors for " +
                          std::to_string(scenario.actions.size()) + " actions");
  }
  AnnotatedScenario out = scenario;
  out.relevance = response.scenario_scores;
  for (std::size_t i = 0; i < out.actions.size(); ++i) {
    out.actions[i].relevance = response.action_scores[i];
  }
  return out;
}

}  // namespace valuepilot
