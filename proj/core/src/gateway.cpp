#include "clinscribe/gateway.hpp"

#include <httplib.h>

#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "clinscribe/digest.hpp"

namespace clinscribe::gateway {

namespace {

constexpr std::int64_t kMockClockBaseMs = 1704067200000;  // 2024-01-01T00:00Z

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix, possibly empty
};

UrlParts split_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  std::size_t path_start = std::string::npos;
  if (scheme_end != std::string::npos) {
    path_start = base_url.find('/', scheme_end + 3);
  } else {
    path_start = base_url.find('/');
  }
  if (path_start == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

HttpResponse default_transport(const std::string& base_url,
                               const std::string& path,
                               const std::map<std::string, std::string>& headers,
                               const std::string& body) {
  UrlParts parts = split_url(base_url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  httplib::Headers request_headers(headers.begin(), headers.end());
  auto result = client.Post(parts.prefix + path, request_headers, body,
                            "application/json");
  if (!result) {
    return {0, "", {}};
  }
  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [key, value] : result->headers) {
    response.headers[key] = value;
  }
  return response;
}

enum class FailureKind { transient_unreachable, transient_rate_limited };

struct TransientFailure {
  FailureKind kind;
  std::string detail;
};

std::string json_string_or(const nlohmann::json& doc, const char* key,
                           const std::string& fallback) {
  if (doc.is_object() && doc.contains(key) && doc[key].is_string()) {
    return doc[key].get<std::string>();
  }
  return fallback;
}

std::optional<std::string> extract_balanced(const std::string& text,
                                            bool accept_array) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char open = text[i];
    if (open != '{' && (!accept_array || open != '[')) continue;
    char close = open == '{' ? '}' : ']';
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t j = i; j < text.size(); ++j) {
      char c = text[j];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == open) ++depth;
      else if (c == close) {
        --depth;
        if (depth == 0) return text.substr(i, j - i + 1);
      }
    }
    return std::nullopt;  // unbalanced from the first opener on
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_first_json_object(const std::string& text) {
  return extract_balanced(text, false);
}

std::optional<std::string> extract_first_json_value(const std::string& text) {
  return extract_balanced(text, true);
}

nlohmann::json backend_config_to_json(const BackendConfig& cfg) {
  nlohmann::json doc;
  doc["kind"] = cfg.kind == BackendConfig::Kind::mock ? "mock" : "http";
  doc["model_id"] = cfg.model_id;
  if (cfg.kind == BackendConfig::Kind::http) {
    doc["base_url"] = cfg.base_url;
    doc["api_key_env"] = cfg.api_key_env;
  } else {
    doc["script"] = cfg.script;
    if (!cfg.keyed_script.empty()) doc["keyed_script"] = cfg.keyed_script;
  }
  doc["rate_limit"] = {{"max_in_flight", cfg.rate_limit.max_in_flight},
                       {"min_interval_ms", cfg.rate_limit.min_interval_ms}};
  doc["retry"] = {{"max_attempts", cfg.retry.max_attempts},
                  {"backoff_base_ms", cfg.retry.backoff_base_ms}};
  return doc;
}

BackendConfig backend_config_from_json(const nlohmann::json& doc) {
  BackendConfig cfg;
  const std::string kind = json_string_or(doc, "kind", "");
  if (kind == "mock") {
    cfg.kind = BackendConfig::Kind::mock;
  } else if (kind == "http") {
    cfg.kind = BackendConfig::Kind::http;
  } else {
    throw Error(ErrorCode::backend_error,
                "backend kind must be \"mock\" or \"http\"");
  }
  cfg.model_id = json_string_or(doc, "model_id", "default");
  if (cfg.kind == BackendConfig::Kind::http) {
    cfg.base_url = json_string_or(doc, "base_url", "");
    cfg.api_key_env = json_string_or(doc, "api_key_env", "");
    if (cfg.base_url.empty()) {
      throw Error(ErrorCode::backend_error, "http backend requires base_url");
    }
  } else {
    if (doc.contains("script")) {
      cfg.script = doc["script"].get<std::vector<std::string>>();
    }
    if (doc.contains("keyed_script")) {
      cfg.keyed_script =
          doc["keyed_script"].get<std::map<std::string, std::string>>();
    }
    if (cfg.script.empty() && cfg.keyed_script.empty()) {
      throw Error(ErrorCode::backend_error, "mock backend requires a script");
    }
  }
  if (doc.contains("rate_limit")) {
    const auto& rl = doc["rate_limit"];
    cfg.rate_limit.max_in_flight = rl.value("max_in_flight", 4);
    cfg.rate_limit.min_interval_ms = rl.value("min_interval_ms", 0);
  }
  if (doc.contains("retry")) {
    const auto& rt = doc["retry"];
    cfg.retry.max_attempts = rt.value("max_attempts", 3);
    cfg.retry.backoff_base_ms = rt.value("backoff_base_ms", 500);
  }
  if (cfg.retry.max_attempts < 1 || cfg.rate_limit.max_in_flight < 1) {
    throw Error(ErrorCode::backend_error,
                "retry attempts and max_in_flight must be positive");
  }
  return cfg;
}

BackendConfig load_backend_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open backend config " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_json,
                std::string("backend config is not valid JSON: ") + e.what());
  }
  return backend_config_from_json(doc);
}

void CallLedger::append(LedgerEntry entry) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> CallLedger::entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

std::size_t CallLedger::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

void CallLedger::write_ndjson(std::ostream& out) const {
  for (const LedgerEntry& entry : entries()) {
    nlohmann::json doc = {
        {"request_id", entry.request_id},
        {"content_hash", entry.content_hash},
        {"backend", entry.backend},
        {"timestamp_ms", entry.timestamp_ms},
        {"outcome", entry.outcome},
        {"attempts", entry.attempts},
    };
    out << doc.dump() << '\n';
  }
}

void CallLedger::write_ndjson_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot write ledger " + path);
  }
  write_ndjson(out);
}

Gateway::Gateway(BackendConfig config, std::shared_ptr<Clock> clock,
                 HttpTransport transport)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      transport_(std::move(transport)) {
  if (!clock_) {
    // Mock pipelines default to a deterministic clock so that repeated
    // runs produce identical ledgers.
    if (config_.kind == BackendConfig::Kind::mock) {
      clock_ = std::make_shared<DeterministicClock>(kMockClockBaseMs, 1000);
    } else {
      clock_ = make_system_clock();
    }
  }
  if (!transport_) transport_ = default_transport;
  backend_name_ = config_.kind == BackendConfig::Kind::mock
                      ? "mock"
                      : "http " + config_.base_url;
}

std::vector<CompletionRequest> Gateway::captured_requests() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return captured_;
}

void Gateway::admit() {
  // Admission control: bounded in-flight calls plus a minimum spacing
  // between admissions. Spacing waits go through the injected clock.
  while (true) {
    std::int64_t wait_ms = 0;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (in_flight_ < config_.rate_limit.max_in_flight) {
        std::int64_t now = clock_->now_ms();
        std::int64_t earliest =
            last_admit_ms_ < 0
                ? now
                : last_admit_ms_ + config_.rate_limit.min_interval_ms;
        if (now >= earliest) {
          ++in_flight_;
          last_admit_ms_ = now;
          return;
        }
        wait_ms = earliest - now;
      } else {
        wait_ms = 1;
      }
    }
    clock_->sleep_ms(wait_ms);
  }
}

Completion Gateway::mock_complete(const CompletionRequest& request) {
  std::string fixture;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    captured_.push_back(request);
    if (!config_.keyed_script.empty()) {
      const std::string hash =
          prompts::prompt_content_hash(request.system_text, request.user_text);
      auto it = config_.keyed_script.find(hash);
      if (it == config_.keyed_script.end()) {
        throw Error(ErrorCode::backend_unreachable,
                    "mock has no fixture for content hash " + hash);
      }
      fixture = it->second;
    } else {
      if (script_position_ >= config_.script.size()) {
        throw Error(ErrorCode::backend_unreachable, "mock script exhausted");
      }
      fixture = config_.script[script_position_++];
    }
  }
  Completion completion;
  completion.text = std::move(fixture);
  completion.finish_reason = FinishReason::stop;
  completion.latency_ms = 0;
  return completion;
}

Completion Gateway::http_complete(const CompletionRequest& request,
                                  int& attempts_made) {
  const char* key = nullptr;
  if (!config_.api_key_env.empty()) {
    key = std::getenv(config_.api_key_env.c_str());
  }
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::auth_missing,
                "environment variable " + config_.api_key_env + " is not set");
  }

  nlohmann::json body = {
      {"model", request.model_id.empty() ? config_.model_id : request.model_id},
      {"messages",
       {{{"role", "system"}, {"content", request.system_text}},
        {{"role", "user"}, {"content", request.user_text}}}},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  std::map<std::string, std::string> headers = {
      {"Authorization", std::string("Bearer ") + key}};

  std::string last_detail = "unreachable";
  bool last_rate_limited = false;
  std::string retry_after;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    attempts_made = attempt;
    if (attempt > 1) {
      clock_->sleep_ms(config_.retry.backoff_base_ms << (attempt - 2));
    }
    std::int64_t start = clock_->now_ms();
    HttpResponse response = transport_(config_.base_url, "/chat/completions",
                                       headers, body.dump());
    std::int64_t latency = clock_->now_ms() - start;

    if (response.status == 200) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(response.body);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::backend_error,
                    std::string("response body is not JSON: ") + e.what());
      }
      if (!doc.contains("choices") || !doc["choices"].is_array() ||
          doc["choices"].empty()) {
        throw Error(ErrorCode::backend_error, "response has no choices");
      }
      const auto& choice = doc["choices"][0];
      Completion completion;
      completion.text = choice.at("message").at("content").get<std::string>();
      const std::string reason = json_string_or(choice, "finish_reason", "stop");
      completion.finish_reason = reason == "length" ? FinishReason::length
                                 : reason == "stop" ? FinishReason::stop
                                                    : FinishReason::error;
      if (doc.contains("usage")) {
        completion.prompt_units = doc["usage"].value("prompt_tokens", 0);
        completion.completion_units =
            doc["usage"].value("completion_tokens", 0);
      }
      completion.latency_ms = latency;
      return completion;
    }
    if (response.status == 429) {
      last_rate_limited = true;
      auto it = response.headers.find("Retry-After");
      retry_after = it != response.headers.end() ? it->second : "";
      last_detail = "HTTP 429";
      continue;
    }
    if (response.status == 0 || response.status >= 500) {
      last_rate_limited = false;
      last_detail = response.status == 0
                        ? "connection failed"
                        : "HTTP " + std::to_string(response.status);
      continue;
    }
    throw Error(ErrorCode::backend_error,
                "HTTP " + std::to_string(response.status) + " from backend");
  }
  if (last_rate_limited) {
    throw Error(ErrorCode::rate_limited,
                retry_after.empty()
                    ? "rate limited after " +
                          std::to_string(config_.retry.max_attempts) +
                          " attempts"
                    : "rate limited, retry-after " + retry_after);
  }
  throw Error(ErrorCode::backend_unreachable,
              last_detail + " after " +
                  std::to_string(config_.retry.max_attempts) + " attempts");
}

Completion Gateway::complete(CompletionRequest request) {
  if (request.system_text.empty() || request.user_text.empty()) {
    throw Error(ErrorCode::backend_error,
                "request needs both system and user text");
  }
  if (request.request_id.empty()) {
    std::lock_guard<std::mutex> lock(mutex_);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "req-%06llu",
                  static_cast<unsigned long long>(++request_counter_));
    request.request_id = buf;
  }
  if (request.model_id.empty()) request.model_id = config_.model_id;

  admit();
  LedgerEntry entry;
  entry.request_id = request.request_id;
  entry.content_hash =
      prompts::prompt_content_hash(request.system_text, request.user_text);
  entry.backend = backend_name_;

  int attempts_made = 1;
  try {
    Completion completion = config_.kind == BackendConfig::Kind::mock
                                ? mock_complete(request)
                                : http_complete(request, attempts_made);
    entry.timestamp_ms = clock_->now_ms();
    entry.outcome = "ok";
    entry.attempts = attempts_made;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --in_flight_;
    }
    ledger_.append(std::move(entry));
    return completion;
  } catch (const Error& e) {
    entry.timestamp_ms = clock_->now_ms();
    entry.outcome = std::string("error:") + e.what();
    entry.attempts = attempts_made;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --in_flight_;
    }
    ledger_.append(std::move(entry));
    throw;
  }
}

namespace {

struct NoteAttempt {
  nlohmann::json note;
  std::vector<Violation> violations;
  bool ok = false;
};

NoteAttempt parse_and_validate(const std::string& completion_text,
                               notes::NoteKind kind) {
  NoteAttempt attempt;
  std::optional<std::string> json_text =
      extract_first_json_object(completion_text);
  if (!json_text) {
    attempt.violations.push_back({"", "no JSON object found in completion"});
    return attempt;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(*json_text);
  } catch (const nlohmann::json::parse_error& e) {
    attempt.violations.push_back(
        {"", std::string("completion JSON does not parse: ") + e.what()});
    return attempt;
  }
  notes::ValidationResult result = notes::validate_note(doc, kind);
  if (!result.ok()) {
    attempt.violations = result.violations;
    return attempt;
  }
  attempt.note = std::move(doc);
  attempt.ok = true;
  return attempt;
}

std::string repair_prompt(const std::string& original_user_text,
                          const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << original_user_text << "\n\n";
  out << "Instructions: " << prompts::resource_text(prompts::kResNoteRepair)
      << "\nViolations:\n";
  for (const Violation& v : violations) {
    out << "- " << (v.pointer.empty() ? "/" : v.pointer) << ": " << v.reason
        << '\n';
  }
  return out.str();
}

}  // namespace

NoteResult Gateway::complete_note(const prompts::PromptTemplate& tmpl,
                                  const transcript::DiarizedTranscript& t,
                                  notes::NoteKind kind) {
  prompts::RenderedPrompt rendered = prompts::render(tmpl, t);
  NoteResult result;
  result.provenance.strategy = prompts::strategy_name(tmpl.strategy);

  CompletionRequest request;
  request.system_text = rendered.system_text;
  request.user_text = rendered.user_text;
  Completion first = complete(request);
  result.provenance.request_ids.push_back(
      ledger_.entries().back().request_id);
  result.provenance.content_hashes.push_back(rendered.content_hash);

  NoteAttempt attempt = parse_and_validate(first.text, kind);
  if (attempt.ok) {
    result.note = std::move(attempt.note);
    return result;
  }

  CompletionRequest repair;
  repair.system_text = rendered.system_text;
  repair.user_text = repair_prompt(rendered.user_text, attempt.violations);
  Completion second = complete(repair);
  result.provenance.request_ids.push_back(
      ledger_.entries().back().request_id);
  result.provenance.content_hashes.push_back(
      prompts::prompt_content_hash(repair.system_text, repair.user_text));

  NoteAttempt retry = parse_and_validate(second.text, kind);
  if (retry.ok) {
    result.note = std::move(retry.note);
    return result;
  }
  throw InvalidNoteAfterRepairError(attempt.violations, retry.violations);
}

NoteResult Gateway::complete_validated(const std::string& user_text,
                                       notes::NoteKind kind,
                                       const std::string& strategy_label) {
  NoteResult result;
  result.provenance.strategy = strategy_label;

  CompletionRequest request;
  request.system_text = prompts::resource_text(prompts::kResSystem);
  request.user_text = user_text;
  Completion first = complete(request);
  result.provenance.request_ids.push_back(
      ledger_.entries().back().request_id);
  result.provenance.content_hashes.push_back(
      prompts::prompt_content_hash(request.system_text, request.user_text));

  NoteAttempt attempt = parse_and_validate(first.text, kind);
  if (attempt.ok) {
    result.note = std::move(attempt.note);
    return result;
  }

  CompletionRequest repair;
  repair.system_text = request.system_text;
  repair.user_text = repair_prompt(user_text, attempt.violations);
  Completion second = complete(repair);
  result.provenance.request_ids.push_back(
      ledger_.entries().back().request_id);
  result.provenance.content_hashes.push_back(
      prompts::prompt_content_hash(repair.system_text, repair.user_text));

  NoteAttempt retry = parse_and_validate(second.text, kind);
  if (retry.ok) {
    result.note = std::move(retry.note);
    return result;
  }
  throw InvalidNoteAfterRepairError(attempt.violations, retry.violations);
}

}  // namespace clinscribe::gateway
