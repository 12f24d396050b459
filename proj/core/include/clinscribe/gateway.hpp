#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "clinscribe/clock.hpp"
#include "clinscribe/error.hpp"
#include "clinscribe/notes.hpp"
#include "clinscribe/prompts.hpp"
#include "clinscribe/transcript.hpp"

namespace clinscribe::gateway {

struct CompletionRequest {
  std::string model_id;  // falls back to the backend's configured model
  std::string system_text;
  std::string user_text;
  double temperature = 0.0;  // 0 keeps mock-backed pipelines bit-stable
  int max_tokens = 4096;
  std::string request_id;  // assigned by the gateway when empty
};

enum class FinishReason { stop, length, error };

struct Completion {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  std::int64_t prompt_units = 0;
  std::int64_t completion_units = 0;
  std::int64_t latency_ms = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::int64_t backoff_base_ms = 500;  // doubles per retry
};

struct RateLimit {
  int max_in_flight = 4;
  std::int64_t min_interval_ms = 0;
};

struct BackendConfig {
  enum class Kind { mock, http };

  Kind kind = Kind::mock;
  std::string model_id = "default";
  // http
  std::string base_url;
  std::string api_key_env;  // name of the env var holding the bearer token
  // mock: ordered fixtures, or fixtures keyed by prompt content hash
  std::vector<std::string> script;
  std::map<std::string, std::string> keyed_script;

  RateLimit rate_limit;
  RetryPolicy retry;
};

nlohmann::json backend_config_to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const nlohmann::json& doc);
BackendConfig load_backend_config(const std::string& path);

struct LedgerEntry {
  std::string request_id;
  std::string content_hash;
  std::string backend;
  std::int64_t timestamp_ms = 0;
  std::string outcome;  // "ok" or "error:<what>"
  int attempts = 1;
};

// Append-only and thread-safe; one entry per complete() invocation,
// successes and failures alike.
class CallLedger {
 public:
  void append(LedgerEntry entry);
  std::vector<LedgerEntry> entries() const;
  std::size_t size() const;
  void write_ndjson(std::ostream& out) const;
  void write_ndjson_file(const std::string& path) const;

 private:
  mutable std::mutex mutex_;
  std::vector<LedgerEntry> entries_;
};

struct HttpResponse {
  int status = 0;  // 0 = transport failure
  std::string body;
  std::map<std::string, std::string> headers;
};

// Injectable HTTP layer; the default posts with cpp-httplib.
using HttpTransport = std::function<HttpResponse(
    const std::string& base_url, const std::string& path,
    const std::map<std::string, std::string>& headers,
    const std::string& body)>;

struct NoteProvenance {
  std::string strategy;
  std::vector<std::string> request_ids;
  std::vector<std::string> content_hashes;
};

struct NoteResult {
  nlohmann::json note;
  NoteProvenance provenance;
};

// One backend plus its retry/rate-limit policy, call ledger and clock.
// Thread-safe; mock script consumption is atomic.
class Gateway {
 public:
  explicit Gateway(BackendConfig config,
                   std::shared_ptr<Clock> clock = nullptr,
                   HttpTransport transport = nullptr);

  Completion complete(CompletionRequest request);

  // render -> complete -> extract the first JSON object -> validate; one
  // repair call carrying the violation list. At most two backend calls.
  NoteResult complete_note(const prompts::PromptTemplate& tmpl,
                           const transcript::DiarizedTranscript& transcript,
                           notes::NoteKind kind);

  // Same contract for a prebuilt user prompt (refinement flows).
  NoteResult complete_validated(const std::string& user_text,
                                notes::NoteKind kind,
                                const std::string& strategy_label);

  const CallLedger& ledger() const { return ledger_; }
  const BackendConfig& config() const { return config_; }
  Clock& clock() { return *clock_; }

  // Full requests seen by a mock backend, for test inspection.
  std::vector<CompletionRequest> captured_requests() const;

 private:
  Completion mock_complete(const CompletionRequest& request);
  Completion http_complete(const CompletionRequest& request,
                           int& attempts_made);
  void admit();

  BackendConfig config_;
  std::shared_ptr<Clock> clock_;
  HttpTransport transport_;
  CallLedger ledger_;
  std::string backend_name_;

  mutable std::mutex mutex_;
  std::size_t script_position_ = 0;
  std::uint64_t request_counter_ = 0;
  std::vector<CompletionRequest> captured_;
  std::int64_t last_admit_ms_ = -1;
  int in_flight_ = 0;
};

// First balanced top-level JSON object in the text, if any. Understands
// string literals and escapes; used to peel prose wrappers off model
// output.
std::optional<std::string> extract_first_json_object(const std::string& text);

// Same, but also accepts a top-level array.
std::optional<std::string> extract_first_json_value(const std::string& text);

}  // namespace clinscribe::gateway
