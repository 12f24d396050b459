#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace clinscribe {

// Every recoverable failure in the library is an Error carrying a stable
// code. Callers that care about the failure family switch on code();
// everything else propagates the what() message.
enum class ErrorCode {
  // transcript
  empty_transcript,
  malformed_tag,
  leading_text_before_tag,
  invalid_transcript,
  schema_violation,
  empty_input,
  // classify
  non_finite_input,
  empty_dataset,
  degenerate_dataset,
  model_format,
  // notes
  malformed_json,
  // prompts
  missing_exemplar,
  missing_schema,
  invalid_template,
  invalid_chain_plan,
  no_valid_candidates,
  // gateway
  backend_unreachable,
  rate_limited,
  auth_missing,
  unparseable_completion,
  invalid_note_after_repair,
  backend_error,
  // refine
  unknown_patient,
  validation_failed,
  clock_skew,
  store_corrupt,
  unparseable_summary,
  // evaluate
  length_mismatch,
  empty_corpus,
  // shared
  io_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Line-addressed schema failure from record ingestion.
class SchemaViolationError : public Error {
 public:
  SchemaViolationError(std::size_t line, const std::string& message)
      : Error(ErrorCode::schema_violation,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Violation {
  std::string pointer;  // JSON pointer into the offending document
  std::string reason;
};

// Raised when a generated note still fails schema validation after the
// single repair call. Carries both violation lists for diagnostics.
class InvalidNoteAfterRepairError : public Error {
 public:
  InvalidNoteAfterRepairError(std::vector<Violation> first,
                              std::vector<Violation> second)
      : Error(ErrorCode::invalid_note_after_repair,
              "note failed validation twice (" +
                  std::to_string(first.size()) + " then " +
                  std::to_string(second.size()) + " violations)"),
        first_violations_(std::move(first)),
        second_violations_(std::move(second)) {}

  const std::vector<Violation>& first_violations() const {
    return first_violations_;
  }
  const std::vector<Violation>& second_violations() const {
    return second_violations_;
  }

 private:
  std::vector<Violation> first_violations_;
  std::vector<Violation> second_violations_;
};

}  // namespace clinscribe
