#include "clinscribe/error.hpp"

namespace clinscribe {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_transcript: return "EmptyTranscript";
    case ErrorCode::malformed_tag: return "MalformedTag";
    case ErrorCode::leading_text_before_tag: return "LeadingTextBeforeTag";
    case ErrorCode::invalid_transcript: return "InvalidTranscript";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::empty_dataset: return "EmptyDataset";
    case ErrorCode::degenerate_dataset: return "DegenerateDataset";
    case ErrorCode::model_format: return "ModelFormat";
    case ErrorCode::malformed_json: return "MalformedJson";
    case ErrorCode::missing_exemplar: return "MissingExemplar";
    case ErrorCode::missing_schema: return "MissingSchema";
    case ErrorCode::invalid_template: return "InvalidTemplate";
    case ErrorCode::invalid_chain_plan: return "InvalidChainPlan";
    case ErrorCode::no_valid_candidates: return "NoValidCandidates";
    case ErrorCode::backend_unreachable: return "BackendUnreachable";
    case ErrorCode::rate_limited: return "RateLimited";
    case ErrorCode::auth_missing: return "AuthMissing";
    case ErrorCode::unparseable_completion: return "UnparseableCompletion";
    case ErrorCode::invalid_note_after_repair: return "InvalidNoteAfterRepair";
    case ErrorCode::backend_error: return "BackendError";
    case ErrorCode::unknown_patient: return "UnknownPatient";
    case ErrorCode::validation_failed: return "ValidationFailed";
    case ErrorCode::clock_skew: return "ClockSkew";
    case ErrorCode::store_corrupt: return "StoreCorrupt";
    case ErrorCode::unparseable_summary: return "UnparseableSummary";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace clinscribe
