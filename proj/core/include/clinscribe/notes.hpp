#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "clinscribe/error.hpp"

namespace clinscribe::notes {

enum class NoteKind { soap, birp };

const char* kind_name(NoteKind kind);                    // "soap" / "birp"
std::optional<NoteKind> kind_from_name(const std::string& name);

// Field value used when a section item was not discussed in the encounter.
inline constexpr const char* kNotReported = "not reported";

struct SymptomEntry {
  std::string description;  // non-empty
  std::string onset = kNotReported;
  std::string frequency = kNotReported;
  std::string ascendance = kNotReported;
  std::string intensity = kNotReported;
  std::string duration = kNotReported;
  std::string quote = kNotReported;

  bool operator==(const SymptomEntry&) const = default;
};

struct ClinicalAssessment {
  std::string tool = kNotReported;
  std::string results = kNotReported;
  std::string status = kNotReported;

  bool operator==(const ClinicalAssessment&) const = default;
};

struct InterventionBlock {
  std::string approach = kNotReported;
  std::vector<std::string> interventions;
  std::string rationale = kNotReported;

  bool operator==(const InterventionBlock&) const = default;
};

// Shared by the SOAP assessment section and the BIRP response section.
struct ProgressBlock {
  std::string response_to_treatment = kNotReported;
  std::string examples = kNotReported;
  std::string progress_quote = kNotReported;
  std::string challenges = kNotReported;
  std::string therapist_observations = kNotReported;
  std::string therapeutic_alliance = kNotReported;

  bool operator==(const ProgressBlock&) const = default;
};

struct PlanSection {
  std::string homework = kNotReported;
  std::string future_session = kNotReported;
  std::string continued_treatment = kNotReported;
  std::string coordination_of_care = kNotReported;

  bool operator==(const PlanSection&) const = default;
};

struct SoapSubjective {
  std::string chief_complaint;  // non-empty
  std::string impairments = kNotReported;
  std::vector<SymptomEntry> symptoms;
  std::string medical_history = kNotReported;

  bool operator==(const SoapSubjective&) const = default;
};

struct SoapObjective {
  ClinicalAssessment clinical_assessment;
  std::string risk_assessment = kNotReported;
  InterventionBlock interventions;

  bool operator==(const SoapObjective&) const = default;
};

struct SoapNote {
  SoapSubjective subjective;
  SoapObjective objective;
  ProgressBlock assessment;
  PlanSection plan;

  bool operator==(const SoapNote&) const = default;
};

// The printed BIRP layout folds interventions under Behavior; there is no
// standalone Intervention section.
struct BirpBehavior {
  std::vector<SymptomEntry> symptoms;
  std::string therapist_observations = kNotReported;
  InterventionBlock interventions;

  bool operator==(const BirpBehavior&) const = default;
};

struct BirpNote {
  BirpBehavior behavior;
  ProgressBlock response;
  PlanSection plan;

  bool operator==(const BirpNote&) const = default;
};

// Draft-07 schema for the given kind. Deterministic: repeated calls yield
// byte-identical documents (serialize with dump(2)).
nlohmann::json schema_for(NoteKind kind);

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Validates against schema_for(kind). The string overload throws
// MalformedJson if the document does not parse.
ValidationResult validate_note(const nlohmann::json& doc, NoteKind kind);
ValidationResult validate_note(const std::string& text, NoteKind kind);

// Generic walker for the schema subset this library emits: type,
// properties, required, additionalProperties:false, items, minLength.
// Violations carry a JSON pointer into the document.
std::vector<Violation> validate_against_schema(const nlohmann::json& schema,
                                               const nlohmann::json& doc);

// Kind implied by the top-level section keys, if any.
std::optional<NoteKind> kind_of(const nlohmann::json& doc);

nlohmann::json to_json(const SoapNote& note);
nlohmann::json to_json(const BirpNote& note);

// Preconditions: doc validates for the corresponding kind.
SoapNote soap_from_json(const nlohmann::json& doc);
BirpNote birp_from_json(const nlohmann::json& doc);

// Deterministic section-headed plain text; the ROUGE input format.
std::string render_note_text(const SoapNote& note);
std::string render_note_text(const BirpNote& note);
std::string render_note_text(const nlohmann::json& doc, NoteKind kind);

enum class PiiCategory {
  phone,
  email,
  date_of_birth,
  national_id,
  full_name_candidate,
};

const char* pii_category_name(PiiCategory category);

struct PiiFinding {
  PiiCategory category;
  std::size_t begin = 0;  // character offsets into the scanned text
  std::size_t end = 0;
  std::string excerpt;    // == text.substr(begin, end - begin)
};

// Rule-based scan: phone numbers (10+ digits in one grouping), email
// addresses, ISO/US dates in a birth-date context, 9-digit id patterns,
// and Title-Case name bigrams following "name is". Findings sorted by
// offset.
std::vector<PiiFinding> scan_pii(const std::string& text);

}  // namespace clinscribe::notes
