#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinscribe/error.hpp"
#include "clinscribe/notes.hpp"
#include "clinscribe/transcript.hpp"

namespace clinscribe::prompts {

using transcript::DiarizedTranscript;

enum class Strategy { basic, zero_shot, one_shot, structured };

const char* strategy_name(Strategy strategy);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct Exemplar {
  std::string transcript_text;  // raw or tagged dialogue text
  nlohmann::json note;
};

inline constexpr std::size_t kMaxExemplars = 3;

struct PromptTemplate {
  Strategy strategy = Strategy::basic;
  notes::NoteKind kind = notes::NoteKind::soap;
  std::string formatting_instructions;      // empty for basic
  std::vector<Exemplar> exemplars;          // one_shot only, 1..kMaxExemplars
  std::optional<nlohmann::json> schema;     // structured only
};

// Canonical template for a strategy: built-in formatting instructions, a
// built-in exemplar for one-shot, schema_for(kind) for structured.
PromptTemplate default_template(Strategy strategy, notes::NoteKind kind);

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;   // contains the transcript verbatim exactly once
  Strategy strategy = Strategy::basic;
  std::string content_hash;  // sha256 over system and user text
};

// Deterministic: identical template + transcript give an identical
// content_hash. Throws MissingExemplar / MissingSchema / InvalidTemplate
// when the template violates its strategy's field constraints.
RenderedPrompt render(const PromptTemplate& tmpl,
                      const DiarizedTranscript& transcript);

std::string prompt_content_hash(const std::string& system_text,
                                const std::string& user_text);

// ---------------------------------------------------------------------------
// Prompt chaining
// ---------------------------------------------------------------------------

enum class ChainMode { generate, refine };

struct ChainStage {
  std::string name;
  PromptTemplate prompt;
  std::string output_role;
  std::vector<std::string> input_roles;
};

struct ChainPlan {
  std::vector<ChainStage> stages;
};

// generate -> single structured stage; refine -> [extract, integrate].
ChainPlan build_chain(notes::NoteKind kind, ChainMode mode);

// Each stage may consume only the ambient inputs ("transcript",
// "prior_note") or a role produced by an earlier stage. Throws
// InvalidChainPlan.
void validate_plan(const ChainPlan& plan);

// ---------------------------------------------------------------------------
// Prompt ensembling
// ---------------------------------------------------------------------------

enum class Combiner { medoid_by_rouge };

struct EnsembleMember {
  std::string backend_id;
  PromptTemplate prompt;
};

struct EnsembleSpec {
  std::vector<EnsembleMember> members;  // >= 2
  Combiner combiner = Combiner::medoid_by_rouge;
};

void validate_spec(const EnsembleSpec& spec);  // throws InvalidTemplate

struct EnsembleChoice {
  nlohmann::json note;             // always one of the input candidates
  std::size_t chosen_index = 0;    // index into the input list
  std::vector<double> medoid_scores;  // per valid candidate
  bool single_candidate = false;   // set when only one candidate validated
};

// Medoid by ROUGE-1 F1 over rendered note text; ties break to the earliest
// index. Throws NoValidCandidates when nothing validates.
EnsembleChoice combine_ensemble(const std::vector<nlohmann::json>& candidates,
                                notes::NoteKind kind);

// ---------------------------------------------------------------------------
// Versioned prompt resources
// ---------------------------------------------------------------------------
// Canonical wordings are compiled in and exportable to a directory with a
// manifest (name, version, file). `{NOTE_TYPE}` inside a resource expands
// to "SOAP" or "BIRP" at build time of the prompt text.

struct PromptResource {
  std::string name;
  int version = 1;
  std::string text;
};

inline constexpr const char* kResSystem = "system/base";
inline constexpr const char* kResConfidentiality = "clause/confidentiality";
inline constexpr const char* kResFormattingSoap = "formatting/soap";
inline constexpr const char* kResFormattingBirp = "formatting/birp";
inline constexpr const char* kResBasicSoap = "instruction/basic/soap";
inline constexpr const char* kResBasicBirp = "instruction/basic/birp";
inline constexpr const char* kResZeroShot = "instruction/zero_shot";
inline constexpr const char* kResOneShot = "instruction/one_shot";
inline constexpr const char* kResStructured = "instruction/structured";
inline constexpr const char* kResDiarize = "instruction/diarize";
inline constexpr const char* kResDiarizeRepair = "instruction/diarize_repair";
inline constexpr const char* kResConditional = "instruction/conditional";
inline constexpr const char* kResExtract = "instruction/extract";
inline constexpr const char* kResIntegrate = "instruction/integrate";
inline constexpr const char* kResNoteRepair = "instruction/note_repair";

const std::vector<PromptResource>& builtin_resources();
const std::string& resource_text(std::string_view name);
int resource_version(std::string_view name);

// Expands {NOTE_TYPE} to the upper-case kind name.
std::string instruction_for(std::string_view resource_name,
                            notes::NoteKind kind);

void export_resources(const std::string& dir);
std::vector<PromptResource> load_resources(const std::string& dir);

// Small fixed exemplar pair used by one-shot defaults.
const std::string& sample_exemplar_transcript(notes::NoteKind kind);
nlohmann::json sample_exemplar_note(notes::NoteKind kind);

// Prompt builders shared with the diarization path.
std::string build_diarize_prompt(const std::string& raw_text);
std::string build_diarize_repair_prompt(const std::string& raw_text,
                                        const std::string& parse_error);

}  // namespace clinscribe::prompts
