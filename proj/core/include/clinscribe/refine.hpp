#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "clinscribe/clock.hpp"
#include "clinscribe/error.hpp"
#include "clinscribe/gateway.hpp"
#include "clinscribe/notes.hpp"
#include "clinscribe/transcript.hpp"

namespace clinscribe::refine {

enum class ProvenanceMode { initial, conditional, extract_integrate };

const char* provenance_mode_name(ProvenanceMode mode);
std::optional<ProvenanceMode> provenance_mode_from_name(
    const std::string& name);

struct VersionProvenance {
  ProvenanceMode mode = ProvenanceMode::initial;
  std::vector<std::string> request_ids;      // >= 1 for non-initial modes
  std::string source_transcript_hash;        // sha256 of the encounter text
};

struct NoteVersion {
  std::string patient_id;
  std::uint64_t version_no = 0;  // contiguous from 1
  nlohmann::json note;
  notes::NoteKind kind = notes::NoteKind::soap;
  std::int64_t created_at_ms = 0;  // strictly increasing per patient
  std::string parent_hash;         // zero digest for version 1
  std::string self_hash;
  VersionProvenance provenance;
};

struct EncounterData {
  transcript::DiarizedTranscript transcript;
  std::vector<std::string> documents;  // supplementary text attachments
  std::int64_t received_at_ms = 0;
};

enum class SummaryCategory { symptom, finding, assessment, plan_change };

const char* summary_category_name(SummaryCategory category);

struct SummaryItem {
  SummaryCategory category = SummaryCategory::symptom;
  std::string text;  // non-empty
};

struct RelevanceSummary {
  std::vector<SummaryItem> items;
  std::string source_hash;  // digest of the encounter transcript
};

nlohmann::json summary_to_json(const RelevanceSummary& summary);

// Schema for the extraction output: an array of {category, text} items.
nlohmann::json summary_schema();

// Per-patient append-only record logs under one directory. Each file
// starts with a header naming the digest algorithm, followed by one JSON
// record per version. Commits are serialized in-process; the chain is
// tamper-evident through parent/self hashes.
class VersionStore {
 public:
  explicit VersionStore(std::string directory);

  // Validates the note for its kind, assigns version_no/hashes and
  // appends. Throws ValidationFailed, ClockSkew or UnknownPatient (for
  // provenance modes that need a predecessor).
  NoteVersion commit_version(const std::string& patient_id,
                             const nlohmann::json& note, notes::NoteKind kind,
                             VersionProvenance provenance, Clock& clock);

  // Ascending version order; empty for an unknown patient.
  std::vector<NoteVersion> history(const std::string& patient_id) const;

  // Throws UnknownPatient when the patient has no versions.
  NoteVersion latest(const std::string& patient_id) const;

  struct VerifyResult {
    bool ok = true;
    std::uint64_t broken_version_no = 0;
    std::string detail;
  };

  // Recomputes every self hash and parent link; reports the first broken
  // record. Empty history verifies vacuously.
  VerifyResult verify_chain(const std::string& patient_id) const;

  const std::string& directory() const { return directory_; }

 private:
  std::string file_for(const std::string& patient_id) const;

  std::string directory_;
  mutable std::mutex mutex_;  // single writer per store process-wide
};

// Prompt builders, public so the exact prompt surface is testable.
std::string build_conditional_prompt(const nlohmann::json& existing_note,
                                     const transcript::DiarizedTranscript& t,
                                     notes::NoteKind kind);
std::string build_extract_prompt(const EncounterData& encounter,
                                 notes::NoteKind kind);
std::string build_integrate_prompt(const nlohmann::json& existing_note,
                                   const RelevanceSummary& summary,
                                   notes::NoteKind kind);

// Single-shot update conditioned on the previous note plus the new
// transcript. Commits the validated result as the next version.
NoteVersion conditional_update(VersionStore& store,
                               const std::string& patient_id,
                               const EncounterData& encounter,
                               gateway::Gateway& backend);

// Step 1 of the two-step flow: pull categorized items out of the new
// encounter. One repair attempt; then UnparseableSummary.
RelevanceSummary extract_relevant(const EncounterData& encounter,
                                  gateway::Gateway& backend,
                                  notes::NoteKind kind);

// Step 2: merge the summary into the latest note and commit.
NoteVersion integrate(VersionStore& store, const std::string& patient_id,
                      const RelevanceSummary& summary,
                      gateway::Gateway& backend);

}  // namespace clinscribe::refine
