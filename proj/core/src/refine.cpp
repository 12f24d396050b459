#include "clinscribe/refine.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clinscribe/digest.hpp"
#include "clinscribe/prompts.hpp"

namespace clinscribe::refine {

namespace fs = std::filesystem;

namespace {

constexpr int kStoreSchemaVersion = 1;
constexpr const char* kDigestAlgorithm = "sha-256";

bool valid_patient_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
              c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

// Canonical preimage for the record digest. The note is serialized
// compactly with sorted keys, so any byte-level tamper changes the hash.
std::string version_preimage(const NoteVersion& v) {
  std::ostringstream out;
  out << v.patient_id << '\n'
      << v.version_no << '\n'
      << notes::kind_name(v.kind) << '\n'
      << v.note.dump() << '\n'
      << v.created_at_ms << '\n'
      << v.parent_hash;
  return out.str();
}

nlohmann::json version_to_json(const NoteVersion& v) {
  return {
      {"patient_id", v.patient_id},
      {"version_no", v.version_no},
      {"kind", notes::kind_name(v.kind)},
      {"note", v.note},
      {"created_at_ms", v.created_at_ms},
      {"parent_hash", v.parent_hash},
      {"self_hash", v.self_hash},
      {"provenance",
       {
           {"mode", provenance_mode_name(v.provenance.mode)},
           {"request_ids", v.provenance.request_ids},
           {"source_transcript_hash", v.provenance.source_transcript_hash},
       }},
  };
}

NoteVersion version_from_json(const nlohmann::json& doc) {
  NoteVersion v;
  v.patient_id = doc.at("patient_id").get<std::string>();
  v.version_no = doc.at("version_no").get<std::uint64_t>();
  auto kind = notes::kind_from_name(doc.at("kind").get<std::string>());
  if (!kind) {
    throw Error(ErrorCode::store_corrupt, "record has an unknown note kind");
  }
  v.kind = *kind;
  v.note = doc.at("note");
  v.created_at_ms = doc.at("created_at_ms").get<std::int64_t>();
  v.parent_hash = doc.at("parent_hash").get<std::string>();
  v.self_hash = doc.at("self_hash").get<std::string>();
  const auto& prov = doc.at("provenance");
  auto mode = provenance_mode_from_name(prov.at("mode").get<std::string>());
  if (!mode) {
    throw Error(ErrorCode::store_corrupt, "record has an unknown mode");
  }
  v.provenance.mode = *mode;
  v.provenance.request_ids =
      prov.at("request_ids").get<std::vector<std::string>>();
  v.provenance.source_transcript_hash =
      prov.at("source_transcript_hash").get<std::string>();
  return v;
}

std::string note_as_pretty_json(const nlohmann::json& note) {
  return note.dump(2);
}

}  // namespace

const char* provenance_mode_name(ProvenanceMode mode) {
  switch (mode) {
    case ProvenanceMode::initial: return "initial";
    case ProvenanceMode::conditional: return "conditional";
    case ProvenanceMode::extract_integrate: return "extract_integrate";
  }
  return "unknown";
}

std::optional<ProvenanceMode> provenance_mode_from_name(
    const std::string& name) {
  if (name == "initial") return ProvenanceMode::initial;
  if (name == "conditional") return ProvenanceMode::conditional;
  if (name == "extract_integrate") return ProvenanceMode::extract_integrate;
  return std::nullopt;
}

const char* summary_category_name(SummaryCategory category) {
  switch (category) {
    case SummaryCategory::symptom: return "symptom";
    case SummaryCategory::finding: return "finding";
    case SummaryCategory::assessment: return "assessment";
    case SummaryCategory::plan_change: return "plan_change";
  }
  return "unknown";
}

nlohmann::json summary_to_json(const RelevanceSummary& summary) {
  nlohmann::json items = nlohmann::json::array();
  for (const SummaryItem& item : summary.items) {
    items.push_back({{"category", summary_category_name(item.category)},
                     {"text", item.text}});
  }
  return {{"items", items}, {"source_hash", summary.source_hash}};
}

nlohmann::json summary_schema() {
  return {
      {"type", "array"},
      {"items",
       {
           {"type", "object"},
           {"properties",
            {
                {"category",
                 {{"type", "string"},
                  {"enum", {"symptom", "finding", "assessment",
                            "plan_change"}}}},
                {"text", {{"type", "string"}, {"minLength", 1}}},
            }},
           {"required", {"category", "text"}},
           {"additionalProperties", false},
       }},
  };
}

VersionStore::VersionStore(std::string directory)
    : directory_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) {
    throw Error(ErrorCode::io_error,
                "cannot create store directory " + directory_);
  }
}

std::string VersionStore::file_for(const std::string& patient_id) const {
  return (fs::path(directory_) / (patient_id + ".ndjson")).string();
}

std::vector<NoteVersion> VersionStore::history(
    const std::string& patient_id) const {
  if (!valid_patient_id(patient_id)) {
    throw Error(ErrorCode::validation_failed,
                "patient id must match [A-Za-z0-9_.-]+");
  }
  std::ifstream in(file_for(patient_id));
  if (!in) return {};

  std::vector<NoteVersion> versions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::store_corrupt,
                  "line " + std::to_string(line_no) + " does not parse: " +
                      e.what());
    }
    if (line_no == 1) {
      if (doc.value("digest_algorithm", "") != kDigestAlgorithm ||
          doc.value("schema_version", 0) != kStoreSchemaVersion) {
        throw Error(ErrorCode::store_corrupt,
                    "unsupported store header in " + file_for(patient_id));
      }
      continue;
    }
    try {
      versions.push_back(version_from_json(doc));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::store_corrupt,
                  "record " + std::to_string(line_no) + " malformed: " +
                      e.what());
    }
  }
  return versions;
}

NoteVersion VersionStore::latest(const std::string& patient_id) const {
  std::vector<NoteVersion> versions = history(patient_id);
  if (versions.empty()) {
    throw Error(ErrorCode::unknown_patient,
                "patient " + patient_id + " has no versions");
  }
  return versions.back();
}

NoteVersion VersionStore::commit_version(const std::string& patient_id,
                                         const nlohmann::json& note,
                                         notes::NoteKind kind,
                                         VersionProvenance provenance,
                                         Clock& clock) {
  if (!valid_patient_id(patient_id)) {
    throw Error(ErrorCode::validation_failed,
                "patient id must match [A-Za-z0-9_.-]+");
  }
  notes::ValidationResult validation = notes::validate_note(note, kind);
  if (!validation.ok()) {
    throw Error(ErrorCode::validation_failed,
                "note fails schema validation at " +
                    validation.violations.front().pointer + " (" +
                    validation.violations.front().reason + ")");
  }
  if (provenance.mode != ProvenanceMode::initial) {
    if (provenance.request_ids.empty()) {
      throw Error(ErrorCode::validation_failed,
                  "non-initial versions must record backend request ids");
    }
    if (provenance.source_transcript_hash.empty()) {
      throw Error(ErrorCode::validation_failed,
                  "non-initial versions must record a source transcript hash");
    }
  }

  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<NoteVersion> versions = history(patient_id);

  NoteVersion v;
  v.patient_id = patient_id;
  v.version_no = versions.size() + 1;
  v.note = note;
  v.kind = kind;
  v.created_at_ms = clock.now_ms();
  v.parent_hash = versions.empty() ? zero_digest() : versions.back().self_hash;
  v.provenance = std::move(provenance);
  if (!versions.empty() && v.created_at_ms <= versions.back().created_at_ms) {
    throw Error(ErrorCode::clock_skew,
                "commit timestamp " + std::to_string(v.created_at_ms) +
                    " is not after " +
                    std::to_string(versions.back().created_at_ms));
  }
  v.self_hash = sha256_hex(version_preimage(v));

  const std::string path = file_for(patient_id);
  const bool fresh = versions.empty() && !fs::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot append to " + path);
  }
  if (fresh) {
    nlohmann::json header = {{"digest_algorithm", kDigestAlgorithm},
                             {"schema_version", kStoreSchemaVersion}};
    out << header.dump() << '\n';
  }
  out << version_to_json(v).dump() << '\n';
  out.flush();
  if (!out) {
    throw Error(ErrorCode::io_error, "write to " + path + " failed");
  }
  return v;
}

VersionStore::VerifyResult VersionStore::verify_chain(
    const std::string& patient_id) const {
  VerifyResult result;
  std::ifstream in(file_for(patient_id));
  if (!in) return result;  // no history verifies vacuously

  std::string line;
  std::size_t line_no = 0;
  std::uint64_t expected_version = 1;
  std::string expected_parent = zero_digest();
  std::int64_t previous_created_at = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;

    if (line_no == 1) {
      nlohmann::json header;
      try {
        header = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        return {false, 0, "store header does not parse"};
      }
      if (header.value("digest_algorithm", "") != kDigestAlgorithm) {
        return {false, 0, "store header names a different digest"};
      }
      continue;
    }

    NoteVersion v;
    try {
      v = version_from_json(nlohmann::json::parse(line));
    } catch (const std::exception&) {
      return {false, expected_version,
              "record for version " + std::to_string(expected_version) +
                  " does not parse"};
    }
    if (v.version_no != expected_version) {
      return {false, expected_version,
              "expected version " + std::to_string(expected_version) +
                  ", found " + std::to_string(v.version_no)};
    }
    if (v.parent_hash != expected_parent) {
      return {false, v.version_no, "parent hash mismatch"};
    }
    if (sha256_hex(version_preimage(v)) != v.self_hash) {
      return {false, v.version_no, "self hash mismatch"};
    }
    if (v.created_at_ms <= previous_created_at) {
      return {false, v.version_no, "timestamps are not strictly increasing"};
    }
    previous_created_at = v.created_at_ms;
    expected_parent = v.self_hash;
    ++expected_version;
  }
  return result;
}

std::string build_conditional_prompt(const nlohmann::json& existing_note,
                                     const transcript::DiarizedTranscript& t,
                                     notes::NoteKind kind) {
  std::ostringstream out;
  out << "Existing note:\n" << note_as_pretty_json(existing_note) << "\n\n";
  out << "New transcript:\n" << transcript::render_diarized(t) << "\n\n";
  out << "Instructions: "
      << prompts::instruction_for(prompts::kResConditional, kind);
  return out.str();
}

std::string build_extract_prompt(const EncounterData& encounter,
                                 notes::NoteKind kind) {
  std::ostringstream out;
  out << "New transcript:\n"
      << transcript::render_diarized(encounter.transcript) << "\n\n";
  for (std::size_t i = 0; i < encounter.documents.size(); ++i) {
    out << "Attached document " << (i + 1) << ":\n"
        << encounter.documents[i] << "\n\n";
  }
  out << "Instructions: "
      << prompts::instruction_for(prompts::kResExtract, kind);
  return out.str();
}

std::string build_integrate_prompt(const nlohmann::json& existing_note,
                                   const RelevanceSummary& summary,
                                   notes::NoteKind kind) {
  std::ostringstream out;
  out << "Existing note:\n" << note_as_pretty_json(existing_note) << "\n\n";
  out << "New information summary:\n"
      << summary_to_json(summary).dump(2) << "\n\n";
  out << "Instructions: "
      << prompts::instruction_for(prompts::kResIntegrate, kind);
  return out.str();
}

NoteVersion conditional_update(VersionStore& store,
                               const std::string& patient_id,
                               const EncounterData& encounter,
                               gateway::Gateway& backend) {
  NoteVersion previous = store.latest(patient_id);
  const std::string prompt =
      build_conditional_prompt(previous.note, encounter.transcript,
                               previous.kind);
  gateway::NoteResult result =
      backend.complete_validated(prompt, previous.kind, "conditional");

  VersionProvenance provenance;
  provenance.mode = ProvenanceMode::conditional;
  provenance.request_ids = result.provenance.request_ids;
  provenance.source_transcript_hash =
      sha256_hex(transcript::render_diarized(encounter.transcript));
  return store.commit_version(patient_id, result.note, previous.kind,
                              std::move(provenance), backend.clock());
}

RelevanceSummary extract_relevant(const EncounterData& encounter,
                                  gateway::Gateway& backend,
                                  notes::NoteKind kind) {
  const std::string prompt = build_extract_prompt(encounter, kind);
  const std::string system = prompts::resource_text(prompts::kResSystem);
  const nlohmann::json schema = summary_schema();

  auto try_parse = [&schema](const std::string& completion_text,
                             std::string& error_out)
      -> std::optional<nlohmann::json> {
    std::optional<std::string> json_text =
        gateway::extract_first_json_value(completion_text);
    if (!json_text) {
      error_out = "no JSON value found in completion";
      return std::nullopt;
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(*json_text);
    } catch (const nlohmann::json::parse_error& e) {
      error_out = std::string("summary JSON does not parse: ") + e.what();
      return std::nullopt;
    }
    std::vector<Violation> violations =
        notes::validate_against_schema(schema, doc);
    if (!violations.empty()) {
      error_out = violations.front().pointer + ": " +
                  violations.front().reason;
      return std::nullopt;
    }
    return doc;
  };

  gateway::CompletionRequest request;
  request.system_text = system;
  request.user_text = prompt;
  gateway::Completion first = backend.complete(request);

  std::string error;
  std::optional<nlohmann::json> doc = try_parse(first.text, error);
  if (!doc) {
    gateway::CompletionRequest repair;
    repair.system_text = system;
    repair.user_text =
        prompt + "\n\nThe previous response could not be used (" + error +
        "). Respond again with only the JSON array described above.";
    gateway::Completion second = backend.complete(repair);
    doc = try_parse(second.text, error);
    if (!doc) {
      throw Error(ErrorCode::unparseable_summary,
                  "summary unparseable after repair: " + error);
    }
  }

  RelevanceSummary summary;
  summary.source_hash =
      sha256_hex(transcript::render_diarized(encounter.transcript));
  for (const auto& item : *doc) {
    const std::string category = item.at("category").get<std::string>();
    SummaryItem out;
    if (category == "symptom") out.category = SummaryCategory::symptom;
    else if (category == "finding") out.category = SummaryCategory::finding;
    else if (category == "assessment")
      out.category = SummaryCategory::assessment;
    else out.category = SummaryCategory::plan_change;
    out.text = item.at("text").get<std::string>();
    summary.items.push_back(std::move(out));
  }
  return summary;
}

NoteVersion integrate(VersionStore& store, const std::string& patient_id,
                      const RelevanceSummary& summary,
                      gateway::Gateway& backend) {
  NoteVersion previous = store.latest(patient_id);
  if (summary.source_hash.empty()) {
    throw Error(ErrorCode::validation_failed,
                "summary carries no source transcript hash");
  }
  const std::string prompt =
      build_integrate_prompt(previous.note, summary, previous.kind);
  gateway::NoteResult result =
      backend.complete_validated(prompt, previous.kind, "extract_integrate");

  VersionProvenance provenance;
  provenance.mode = ProvenanceMode::extract_integrate;
  provenance.request_ids = result.provenance.request_ids;
  provenance.source_transcript_hash = summary.source_hash;
  return store.commit_version(patient_id, result.note, previous.kind,
                              std::move(provenance), backend.clock());
}

}  // namespace clinscribe::refine
