#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "clinscribe/digest.hpp"
#include "clinscribe/refine.hpp"
#include "test_support.hpp"

using namespace clinscribe;
using namespace clinscribe::refine;
using notes::NoteKind;

namespace {

transcript::DiarizedTranscript encounter_transcript() {
  return transcript::parse_diarized(
      "[0] How did the week go? [1] Better, though the headaches returned "
      "on two evenings.");
}

EncounterData make_encounter() {
  return {encounter_transcript(), {}, 0};
}

VersionProvenance initial_provenance() {
  VersionProvenance p;
  p.mode = ProvenanceMode::initial;
  p.source_transcript_hash = sha256_hex("seed transcript");
  return p;
}

// Leaf-level JSON pointers whose values differ between two documents.
void collect_diff(const nlohmann::json& a, const nlohmann::json& b,
                  const std::string& pointer,
                  std::vector<std::string>& diffs) {
  if (a.is_object() && b.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        diffs.push_back(pointer + "/" + it.key());
        continue;
      }
      collect_diff(it.value(), b[it.key()], pointer + "/" + it.key(), diffs);
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key())) diffs.push_back(pointer + "/" + it.key());
    }
    return;
  }
  if (a != b) diffs.push_back(pointer);
}

}  // namespace

TEST_CASE("commit_version chains records from the zero digest") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);

  NoteVersion v1 = store.commit_version("eve", testsupport::make_soap_json(),
                                        NoteKind::soap, initial_provenance(),
                                        clock);
  CHECK(v1.version_no == 1);
  CHECK(v1.parent_hash == zero_digest());
  CHECK(v1.self_hash.size() == 64);

  NoteVersion v2 = store.commit_version(
      "eve", testsupport::make_soap_json("Updated complaint."), NoteKind::soap,
      initial_provenance(), clock);
  CHECK(v2.version_no == 2);
  CHECK(v2.parent_hash == v1.self_hash);
  CHECK(v2.created_at_ms > v1.created_at_ms);
}

TEST_CASE("commit_version rejects earlier clocks and invalid notes") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(5000, 1000);
  store.commit_version("eve", testsupport::make_soap_json(), NoteKind::soap,
                       initial_provenance(), clock);

  DeterministicClock earlier(1000, 1000);
  try {
    store.commit_version("eve", testsupport::make_soap_json(), NoteKind::soap,
                         initial_provenance(), earlier);
    FAIL("expected ClockSkew");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::clock_skew);
  }

  nlohmann::json bad = testsupport::make_soap_json();
  bad.erase("plan");
  try {
    store.commit_version("eve", bad, NoteKind::soap, initial_provenance(),
                         clock);
    FAIL("expected ValidationFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::validation_failed);
  }
  CHECK(store.history("eve").size() == 1);  // nothing was appended
}

TEST_CASE("non-initial provenance requires request ids and a source hash") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  VersionProvenance p;
  p.mode = ProvenanceMode::conditional;
  CHECK_THROWS_AS(store.commit_version("eve", testsupport::make_soap_json(),
                                       NoteKind::soap, p, clock),
                  Error);
}

TEST_CASE("history returns ascending versions; unknown patients are empty") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  for (int i = 0; i < 3; ++i) {
    store.commit_version("eve", testsupport::make_soap_json(), NoteKind::soap,
                         initial_provenance(), clock);
  }
  auto versions = store.history("eve");
  REQUIRE(versions.size() == 3);
  for (std::size_t i = 0; i < versions.size(); ++i) {
    CHECK(versions[i].version_no == i + 1);
    if (i > 0) {
      CHECK(versions[i].created_at_ms > versions[i - 1].created_at_ms);
    }
  }
  CHECK(store.history("nobody").empty());
  CHECK(store.history("eve").size() == 3);  // read-only
  CHECK_THROWS_AS(store.latest("nobody"), Error);
}

TEST_CASE("verify_chain detects tampered note bytes") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  store.commit_version("eve",
                       testsupport::make_soap_json("Original complaint one."),
                       NoteKind::soap, initial_provenance(), clock);
  store.commit_version("eve",
                       testsupport::make_soap_json("Original complaint two."),
                       NoteKind::soap, initial_provenance(), clock);
  store.commit_version("eve",
                       testsupport::make_soap_json("Original complaint three."),
                       NoteKind::soap, initial_provenance(), clock);
  CHECK(store.verify_chain("eve").ok);
  CHECK(store.verify_chain("nobody").ok);  // vacuous

  // flip one byte inside version 2's note content
  const std::string path = (dir.path() / "eve.ndjson").string();
  std::string content = testsupport::read_file(path);
  auto pos = content.find("complaint two");
  REQUIRE(pos != std::string::npos);
  content[pos] = 'k';
  std::ofstream(path, std::ios::binary) << content;

  auto result = store.verify_chain("eve");
  CHECK(!result.ok);
  CHECK(result.broken_version_no == 2);
}

TEST_CASE("verify_chain detects a relinked parent hash") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  store.commit_version("eve", testsupport::make_soap_json("one"),
                       NoteKind::soap, initial_provenance(), clock);
  store.commit_version("eve", testsupport::make_soap_json("two"),
                       NoteKind::soap, initial_provenance(), clock);

  const std::string path = (dir.path() / "eve.ndjson").string();
  std::string content = testsupport::read_file(path);
  auto v1 = store.history("eve")[0];
  auto pos = content.find(v1.self_hash);  // v2's parent pointer
  REQUIRE(pos != std::string::npos);
  content[pos] = content[pos] == '0' ? '1' : '0';
  std::ofstream(path, std::ios::binary) << content;

  auto result = store.verify_chain("eve");
  CHECK(!result.ok);
}

TEST_CASE("conditional_update commits the validated completion") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock commit_clock(1000, 1000);
  nlohmann::json v1_note = testsupport::make_soap_json();
  store.commit_version("eve", v1_note, NoteKind::soap, initial_provenance(),
                       commit_clock);

  // backend echoes the previous note: an update may be a no-op
  gateway::BackendConfig cfg;
  cfg.script = {v1_note.dump()};
  gateway::Gateway backend(cfg);
  NoteVersion v2 = conditional_update(store, "eve", make_encounter(), backend);
  CHECK(v2.version_no == 2);
  CHECK(v2.note == v1_note);
  CHECK(v2.provenance.mode == ProvenanceMode::conditional);
  REQUIRE(v2.provenance.request_ids.size() == 1);
  CHECK(v2.provenance.source_transcript_hash ==
        sha256_hex(transcript::render_diarized(encounter_transcript())));
}

TEST_CASE("the conditional prompt carries the prior note and transcript") {
  nlohmann::json note = testsupport::make_soap_json();
  std::string prompt =
      build_conditional_prompt(note, encounter_transcript(), NoteKind::soap);
  CHECK(prompt.find(note.dump(2)) != std::string::npos);
  CHECK(prompt.find(transcript::render_diarized(encounter_transcript())) !=
        std::string::npos);
  CHECK(prompt.find("updated version of the SOAP note") != std::string::npos);
}

TEST_CASE("a failed generation leaves the history untouched") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  store.commit_version("eve", testsupport::make_soap_json(), NoteKind::soap,
                       initial_provenance(), clock);

  gateway::BackendConfig cfg;
  cfg.script = {"not json", "still not json"};
  gateway::Gateway backend(cfg);
  CHECK_THROWS_AS(conditional_update(store, "eve", make_encounter(), backend),
                  InvalidNoteAfterRepairError);
  CHECK(store.history("eve").size() == 1);
}

TEST_CASE("conditional_update requires an existing patient") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  gateway::BackendConfig cfg;
  cfg.script = {"{}"};
  gateway::Gateway backend(cfg);
  try {
    conditional_update(store, "nobody", make_encounter(), backend);
    FAIL("expected UnknownPatient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_patient);
  }
}

TEST_CASE("extract_relevant parses categorized items") {
  gateway::BackendConfig cfg;
  cfg.script = {"[]"};
  gateway::Gateway empty_backend(cfg);
  RelevanceSummary summary =
      extract_relevant(make_encounter(), empty_backend, NoteKind::soap);
  CHECK(summary.items.empty());
  CHECK(!summary.source_hash.empty());

  cfg.script = {R"([{"category":"symptom","text":"Headaches on two evenings."}])"};
  gateway::Gateway one_backend(cfg);
  summary = extract_relevant(make_encounter(), one_backend, NoteKind::soap);
  REQUIRE(summary.items.size() == 1);
  CHECK(summary.items[0].category == SummaryCategory::symptom);
  CHECK(summary.items[0].text == "Headaches on two evenings.");
}

TEST_CASE("extract_relevant repairs once, then reports UnparseableSummary") {
  gateway::BackendConfig cfg;
  cfg.script = {"no json here",
                R"([{"category":"finding","text":"BP normal."}])"};
  gateway::Gateway backend(cfg);
  RelevanceSummary summary =
      extract_relevant(make_encounter(), backend, NoteKind::soap);
  REQUIRE(summary.items.size() == 1);
  CHECK(backend.ledger().size() == 2);

  cfg.script = {R"([{"category":"weather","text":"sunny"}])",
                R"([{"category":"weather","text":"sunny"}])"};
  gateway::Gateway bad_backend(cfg);
  try {
    extract_relevant(make_encounter(), bad_backend, NoteKind::soap);
    FAIL("expected UnparseableSummary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unparseable_summary);
  }
}

TEST_CASE("attachments ride along in the extraction prompt") {
  EncounterData encounter = make_encounter();
  encounter.documents = {"Lab panel: within range."};
  std::string prompt = build_extract_prompt(encounter, NoteKind::birp);
  CHECK(prompt.find("Attached document 1:") != std::string::npos);
  CHECK(prompt.find("Lab panel: within range.") != std::string::npos);
}

TEST_CASE("integrate commits a version that differs only where expected") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  nlohmann::json v1_note = testsupport::make_soap_json();
  store.commit_version("eve", v1_note, NoteKind::soap, initial_provenance(),
                       clock);

  nlohmann::json updated = v1_note;
  updated["plan"]["homework"] = "Keep a headache diary each evening.";

  gateway::BackendConfig cfg;
  cfg.script = {updated.dump()};
  gateway::Gateway backend(cfg);

  RelevanceSummary summary;
  summary.source_hash = sha256_hex("encounter-2");
  summary.items.push_back(
      {SummaryCategory::plan_change, "Start a headache diary."});

  NoteVersion v2 = integrate(store, "eve", summary, backend);
  CHECK(v2.version_no == 2);
  CHECK(v2.provenance.mode == ProvenanceMode::extract_integrate);
  CHECK(v2.provenance.source_transcript_hash == summary.source_hash);

  std::vector<std::string> diffs;
  collect_diff(v1_note, v2.note, "", diffs);
  REQUIRE(diffs.size() == 1);
  CHECK(diffs[0] == "/plan/homework");
}

TEST_CASE("integrate prompt embeds the prior note and the summary") {
  nlohmann::json note = testsupport::make_soap_json();
  RelevanceSummary summary;
  summary.source_hash = sha256_hex("x");
  summary.items.push_back({SummaryCategory::assessment, "Mood improved."});
  std::string prompt = build_integrate_prompt(note, summary, NoteKind::soap);
  CHECK(prompt.find(note.dump(2)) != std::string::npos);
  CHECK(prompt.find("Mood improved.") != std::string::npos);
  CHECK(prompt.find("New information summary:") != std::string::npos);
}

TEST_CASE("an empty summary can still produce an unchanged next version") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  nlohmann::json note = testsupport::make_soap_json();
  store.commit_version("eve", note, NoteKind::soap, initial_provenance(),
                       clock);

  gateway::BackendConfig cfg;
  cfg.script = {note.dump()};
  gateway::Gateway backend(cfg);
  RelevanceSummary summary;
  summary.source_hash = sha256_hex("enc");
  NoteVersion v2 = integrate(store, "eve", summary, backend);
  CHECK(v2.note == note);
  CHECK(v2.version_no == 2);
}

TEST_CASE("conditional then two-step keeps version numbers contiguous") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  nlohmann::json note = testsupport::make_soap_json();
  store.commit_version("eve", note, NoteKind::soap, initial_provenance(),
                       clock);

  gateway::BackendConfig cfg;
  cfg.script = {note.dump(), "[]", note.dump()};
  gateway::Gateway backend(cfg);
  conditional_update(store, "eve", make_encounter(), backend);
  RelevanceSummary summary =
      extract_relevant(make_encounter(), backend, NoteKind::soap);
  integrate(store, "eve", summary, backend);

  auto versions = store.history("eve");
  REQUIRE(versions.size() == 3);
  CHECK(versions[0].version_no == 1);
  CHECK(versions[1].version_no == 2);
  CHECK(versions[2].version_no == 3);
  CHECK(store.verify_chain("eve").ok);
}

TEST_CASE("summary_to_json carries categories and the source hash") {
  RelevanceSummary summary;
  summary.source_hash = "abc";
  summary.items.push_back({SummaryCategory::plan_change, "New homework."});
  nlohmann::json doc = summary_to_json(summary);
  CHECK(doc["source_hash"] == "abc");
  CHECK(doc["items"][0]["category"] == "plan_change");
}

TEST_CASE("patient ids are restricted to a filesystem-safe alphabet") {
  testsupport::TempDir dir;
  VersionStore store(dir.path().string());
  DeterministicClock clock(1000, 1000);
  CHECK_THROWS_AS(store.commit_version("../escape",
                                       testsupport::make_soap_json(),
                                       NoteKind::soap, initial_provenance(),
                                       clock),
                  Error);
  CHECK_THROWS_AS(store.history("a/b"), Error);
}
