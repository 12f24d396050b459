#include "commands.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "clinscribe/classify.hpp"
#include "clinscribe/clock.hpp"
#include "clinscribe/digest.hpp"
#include "clinscribe/error.hpp"
#include "clinscribe/evaluate.hpp"
#include "clinscribe/gateway.hpp"
#include "clinscribe/notes.hpp"
#include "clinscribe/prompts.hpp"
#include "clinscribe/refine.hpp"
#include "clinscribe/transcript.hpp"

namespace clinscribe::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kPipelineClockBaseMs = 1704067200000;
constexpr std::int64_t kPipelineClockStepMs = 1000;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot write " + path);
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::io_error, "write to " + path + " failed");
  }
}

std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Transcript inputs are either the bracket-tagged text format or
// line-delimited JSON records (detected by a leading '{').
transcript::DiarizedTranscript load_transcript(const std::string& path) {
  std::string text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    std::istringstream stream(text);
    return transcript::ingest_records(stream);
  }
  return transcript::parse_diarized(text, fs::path(path).stem().string());
}

// Mock pipelines run on a deterministic clock. Seeding it past the last
// store timestamp keeps commit times strictly increasing across separate
// command invocations.
std::shared_ptr<Clock> make_pipeline_clock(
    const gateway::BackendConfig& config, std::int64_t last_store_ts = -1) {
  if (config.kind == gateway::BackendConfig::Kind::http) {
    return make_system_clock();
  }
  std::int64_t base = kPipelineClockBaseMs;
  if (last_store_ts >= base) base = last_store_ts + kPipelineClockStepMs;
  return std::make_shared<DeterministicClock>(base, kPipelineClockStepMs);
}

std::int64_t last_commit_ms(const refine::VersionStore& store,
                            const std::string& patient_id) {
  auto versions = store.history(patient_id);
  return versions.empty() ? -1 : versions.back().created_at_ms;
}

void maybe_write_ledger(const gateway::Gateway& backend,
                        const std::string& path) {
  if (!path.empty()) backend.ledger().write_ndjson_file(path);
}

void print_metric_block(std::ostream& out, const evaluate::ConfusionMatrix& cm) {
  auto prf = evaluate::precision_recall_f1(cm);
  out << "accuracy " << format6(evaluate::accuracy(cm)) << '\n';
  out << "precision " << format6(prf.precision) << '\n';
  out << "recall " << format6(prf.recall) << '\n';
  out << "f1 " << format6(prf.f1) << '\n';
}

// Per-segment labels for metric comparison: each utterance contributes one
// label per sentence segment of its text.
std::vector<transcript::SpeakerLabel> segment_labels(
    const transcript::DiarizedTranscript& t) {
  std::vector<transcript::SpeakerLabel> labels;
  for (const transcript::Utterance& u : t.utterances()) {
    auto segments = transcript::segment_utterances({u.text, t.source_id()});
    labels.insert(labels.end(), segments.size(), u.speaker);
  }
  return labels;
}

std::string violations_as_json(const std::vector<Violation>& first,
                               const std::vector<Violation>& second) {
  auto list = [](const std::vector<Violation>& violations) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Violation& v : violations) {
      arr.push_back({{"pointer", v.pointer.empty() ? "/" : v.pointer},
                     {"reason", v.reason}});
    }
    return arr;
  };
  return nlohmann::json{{"first", list(first)}, {"second", list(second)}}
      .dump(2);
}

}  // namespace

int cmd_diarize(const DiarizeArgs& args, std::ostream& out,
                std::ostream& err) {
  if (args.model_path.empty() == !args.use_llm) {
    err << "diarize needs exactly one of --model or --llm\n";
    return kExitUsage;
  }
  std::string raw_text;
  try {
    raw_text = read_file(args.input_path);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  transcript::RawTranscript raw{raw_text,
                                fs::path(args.input_path).stem().string()};

  transcript::DiarizedTranscript result({{transcript::SpeakerLabel::clinician,
                                          "placeholder"}});
  try {
    if (args.use_llm) {
      gateway::BackendConfig config =
          gateway::load_backend_config(args.backend_config_path);
      gateway::Gateway backend(config, make_pipeline_clock(config));
      result = classify::classify_with_llm(backend, raw);
      maybe_write_ledger(backend, args.ledger_path);
    } else {
      classify::ClassifierModel model = classify::load_model(args.model_path);
      result = classify::classify_transcript(model, raw);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io_error) {
      err << e.what() << '\n';
      return kExitIo;
    }
    err << e.what() << '\n';
    return kExitClassify;
  }

  try {
    write_file(args.output_path, transcript::render_diarized(result) + "\n");
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitIo;
  }

  if (!args.gold_path.empty()) {
    try {
      auto gold = transcript::parse_diarized(read_file(args.gold_path));
      auto gold_labels = segment_labels(gold);
      auto predicted_labels = segment_labels(result);
      if (gold_labels.size() != predicted_labels.size()) {
        err << "gold has " << gold_labels.size() << " segments, prediction "
            << predicted_labels.size() << '\n';
        return kExitClassify;
      }
      print_metric_block(out, evaluate::confusion(predicted_labels,
                                                  gold_labels));
    } catch (const Error& e) {
      err << e.what() << '\n';
      return e.code() == ErrorCode::io_error ? kExitIo : kExitClassify;
    }
  }
  return kExitOk;
}

int cmd_generate(const GenerateArgs& args, std::ostream& out,
                 std::ostream& err) {
  auto kind = notes::kind_from_name(args.kind);
  auto strategy = prompts::strategy_from_name(args.strategy);
  if (!kind || !strategy) {
    err << "unknown kind or strategy\n";
    return kExitUsage;
  }
  if (args.store_dir.empty() != args.patient_id.empty()) {
    err << "--store and --patient go together\n";
    return kExitUsage;
  }

  try {
    transcript::DiarizedTranscript t = load_transcript(args.transcript_path);
    gateway::BackendConfig config =
        gateway::load_backend_config(args.backend_config_path);

    std::int64_t last_ts = -1;
    std::optional<refine::VersionStore> store;
    if (!args.store_dir.empty()) {
      store.emplace(args.store_dir);
      last_ts = last_commit_ms(*store, args.patient_id);
    }
    gateway::Gateway backend(config, make_pipeline_clock(config, last_ts));

    prompts::PromptTemplate tmpl = prompts::default_template(*strategy, *kind);
    gateway::NoteResult result;
    try {
      result = backend.complete_note(tmpl, t, *kind);
    } catch (const InvalidNoteAfterRepairError& e) {
      maybe_write_ledger(backend, args.ledger_path);
      err << violations_as_json(e.first_violations(), e.second_violations())
          << '\n';
      return kExitInvalidNote;
    }

    const std::string note_bytes = result.note.dump(2) + "\n";
    write_file(args.output_path, note_bytes);

    const std::string transcript_hash =
        sha256_hex(transcript::render_diarized(t));
    nlohmann::json provenance = {
        {"strategy", result.provenance.strategy},
        {"request_ids", result.provenance.request_ids},
        {"content_hashes", result.provenance.content_hashes},
        {"note_sha256", sha256_hex(note_bytes)},
        {"source_transcript_hash", transcript_hash},
    };
    write_file(args.output_path + ".provenance.json",
               provenance.dump(2) + "\n");

    if (store) {
      refine::VersionProvenance vp;
      vp.mode = refine::ProvenanceMode::initial;
      vp.request_ids = result.provenance.request_ids;
      vp.source_transcript_hash = transcript_hash;
      refine::NoteVersion v =
          store->commit_version(args.patient_id, result.note, *kind,
                                std::move(vp), backend.clock());
      out << "version " << v.version_no << ' ' << v.self_hash << '\n';
    }
    maybe_write_ledger(backend, args.ledger_path);
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::io_error:
      case ErrorCode::empty_transcript:
      case ErrorCode::malformed_tag:
      case ErrorCode::leading_text_before_tag:
      case ErrorCode::invalid_transcript:
      case ErrorCode::schema_violation:
      case ErrorCode::empty_input:
      case ErrorCode::malformed_json:
        return kExitIo;
      case ErrorCode::validation_failed:
      case ErrorCode::clock_skew:
        return kExitCommit;
      default:
        return kExitInvalidNote;
    }
  }
  return kExitOk;
}

int cmd_refine(const RefineArgs& args, std::ostream& out, std::ostream& err) {
  if (args.mode != "conditional" && args.mode != "two-step") {
    err << "--mode must be conditional or two-step\n";
    return kExitUsage;
  }
  try {
    transcript::DiarizedTranscript t = load_transcript(args.encounter_path);
    refine::EncounterData encounter{std::move(t), {}, 0};
    for (const std::string& doc_path : args.document_paths) {
      encounter.documents.push_back(read_file(doc_path));
    }

    gateway::BackendConfig config =
        gateway::load_backend_config(args.backend_config_path);
    refine::VersionStore store(args.store_dir);
    gateway::Gateway backend(
        config,
        make_pipeline_clock(config, last_commit_ms(store, args.patient_id)));

    refine::NoteVersion version =
        store.latest(args.patient_id);  // UnknownPatient surfaces here
    encounter.received_at_ms = backend.clock().now_ms();

    refine::NoteVersion committed = version;  // overwritten below
    if (args.mode == "conditional") {
      committed =
          refine::conditional_update(store, args.patient_id, encounter,
                                     backend);
    } else {
      refine::RelevanceSummary summary =
          refine::extract_relevant(encounter, backend, version.kind);
      committed = refine::integrate(store, args.patient_id, summary, backend);
    }
    maybe_write_ledger(backend, args.ledger_path);
    out << "version " << committed.version_no << ' ' << committed.self_hash
        << '\n';
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::io_error ? kExitIo : kExitCommit;
  }
  return kExitOk;
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::is_directory(args.candidates_dir) ||
        !fs::is_directory(args.references_dir)) {
      err << "candidates and references must be directories\n";
      return kExitIo;
    }

    std::map<std::string, nlohmann::json> references;
    for (const auto& entry : fs::directory_iterator(args.references_dir)) {
      if (entry.path().extension() != ".json") continue;
      references[entry.path().stem().string()] =
          nlohmann::json::parse(read_file(entry.path().string()));
    }

    struct Candidate {
      std::string sample_id;
      std::string model_id;
      nlohmann::json note;
    };
    std::vector<Candidate> candidates;
    std::vector<std::string> unmatched;
    std::set<std::string> matched_references;

    std::vector<fs::path> candidate_paths;
    for (const auto& entry : fs::directory_iterator(args.candidates_dir)) {
      if (entry.path().extension() == ".json") {
        candidate_paths.push_back(entry.path());
      }
    }
    std::sort(candidate_paths.begin(), candidate_paths.end());

    for (const fs::path& path : candidate_paths) {
      const std::string stem = path.stem().string();
      auto sep = stem.rfind("__");
      if (sep == std::string::npos || sep == 0 || sep + 2 >= stem.size()) {
        err << "candidate file name must be <sample_id>__<model_id>.json: "
            << path.filename().string() << '\n';
        return kExitIo;
      }
      Candidate c;
      c.sample_id = stem.substr(0, sep);
      c.model_id = stem.substr(sep + 2);
      c.note = nlohmann::json::parse(read_file(path.string()));
      if (references.find(c.sample_id) == references.end()) {
        unmatched.push_back(c.sample_id);
      } else {
        matched_references.insert(c.sample_id);
      }
      candidates.push_back(std::move(c));
    }
    for (const auto& [sample_id, note] : references) {
      if (matched_references.find(sample_id) == matched_references.end()) {
        unmatched.push_back(sample_id);
      }
    }
    if (!unmatched.empty()) {
      std::sort(unmatched.begin(), unmatched.end());
      unmatched.erase(std::unique(unmatched.begin(), unmatched.end()),
                      unmatched.end());
      err << "unmatched sample ids:";
      for (const std::string& id : unmatched) err << ' ' << id;
      err << '\n';
      return kExitUnmatched;
    }
    if (candidates.empty()) {
      err << "no candidate notes found\n";
      return kExitIo;
    }

    std::vector<evaluate::CorpusSample> samples;
    for (const Candidate& c : candidates) {
      const nlohmann::json& reference = references[c.sample_id];
      auto kind = notes::kind_of(c.note);
      auto ref_kind = notes::kind_of(reference);
      if (!kind || !ref_kind || *kind != *ref_kind) {
        err << "sample " << c.sample_id
            << ": candidate and reference kinds do not match\n";
        return kExitIo;
      }
      if (!notes::validate_note(c.note, *kind).ok() ||
          !notes::validate_note(reference, *kind).ok()) {
        err << "sample " << c.sample_id << ": note fails schema validation\n";
        return kExitIo;
      }
      samples.push_back({notes::render_note_text(c.note, *kind),
                         notes::render_note_text(reference, *kind),
                         c.sample_id, c.model_id, notes::kind_name(*kind)});
    }

    evaluate::EvaluationReport report = evaluate::evaluate_corpus(samples);
    std::ostringstream rows;
    evaluate::write_report_csv(report, rows);
    write_file(args.report_path, rows.str());

    std::string aggregates_path = args.aggregates_path;
    if (aggregates_path.empty()) {
      aggregates_path = args.report_path;
      if (aggregates_path.size() > 4 &&
          aggregates_path.substr(aggregates_path.size() - 4) == ".csv") {
        aggregates_path.resize(aggregates_path.size() - 4);
      }
      aggregates_path += ".aggregates.csv";
    }
    std::ostringstream aggregates;
    evaluate::write_aggregates_csv(report, aggregates);
    write_file(aggregates_path, aggregates.str());

    out << report.rows.size() << " rows -> " << args.report_path << '\n';
  } catch (const nlohmann::json::parse_error& e) {
    err << "note file is not valid JSON: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_history(const HistoryArgs& args, std::ostream& out,
                std::ostream& err) {
  try {
    refine::VersionStore store(args.store_dir);
    if (args.verify) {
      auto result = store.verify_chain(args.patient_id);
      if (!result.ok) {
        err << "broken at version " << result.broken_version_no << ": "
            << result.detail << '\n';
        return kExitBrokenChain;
      }
    }
    std::vector<refine::NoteVersion> versions = store.history(args.patient_id);
    for (const refine::NoteVersion& v : versions) {
      out << v.version_no << '\t' << v.created_at_ms << '\t'
          << refine::provenance_mode_name(v.provenance.mode) << '\t'
          << v.self_hash.substr(0, 12) << '\n';
    }
    if (args.verify) out << "chain ok\n";
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::store_corrupt ? kExitBrokenChain : kExitIo;
  }
  return kExitOk;
}

int cmd_schema(const SchemaArgs& args, std::ostream& out, std::ostream& err) {
  auto kind = notes::kind_from_name(args.kind);
  if (!kind) {
    err << "unknown kind " << args.kind << '\n';
    return kExitUsage;
  }
  try {
    write_file(args.output_path, notes::schema_for(*kind).dump(2) + "\n");
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  out << "schema written to " << args.output_path << '\n';
  return kExitOk;
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  if (args.corpus_paths.empty()) {
    err << "train needs at least one tagged transcript\n";
    return kExitUsage;
  }
  try {
    // per-segment examples labeled by their utterance's speaker
    std::vector<std::pair<transcript::SpeakerLabel, std::string>> corpus;
    for (const std::string& path : args.corpus_paths) {
      transcript::DiarizedTranscript t = load_transcript(path);
      for (const transcript::Utterance& u : t.utterances()) {
        for (auto& segment :
             transcript::segment_utterances({u.text, t.source_id()})) {
          corpus.emplace_back(u.speaker, std::move(segment));
        }
      }
    }
    classify::TrainingConfig cfg;
    cfg.learning_rate = args.learning_rate;
    cfg.epochs = static_cast<std::size_t>(args.epochs);
    cfg.l2 = args.l2;
    cfg.seed = static_cast<std::uint64_t>(args.seed);
    classify::ClassifierModel model =
        classify::train_on_utterances(corpus, cfg);
    classify::save_model(model, args.output_path);
    out << corpus.size() << " segments, " << model.vocabulary.size()
        << " terms, final loss " << format6(model.training_meta.final_loss)
        << '\n';
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::io_error ? kExitIo : kExitClassify;
  }
  return kExitOk;
}

int cmd_redact_check(const RedactArgs& args, std::ostream& out,
                     std::ostream& err) {
  std::string text;
  try {
    text = read_file(args.note_path);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  std::vector<notes::PiiFinding> findings = notes::scan_pii(text);
  for (const notes::PiiFinding& finding : findings) {
    out << notes::pii_category_name(finding.category) << " [" << finding.begin
        << ',' << finding.end << "): " << finding.excerpt << '\n';
  }
  if (findings.empty()) {
    out << "no findings\n";
    return kExitOk;
  }
  return kExitFindings;
}

}  // namespace clinscribe::cli
