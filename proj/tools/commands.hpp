#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clinscribe::cli {

// Exit codes, one family per failure class. Success is always 0.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;      // redact-check found PII
inline constexpr int kExitIo = 2;            // unreadable/unwritable inputs
inline constexpr int kExitClassify = 3;      // diarization failure
inline constexpr int kExitInvalidNote = 4;   // note invalid after repair
inline constexpr int kExitCommit = 5;        // refine chain/commit failure
inline constexpr int kExitUnmatched = 6;     // eval sample ids do not match
inline constexpr int kExitBrokenChain = 7;   // history --verify tamper
inline constexpr int kExitUsage = 64;

struct DiarizeArgs {
  std::string input_path;
  std::string output_path;
  std::string model_path;          // local classifier, or
  bool use_llm = false;            // backend-driven classification
  std::string backend_config_path;
  std::string gold_path;           // optional: print metrics against gold
  std::string ledger_path;         // optional: write the call ledger
};

struct GenerateArgs {
  std::string transcript_path;
  std::string output_path;
  std::string kind = "soap";
  std::string strategy = "structured";
  std::string backend_config_path;
  std::string store_dir;   // optional: commit the note as version 1
  std::string patient_id;  // required with store_dir
  std::string ledger_path;
};

struct RefineArgs {
  std::string patient_id;
  std::string encounter_path;
  std::string mode = "conditional";  // or "two-step"
  std::string store_dir;
  std::string backend_config_path;
  std::vector<std::string> document_paths;
  std::string ledger_path;
};

struct EvalArgs {
  std::string candidates_dir;   // <sample_id>__<model_id>.json
  std::string references_dir;   // <sample_id>.json
  std::string report_path;
  std::string aggregates_path;  // derived from report_path when empty
};

struct HistoryArgs {
  std::string patient_id;
  std::string store_dir;
  bool verify = false;
};

struct SchemaArgs {
  std::string kind = "soap";
  std::string output_path;
};

struct RedactArgs {
  std::string note_path;
};

struct TrainArgs {
  std::vector<std::string> corpus_paths;  // tagged transcripts, gold labels
  std::string output_path;
  double learning_rate = 0.1;
  long epochs = 200;
  double l2 = 1e-4;
  long seed = 0;
};

int cmd_diarize(const DiarizeArgs& args, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& out,
                 std::ostream& err);
int cmd_refine(const RefineArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_history(const HistoryArgs& args, std::ostream& out, std::ostream& err);
int cmd_schema(const SchemaArgs& args, std::ostream& out, std::ostream& err);
int cmd_redact_check(const RedactArgs& args, std::ostream& out,
                     std::ostream& err);
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);

}  // namespace clinscribe::cli
