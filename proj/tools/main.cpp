// clinscribe — batch pipeline for diarizing therapy transcripts, generating
// schema-validated SOAP/BIRP notes, refining them across encounters, and
// scoring the results.

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace clinscribe::cli;

  CLI::App app{"clinical note pipeline"};
  app.require_subcommand(1);

  DiarizeArgs diarize;
  auto* diarize_cmd =
      app.add_subcommand("diarize", "attribute speakers in a raw transcript");
  diarize_cmd->add_option("input", diarize.input_path, "raw transcript file")
      ->required();
  diarize_cmd->add_option("--out", diarize.output_path, "diarized output file")
      ->required();
  diarize_cmd->add_option("--model", diarize.model_path,
                          "local classifier model JSON");
  diarize_cmd->add_flag("--llm", diarize.use_llm,
                        "classify with the configured backend");
  diarize_cmd->add_option("--backend-config", diarize.backend_config_path,
                          "backend config JSON (with --llm)");
  diarize_cmd->add_option("--gold", diarize.gold_path,
                          "gold diarized file; prints metrics");
  diarize_cmd->add_option("--ledger", diarize.ledger_path,
                          "write the call ledger to this NDJSON file");

  GenerateArgs generate;
  auto* generate_cmd =
      app.add_subcommand("generate", "generate a clinical note");
  generate_cmd
      ->add_option("transcript", generate.transcript_path,
                   "diarized transcript (tagged text or NDJSON records)")
      ->required();
  generate_cmd->add_option("--out", generate.output_path, "note JSON output")
      ->required();
  generate_cmd->add_option("--kind", generate.kind, "soap or birp");
  generate_cmd->add_option("--strategy", generate.strategy,
                           "basic, zero-shot, one-shot or structured");
  generate_cmd
      ->add_option("--backend-config", generate.backend_config_path,
                   "backend config JSON")
      ->required();
  generate_cmd->add_option("--store", generate.store_dir,
                           "version store directory (commits version 1)");
  generate_cmd->add_option("--patient", generate.patient_id,
                           "patient id for the store commit");
  generate_cmd->add_option("--ledger", generate.ledger_path,
                           "write the call ledger to this NDJSON file");

  RefineArgs refine;
  auto* refine_cmd =
      app.add_subcommand("refine", "fold a new encounter into the note");
  refine_cmd
      ->add_option("encounter", refine.encounter_path,
                   "encounter transcript (tagged text or NDJSON records)")
      ->required();
  refine_cmd->add_option("--patient", refine.patient_id, "patient id")
      ->required();
  refine_cmd->add_option("--mode", refine.mode, "conditional or two-step");
  refine_cmd->add_option("--store", refine.store_dir, "version store directory")
      ->required();
  refine_cmd
      ->add_option("--backend-config", refine.backend_config_path,
                   "backend config JSON")
      ->required();
  refine_cmd->add_option("--document", refine.document_paths,
                         "supplementary text attachment (repeatable)");
  refine_cmd->add_option("--ledger", refine.ledger_path,
                         "write the call ledger to this NDJSON file");

  EvalArgs eval;
  auto* eval_cmd =
      app.add_subcommand("eval", "score candidate notes against references");
  eval_cmd
      ->add_option("--candidates", eval.candidates_dir,
                   "directory of <sample_id>__<model_id>.json notes")
      ->required();
  eval_cmd
      ->add_option("--references", eval.references_dir,
                   "directory of <sample_id>.json reference notes")
      ->required();
  eval_cmd->add_option("--report", eval.report_path, "per-sample CSV output")
      ->required();
  eval_cmd->add_option("--aggregates", eval.aggregates_path,
                       "per-model aggregates CSV (default: derived)");

  HistoryArgs history;
  auto* history_cmd =
      app.add_subcommand("history", "list a patient's note versions");
  history_cmd->add_option("--patient", history.patient_id, "patient id")
      ->required();
  history_cmd
      ->add_option("--store", history.store_dir, "version store directory")
      ->required();
  history_cmd->add_flag("--verify", history.verify,
                        "verify the hash chain; nonzero exit on tamper");

  SchemaArgs schema;
  auto* schema_cmd =
      app.add_subcommand("schema", "export the note JSON schema");
  schema_cmd->add_option("--kind", schema.kind, "soap or birp");
  schema_cmd->add_option("--out", schema.output_path, "schema output file")
      ->required();

  RedactArgs redact;
  auto* redact_cmd = app.add_subcommand(
      "redact-check", "scan a note file for PII/PHI patterns");
  redact_cmd->add_option("note", redact.note_path, "note file to scan")
      ->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand(
      "train", "fit the local speaker classifier on tagged transcripts");
  train_cmd
      ->add_option("corpus", train.corpus_paths,
                   "tagged transcript files with gold speaker labels")
      ->required();
  train_cmd->add_option("--out", train.output_path, "model JSON output")
      ->required();
  train_cmd->add_option("--learning-rate", train.learning_rate,
                        "gradient-descent step size");
  train_cmd->add_option("--epochs", train.epochs, "full-batch epochs");
  train_cmd->add_option("--l2", train.l2, "L2 regularization strength");
  train_cmd->add_option("--seed", train.seed, "weight initialization seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (diarize_cmd->parsed())
    return cmd_diarize(diarize, std::cout, std::cerr);
  if (generate_cmd->parsed())
    return cmd_generate(generate, std::cout, std::cerr);
  if (refine_cmd->parsed()) return cmd_refine(refine, std::cout, std::cerr);
  if (eval_cmd->parsed()) return cmd_eval(eval, std::cout, std::cerr);
  if (history_cmd->parsed()) return cmd_history(history, std::cout, std::cerr);
  if (schema_cmd->parsed()) return cmd_schema(schema, std::cout, std::cerr);
  if (redact_cmd->parsed())
    return cmd_redact_check(redact, std::cout, std::cerr);
  if (train_cmd->parsed()) return cmd_train(train, std::cout, std::cerr);
  return kExitUsage;
}
