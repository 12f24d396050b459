#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clinscribe/error.hpp"
#include "clinscribe/transcript.hpp"

namespace clinscribe::evaluate {

// Positive class is Patient(1) throughout.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t candidate_unigrams = 0;
  std::size_t reference_unigrams = 0;
  std::size_t overlap = 0;  // clipped unigram overlap
};

struct ReportRow {
  std::string sample_id;
  std::string kind;  // "soap" | "birp"
  std::string model_id;
  double rouge1_f1 = 0.0;
};

struct ModelAggregate {
  std::string model_id;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;             // sorted by (sample_id, model_id)
  std::vector<ModelAggregate> aggregates;  // sorted by model_id
};

struct CorpusSample {
  std::string candidate_text;  // render_note_text output
  std::string reference_text;
  std::string sample_id;
  std::string model_id;
  std::string kind;
};

ConfusionMatrix confusion(
    const std::vector<transcript::SpeakerLabel>& predictions,
    const std::vector<transcript::SpeakerLabel>& golds);

double accuracy(const ConfusionMatrix& cm);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero denominators yield 0 rather than NaN.
PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm);

// Lowercased alphanumeric word tokens; shared with the classifier features.
std::vector<std::string> tokenize(std::string_view text);

// ROUGE-1 F1 with clipped unigram counts. Either side tokenizing to
// nothing yields an all-zero score.
RougeScore rouge1_f1(std::string_view candidate, std::string_view reference);

EvaluationReport evaluate_corpus(const std::vector<CorpusSample>& samples);

// CSV emission: fixed column order, reals with 6 decimals.
void write_report_csv(const EvaluationReport& report, std::ostream& out);
void write_aggregates_csv(const EvaluationReport& report, std::ostream& out);

}  // namespace clinscribe::evaluate
