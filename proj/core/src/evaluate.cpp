#include "clinscribe/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <ostream>

namespace clinscribe::evaluate {

namespace {

std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ConfusionMatrix confusion(
    const std::vector<transcript::SpeakerLabel>& predictions,
    const std::vector<transcript::SpeakerLabel>& golds) {
  if (predictions.size() != golds.size()) {
    throw Error(ErrorCode::length_mismatch,
                std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(golds.size()) + " golds");
  }
  if (predictions.empty()) {
    throw Error(ErrorCode::empty_input, "no predictions to score");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bool pred_patient = predictions[i] == transcript::SpeakerLabel::patient;
    bool gold_patient = golds[i] == transcript::SpeakerLabel::patient;
    if (pred_patient && gold_patient) ++cm.tp;
    else if (pred_patient && !gold_patient) ++cm.fp;
    else if (!pred_patient && gold_patient) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm) {
  PrecisionRecallF1 out;
  if (cm.tp + cm.fp > 0) {
    out.precision =
        static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn > 0) {
    out.recall =
        static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  }
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

RougeScore rouge1_f1(std::string_view candidate, std::string_view reference) {
  RougeScore score;
  std::vector<std::string> cand = tokenize(candidate);
  std::vector<std::string> ref = tokenize(reference);
  score.candidate_unigrams = cand.size();
  score.reference_unigrams = ref.size();
  if (cand.empty() || ref.empty()) return score;

  std::map<std::string, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];

  std::map<std::string, std::size_t> cand_counts;
  for (const auto& t : cand) ++cand_counts[t];

  std::size_t overlap = 0;
  for (const auto& [token, count] : cand_counts) {
    auto it = ref_counts.find(token);
    if (it != ref_counts.end()) {
      overlap += std::min(count, it->second);
    }
  }
  score.overlap = overlap;
  score.precision =
      static_cast<double>(overlap) / static_cast<double>(cand.size());
  score.recall = static_cast<double>(overlap) / static_cast<double>(ref.size());
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall /
               (score.precision + score.recall);
  }
  return score;
}

EvaluationReport evaluate_corpus(const std::vector<CorpusSample>& samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::empty_corpus, "no samples to evaluate");
  }
  EvaluationReport report;
  report.rows.reserve(samples.size());
  for (const CorpusSample& s : samples) {
    RougeScore score = rouge1_f1(s.candidate_text, s.reference_text);
    report.rows.push_back({s.sample_id, s.kind, s.model_id, score.f1});
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              if (a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
              if (a.model_id != b.model_id) return a.model_id < b.model_id;
              return a.kind < b.kind;
            });

  std::map<std::string, std::vector<double>> by_model;
  for (const ReportRow& row : report.rows) {
    by_model[row.model_id].push_back(row.rouge1_f1);
  }
  for (const auto& [model_id, scores] : by_model) {
    ModelAggregate agg;
    agg.model_id = model_id;
    agg.min = scores.front();
    agg.max = scores.front();
    double sum = 0.0;
    for (double v : scores) {
      sum += v;
      agg.min = std::min(agg.min, v);
      agg.max = std::max(agg.max, v);
    }
    agg.mean = sum / static_cast<double>(scores.size());
    report.aggregates.push_back(agg);
  }
  return report;
}

void write_report_csv(const EvaluationReport& report, std::ostream& out) {
  out << "sample_id,kind,model_id,rouge1_f1\n";
  for (const ReportRow& row : report.rows) {
    out << row.sample_id << ',' << row.kind << ',' << row.model_id << ','
        << format6(row.rouge1_f1) << '\n';
  }
}

void write_aggregates_csv(const EvaluationReport& report, std::ostream& out) {
  out << "model_id,mean,min,max\n";
  for (const ModelAggregate& agg : report.aggregates) {
    out << agg.model_id << ',' << format6(agg.mean) << ',' << format6(agg.min)
        << ',' << format6(agg.max) << '\n';
  }
}

}  // namespace clinscribe::evaluate
