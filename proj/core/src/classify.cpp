#include "clinscribe/classify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "clinscribe/evaluate.hpp"
#include "clinscribe/gateway.hpp"
#include "clinscribe/prompts.hpp"

namespace clinscribe::classify {

namespace {

constexpr double kProbEpsilon = 1e-12;
constexpr double kTieEpsilon = 1e-12;
constexpr int kModelFormatVersion = 1;

double clamp_prob(double p) {
  return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

// Uniform in [-half_width, half_width], reproducible across platforms
// (distribution types are implementation-defined, raw engine output is not).
double seeded_uniform(std::mt19937_64& rng, double half_width) {
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
  return (2.0 * unit - 1.0) * half_width;
}

Logits model_logits(const ClassifierModel& model, const FeatureMap& features) {
  const std::size_t stride = model.weights_per_class();
  Logits logits;
  for (const auto& [index, value] : features) {
    logits.z[0] += model.weights[index] * value;
    logits.z[1] += model.weights[stride + index] * value;
  }
  return logits;
}

}  // namespace

ProbabilityPair softmax(const Logits& logits) {
  if (!std::isfinite(logits.z[0]) || !std::isfinite(logits.z[1])) {
    throw Error(ErrorCode::non_finite_input, "logits must be finite");
  }
  double m = std::max(logits.z[0], logits.z[1]);
  double e0 = std::exp(logits.z[0] - m);
  double e1 = std::exp(logits.z[1] - m);
  double sum = e0 + e1;
  return ProbabilityPair{{e0 / sum, e1 / sum}};
}

double cross_entropy(const std::vector<std::pair<int, double>>& examples) {
  if (examples.empty()) {
    throw Error(ErrorCode::empty_dataset, "no (label, probability) pairs");
  }
  double loss = 0.0;
  for (const auto& [y, p_raw] : examples) {
    double p = clamp_prob(p_raw);
    loss -= y == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

std::map<std::string, std::size_t> build_vocabulary(
    const std::vector<std::string>& texts) {
  std::map<std::string, std::size_t> vocabulary;
  for (const std::string& text : texts) {
    for (const std::string& token : evaluate::tokenize(text)) {
      vocabulary.emplace(token, 0);
    }
  }
  std::size_t index = 0;
  for (auto& [term, slot] : vocabulary) slot = index++;
  return vocabulary;
}

FeatureMap featurize(const std::string& utterance_text,
                     const std::map<std::string, std::size_t>& vocabulary) {
  FeatureMap features;
  for (const std::string& token : evaluate::tokenize(utterance_text)) {
    auto it = vocabulary.find(token);
    if (it != vocabulary.end()) {
      features[it->second] += 1.0;
    }
  }
  features[vocabulary.size()] = 1.0;  // bias
  return features;
}

double objective(const std::vector<LabeledExample>& dataset,
                 const std::vector<double>& weights,
                 std::size_t weights_per_class, double l2) {
  double loss = 0.0;
  for (const LabeledExample& example : dataset) {
    Logits logits;
    for (const auto& [index, value] : example.features) {
      logits.z[0] += weights[index] * value;
      logits.z[1] += weights[weights_per_class + index] * value;
    }
    ProbabilityPair p = softmax(logits);
    double p1 = clamp_prob(p.p[1]);
    loss -= example.label == 1 ? std::log(p1) : std::log(1.0 - p1);
  }
  for (double w : weights) loss += l2 * w * w;
  return loss;
}

std::vector<double> objective_gradient(const std::vector<LabeledExample>& dataset,
                                       const std::vector<double>& weights,
                                       std::size_t weights_per_class,
                                       double l2) {
  std::vector<double> grad(weights.size(), 0.0);
  for (const LabeledExample& example : dataset) {
    Logits logits;
    for (const auto& [index, value] : example.features) {
      logits.z[0] += weights[index] * value;
      logits.z[1] += weights[weights_per_class + index] * value;
    }
    ProbabilityPair p = softmax(logits);
    double err0 = p.p[0] - (example.label == 0 ? 1.0 : 0.0);
    double err1 = p.p[1] - (example.label == 1 ? 1.0 : 0.0);
    for (const auto& [index, value] : example.features) {
      grad[index] += err0 * value;
      grad[weights_per_class + index] += err1 * value;
    }
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    grad[i] += 2.0 * l2 * weights[i];
  }
  return grad;
}

ClassifierModel train(const std::vector<LabeledExample>& dataset,
                      const std::map<std::string, std::size_t>& vocabulary,
                      const TrainingConfig& cfg,
                      std::vector<double>* epoch_losses) {
  if (dataset.empty()) {
    throw Error(ErrorCode::empty_dataset, "no training examples");
  }
  bool has_clinician = false;
  bool has_patient = false;
  for (const LabeledExample& example : dataset) {
    (example.label == 0 ? has_clinician : has_patient) = true;
  }
  if (!has_clinician || !has_patient) {
    throw Error(ErrorCode::degenerate_dataset,
                "training data contains a single label");
  }
  if (cfg.learning_rate <= 0.0 || cfg.epochs == 0 || cfg.l2 < 0.0) {
    throw Error(ErrorCode::empty_dataset, "invalid training configuration");
  }

  ClassifierModel model;
  model.vocabulary = vocabulary;
  const std::size_t stride = model.weights_per_class();
  model.weights.assign(2 * stride, 0.0);

  std::mt19937_64 rng(cfg.seed);
  for (double& w : model.weights) w = seeded_uniform(rng, 0.005);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> grad =
        objective_gradient(dataset, model.weights, stride, cfg.l2);
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      model.weights[i] -= cfg.learning_rate * grad[i];
    }
    if (epoch_losses) {
      epoch_losses->push_back(
          objective(dataset, model.weights, stride, cfg.l2));
    }
  }

  model.training_meta = {cfg.epochs, cfg.learning_rate, cfg.l2, cfg.seed,
                         objective(dataset, model.weights, stride, cfg.l2)};
  return model;
}

ClassifierModel train_on_utterances(
    const std::vector<std::pair<SpeakerLabel, std::string>>& labeled,
    const TrainingConfig& cfg) {
  std::vector<std::string> texts;
  texts.reserve(labeled.size());
  for (const auto& [label, text] : labeled) texts.push_back(text);
  auto vocabulary = build_vocabulary(texts);

  std::vector<LabeledExample> dataset;
  dataset.reserve(labeled.size());
  for (const auto& [label, text] : labeled) {
    dataset.push_back({featurize(text, vocabulary),
                       transcript::label_code(label)});
  }
  return train(dataset, vocabulary, cfg);
}

Prediction predict(const ClassifierModel& model,
                   const std::string& utterance_text) {
  FeatureMap features = featurize(utterance_text, model.vocabulary);
  ProbabilityPair p = softmax(model_logits(model, features));
  Prediction out;
  out.probabilities = p;
  if (std::abs(p.p[0] - p.p[1]) < kTieEpsilon) {
    out.label = SpeakerLabel::clinician;
  } else {
    out.label = p.p[1] > p.p[0] ? SpeakerLabel::patient
                                : SpeakerLabel::clinician;
  }
  return out;
}

DiarizedTranscript classify_transcript(const ClassifierModel& model,
                                       const RawTranscript& raw) {
  return classify_transcript_with(
      [&model](const std::string& segment) {
        return predict(model, segment).label;
      },
      raw);
}

DiarizedTranscript classify_transcript_with(const SegmentPredictor& predictor,
                                            const RawTranscript& raw) {
  std::vector<std::pair<SpeakerLabel, std::string>> turns;
  for (std::string& segment : transcript::segment_utterances(raw)) {
    SpeakerLabel label = predictor(segment);
    turns.emplace_back(label, std::move(segment));
  }
  return DiarizedTranscript(std::move(turns), raw.source_id);
}

DiarizedTranscript classify_with_llm(gateway::Gateway& backend,
                                     const RawTranscript& raw) {
  if (raw.text.empty()) {
    throw Error(ErrorCode::empty_transcript, "transcript text is blank");
  }
  gateway::CompletionRequest request;
  request.system_text = prompts::resource_text(prompts::kResSystem);
  request.user_text = prompts::build_diarize_prompt(raw.text);

  gateway::Completion first = backend.complete(request);
  try {
    return transcript::parse_diarized(first.text, raw.source_id);
  } catch (const Error& parse_error) {
    gateway::CompletionRequest repair;
    repair.system_text = request.system_text;
    repair.user_text =
        prompts::build_diarize_repair_prompt(raw.text, parse_error.what());
    gateway::Completion second = backend.complete(repair);
    try {
      return transcript::parse_diarized(second.text, raw.source_id);
    } catch (const Error& second_error) {
      throw Error(ErrorCode::unparseable_completion,
                  std::string("completion unparseable after repair: ") +
                      second_error.what());
    }
  }
}

std::string model_to_json(const ClassifierModel& model) {
  nlohmann::json doc;
  doc["format"] = "clinscribe-classifier";
  doc["format_version"] = kModelFormatVersion;
  doc["vocabulary"] = model.vocabulary;
  doc["weights"] = model.weights;
  doc["training_meta"] = {
      {"epochs", model.training_meta.epochs},
      {"learning_rate", model.training_meta.learning_rate},
      {"l2", model.training_meta.l2},
      {"seed", model.training_meta.seed},
      {"final_loss", model.training_meta.final_loss},
  };
  return doc.dump(2);
}

ClassifierModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::model_format,
                std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "clinscribe-classifier") {
    throw Error(ErrorCode::model_format, "not a classifier model document");
  }
  if (doc.value("format_version", 0) != kModelFormatVersion) {
    throw Error(ErrorCode::model_format, "unsupported model format version");
  }
  ClassifierModel model;
  try {
    model.vocabulary =
        doc.at("vocabulary").get<std::map<std::string, std::size_t>>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    const auto& meta = doc.at("training_meta");
    model.training_meta.epochs = meta.at("epochs").get<std::size_t>();
    model.training_meta.learning_rate =
        meta.at("learning_rate").get<double>();
    model.training_meta.l2 = meta.at("l2").get<double>();
    model.training_meta.seed = meta.at("seed").get<std::uint64_t>();
    model.training_meta.final_loss = meta.at("final_loss").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::model_format,
                std::string("model document malformed: ") + e.what());
  }
  if (model.weights.size() != 2 * (model.vocabulary.size() + 1)) {
    throw Error(ErrorCode::model_format,
                "weight vector length does not match vocabulary size");
  }
  std::vector<bool> seen(model.vocabulary.size(), false);
  for (const auto& [term, index] : model.vocabulary) {
    if (index >= seen.size() || seen[index]) {
      throw Error(ErrorCode::model_format,
                  "vocabulary indices are not contiguous from 0");
    }
    seen[index] = true;
  }
  if (model.training_meta.final_loss < 0.0) {
    throw Error(ErrorCode::model_format, "final loss must be non-negative");
  }
  return model;
}

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot write " + path);
  }
  out << model_to_json(model) << '\n';
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace clinscribe::classify
