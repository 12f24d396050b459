#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "clinscribe/error.hpp"
#include "clinscribe/transcript.hpp"

namespace clinscribe::gateway {
class Gateway;
}

namespace clinscribe::classify {

using transcript::DiarizedTranscript;
using transcript::RawTranscript;
using transcript::SpeakerLabel;

struct Logits {
  std::array<double, 2> z{0.0, 0.0};
};

struct ProbabilityPair {
  std::array<double, 2> p{0.5, 0.5};
};

// Numerically stable two-class softmax (max subtraction). Throws
// NonFiniteInput on NaN/inf logits.
ProbabilityPair softmax(const Logits& logits);

// Un-averaged binary cross-entropy: L = -sum(y log p + (1-y) log(1-p)),
// natural log, p clamped to [1e-12, 1 - 1e-12]. `p` is the predicted
// probability of class 1 (patient).
double cross_entropy(const std::vector<std::pair<int, double>>& examples);

// Sparse term counts over a fixed vocabulary. Feature index |vocabulary|
// is the constant bias (always 1).
using FeatureMap = std::map<std::size_t, double>;

struct LabeledExample {
  FeatureMap features;
  int label = 0;  // 0 clinician, 1 patient
};

struct TrainingConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

struct TrainingMeta {
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
};

// Bag-of-words softmax classifier over two classes. Weight layout is
// [class0 terms..., class0 bias, class1 terms..., class1 bias], so
// weights.size() == 2 * (vocabulary.size() + 1).
struct ClassifierModel {
  std::map<std::string, std::size_t> vocabulary;
  std::vector<double> weights;
  TrainingMeta training_meta;

  std::size_t weights_per_class() const { return vocabulary.size() + 1; }
};

// Vocabulary over lowercased alphanumeric word tokens, indices assigned in
// sorted term order.
std::map<std::string, std::size_t> build_vocabulary(
    const std::vector<std::string>& texts);

// Term counts restricted to the vocabulary plus the bias feature;
// out-of-vocabulary terms are dropped.
FeatureMap featurize(const std::string& utterance_text,
                     const std::map<std::string, std::size_t>& vocabulary);

// Training objective and its analytic gradient, exposed for gradient
// checking: cross-entropy sum plus l2 * ||w||^2 over all weights.
double objective(const std::vector<LabeledExample>& dataset,
                 const std::vector<double>& weights,
                 std::size_t weights_per_class, double l2);
std::vector<double> objective_gradient(const std::vector<LabeledExample>& dataset,
                                       const std::vector<double>& weights,
                                       std::size_t weights_per_class, double l2);

// Deterministic full-batch gradient descent. Both labels must be present.
// If `epoch_losses` is given it receives the objective value after each
// epoch.
ClassifierModel train(const std::vector<LabeledExample>& dataset,
                      const std::map<std::string, std::size_t>& vocabulary,
                      const TrainingConfig& cfg,
                      std::vector<double>* epoch_losses = nullptr);

// Builds vocabulary and features from labeled utterance texts, then trains.
ClassifierModel train_on_utterances(
    const std::vector<std::pair<SpeakerLabel, std::string>>& labeled,
    const TrainingConfig& cfg);

struct Prediction {
  SpeakerLabel label = SpeakerLabel::clinician;
  ProbabilityPair probabilities;
};

// Argmax of softmax(w.x); near-ties (|p0 - p1| < 1e-12) resolve to the
// clinician label.
Prediction predict(const ClassifierModel& model,
                   const std::string& utterance_text);

// Segment, predict per segment, and assemble a merged transcript.
DiarizedTranscript classify_transcript(const ClassifierModel& model,
                                       const RawTranscript& raw);

// Same pipeline with an arbitrary per-segment predictor (used by tests and
// by gold-replay tooling).
using SegmentPredictor = std::function<SpeakerLabel(const std::string&)>;
DiarizedTranscript classify_transcript_with(const SegmentPredictor& predictor,
                                            const RawTranscript& raw);

// Prompts the backend to re-emit the transcript with [0]/[1] tags and
// parses the completion; one repair attempt quoting the parser error.
DiarizedTranscript classify_with_llm(gateway::Gateway& backend,
                                     const RawTranscript& raw);

// Versioned JSON persistence. Loading validates the weight-length
// invariant and the format version.
std::string model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const std::string& text);
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace clinscribe::classify
