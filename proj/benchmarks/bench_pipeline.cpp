#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "clinscribe/classify.hpp"
#include "clinscribe/clock.hpp"
#include "clinscribe/digest.hpp"
#include "clinscribe/evaluate.hpp"
#include "clinscribe/notes.hpp"
#include "clinscribe/refine.hpp"
#include "clinscribe/transcript.hpp"

using namespace clinscribe;

namespace {

std::string synthetic_dialogue(std::size_t turns) {
  static const char* clinician_lines[] = {
      "How has the week been?", "Did the exercises help?",
      "What changed since last time?", "Can we look at the scores?"};
  static const char* patient_lines[] = {
      "A little better than before.", "The mornings are still hard.",
      "I slept through the night twice.", "I skipped the group again."};
  std::ostringstream out;
  for (std::size_t i = 0; i < turns; ++i) {
    out << (i ? " " : "") << '[' << (i % 2) << "] "
        << (i % 2 == 0 ? clinician_lines[i % 4] : patient_lines[i % 4]);
  }
  return out.str();
}

std::string long_note_text() {
  notes::SoapNote note;
  note.subjective.chief_complaint =
      "Persistent low mood with poor sleep and reduced concentration.";
  for (int i = 0; i < 6; ++i) {
    notes::SymptomEntry symptom;
    symptom.description = "Symptom pattern number " + std::to_string(i) +
                          " affecting daily routines.";
    note.subjective.symptoms.push_back(symptom);
  }
  return render_note_text(note);
}

void BM_ParseDiarized(benchmark::State& state) {
  std::string text = synthetic_dialogue(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(transcript::parse_diarized(text));
  }
}
BENCHMARK(BM_ParseDiarized)->Arg(16)->Arg(128);

void BM_Rouge1(benchmark::State& state) {
  std::string a = long_note_text();
  std::string b = a + " extra trailing tokens for asymmetry";
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate::rouge1_f1(a, b));
  }
}
BENCHMARK(BM_Rouge1);

void BM_TrainClassifier(benchmark::State& state) {
  auto t = transcript::parse_diarized(synthetic_dialogue(64));
  std::vector<std::pair<transcript::SpeakerLabel, std::string>> corpus;
  for (const auto& u : t.utterances()) corpus.emplace_back(u.speaker, u.text);
  classify::TrainingConfig cfg;
  cfg.epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify::train_on_utterances(corpus, cfg));
  }
}
BENCHMARK(BM_TrainClassifier)->Arg(50)->Arg(200);

void BM_Sha256Chain(benchmark::State& state) {
  std::string payload = long_note_text();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sha256_hex(payload));
  }
}
BENCHMARK(BM_Sha256Chain);

void BM_SchemaValidate(benchmark::State& state) {
  nlohmann::json note = notes::to_json(notes::SoapNote{
      {"Recurring anxiety before work.", "not reported", {}, "not reported"},
      {},
      {},
      {}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(notes::validate_note(note, notes::NoteKind::soap));
  }
}
BENCHMARK(BM_SchemaValidate);

}  // namespace

BENCHMARK_MAIN();
