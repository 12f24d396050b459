#include "clinscribe/prompts.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "clinscribe/digest.hpp"
#include "clinscribe/evaluate.hpp"

namespace clinscribe::prompts {

namespace {

void check_template(const PromptTemplate& tmpl) {
  switch (tmpl.strategy) {
    case Strategy::basic:
      if (!tmpl.formatting_instructions.empty()) {
        throw Error(ErrorCode::invalid_template,
                    "basic prompts carry no formatting instructions");
      }
      break;
    case Strategy::zero_shot:
      if (tmpl.formatting_instructions.empty()) {
        throw Error(ErrorCode::invalid_template,
                    "zero-shot prompts require formatting instructions");
      }
      break;
    case Strategy::one_shot:
      if (tmpl.exemplars.empty()) {
        throw Error(ErrorCode::missing_exemplar,
                    "one-shot prompts require at least one exemplar");
      }
      break;
    case Strategy::structured:
      if (!tmpl.schema.has_value()) {
        throw Error(ErrorCode::missing_schema,
                    "structured prompts require a JSON schema");
      }
      break;
  }
  if (tmpl.strategy != Strategy::one_shot && !tmpl.exemplars.empty()) {
    throw Error(ErrorCode::invalid_template,
                "exemplars are only valid for one-shot prompts");
  }
  if (tmpl.exemplars.size() > kMaxExemplars) {
    throw Error(ErrorCode::invalid_template,
                "at most " + std::to_string(kMaxExemplars) +
                    " exemplars are supported");
  }
  if (tmpl.strategy != Strategy::structured && tmpl.schema.has_value()) {
    throw Error(ErrorCode::invalid_template,
                "a schema is only valid for structured prompts");
  }
}

}  // namespace

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::basic: return "basic";
    case Strategy::zero_shot: return "zero-shot";
    case Strategy::one_shot: return "one-shot";
    case Strategy::structured: return "structured";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "basic") return Strategy::basic;
  if (name == "zero-shot" || name == "zero_shot") return Strategy::zero_shot;
  if (name == "one-shot" || name == "one_shot") return Strategy::one_shot;
  if (name == "structured") return Strategy::structured;
  return std::nullopt;
}

PromptTemplate default_template(Strategy strategy, notes::NoteKind kind) {
  PromptTemplate tmpl;
  tmpl.strategy = strategy;
  tmpl.kind = kind;
  const char* formatting = kind == notes::NoteKind::soap ? kResFormattingSoap
                                                         : kResFormattingBirp;
  switch (strategy) {
    case Strategy::basic:
      break;
    case Strategy::zero_shot:
      tmpl.formatting_instructions = resource_text(formatting);
      break;
    case Strategy::one_shot:
      tmpl.formatting_instructions = resource_text(formatting);
      tmpl.exemplars.push_back(
          {sample_exemplar_transcript(kind), sample_exemplar_note(kind)});
      break;
    case Strategy::structured:
      tmpl.formatting_instructions = resource_text(formatting);
      tmpl.schema = notes::schema_for(kind);
      break;
  }
  return tmpl;
}

std::string prompt_content_hash(const std::string& system_text,
                                const std::string& user_text) {
  return sha256_hex(system_text + '\x1f' + user_text);
}

RenderedPrompt render(const PromptTemplate& tmpl,
                      const DiarizedTranscript& transcript) {
  check_template(tmpl);

  const std::string transcript_text = transcript::render_diarized(transcript);
  std::ostringstream user;

  if (!tmpl.formatting_instructions.empty()) {
    user << "Formatting instructions:\n"
         << tmpl.formatting_instructions << "\n\n";
  }
  if (tmpl.strategy == Strategy::one_shot) {
    for (const Exemplar& exemplar : tmpl.exemplars) {
      user << "Example transcript:\n" << exemplar.transcript_text << "\n\n";
      user << "Example note:\n" << exemplar.note.dump(2) << "\n\n";
    }
  }
  if (tmpl.strategy == Strategy::structured) {
    user << "JSON schema:\n" << tmpl.schema->dump(2) << "\n\n";
  }
  user << "Transcript:\n" << transcript_text << "\n\n";
  user << "Instructions: ";
  switch (tmpl.strategy) {
    case Strategy::basic:
      user << resource_text(tmpl.kind == notes::NoteKind::soap ? kResBasicSoap
                                                               : kResBasicBirp);
      break;
    case Strategy::zero_shot:
      user << instruction_for(kResZeroShot, tmpl.kind);
      break;
    case Strategy::one_shot:
      user << instruction_for(kResOneShot, tmpl.kind);
      break;
    case Strategy::structured:
      user << instruction_for(kResStructured, tmpl.kind);
      break;
  }

  RenderedPrompt out;
  out.system_text = resource_text(kResSystem);
  out.user_text = user.str();
  out.strategy = tmpl.strategy;
  out.content_hash = prompt_content_hash(out.system_text, out.user_text);
  return out;
}

ChainPlan build_chain(notes::NoteKind kind, ChainMode mode) {
  ChainPlan plan;
  if (mode == ChainMode::generate) {
    plan.stages.push_back({"generate",
                           default_template(Strategy::structured, kind),
                           "note",
                           {"transcript"}});
  } else {
    PromptTemplate extract;
    extract.strategy = Strategy::zero_shot;
    extract.kind = kind;
    extract.formatting_instructions = instruction_for(kResExtract, kind);
    plan.stages.push_back({"extract", extract, "summary", {"transcript"}});

    PromptTemplate integrate;
    integrate.strategy = Strategy::zero_shot;
    integrate.kind = kind;
    integrate.formatting_instructions = instruction_for(kResIntegrate, kind);
    plan.stages.push_back(
        {"integrate", integrate, "note", {"summary", "prior_note"}});
  }
  validate_plan(plan);
  return plan;
}

void validate_plan(const ChainPlan& plan) {
  if (plan.stages.empty()) {
    throw Error(ErrorCode::invalid_chain_plan, "a chain needs >= 1 stage");
  }
  std::set<std::string> available = {"transcript", "prior_note"};
  for (const ChainStage& stage : plan.stages) {
    if (stage.name.empty() || stage.output_role.empty()) {
      throw Error(ErrorCode::invalid_chain_plan,
                  "stages need a name and an output role");
    }
    for (const std::string& role : stage.input_roles) {
      if (available.find(role) == available.end()) {
        throw Error(ErrorCode::invalid_chain_plan,
                    "stage '" + stage.name + "' consumes role '" + role +
                        "' before it is produced");
      }
    }
    available.insert(stage.output_role);
  }
}

void validate_spec(const EnsembleSpec& spec) {
  if (spec.members.size() < 2) {
    throw Error(ErrorCode::invalid_template,
                "an ensemble needs at least two members");
  }
}

EnsembleChoice combine_ensemble(const std::vector<nlohmann::json>& candidates,
                                notes::NoteKind kind) {
  std::vector<std::size_t> valid_indices;
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (notes::validate_note(candidates[i], kind).ok()) {
      valid_indices.push_back(i);
      texts.push_back(notes::render_note_text(candidates[i], kind));
    }
  }
  if (valid_indices.empty()) {
    throw Error(ErrorCode::no_valid_candidates,
                "no candidate validates against the note schema");
  }

  EnsembleChoice choice;
  if (valid_indices.size() == 1) {
    choice.note = candidates[valid_indices[0]];
    choice.chosen_index = valid_indices[0];
    choice.medoid_scores = {0.0};
    choice.single_candidate = true;
    return choice;
  }

  choice.medoid_scores.assign(valid_indices.size(), 0.0);
  for (std::size_t i = 0; i < valid_indices.size(); ++i) {
    for (std::size_t j = 0; j < valid_indices.size(); ++j) {
      if (i == j) continue;
      choice.medoid_scores[i] +=
          evaluate::rouge1_f1(texts[i], texts[j]).f1;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < choice.medoid_scores.size(); ++i) {
    if (choice.medoid_scores[i] > choice.medoid_scores[best]) {
      best = i;  // strict: ties keep the earliest index
    }
  }
  choice.chosen_index = valid_indices[best];
  choice.note = candidates[choice.chosen_index];
  return choice;
}

const std::string& sample_exemplar_transcript(notes::NoteKind kind) {
  static const std::string soap =
      "[0] How have you been sleeping since our last session? [1] Not "
      "great. I keep waking up around three in the morning and my mind "
      "starts racing. [0] How often is that happening? [1] Most nights "
      "this month.";
  static const std::string birp =
      "[0] You mentioned you skipped the group activity this week. [1] I "
      "did. I could not face the crowd, so I stayed home again. [0] What "
      "went through your mind when you decided to stay? [1] That nobody "
      "would notice either way.";
  return kind == notes::NoteKind::soap ? soap : birp;
}

nlohmann::json sample_exemplar_note(notes::NoteKind kind) {
  using namespace notes;
  if (kind == NoteKind::soap) {
    SoapNote note;
    note.subjective.chief_complaint =
        "Recurrent early-morning waking with racing thoughts.";
    note.subjective.impairments =
        "Sleep disruption most nights over the past month.";
    SymptomEntry symptom;
    symptom.description = "Waking around three in the morning, unable to "
                          "return to sleep.";
    symptom.frequency = "Most nights this month.";
    symptom.quote = "I keep waking up around three in the morning and my "
                    "mind starts racing.";
    note.subjective.symptoms.push_back(symptom);
    note.objective.clinical_assessment.tool = "Clinical interview";
    note.objective.clinical_assessment.status = "Ongoing";
    note.objective.interventions.approach = "Cognitive-behavioral therapy";
    note.objective.interventions.interventions = {
        "Reviewed sleep diary entries."};
    note.assessment.response_to_treatment =
        "Engaged; reports partial benefit from the sleep routine.";
    note.plan.homework = "Continue the sleep diary.";
    return to_json(note);
  }
  BirpNote note;
  SymptomEntry symptom;
  symptom.description = "Avoidance of group activities and social contact.";
  symptom.frequency = "Weekly.";
  symptom.quote = "I could not face the crowd, so I stayed home again.";
  note.behavior.symptoms.push_back(symptom);
  note.behavior.therapist_observations =
      "Client minimizes their own visibility to others.";
  note.behavior.interventions.approach = "Behavioral activation";
  note.behavior.interventions.interventions = {
      "Explored thoughts behind the avoidance."};
  note.response.response_to_treatment =
      "Hesitant but willing to discuss the avoided activity.";
  note.plan.homework = "Attend one scheduled group activity.";
  return to_json(note);
}

std::string build_diarize_prompt(const std::string& raw_text) {
  std::ostringstream out;
  out << "Transcript:\n" << raw_text << "\n\n";
  out << "Instructions: " << resource_text(kResDiarize);
  return out.str();
}

std::string build_diarize_repair_prompt(const std::string& raw_text,
                                        const std::string& parse_error) {
  std::string instruction = resource_text(kResDiarizeRepair);
  const std::string placeholder = "{ERROR}";
  std::size_t pos = instruction.find(placeholder);
  if (pos != std::string::npos) {
    instruction.replace(pos, placeholder.size(), parse_error);
  }
  std::ostringstream out;
  out << "Transcript:\n" << raw_text << "\n\n";
  out << "Instructions: " << instruction;
  return out.str();
}

}  // namespace clinscribe::prompts
