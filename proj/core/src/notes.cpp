#include "clinscribe/notes.hpp"

#include <sstream>

namespace clinscribe::notes {

namespace {

nlohmann::json symptom_to_json(const SymptomEntry& s) {
  return {
      {"description", s.description}, {"onset", s.onset},
      {"frequency", s.frequency},     {"ascendance", s.ascendance},
      {"intensity", s.intensity},     {"duration", s.duration},
      {"quote", s.quote},
  };
}

SymptomEntry symptom_from_json(const nlohmann::json& doc) {
  SymptomEntry s;
  s.description = doc.at("description").get<std::string>();
  s.onset = doc.at("onset").get<std::string>();
  s.frequency = doc.at("frequency").get<std::string>();
  s.ascendance = doc.at("ascendance").get<std::string>();
  s.intensity = doc.at("intensity").get<std::string>();
  s.duration = doc.at("duration").get<std::string>();
  s.quote = doc.at("quote").get<std::string>();
  return s;
}

nlohmann::json interventions_to_json(const InterventionBlock& block) {
  return {
      {"approach", block.approach},
      {"interventions", block.interventions},
      {"rationale", block.rationale},
  };
}

InterventionBlock interventions_from_json(const nlohmann::json& doc) {
  InterventionBlock block;
  block.approach = doc.at("approach").get<std::string>();
  block.interventions =
      doc.at("interventions").get<std::vector<std::string>>();
  block.rationale = doc.at("rationale").get<std::string>();
  return block;
}

nlohmann::json progress_to_json(const ProgressBlock& block) {
  return {
      {"responseToTreatment", block.response_to_treatment},
      {"examples", block.examples},
      {"progressQuote", block.progress_quote},
      {"challenges", block.challenges},
      {"therapistObservations", block.therapist_observations},
      {"therapeuticAlliance", block.therapeutic_alliance},
  };
}

ProgressBlock progress_from_json(const nlohmann::json& doc) {
  ProgressBlock block;
  block.response_to_treatment =
      doc.at("responseToTreatment").get<std::string>();
  block.examples = doc.at("examples").get<std::string>();
  block.progress_quote = doc.at("progressQuote").get<std::string>();
  block.challenges = doc.at("challenges").get<std::string>();
  block.therapist_observations =
      doc.at("therapistObservations").get<std::string>();
  block.therapeutic_alliance =
      doc.at("therapeuticAlliance").get<std::string>();
  return block;
}

nlohmann::json plan_to_json(const PlanSection& plan) {
  return {
      {"homework", plan.homework},
      {"futureSession", plan.future_session},
      {"continuedTreatment", plan.continued_treatment},
      {"coordinationOfCare", plan.coordination_of_care},
  };
}

PlanSection plan_from_json(const nlohmann::json& doc) {
  PlanSection plan;
  plan.homework = doc.at("homework").get<std::string>();
  plan.future_session = doc.at("futureSession").get<std::string>();
  plan.continued_treatment = doc.at("continuedTreatment").get<std::string>();
  plan.coordination_of_care =
      doc.at("coordinationOfCare").get<std::string>();
  return plan;
}

void render_symptoms(std::ostringstream& out,
                     const std::vector<SymptomEntry>& symptoms) {
  for (std::size_t i = 0; i < symptoms.size(); ++i) {
    const SymptomEntry& s = symptoms[i];
    out << "Symptom " << (i + 1) << ":\n";
    out << "  Description: " << s.description << '\n';
    out << "  Onset: " << s.onset << '\n';
    out << "  Frequency: " << s.frequency << '\n';
    out << "  Ascendance: " << s.ascendance << '\n';
    out << "  Intensity: " << s.intensity << '\n';
    out << "  Duration: " << s.duration << '\n';
    out << "  Quote: " << s.quote << '\n';
  }
}

void render_interventions(std::ostringstream& out,
                          const InterventionBlock& block) {
  out << "Therapeutic Approach: " << block.approach << '\n';
  for (const std::string& item : block.interventions) {
    out << "Intervention: " << item << '\n';
  }
  out << "Rationale: " << block.rationale << '\n';
}

void render_progress(std::ostringstream& out, const ProgressBlock& block) {
  out << "Response to Treatment: " << block.response_to_treatment << '\n';
  out << "Specific Examples: " << block.examples << '\n';
  out << "Quote (Progress): " << block.progress_quote << '\n';
  out << "Challenges to Progress: " << block.challenges << '\n';
  out << "Therapist Observations: " << block.therapist_observations << '\n';
  out << "Therapeutic Alliance: " << block.therapeutic_alliance << '\n';
}

void render_plan(std::ostringstream& out, const PlanSection& plan) {
  out << "Homework: " << plan.homework << '\n';
  out << "Plan for Future Session: " << plan.future_session << '\n';
  out << "Continued Treatment: " << plan.continued_treatment << '\n';
  out << "Coordination of Care: " << plan.coordination_of_care << '\n';
}

}  // namespace

const char* kind_name(NoteKind kind) {
  return kind == NoteKind::soap ? "soap" : "birp";
}

std::optional<NoteKind> kind_from_name(const std::string& name) {
  if (name == "soap") return NoteKind::soap;
  if (name == "birp") return NoteKind::birp;
  return std::nullopt;
}

std::optional<NoteKind> kind_of(const nlohmann::json& doc) {
  if (!doc.is_object()) return std::nullopt;
  if (doc.contains("subjective") && doc.contains("objective") &&
      doc.contains("assessment") && doc.contains("plan")) {
    return NoteKind::soap;
  }
  if (doc.contains("behavior") && doc.contains("response") &&
      doc.contains("plan")) {
    return NoteKind::birp;
  }
  return std::nullopt;
}

nlohmann::json to_json(const SoapNote& note) {
  nlohmann::json symptoms = nlohmann::json::array();
  for (const SymptomEntry& s : note.subjective.symptoms) {
    symptoms.push_back(symptom_to_json(s));
  }
  return {
      {"subjective",
       {
           {"chiefComplaint", note.subjective.chief_complaint},
           {"impairments", note.subjective.impairments},
           {"symptoms", symptoms},
           {"medicalHistory", note.subjective.medical_history},
       }},
      {"objective",
       {
           {"clinicalAssessment",
            {
                {"tool", note.objective.clinical_assessment.tool},
                {"results", note.objective.clinical_assessment.results},
                {"status", note.objective.clinical_assessment.status},
            }},
           {"riskAssessment", note.objective.risk_assessment},
           {"interventions", interventions_to_json(note.objective.interventions)},
       }},
      {"assessment", progress_to_json(note.assessment)},
      {"plan", plan_to_json(note.plan)},
  };
}

nlohmann::json to_json(const BirpNote& note) {
  nlohmann::json symptoms = nlohmann::json::array();
  for (const SymptomEntry& s : note.behavior.symptoms) {
    symptoms.push_back(symptom_to_json(s));
  }
  return {
      {"behavior",
       {
           {"symptoms", symptoms},
           {"therapistObservations", note.behavior.therapist_observations},
           {"interventions", interventions_to_json(note.behavior.interventions)},
       }},
      {"response", progress_to_json(note.response)},
      {"plan", plan_to_json(note.plan)},
  };
}

SoapNote soap_from_json(const nlohmann::json& doc) {
  SoapNote note;
  const auto& subj = doc.at("subjective");
  note.subjective.chief_complaint = subj.at("chiefComplaint").get<std::string>();
  note.subjective.impairments = subj.at("impairments").get<std::string>();
  note.subjective.medical_history =
      subj.at("medicalHistory").get<std::string>();
  for (const auto& s : subj.at("symptoms")) {
    note.subjective.symptoms.push_back(symptom_from_json(s));
  }
  const auto& obj = doc.at("objective");
  const auto& ca = obj.at("clinicalAssessment");
  note.objective.clinical_assessment.tool = ca.at("tool").get<std::string>();
  note.objective.clinical_assessment.results =
      ca.at("results").get<std::string>();
  note.objective.clinical_assessment.status =
      ca.at("status").get<std::string>();
  note.objective.risk_assessment = obj.at("riskAssessment").get<std::string>();
  note.objective.interventions =
      interventions_from_json(obj.at("interventions"));
  note.assessment = progress_from_json(doc.at("assessment"));
  note.plan = plan_from_json(doc.at("plan"));
  return note;
}

BirpNote birp_from_json(const nlohmann::json& doc) {
  BirpNote note;
  const auto& behavior = doc.at("behavior");
  for (const auto& s : behavior.at("symptoms")) {
    note.behavior.symptoms.push_back(symptom_from_json(s));
  }
  note.behavior.therapist_observations =
      behavior.at("therapistObservations").get<std::string>();
  note.behavior.interventions =
      interventions_from_json(behavior.at("interventions"));
  note.response = progress_from_json(doc.at("response"));
  note.plan = plan_from_json(doc.at("plan"));
  return note;
}

std::string render_note_text(const SoapNote& note) {
  std::ostringstream out;
  out << "SUBJECTIVE\n";
  out << "Chief Complaint: " << note.subjective.chief_complaint << '\n';
  out << "Impairments and Challenges: " << note.subjective.impairments << '\n';
  out << "Medical History: " << note.subjective.medical_history << '\n';
  render_symptoms(out, note.subjective.symptoms);
  out << "OBJECTIVE\n";
  out << "Assessment Tool: " << note.objective.clinical_assessment.tool << '\n';
  out << "Assessment Results: " << note.objective.clinical_assessment.results
      << '\n';
  out << "Assessment Status: " << note.objective.clinical_assessment.status
      << '\n';
  out << "Risk Assessment: " << note.objective.risk_assessment << '\n';
  render_interventions(out, note.objective.interventions);
  out << "ASSESSMENT\n";
  render_progress(out, note.assessment);
  out << "PLAN\n";
  render_plan(out, note.plan);
  return out.str();
}

std::string render_note_text(const BirpNote& note) {
  std::ostringstream out;
  out << "BEHAVIOR\n";
  render_symptoms(out, note.behavior.symptoms);
  out << "Therapist Observations: " << note.behavior.therapist_observations
      << '\n';
  render_interventions(out, note.behavior.interventions);
  out << "RESPONSE\n";
  render_progress(out, note.response);
  out << "PLAN\n";
  render_plan(out, note.plan);
  return out.str();
}

std::string render_note_text(const nlohmann::json& doc, NoteKind kind) {
  if (kind == NoteKind::soap) {
    return render_note_text(soap_from_json(doc));
  }
  return render_note_text(birp_from_json(doc));
}

}  // namespace clinscribe::notes
