// Canonical prompt wordings. These are versioned resources: any edit to a
// text must bump its version so downstream provenance hashes can be traced
// back to the wording that produced them.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clinscribe/prompts.hpp"

namespace clinscribe::prompts {

namespace {

const char* kSystemBase =
    "You are a clinical documentation assistant. You turn patient-clinician "
    "conversation transcripts into accurate, structured clinical notes. "
    "Follow the instructions in each request exactly. Never invent facts "
    "that are not supported by the provided material, and maintain patient "
    "confidentiality by avoiding the use of any personally identifiable "
    "information.";

const char* kConfidentiality =
    "patient confidentiality by avoiding the use of any personally "
    "identifiable information";

const char* kFormattingSoap =
    "A SOAP note has four sections: Subjective, Objective, Assessment, and "
    "Plan.\n"
    "Subjective: the client's chief complaint with a supporting quote, "
    "reported impairments and challenges, relevant medical history, and a "
    "list of symptoms. Each symptom records a description, onset, frequency, "
    "ascendance, intensity, duration, and a supporting quote.\n"
    "Objective: the clinical assessment (tool used, results, status), a risk "
    "assessment covering any safety concerns, and the interventions applied "
    "(therapeutic approach or modality, the specific interventions, and "
    "their rationale).\n"
    "Assessment: the client's response to treatment with specific examples "
    "and a progress quote, challenges to progress, therapist observations "
    "and reflections, and the state of the therapeutic alliance.\n"
    "Plan: homework assigned, the plan for the future session, plans for "
    "continued treatment, and any coordination of care.\n"
    "Any field without information in the transcript must contain the "
    "string \"not reported\".";

const char* kFormattingBirp =
    "A BIRP note has three printed sections: Behavior, Response, and Plan, "
    "with the interventions recorded under Behavior.\n"
    "Behavior: the list of observed or reported symptoms (each with a "
    "description, onset, frequency, ascendance, intensity, duration, and a "
    "supporting quote), therapist observations and reflections, and the "
    "interventions applied (therapeutic approach or modality, the specific "
    "interventions, and their rationale).\n"
    "Response: the client's response to treatment with specific examples "
    "and a progress quote, challenges to progress, therapist observations, "
    "and the state of the therapeutic alliance.\n"
    "Plan: homework assigned, the plan for the future session, plans for "
    "continued treatment, and any coordination of care.\n"
    "Any field without information in the transcript must contain the "
    "string \"not reported\".";

const char* kBasicSoap =
    "Based on the above transcript, please generate a SOAP note following "
    "the Subjective, Objective, Assessment, and Plan format. Include all "
    "relevant details from the conversation, and maintain patient "
    "confidentiality by avoiding the use of any personally identifiable "
    "information.";

const char* kBasicBirp =
    "Based on the above transcript, please generate a BIRP note following "
    "the Behavior, Intervention, Response, and Plan format. Include all "
    "relevant details from the conversation, and maintain patient "
    "confidentiality by avoiding the use of any personally identifiable "
    "information.";

const char* kZeroShot =
    "Based on the above transcript and the provided formatting "
    "instructions, please generate a {NOTE_TYPE} note following the "
    "specified structure and format. Ensure that all relevant information "
    "from the transcript is captured in the appropriate sections of the "
    "note. Maintain patient confidentiality by avoiding the use of any "
    "personally identifiable information.";

const char* kOneShot =
    "Based on the above examples and the provided transcript, please "
    "generate a {NOTE_TYPE} note following the specified structure and "
    "format. Ensure that all relevant information from the transcript is "
    "captured in the appropriate sections of the note, while maintaining "
    "patient confidentiality by avoiding the use of any personally "
    "identifiable information.";

const char* kStructured =
    "Based on the above transcript and the provided JSON schema, respond "
    "with a single JSON object that conforms to the schema and represents "
    "the {NOTE_TYPE} note. Output only the JSON object, with no text before "
    "or after it. Ensure that all relevant information from the transcript "
    "is captured in the appropriate fields. Maintain patient "
    "confidentiality by avoiding the use of any personally identifiable "
    "information.";

const char* kDiarize =
    "Rewrite the transcript above with a speaker tag before each "
    "utterance: [0] when the clinician is speaking and [1] when the "
    "patient is speaking. Output only the tagged transcript, starting with "
    "a tag, keeping every word of the transcript unchanged. Maintain "
    "patient confidentiality by avoiding the use of any personally "
    "identifiable information.";

const char* kDiarizeRepair =
    "The previous response could not be parsed ({ERROR}). Rewrite the "
    "transcript above again with a speaker tag before each utterance: [0] "
    "for the clinician and [1] for the patient. Output only the tagged "
    "transcript, beginning with [0] or [1], keeping every word of the "
    "transcript unchanged. Maintain patient confidentiality by avoiding "
    "the use of any personally identifiable information.";

const char* kConditional =
    "Based on the existing note and the new transcript, please generate an "
    "updated version of the {NOTE_TYPE} note that incorporates relevant "
    "information from the current encounter. Maintain the structure and "
    "format of the note, and ensure that all pertinent details from the "
    "previous note and the current encounter are accurately reflected. "
    "Respond with a single JSON object conforming to the same schema as "
    "the existing note, with no text before or after it. Maintain patient "
    "confidentiality by avoiding the use of any personally identifiable "
    "information.";

const char* kExtract =
    "Based on the provided transcript, please extract and summarize the "
    "relevant information that should be incorporated into the existing "
    "{NOTE_TYPE} note, such as new symptoms, examination findings, "
    "assessments, or treatment plans. Respond with a JSON array in which "
    "each element is an object with a \"category\" field (one of "
    "\"symptom\", \"finding\", \"assessment\", \"plan_change\") and a "
    "non-empty \"text\" field. Output only the JSON array. Maintain "
    "patient confidentiality by avoiding the use of any personally "
    "identifiable information.";

const char* kIntegrate =
    "Based on the existing note and the new information summary, please "
    "generate an updated version of the {NOTE_TYPE} note that seamlessly "
    "incorporates the new relevant details while maintaining the structure "
    "and format of the note. Respond with a single JSON object conforming "
    "to the same schema as the existing note, with no text before or after "
    "it. Maintain patient confidentiality by avoiding the use of any "
    "personally identifiable information.";

const char* kNoteRepair =
    "The previous response did not validate against the schema. The "
    "violations are listed below. Respond again with a single JSON object "
    "that corrects every violation and conforms to the schema. Output only "
    "the JSON object. Maintain patient confidentiality by avoiding the use "
    "of any personally identifiable information.";

std::vector<PromptResource> make_builtin() {
  return {
      {kResSystem, 1, kSystemBase},
      {kResConfidentiality, 1, kConfidentiality},
      {kResFormattingSoap, 1, kFormattingSoap},
      {kResFormattingBirp, 1, kFormattingBirp},
      {kResBasicSoap, 1, kBasicSoap},
      {kResBasicBirp, 1, kBasicBirp},
      {kResZeroShot, 1, kZeroShot},
      {kResOneShot, 1, kOneShot},
      {kResStructured, 1, kStructured},
      {kResDiarize, 1, kDiarize},
      {kResDiarizeRepair, 1, kDiarizeRepair},
      {kResConditional, 1, kConditional},
      {kResExtract, 1, kExtract},
      {kResIntegrate, 1, kIntegrate},
      {kResNoteRepair, 1, kNoteRepair},
  };
}

std::string file_name_for(const std::string& resource_name) {
  std::string out;
  for (char c : resource_name) {
    out += (c == '/') ? '_' : c;
  }
  return out + ".txt";
}

}  // namespace

const std::vector<PromptResource>& builtin_resources() {
  static const std::vector<PromptResource> resources = make_builtin();
  return resources;
}

const std::string& resource_text(std::string_view name) {
  for (const PromptResource& r : builtin_resources()) {
    if (r.name == name) return r.text;
  }
  throw Error(ErrorCode::invalid_template,
              "unknown prompt resource: " + std::string(name));
}

int resource_version(std::string_view name) {
  for (const PromptResource& r : builtin_resources()) {
    if (r.name == name) return r.version;
  }
  throw Error(ErrorCode::invalid_template,
              "unknown prompt resource: " + std::string(name));
}

std::string instruction_for(std::string_view resource_name,
                            notes::NoteKind kind) {
  std::string text = resource_text(resource_name);
  const std::string placeholder = "{NOTE_TYPE}";
  const std::string replacement =
      kind == notes::NoteKind::soap ? "SOAP" : "BIRP";
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

void export_resources(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["resources"] = nlohmann::json::array();
  for (const PromptResource& r : builtin_resources()) {
    const std::string file = file_name_for(r.name);
    std::ofstream out(fs::path(dir) / file, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::io_error, "cannot write prompt resource " + file);
    }
    out << r.text;
    manifest["resources"].push_back(
        {{"name", r.name}, {"version", r.version}, {"file", file}});
  }
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot write prompt manifest");
  }
  out << manifest.dump(2) << '\n';
}

std::vector<PromptResource> load_resources(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream manifest_in(fs::path(dir) / "manifest.json");
  if (!manifest_in) {
    throw Error(ErrorCode::io_error, "cannot open prompt manifest in " + dir);
  }
  nlohmann::json manifest;
  try {
    manifest_in >> manifest;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_json,
                std::string("prompt manifest is not valid JSON: ") + e.what());
  }
  if (manifest.value("format_version", 0) != 1) {
    throw Error(ErrorCode::malformed_json,
                "unsupported prompt manifest format_version");
  }
  std::vector<PromptResource> resources;
  for (const auto& entry : manifest.at("resources")) {
    PromptResource r;
    r.name = entry.at("name").get<std::string>();
    r.version = entry.at("version").get<int>();
    const std::string file = entry.at("file").get<std::string>();
    std::ifstream in(fs::path(dir) / file, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::io_error, "cannot open prompt resource " + file);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    r.text = buffer.str();
    resources.push_back(std::move(r));
  }
  return resources;
}

}  // namespace clinscribe::prompts
