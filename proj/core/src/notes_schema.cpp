#include "clinscribe/notes.hpp"

namespace clinscribe::notes {

namespace {

nlohmann::json string_schema(std::size_t min_length = 0) {
  nlohmann::json s = {{"type", "string"}};
  if (min_length > 0) s["minLength"] = min_length;
  return s;
}

nlohmann::json object_schema(nlohmann::json properties,
                             std::vector<std::string> required) {
  return {
      {"type", "object"},
      {"properties", std::move(properties)},
      {"required", std::move(required)},
      {"additionalProperties", false},
  };
}

nlohmann::json symptom_schema() {
  return object_schema(
      {
          {"description", string_schema(1)},
          {"onset", string_schema()},
          {"frequency", string_schema()},
          {"ascendance", string_schema()},
          {"intensity", string_schema()},
          {"duration", string_schema()},
          {"quote", string_schema(1)},
      },
      {"description", "onset", "frequency", "ascendance", "intensity",
       "duration", "quote"});
}

nlohmann::json interventions_schema() {
  return object_schema(
      {
          {"approach", string_schema()},
          {"interventions",
           {{"type", "array"}, {"items", string_schema()}}},
          {"rationale", string_schema()},
      },
      {"approach", "interventions", "rationale"});
}

nlohmann::json progress_schema() {
  return object_schema(
      {
          {"responseToTreatment", string_schema()},
          {"examples", string_schema()},
          {"progressQuote", string_schema(1)},
          {"challenges", string_schema()},
          {"therapistObservations", string_schema()},
          {"therapeuticAlliance", string_schema()},
      },
      {"responseToTreatment", "examples", "progressQuote", "challenges",
       "therapistObservations", "therapeuticAlliance"});
}

nlohmann::json plan_schema() {
  return object_schema(
      {
          {"homework", string_schema()},
          {"futureSession", string_schema()},
          {"continuedTreatment", string_schema()},
          {"coordinationOfCare", string_schema()},
      },
      {"homework", "futureSession", "continuedTreatment",
       "coordinationOfCare"});
}

nlohmann::json subjective_schema() {
  nlohmann::json s = object_schema(
      {
          {"chiefComplaint", string_schema(1)},
          {"impairments", string_schema()},
          {"symptoms",
           {{"type", "array"}, {"items", symptom_schema()}}},
          {"medicalHistory", string_schema()},
      },
      {"chiefComplaint", "impairments", "symptoms", "medicalHistory"});
  s["description"] =
      "Subjective complaints, symptoms, and history reported by the client";
  return s;
}

nlohmann::json objective_schema() {
  return object_schema(
      {
          {"clinicalAssessment",
           object_schema(
               {
                   {"tool", string_schema()},
                   {"results", string_schema()},
                   {"status", string_schema()},
               },
               {"tool", "results", "status"})},
          {"riskAssessment", string_schema()},
          {"interventions", interventions_schema()},
      },
      {"clinicalAssessment", "riskAssessment", "interventions"});
}

nlohmann::json behavior_schema() {
  return object_schema(
      {
          {"symptoms", {{"type", "array"}, {"items", symptom_schema()}}},
          {"therapistObservations", string_schema()},
          {"interventions", interventions_schema()},
      },
      {"symptoms", "therapistObservations", "interventions"});
}

std::string join_pointer(const std::string& base, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped.push_back(c);
  }
  return base + "/" + escaped;
}

const char* json_type_name(const nlohmann::json& value) {
  if (value.is_object()) return "object";
  if (value.is_array()) return "array";
  if (value.is_string()) return "string";
  if (value.is_boolean()) return "boolean";
  if (value.is_number_integer()) return "integer";
  if (value.is_number()) return "number";
  if (value.is_null()) return "null";
  return "unknown";
}

void validate_node(const nlohmann::json& schema, const nlohmann::json& doc,
                   const std::string& pointer,
                   std::vector<Violation>& violations) {
  if (schema.contains("type")) {
    const std::string expected = schema["type"].get<std::string>();
    bool ok = (expected == "object" && doc.is_object()) ||
              (expected == "array" && doc.is_array()) ||
              (expected == "string" && doc.is_string()) ||
              (expected == "integer" && doc.is_number_integer()) ||
              (expected == "number" && doc.is_number()) ||
              (expected == "boolean" && doc.is_boolean());
    if (!ok) {
      violations.push_back({pointer.empty() ? "/" : pointer,
                            std::string("type-mismatch: expected ") + expected +
                                ", got " + json_type_name(doc)});
      return;  // nothing sensible to check below a type mismatch
    }
  }

  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        const std::string name = key.get<std::string>();
        if (!doc.contains(name)) {
          violations.push_back({join_pointer(pointer, name),
                                "required-missing"});
        }
      }
    }
    const nlohmann::json* properties = nullptr;
    if (schema.contains("properties")) properties = &schema["properties"];
    bool closed = schema.value("additionalProperties", true) == false;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const nlohmann::json* prop_schema = nullptr;
      if (properties && properties->contains(it.key())) {
        prop_schema = &(*properties)[it.key()];
      }
      if (prop_schema) {
        validate_node(*prop_schema, it.value(), join_pointer(pointer, it.key()),
                      violations);
      } else if (closed) {
        violations.push_back(
            {join_pointer(pointer, it.key()), "unexpected-property"});
      }
    }
  } else if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      validate_node(schema["items"], doc[i],
                    pointer + "/" + std::to_string(i), violations);
    }
  } else if (doc.is_string() && schema.contains("minLength")) {
    const auto min_length = schema["minLength"].get<std::size_t>();
    if (doc.get<std::string>().size() < min_length) {
      violations.push_back(
          {pointer.empty() ? "/" : pointer,
           "too-short: minLength " + std::to_string(min_length)});
    }
  }

  if (schema.contains("enum")) {
    bool matched = false;
    for (const auto& allowed : schema["enum"]) {
      if (allowed == doc) {
        matched = true;
        break;
      }
    }
    if (!matched) {
      violations.push_back(
          {pointer.empty() ? "/" : pointer, "enum-mismatch"});
    }
  }
}

}  // namespace

nlohmann::json schema_for(NoteKind kind) {
  nlohmann::json schema;
  schema["$schema"] = "http://json-schema.org/draft-07/schema#";
  schema["type"] = "object";
  schema["additionalProperties"] = false;
  if (kind == NoteKind::soap) {
    schema["title"] = "SOAP clinical note";
    schema["required"] = {"subjective", "objective", "assessment", "plan"};
    schema["properties"] = {
        {"subjective", subjective_schema()},
        {"objective", objective_schema()},
        {"assessment", progress_schema()},
        {"plan", plan_schema()},
    };
  } else {
    schema["title"] = "BIRP clinical note";
    schema["required"] = {"behavior", "response", "plan"};
    schema["properties"] = {
        {"behavior", behavior_schema()},
        {"response", progress_schema()},
        {"plan", plan_schema()},
    };
  }
  return schema;
}

std::vector<Violation> validate_against_schema(const nlohmann::json& schema,
                                               const nlohmann::json& doc) {
  std::vector<Violation> violations;
  validate_node(schema, doc, "", violations);
  return violations;
}

ValidationResult validate_note(const nlohmann::json& doc, NoteKind kind) {
  return ValidationResult{validate_against_schema(schema_for(kind), doc)};
}

ValidationResult validate_note(const std::string& text, NoteKind kind) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_json,
                std::string("note is not valid JSON: ") + e.what());
  }
  return validate_note(doc, kind);
}

}  // namespace clinscribe::notes
