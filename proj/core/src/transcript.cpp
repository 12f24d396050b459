#include "clinscribe/transcript.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

namespace clinscribe::transcript {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

// A tag candidate is '[' digits ']'. Returns the digits' numeric value and
// the end position, or npos if text at `pos` is not a tag candidate.
std::size_t match_tag(const std::string& s, std::size_t pos, long& value) {
  if (pos >= s.size() || s[pos] != '[') return std::string::npos;
  std::size_t i = pos + 1;
  if (i >= s.size() || std::isdigit(static_cast<unsigned char>(s[i])) == 0)
    return std::string::npos;
  long v = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    v = v * 10 + (s[i] - '0');
    if (v > 1000) v = 1000;  // clamp, only 0/1 are legal anyway
    ++i;
  }
  if (i >= s.size() || s[i] != ']') return std::string::npos;
  value = v;
  return i + 1;
}

bool contains_tag_token(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    long value = 0;
    if (match_tag(s, i, value) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

SpeakerLabel label_from_code(int code) {
  if (code == 0) return SpeakerLabel::clinician;
  if (code == 1) return SpeakerLabel::patient;
  throw Error(ErrorCode::malformed_tag,
              "speaker code " + std::to_string(code) + " outside {0,1}");
}

DiarizedTranscript::DiarizedTranscript(
    std::vector<std::pair<SpeakerLabel, std::string>> turns,
    std::string source_id)
    : source_id_(std::move(source_id)) {
  if (turns.empty()) {
    throw Error(ErrorCode::invalid_transcript, "no utterances");
  }
  for (auto& [speaker, text] : turns) {
    std::string trimmed = trim(text);
    if (trimmed.empty()) {
      throw Error(ErrorCode::invalid_transcript, "empty utterance text");
    }
    if (contains_tag_token(trimmed)) {
      throw Error(ErrorCode::invalid_transcript,
                  "utterance text contains a speaker-tag token: " + trimmed);
    }
    if (!utterances_.empty() && utterances_.back().speaker == speaker) {
      utterances_.back().text += ' ';
      utterances_.back().text += trimmed;
    } else {
      utterances_.push_back(
          {utterances_.size(), speaker, std::move(trimmed)});
    }
  }
}

std::vector<std::string> segment_utterances(const RawTranscript& raw) {
  std::string normalized = collapse_whitespace(raw.text);
  if (normalized.empty()) {
    throw Error(ErrorCode::empty_transcript,
                "transcript text is blank (source: " + raw.source_id + ")");
  }
  std::vector<std::string> segments;
  std::size_t start = 0;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    char c = normalized[i];
    if (c != '.' && c != '?' && c != '!') continue;
    // extend over the run of terminal punctuation
    while (i + 1 < normalized.size() &&
           (normalized[i + 1] == '.' || normalized[i + 1] == '?' ||
            normalized[i + 1] == '!')) {
      ++i;
    }
    if (i + 1 < normalized.size() && normalized[i + 1] == ' ') {
      segments.push_back(normalized.substr(start, i + 1 - start));
      start = i + 2;  // skip the single separating space
    }
  }
  if (start < normalized.size()) {
    segments.push_back(normalized.substr(start));
  }
  return segments;
}

DiarizedTranscript parse_diarized(const std::string& text,
                                  std::string source_id) {
  std::vector<std::pair<SpeakerLabel, std::string>> turns;
  std::size_t i = 0;
  while (i < text.size() && is_space(text[i])) ++i;
  if (i >= text.size()) {
    throw Error(ErrorCode::invalid_transcript, "no content to parse");
  }

  long first_value = 0;
  if (match_tag(text, i, first_value) == std::string::npos) {
    throw Error(ErrorCode::leading_text_before_tag,
                "content precedes the first speaker tag");
  }

  while (i < text.size()) {
    long value = 0;
    std::size_t after_tag = match_tag(text, i, value);
    if (after_tag == std::string::npos) {
      throw Error(ErrorCode::invalid_transcript,
                  "expected a speaker tag at offset " + std::to_string(i));
    }
    SpeakerLabel speaker = label_from_code(static_cast<int>(value));

    // run extends to the next tag candidate or end of text
    std::size_t run_end = after_tag;
    while (run_end < text.size()) {
      long next_value = 0;
      if (text[run_end] == '[' &&
          match_tag(text, run_end, next_value) != std::string::npos) {
        break;
      }
      ++run_end;
    }
    std::string run = trim(text.substr(after_tag, run_end - after_tag));
    if (run.empty()) {
      throw Error(ErrorCode::invalid_transcript,
                  "speaker tag with no following text");
    }
    turns.emplace_back(speaker, std::move(run));
    i = run_end;
  }
  return DiarizedTranscript(std::move(turns), std::move(source_id));
}

std::string render_diarized(const DiarizedTranscript& t) {
  std::string out;
  for (const Utterance& u : t.utterances()) {
    if (!out.empty()) out.push_back(' ');
    out += '[';
    out += std::to_string(label_code(u.speaker));
    out += "] ";
    out += u.text;
  }
  return out;
}

DiarizedTranscript ingest_records(std::istream& stream) {
  std::vector<std::pair<SpeakerLabel, std::string>> turns;
  std::string source_id;
  std::string line;
  std::size_t line_no = 0;
  bool saw_record = false;
  bool saw_header = false;

  while (std::getline(stream, line)) {
    ++line_no;
    if (trim(line).empty()) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaViolationError(line_no, std::string("not valid JSON: ") +
                                              e.what());
    }
    if (!record.is_object()) {
      throw SchemaViolationError(line_no, "record is not a JSON object");
    }
    if (record.contains("source_id")) {
      if (saw_record || saw_header || record.size() != 1 ||
          !record["source_id"].is_string()) {
        throw SchemaViolationError(
            line_no, "header record must be first and contain only source_id");
      }
      saw_header = true;
      source_id = record["source_id"].get<std::string>();
      continue;
    }
    if (!record.contains("speaker") || !record.contains("text") ||
        record.size() != 2) {
      throw SchemaViolationError(
          line_no, "record must have exactly the keys speaker and text");
    }
    if (!record["speaker"].is_number_integer()) {
      throw SchemaViolationError(line_no, "speaker must be an integer");
    }
    if (!record["text"].is_string()) {
      throw SchemaViolationError(line_no, "text must be a string");
    }
    int code = record["speaker"].get<int>();
    if (code != 0 && code != 1) {
      throw SchemaViolationError(
          line_no, "speaker " + std::to_string(code) + " outside {0,1}");
    }
    std::string text = record["text"].get<std::string>();
    if (trim(text).empty()) {
      throw SchemaViolationError(line_no, "text is empty");
    }
    if (contains_tag_token(text)) {
      throw SchemaViolationError(line_no,
                                 "text contains a speaker-tag token");
    }
    turns.emplace_back(label_from_code(code), std::move(text));
    saw_record = true;
  }

  if (turns.empty()) {
    throw Error(ErrorCode::empty_input, "no records in input");
  }
  return DiarizedTranscript(std::move(turns), std::move(source_id));
}

DiarizedTranscript ingest_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open " + path);
  }
  return ingest_records(in);
}

}  // namespace clinscribe::transcript
