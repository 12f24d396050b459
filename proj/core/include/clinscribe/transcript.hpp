#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clinscribe/error.hpp"

namespace clinscribe::transcript {

// Exactly two speakers; the numeric codes are part of the wire format.
enum class SpeakerLabel : int { clinician = 0, patient = 1 };

inline int label_code(SpeakerLabel label) { return static_cast<int>(label); }
SpeakerLabel label_from_code(int code);  // throws MalformedTag outside {0,1}

struct Utterance {
  std::size_t index = 0;
  SpeakerLabel speaker = SpeakerLabel::clinician;
  std::string text;  // trimmed, non-empty, no [N] tag tokens

  bool operator==(const Utterance&) const = default;
};

struct RawTranscript {
  std::string text;
  std::string source_id;
};

// Ordered utterances with maximal speaker runs: adjacent same-speaker
// entries are merged at construction, indices reassigned from zero.
class DiarizedTranscript {
 public:
  // Throws InvalidTranscript on empty input, empty/whitespace utterance
  // text, or text containing a bracketed-number token (which would not
  // survive a render/parse round trip).
  DiarizedTranscript(std::vector<std::pair<SpeakerLabel, std::string>> turns,
                     std::string source_id = {});

  const std::vector<Utterance>& utterances() const { return utterances_; }
  const std::string& source_id() const { return source_id_; }

  bool operator==(const DiarizedTranscript& other) const {
    return utterances_ == other.utterances_;
  }

 private:
  std::vector<Utterance> utterances_;
  std::string source_id_;
};

// Splits on sentence-final punctuation (. ? !) followed by whitespace,
// after collapsing all whitespace runs to single spaces. Segments joined
// by single spaces reproduce the normalized input; none is empty.
std::vector<std::string> segment_utterances(const RawTranscript& raw);

// Parses the bracket-tagged format: "[0] Hi, Eve. ... [1] Hi."
DiarizedTranscript parse_diarized(const std::string& text,
                                  std::string source_id = {});

// Inverse of parse_diarized: "[0] text [1] text", single-space separated.
std::string render_diarized(const DiarizedTranscript& t);

// Line-delimited JSON ingestion for external transcribers. Each record is
// {"speaker": 0|1, "text": "..."}; an optional leading header record
// {"source_id": "..."} names the source. Blank lines are skipped.
DiarizedTranscript ingest_records(std::istream& stream);
DiarizedTranscript ingest_records_file(const std::string& path);

}  // namespace clinscribe::transcript
