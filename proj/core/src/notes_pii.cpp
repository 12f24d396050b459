#include "clinscribe/notes.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace clinscribe::notes {

namespace {

bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

bool is_phone_char(char c) {
  return is_digit(c) || c == ' ' || c == '-' || c == '.' || c == '(' ||
         c == ')' || c == '+';
}

// Maximal runs over digits and common phone separators; a run counts as a
// phone number when it carries at least 10 digits.
void scan_phones(const std::string& text, std::vector<PiiFinding>& findings) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i]) && text[i] != '(' && text[i] != '+') {
      ++i;
      continue;
    }
    std::size_t begin = i;
    std::size_t end = i;
    std::size_t digits = 0;
    std::size_t last_digit_end = i;
    while (end < text.size() && is_phone_char(text[end])) {
      if (is_digit(text[end])) {
        ++digits;
        last_digit_end = end + 1;
      }
      ++end;
    }
    if (digits >= 10) {
      findings.push_back({PiiCategory::phone, begin, last_digit_end,
                          text.substr(begin, last_digit_end - begin)});
    }
    i = std::max(end, i + 1);
  }
}

void scan_regex(const std::string& text, const std::regex& pattern,
                PiiCategory category, int group,
                std::vector<PiiFinding>& findings) {
  auto begin_it = std::sregex_iterator(text.begin(), text.end(), pattern);
  for (auto it = begin_it; it != std::sregex_iterator(); ++it) {
    std::size_t begin = static_cast<std::size_t>(it->position(group));
    std::size_t length = static_cast<std::size_t>(it->length(group));
    findings.push_back(
        {category, begin, begin + length, text.substr(begin, length)});
  }
}

bool has_birth_context(const std::string& text, std::size_t match_begin) {
  static constexpr std::size_t kWindow = 24;
  std::size_t window_begin = match_begin > kWindow ? match_begin - kWindow : 0;
  std::string context = text.substr(window_begin, match_begin - window_begin);
  std::transform(context.begin(), context.end(), context.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return context.find("dob") != std::string::npos ||
         context.find("birth") != std::string::npos ||
         context.find("born") != std::string::npos;
}

void scan_dates_as_dob(const std::string& text,
                       std::vector<PiiFinding>& findings) {
  static const std::regex iso(R"(\d{4}-\d{2}-\d{2})");
  static const std::regex us(R"(\d{1,2}/\d{1,2}/\d{4})");
  for (const std::regex* pattern : {&iso, &us}) {
    auto begin_it = std::sregex_iterator(text.begin(), text.end(), *pattern);
    for (auto it = begin_it; it != std::sregex_iterator(); ++it) {
      std::size_t begin = static_cast<std::size_t>(it->position(0));
      if (!has_birth_context(text, begin)) continue;
      std::size_t length = static_cast<std::size_t>(it->length(0));
      findings.push_back({PiiCategory::date_of_birth, begin, begin + length,
                          text.substr(begin, length)});
    }
  }
}

bool digit_boundary(const std::string& text, std::size_t begin,
                    std::size_t end) {
  bool left_ok = begin == 0 || !is_digit(text[begin - 1]);
  bool right_ok = end >= text.size() || !is_digit(text[end]);
  return left_ok && right_ok;
}

void scan_national_ids(const std::string& text,
                       const std::vector<PiiFinding>& phones,
                       std::vector<PiiFinding>& findings) {
  auto overlaps_phone = [&phones](std::size_t begin, std::size_t end) {
    for (const PiiFinding& phone : phones) {
      if (phone.category == PiiCategory::phone && begin < phone.end &&
          phone.begin < end) {
        return true;
      }
    }
    return false;
  };

  static const std::regex dashed(R"(\d{3}-\d{2}-\d{4})");
  auto begin_it = std::sregex_iterator(text.begin(), text.end(), dashed);
  for (auto it = begin_it; it != std::sregex_iterator(); ++it) {
    std::size_t begin = static_cast<std::size_t>(it->position(0));
    std::size_t end = begin + static_cast<std::size_t>(it->length(0));
    if (!digit_boundary(text, begin, end)) continue;
    if (overlaps_phone(begin, end)) continue;
    findings.push_back({PiiCategory::national_id, begin, end,
                        text.substr(begin, end - begin)});
  }

  // bare 9-digit runs
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    if (i - begin == 9 && digit_boundary(text, begin, i) &&
        !overlaps_phone(begin, i)) {
      findings.push_back({PiiCategory::national_id, begin, i,
                          text.substr(begin, i - begin)});
    }
  }
}

void scan_names(const std::string& text, std::vector<PiiFinding>& findings) {
  static const std::regex pattern(
      R"([Nn]ame is\s+([A-Z][a-z]+ [A-Z][a-z]+))");
  scan_regex(text, pattern, PiiCategory::full_name_candidate, 1, findings);
}

}  // namespace

const char* pii_category_name(PiiCategory category) {
  switch (category) {
    case PiiCategory::phone: return "phone";
    case PiiCategory::email: return "email";
    case PiiCategory::date_of_birth: return "date_of_birth";
    case PiiCategory::national_id: return "national_id";
    case PiiCategory::full_name_candidate: return "full_name_candidate";
  }
  return "unknown";
}

std::vector<PiiFinding> scan_pii(const std::string& text) {
  std::vector<PiiFinding> findings;
  if (text.empty()) return findings;

  std::vector<PiiFinding> phones;
  scan_phones(text, phones);
  findings.insert(findings.end(), phones.begin(), phones.end());

  static const std::regex email(
      R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
  scan_regex(text, email, PiiCategory::email, 0, findings);

  scan_dates_as_dob(text, findings);
  scan_national_ids(text, phones, findings);
  scan_names(text, findings);

  std::sort(findings.begin(), findings.end(),
            [](const PiiFinding& a, const PiiFinding& b) {
              if (a.begin != b.begin) return a.begin < b.begin;
              if (a.end != b.end) return a.end < b.end;
              return static_cast<int>(a.category) <
                     static_cast<int>(b.category);
            });
  return findings;
}

}  // namespace clinscribe::notes
