#pragma once

#include <string>
#include <string_view>

namespace clinscribe {

// SHA-256 of the input bytes, lowercase hex (64 chars).
std::string sha256_hex(std::string_view data);

// The all-zero digest used as the parent of a chain's first record.
std::string zero_digest();

}  // namespace clinscribe
