#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dhira {

// Timestamps are UTC epoch seconds throughout.

// Parses ISO-8601 "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds
// (ignored) and a 'Z' or +/-HH:MM offset (applied). A space is accepted in
// place of 'T', and a bare date means midnight UTC.
// Throws DataError on malformed input.
std::int64_t parse_iso8601(std::string_view text);

// Canonical form "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(std::int64_t epoch_seconds);

}  // namespace dhira
