#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dtsf {

// Timestamps are UTC epoch seconds throughout; no timezone handling.

/// Parses `YYYY-MM-DDTHH:MM[:SS]` (space accepted instead of 'T') or a
/// plain integer of epoch seconds. Returns nullopt on anything else.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

/// Parses `YYYY-MM-DD` to midnight UTC.
std::optional<std::int64_t> parse_date(std::string_view text);

/// Formats epoch seconds as `YYYY-MM-DDTHH:MM:SS`.
std::string format_timestamp(std::int64_t epoch_seconds);

} // namespace dtsf
