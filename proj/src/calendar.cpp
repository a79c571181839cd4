#include "dtsf/calendar.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace dtsf {
namespace {

// Howard Hinnant's civil-date algorithms; exact for the proleptic
// Gregorian calendar, independent of the C runtime's timezone database.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
	y -= m <= 2;
	const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
	const unsigned yoe = static_cast<unsigned>(y - era * 400);
	const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
	const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
	return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
	z += 719468;
	const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
	const unsigned doe = static_cast<unsigned>(z - era * 146097);
	const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
	y = static_cast<std::int64_t>(yoe) + era * 400;
	const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
	const unsigned mp = (5 * doy + 2) / 153;
	d = doy - (153 * mp + 2) / 5 + 1;
	m = mp < 10 ? mp + 3 : mp - 9;
	y += m <= 2;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
	static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
	if (m == 2) {
		const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
		return leap ? 29 : 28;
	}
	return lengths[m - 1];
}

bool parse_fixed_uint(std::string_view text, std::size_t pos, std::size_t width, unsigned& out) {
	if (pos + width > text.size()) return false;
	unsigned value = 0;
	for (std::size_t i = 0; i < width; ++i) {
		const char c = text[pos + i];
		if (c < '0' || c > '9') return false;
		value = value * 10 + static_cast<unsigned>(c - '0');
	}
	out = value;
	return true;
}

std::string_view trimmed(std::string_view text) {
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
	return text;
}

bool parse_civil_date(std::string_view text, std::int64_t& days) {
	unsigned year = 0, month = 0, day = 0;
	if (!parse_fixed_uint(text, 0, 4, year)) return false;
	if (text[4] != '-') return false;
	if (!parse_fixed_uint(text, 5, 2, month)) return false;
	if (text[7] != '-') return false;
	if (!parse_fixed_uint(text, 8, 2, day)) return false;
	if (month < 1 || month > 12) return false;
	if (day < 1 || day > days_in_month(year, month)) return false;
	days = days_from_civil(year, month, day);
	return true;
}

} // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
	text = trimmed(text);
	if (text.empty()) return std::nullopt;

	// Integer epoch seconds.
	{
		std::int64_t epoch = 0;
		const char* first = text.data();
		const char* last = text.data() + text.size();
		auto [ptr, ec] = std::from_chars(first, last, epoch);
		if (ec == std::errc() && ptr == last) return epoch;
	}

	if (text.size() < 16) return std::nullopt;
	std::int64_t days = 0;
	if (!parse_civil_date(text.substr(0, 10), days)) return std::nullopt;
	if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
	unsigned hour = 0, minute = 0, second = 0;
	if (!parse_fixed_uint(text, 11, 2, hour)) return std::nullopt;
	if (text[13] != ':') return std::nullopt;
	if (!parse_fixed_uint(text, 14, 2, minute)) return std::nullopt;
	if (text.size() >= 19) {
		if (text[16] != ':') return std::nullopt;
		if (!parse_fixed_uint(text, 17, 2, second)) return std::nullopt;
		if (text.size() != 19) return std::nullopt;
	} else if (text.size() != 16) {
		return std::nullopt;
	}
	if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
	return days * 86400 + hour * 3600 + minute * 60 + second;
}

std::optional<std::int64_t> parse_date(std::string_view text) {
	text = trimmed(text);
	if (text.size() != 10) return std::nullopt;
	std::int64_t days = 0;
	if (!parse_civil_date(text, days)) return std::nullopt;
	return days * 86400;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
	std::int64_t days = epoch_seconds / 86400;
	std::int64_t rem = epoch_seconds % 86400;
	if (rem < 0) {
		rem += 86400;
		days -= 1;
	}
	std::int64_t year = 0;
	unsigned month = 0, day = 0;
	civil_from_days(days, year, month, day);
	char buffer[32];
	std::snprintf(buffer, sizeof(buffer), "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
	              static_cast<long long>(year), month, day,
	              static_cast<long long>(rem / 3600),
	              static_cast<long long>((rem % 3600) / 60),
	              static_cast<long long>(rem % 60));
	return buffer;
}

} // namespace dtsf
