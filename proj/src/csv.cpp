#include "dtsf/csv.hpp"

#include "dtsf/calendar.hpp"
#include "dtsf/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>
#include <vector>

namespace dtsf {
namespace {

struct RawRow {
	std::int64_t timestamp = 0;
	double value = 0.0;
	bool missing = false;
	std::size_t line = 0;
};

std::string_view trim(std::string_view text) {
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
	while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
	return text;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
	std::vector<std::string_view> fields;
	std::size_t begin = 0;
	while (true) {
		const std::size_t end = line.find(delimiter, begin);
		if (end == std::string_view::npos) {
			fields.push_back(line.substr(begin));
			break;
		}
		fields.push_back(line.substr(begin, end - begin));
		begin = end + 1;
	}
	return fields;
}

bool is_missing_marker(std::string_view cell) {
	if (cell.empty()) return true;
	std::string lower(cell);
	std::transform(lower.begin(), lower.end(), lower.begin(),
	               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return lower == "na" || lower == "nan" || lower == "null";
}

std::optional<double> parse_value(std::string_view cell) {
	double value = 0.0;
	const char* first = cell.data();
	const char* last = cell.data() + cell.size();
	auto [ptr, ec] = std::from_chars(first, last, value);
	if (ec != std::errc() || ptr != last) return std::nullopt;
	return value;
}

// Resolves "3" to index 3, anything else against the header.
std::size_t resolve_column(const std::string& spec, const std::vector<std::string_view>& header,
                           bool have_header, const char* what) {
	std::size_t index = 0;
	const char* first = spec.data();
	const char* last = spec.data() + spec.size();
	auto [ptr, ec] = std::from_chars(first, last, index);
	if (ec == std::errc() && ptr == last) return index;
	if (!have_header)
		throw Error(ErrorCode::InvalidArgument,
		            std::string(what) + " column '" + spec + "' needs a header row to resolve");
	for (std::size_t i = 0; i < header.size(); ++i) {
		if (trim(header[i]) == spec) return i;
	}
	throw Error(ErrorCode::InvalidArgument,
	            std::string(what) + " column '" + spec + "' not found in header");
}

} // namespace

TimeSeries load_csv(std::istream& source, const CsvOptions& options) {
	std::vector<RawRow> rows;
	std::string line;
	std::size_t line_no = 0;
	bool header_decided = options.has_header.has_value();
	bool header_expected = options.has_header.value_or(false);
	std::size_t ts_col = 0, value_col = 1;
	bool columns_resolved = false;

	auto resolve = [&](const std::vector<std::string_view>& header, bool have_header) {
		ts_col = resolve_column(options.timestamp_column, header, have_header, "timestamp");
		value_col = resolve_column(options.value_column, header, have_header, "value");
		columns_resolved = true;
	};

	while (std::getline(source, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line_no == 1 && line.size() >= 3 &&
		    line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
			line.erase(0, 3);
		if (trim(line).empty()) continue;

		auto fields = split(line, options.delimiter);

		if (!header_decided) {
			// First data-bearing line: a timestamp cell that does not
			// parse marks a header row.
			std::size_t probe = 0;
			{
				std::size_t idx = 0;
				const char* f = options.timestamp_column.data();
				const char* l = f + options.timestamp_column.size();
				auto [p, ec] = std::from_chars(f, l, idx);
				if (ec == std::errc() && p == l) probe = idx;
			}
			const bool cell_parses = probe < fields.size() &&
			                         parse_timestamp(trim(fields[probe])).has_value();
			header_expected = !cell_parses;
			header_decided = true;
		}
		if (header_expected && !columns_resolved) {
			resolve(fields, true);
			header_expected = false; // consumed
			continue;
		}
		if (!columns_resolved) resolve(fields, false);

		if (ts_col >= fields.size() || value_col >= fields.size())
			throw Error(ErrorCode::MalformedRecord,
			            "line " + std::to_string(line_no) + ": expected at least " +
			                std::to_string(std::max(ts_col, value_col) + 1) + " fields",
			            static_cast<std::int64_t>(line_no));

		RawRow row;
		row.line = line_no;
		const auto ts_cell = trim(fields[ts_col]);
		const auto ts = parse_timestamp(ts_cell);
		if (!ts)
			throw Error(ErrorCode::MalformedRecord,
			            "line " + std::to_string(line_no) + ": unparseable timestamp '" +
			                std::string(ts_cell) + "'",
			            static_cast<std::int64_t>(line_no));
		row.timestamp = *ts;

		const auto value_cell = trim(fields[value_col]);
		if (is_missing_marker(value_cell)) {
			if (!options.interpolate_gaps)
				throw Error(ErrorCode::MalformedRecord,
				            "line " + std::to_string(line_no) + ": missing value",
				            static_cast<std::int64_t>(line_no));
			row.missing = true;
		} else {
			const auto value = parse_value(value_cell);
			if (!value || !std::isfinite(*value))
				throw Error(ErrorCode::MalformedRecord,
				            "line " + std::to_string(line_no) + ": unparseable value '" +
				                std::string(value_cell) + "'",
				            static_cast<std::int64_t>(line_no));
			row.value = *value;
		}
		rows.push_back(row);
	}

	if (rows.empty())
		throw Error(ErrorCode::EmptySeries, "no data rows in input");

	// Fill isolated gaps; equidistant neighbours make this the midpoint.
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (!rows[i].missing) continue;
		const bool interior = i > 0 && i + 1 < rows.size();
		if (!interior || rows[i - 1].missing || rows[i + 1].missing)
			throw Error(ErrorCode::MalformedRecord,
			            "line " + std::to_string(rows[i].line) +
			                ": missing value is not an isolated interior gap",
			            static_cast<std::int64_t>(rows[i].line));
		rows[i].value = 0.5 * (rows[i - 1].value + rows[i + 1].value);
		rows[i].missing = false;
	}

	std::int64_t step = options.step_seconds;
	if (step <= 0)
		step = rows.size() > 1 ? rows[1].timestamp - rows[0].timestamp : 1;
	if (step <= 0)
		throw Error(ErrorCode::IrregularSpacing, "timestamps are not strictly increasing", 1);
	for (std::size_t i = 1; i < rows.size(); ++i) {
		if (rows[i].timestamp - rows[i - 1].timestamp != step)
			throw Error(ErrorCode::IrregularSpacing,
			            "gap before observation " + std::to_string(i) + " (line " +
			                std::to_string(rows[i].line) + ") is not one step of " +
			                std::to_string(step) + "s",
			            static_cast<std::int64_t>(i));
	}

	std::vector<double> values;
	values.reserve(rows.size());
	for (const RawRow& row : rows) values.push_back(row.value);
	return TimeSeries(std::move(values), rows.front().timestamp, step);
}

TimeSeries load_csv_file(const std::string& path, const CsvOptions& options) {
	std::ifstream file(path, std::ios::binary);
	if (!file)
		throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
	return load_csv(file, options);
}

} // namespace dtsf
