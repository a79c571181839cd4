#pragma once

#include "dtsf/time_series.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace dtsf {

/// Column selectors are either a 0-based index ("0", "3") or a header
/// name; names require a header row. `has_header` unset means
/// auto-detect (a first row whose timestamp cell does not parse is
/// treated as a header).
struct CsvOptions {
	char delimiter = ',';
	std::string timestamp_column = "0";
	std::string value_column = "1";
	std::optional<bool> has_header;
	/// Expected spacing; 0 infers it from the first two rows.
	std::int64_t step_seconds = 0;
	/// Fill an isolated empty/NaN value from its two neighbours instead
	/// of rejecting the row. Runs of two or more stay errors.
	bool interpolate_gaps = false;
};

TimeSeries load_csv(std::istream& source, const CsvOptions& options = {});
TimeSeries load_csv_file(const std::string& path, const CsvOptions& options = {});

} // namespace dtsf
