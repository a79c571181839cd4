#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dtsf/calendar.hpp"
#include "dtsf/csv.hpp"
#include "dtsf/error.hpp"

#include <sstream>

using dtsf::CsvOptions;
using dtsf::Error;
using dtsf::ErrorCode;
using dtsf::load_csv;
using dtsf::TimeSeries;

namespace {

TimeSeries parse(const std::string& text, const CsvOptions& options = {}) {
	std::istringstream stream(text);
	return load_csv(stream, options);
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
	try {
		fn();
	} catch (const Error& e) {
		return e.code();
	}
	FAIL("expected an error");
	return ErrorCode::Io;
}

} // namespace

TEST_CASE("basic parse with ISO timestamps") {
	const auto ts = parse("2015-10-26T00:00:00,1.0\n"
	                      "2015-10-26T00:30:00,2.0\n"
	                      "2015-10-26T01:00:00,3.0\n");
	REQUIRE(ts.size() == 3);
	CHECK(ts.step_seconds() == 1800);
	CHECK(ts[0] == 1.0);
	CHECK(ts[2] == 3.0);
	CHECK(dtsf::format_timestamp(ts.start_epoch()) == "2015-10-26T00:00:00");
}

TEST_CASE("epoch timestamps and header auto-detection") {
	SUBCASE("epoch, no header") {
		const auto ts = parse("0,1.5\n600,2.5\n1200,3.5\n");
		CHECK(ts.size() == 3);
		CHECK(ts.step_seconds() == 600);
	}
	SUBCASE("header row is skipped automatically") {
		const auto ts = parse("time,speed\n0,1.5\n600,2.5\n");
		CHECK(ts.size() == 2);
	}
	SUBCASE("columns by name require and use the header") {
		CsvOptions opts;
		opts.timestamp_column = "time";
		opts.value_column = "speed";
		const auto ts = parse("station,time,speed\nA,0,4.0\nA,600,5.0\n", opts);
		REQUIRE(ts.size() == 2);
		CHECK(ts[0] == 4.0);
		CHECK(code_of([&] { parse("0,1.0\n600,2.0\n", opts); }) == ErrorCode::InvalidArgument);
	}
	SUBCASE("explicit no-header with index columns") {
		CsvOptions opts;
		opts.has_header = false;
		opts.value_column = "2";
		const auto ts = parse("0,9,1.0\n600,9,2.0\n", opts);
		REQUIRE(ts.size() == 2);
		CHECK(ts[1] == 2.0);
	}
}

TEST_CASE("custom delimiter") {
	CsvOptions opts;
	opts.delimiter = ';';
	const auto ts = parse("0;1.0\n600;2.0\n", opts);
	CHECK(ts.size() == 2);
}

TEST_CASE("spacing violations are reported with the observation index") {
	CsvOptions opts;
	opts.step_seconds = 1800;
	try {
		parse("2015-10-26T00:00:00,1.0\n2015-10-26T01:00:00,2.0\n", opts);
		FAIL("expected IrregularSpacing");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::IrregularSpacing);
		CHECK(e.index() == 1);
	}
	// Same gap without a declared step: the first gap defines the step,
	// so a later inconsistency trips instead.
	try {
		parse("0,1\n600,2\n1800,3\n", {});
		FAIL("expected IrregularSpacing");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::IrregularSpacing);
		CHECK(e.index() == 2);
	}
	// Descending timestamps are spacing errors as well.
	CHECK(code_of([] { parse("600,1\n0,2\n"); }) == ErrorCode::IrregularSpacing);
}

TEST_CASE("malformed rows carry their line number") {
	try {
		parse("0,1.0\n600,oops\n");
		FAIL("expected MalformedRecord");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::MalformedRecord);
		CHECK(e.index() == 2);
	}
	CHECK(code_of([] { parse("0,1.0\nnot-a-time,2.0\n"); }) == ErrorCode::MalformedRecord);
	CHECK(code_of([] { parse("0\n"); }) == ErrorCode::MalformedRecord);
	CHECK(code_of([] { parse(""); }) == ErrorCode::EmptySeries);
	CHECK(code_of([] { parse("time,value\n"); }) == ErrorCode::EmptySeries);
}

TEST_CASE("missing values: rejected by default, interpolated on request") {
	const std::string interior = "0,1.0\n600,\n1200,3.0\n";
	CHECK(code_of([&] { parse(interior); }) == ErrorCode::MalformedRecord);

	CsvOptions opts;
	opts.interpolate_gaps = true;
	SUBCASE("isolated interior gap becomes the neighbour midpoint") {
		const auto ts = parse(interior, opts);
		REQUIRE(ts.size() == 3);
		CHECK(ts[1] == doctest::Approx(2.0));
	}
	SUBCASE("NaN markers count as gaps") {
		const auto ts = parse("0,1.0\n600,NaN\n1200,3.0\n", opts);
		CHECK(ts[1] == doctest::Approx(2.0));
	}
	SUBCASE("runs of two or more stay errors") {
		CHECK(code_of([&] { parse("0,1.0\n600,\n1200,\n1800,4.0\n", opts); }) ==
		      ErrorCode::MalformedRecord);
	}
	SUBCASE("leading and trailing gaps stay errors") {
		CHECK(code_of([&] { parse("0,\n600,2.0\n", opts); }) == ErrorCode::MalformedRecord);
		CHECK(code_of([&] { parse("0,1.0\n600,\n", opts); }) == ErrorCode::MalformedRecord);
	}
}

TEST_CASE("identical bytes parse to identical series") {
	std::string text;
	for (int i = 0; i < 200; ++i)
		text += std::to_string(i * 600) + "," + std::to_string(0.1 * i) + "\n";
	const auto a = parse(text);
	const auto b = parse(text);
	REQUIRE(a.size() == b.size());
	for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
	CHECK(a.start_epoch() == b.start_epoch());
	CHECK(a.step_seconds() == b.step_seconds());
}

TEST_CASE("10-minute cadence aggregated to 30 minutes") {
	std::string text;
	const std::size_t rows = 999; // one trailing partial block
	for (std::size_t i = 0; i < rows; ++i)
		text += std::to_string(i * 600) + "," + std::to_string(5.0 + (i % 7) * 0.5) + "\n";
	const auto raw = parse(text);
	const auto half_hourly = raw.aggregate(3);
	CHECK(half_hourly.size() == rows / 3);
	CHECK(half_hourly.step_seconds() == 1800);
}

TEST_CASE("unreadable path raises an io error naming the file") {
	try {
		dtsf::load_csv_file("/no/such/dir/input.csv", {});
		FAIL("expected Io");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::Io);
		CHECK(std::string(e.what()).find("/no/such/dir/input.csv") != std::string::npos);
	}
}

TEST_CASE("calendar round trips") {
	CHECK(dtsf::parse_timestamp("1970-01-01T00:00:00") == 0);
	CHECK(dtsf::parse_timestamp("1970-01-01 00:01") == 60);
	CHECK(dtsf::parse_timestamp("12345") == 12345);
	CHECK(dtsf::parse_timestamp("-60") == -60);
	CHECK(!dtsf::parse_timestamp("2015-13-01T00:00:00").has_value());
	CHECK(!dtsf::parse_timestamp("2015-02-29T00:00:00").has_value());
	CHECK(!dtsf::parse_timestamp("hello").has_value());
	CHECK(dtsf::parse_date("2016-02-29").has_value()); // leap year
	CHECK(!dtsf::parse_date("2015-02-29").has_value());
	const auto epoch = dtsf::parse_timestamp("2015-10-26T13:45:30");
	REQUIRE(epoch.has_value());
	CHECK(dtsf::format_timestamp(*epoch) == "2015-10-26T13:45:30");
}
