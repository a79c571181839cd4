#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dtsf/error.hpp"
#include "dtsf/scan.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

#include <cmath>
#include <cstring>
#include <vector>

using dtsf::Error;
using dtsf::ErrorCode;
using dtsf::Match;
using dtsf::scan;
using dtsf::ScanMode;
using dtsf::ScanOptions;
using dtsf::select_matches;
using dtsf::TimeSeries;
using dtsf::WindowSpec;

namespace {

Match scored(std::size_t start, double r2) {
	Match m;
	m.start = start;
	m.r2 = r2;
	m.fn.degree = 1;
	m.fn.beta = {0.0, 1.0, 0.0, 0.0, 0.0};
	return m;
}

} // namespace

TEST_CASE("target window extraction") {
	const TimeSeries ts({1.0, 2.0, 3.0, 4.0, 5.0}, 0, 1);
	const auto tail = dtsf::target_window(ts, 2);
	REQUIRE(tail.size() == 2);
	CHECK(tail[0] == 4.0);
	CHECK(tail[1] == 5.0);

	const TimeSeries whole({1.0, 2.0, 3.0}, 0, 1);
	const auto all = dtsf::target_window(whole, 3);
	CHECK(all.size() == 3);
	CHECK(all[0] == 1.0);

	const TimeSeries tiny({1.0}, 0, 1);
	try {
		dtsf::target_window(tiny, 2);
		FAIL("expected InsufficientData");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::InsufficientData);
	}
}

TEST_CASE("valid start enumeration") {
	SUBCASE("both constraints enumerated by hand: N=10, w=3, h=2") {
		// disjointness: s <= 10 - 2*3 = 4; follow-up: s <= 10 - 3 - 2 = 5.
		const auto range = dtsf::valid_starts(10, 3, 2);
		CHECK(range.first == 0);
		CHECK(range.count == 5);
	}
	SUBCASE("N = 2w keeps the single abutting candidate at zero") {
		// Its follow-up overlaps the target region, the most-recent-window
		// special case.
		const auto range = dtsf::valid_starts(12, 6, 3);
		CHECK(range.first == 0);
		CHECK(range.count == 1);
	}
	SUBCASE("below 2w there is no disjoint candidate") {
		CHECK_THROWS_AS(dtsf::valid_starts(11, 6, 3), Error);
		try {
			dtsf::valid_starts(11, 6, 3);
		} catch (const Error& e) {
			CHECK(e.code() == ErrorCode::InsufficientData);
		}
	}
	SUBCASE("horizon above window is rejected") {
		CHECK_THROWS_AS(dtsf::valid_starts(100, 6, 7), Error);
	}
}

TEST_CASE("noiseless sinusoid: full-period shifts match perfectly") {
	const std::size_t period = 24, n = 240, w = 24;
	const TimeSeries ts(synthetic::periodic(n, period), 0, 1);
	const auto matches = scan(ts, WindowSpec{w, 12}, 1);
	REQUIRE(matches.size() == n - 2 * w + 1);
	const std::size_t target_start = n - w;
	for (std::size_t i = 0; i < matches.size(); ++i)
		REQUIRE(matches[i].start == i); // output is ordered by start
	for (const Match& m : matches) {
		if ((target_start - m.start) % period == 0) {
			CHECK(m.r2 >= 1.0 - 1e-9);
		}
		CHECK(m.r2 <= 1.0 + 1e-12);
	}
}

TEST_CASE("strictly linear ramp: every window fits every other exactly") {
	const TimeSeries ts(synthetic::ramp(120, 0.5, 2.0), 0, 1);
	for (int degree : {1, 2}) {
		const auto matches = scan(ts, WindowSpec{10, 5}, degree);
		for (const Match& m : matches) {
			REQUIRE(!m.degenerate);
			CHECK(m.r2 == doctest::Approx(1.0).epsilon(1e-10));
		}
	}
}

TEST_CASE("random series agrees with the per-window oracle") {
	const std::size_t n = 200, w = 10;
	const TimeSeries ts(synthetic::uniform(n, 11u, 0.0, 10.0), 0, 1);
	for (int degree : {1, 2, 3, 4}) {
		const auto matches = scan(ts, WindowSpec{w, 5}, degree);
		const auto target = ts.values().subspan(n - w);
		REQUIRE(matches.size() == n - 2 * w + 1);
		for (const Match& m : matches) {
			const auto x = ts.values().subspan(m.start, w);
			const auto ref = oracle::polyfit(x, target, degree);
			REQUIRE(ref.ok);
			REQUIRE(!m.degenerate);
			CHECK(std::abs(m.r2 - static_cast<double>(ref.r2)) < 1e-8);
			for (int q = 0; q <= degree; ++q)
				CHECK(std::abs(m.fn.beta[static_cast<std::size_t>(q)] -
				               static_cast<double>(ref.beta[static_cast<std::size_t>(q)])) <
				      1e-8);
		}

		// Selection order must match the oracle's greedy re-implementation.
		std::vector<oracle::ScoredStart> scored_oracle(matches.size());
		for (std::size_t i = 0; i < matches.size(); ++i)
			scored_oracle[i] = {matches[i].start, matches[i].r2, !matches[i].degenerate};
		const auto expect = oracle::select_greedy(scored_oracle, 5, w);
		const auto got = select_matches(matches, 5, w);
		REQUIRE(expect.size() == 5);
		for (std::size_t i = 0; i < 5; ++i) CHECK(got[i].start == expect[i]);
	}
}

TEST_CASE("selection rules") {
	SUBCASE("top scores win when separation is off") {
		std::vector<Match> ms{scored(10, 0.9), scored(100, 0.8), scored(200, 0.7)};
		const auto out = select_matches(ms, 2, 0);
		REQUIRE(out.size() == 2);
		CHECK(out[0].start == 10);
		CHECK(out[1].start == 100);
	}
	SUBCASE("score ties break toward the more recent start") {
		std::vector<Match> ms{scored(10, 0.9), scored(100, 0.9)};
		const auto out = select_matches(ms, 1, 0);
		REQUIRE(out.size() == 1);
		CHECK(out[0].start == 100);
	}
	SUBCASE("nearby runner-up is suppressed") {
		std::vector<Match> ms{scored(10, 0.9), scored(12, 0.85), scored(200, 0.8)};
		const auto out = select_matches(ms, 2, 24);
		REQUIRE(out.size() == 2);
		CHECK(out[0].start == 10);
		CHECK(out[1].start == 200);
	}
	SUBCASE("too few survivors is an error carrying the count") {
		std::vector<Match> ms{scored(10, 0.9), scored(12, 0.85)};
		try {
			select_matches(ms, 2, 24);
			FAIL("expected TooFewMatches");
		} catch (const Error& e) {
			CHECK(e.code() == ErrorCode::TooFewMatches);
			CHECK(e.index() == 1);
		}
	}
	SUBCASE("degenerate matches are never selected") {
		Match dead;
		dead.start = 50;
		dead.degenerate = true;
		std::vector<Match> ms{scored(10, 0.2), dead};
		const auto out = select_matches(ms, 1, 0);
		CHECK(out[0].start == 10);
		CHECK_THROWS_AS(select_matches(ms, 2, 0), Error);
	}
	SUBCASE("zero matches requested is invalid") {
		std::vector<Match> ms{scored(10, 0.9)};
		CHECK_THROWS_AS(select_matches(ms, 0, 0), Error);
	}
}

TEST_CASE("a constant stretch yields a degenerate window, not a crash") {
	auto values = synthetic::uniform(200, 3u, 1.0, 9.0);
	for (std::size_t i = 40; i < 52; ++i) values[i] = 4.0; // plant a flat window
	const TimeSeries ts(values, 0, 1);
	const auto matches = scan(ts, WindowSpec{12, 6}, 1);
	CHECK(matches[40].degenerate);
	CHECK(matches[40].r2 == -std::numeric_limits<double>::infinity());
	CHECK(!matches[10].degenerate);
	// Fast and naive paths agree on the degenerate flag.
	const auto naive = scan(ts, WindowSpec{12, 6}, 1, ScanOptions{ScanMode::Naive, 1});
	for (std::size_t i = 0; i < matches.size(); ++i)
		CHECK(matches[i].degenerate == naive[i].degenerate);
}

TEST_CASE("near-constant windows fall back to the exact fitter in fast mode") {
	// Variance ~1e-20 of the surrounding scale: the prefix-difference
	// variance is garbage there, so the fast path must hand the window to
	// the QR fitter and match the naive mode bit for bit.
	auto values = synthetic::uniform(300, 19u, 1.0, 9.0);
	for (std::size_t i = 60; i < 76; ++i)
		values[i] = 4.0 + static_cast<double>(i - 60) * 1e-10;
	const TimeSeries ts(values, 0, 1);
	const auto fast = scan(ts, WindowSpec{16, 8}, 1, ScanOptions{ScanMode::Fast, 1});
	const auto naive = scan(ts, WindowSpec{16, 8}, 1, ScanOptions{ScanMode::Naive, 1});
	REQUIRE(fast.size() == naive.size());
	CHECK(!fast[60].degenerate); // tiny but genuine slope
	CHECK(fast[60].degenerate == naive[60].degenerate);
	CHECK(std::memcmp(&fast[60].r2, &naive[60].r2, sizeof(double)) == 0);
	CHECK(std::memcmp(fast[60].fn.beta.data(), naive[60].fn.beta.data(),
	                  sizeof(double) * 5) == 0);
}

TEST_CASE("degenerate target is rejected") {
	std::vector<double> values = synthetic::uniform(100, 5u);
	for (std::size_t i = 90; i < 100; ++i) values[i] = 2.0;
	const TimeSeries ts(values, 0, 1);
	try {
		scan(ts, WindowSpec{10, 5}, 1);
		FAIL("expected DegenerateTarget");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::DegenerateTarget);
	}
}

TEST_CASE("affine transforms leave scores and selection unchanged") {
	const std::size_t n = 400, w = 16;
	const auto base = synthetic::uniform(n, 17u, 1.0, 15.0);
	for (const auto& [a, b] : {std::pair{3.0, -5.0}, std::pair{0.5, 10.0}}) {
		std::vector<double> mapped(n);
		for (std::size_t i = 0; i < n; ++i) mapped[i] = a * base[i] + b;
		const auto m1 = scan(TimeSeries(base, 0, 1), WindowSpec{w, 8}, 1);
		const auto m2 = scan(TimeSeries(mapped, 0, 1), WindowSpec{w, 8}, 1);
		REQUIRE(m1.size() == m2.size());
		for (std::size_t i = 0; i < m1.size(); ++i)
			CHECK(std::abs(m1[i].r2 - m2[i].r2) < 1e-9);
		const auto s1 = select_matches(m1, 10, w);
		const auto s2 = select_matches(m2, 10, w);
		for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].start == s2[i].start);
	}
}

TEST_CASE("fast path tracks the naive path") {
	for (const std::size_t n : {500u, 3000u, 10000u}) {
		const TimeSeries ts(synthetic::uniform(n, 23u + static_cast<unsigned>(n), 0.0, 20.0), 0, 1);
		for (const std::size_t w : {8u, 24u, 120u}) {
			if (n < 2 * w + 1) continue;
			for (int degree : {1, 4}) {
				const auto fast = scan(ts, WindowSpec{w, w / 2}, degree,
				                       ScanOptions{ScanMode::Fast, 1});
				const auto naive = scan(ts, WindowSpec{w, w / 2}, degree,
				                        ScanOptions{ScanMode::Naive, 1});
				REQUIRE(fast.size() == naive.size());
				for (std::size_t i = 0; i < fast.size(); ++i) {
					REQUIRE(fast[i].degenerate == naive[i].degenerate);
					if (fast[i].degenerate) continue;
					CHECK(std::abs(fast[i].r2 - naive[i].r2) < 1e-8);
					for (int q = 0; q <= degree; ++q)
						CHECK(std::abs(fast[i].fn.beta[static_cast<std::size_t>(q)] -
						               naive[i].fn.beta[static_cast<std::size_t>(q)]) < 1e-8);
				}
			}
		}
	}
}

TEST_CASE("parallel scan is bit-identical to serial") {
	const TimeSeries ts(synthetic::uniform(4000, 31u, 0.0, 20.0), 0, 1);
	for (const auto mode : {ScanMode::Fast, ScanMode::Naive}) {
		const auto serial = scan(ts, WindowSpec{24, 12}, 2, ScanOptions{mode, 1});
		const auto parallel = scan(ts, WindowSpec{24, 12}, 2, ScanOptions{mode, 4});
		REQUIRE(serial.size() == parallel.size());
		for (std::size_t i = 0; i < serial.size(); ++i) {
			CHECK(serial[i].start == parallel[i].start);
			CHECK(serial[i].degenerate == parallel[i].degenerate);
			CHECK(std::memcmp(&serial[i].r2, &parallel[i].r2, sizeof(double)) == 0);
			CHECK(std::memcmp(serial[i].fn.beta.data(), parallel[i].fn.beta.data(),
			                  sizeof(double) * 5) == 0);
		}
	}
}
