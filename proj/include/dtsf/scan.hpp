#pragma once

#include "dtsf/least_squares.hpp"
#include "dtsf/time_series.hpp"

#include <limits>
#include <span>
#include <vector>

namespace dtsf {

/// Scanning-window length and forecast horizon, both in observations.
/// Valid combinations satisfy 1 <= horizon <= window, and window must
/// leave the fitted polynomial overdetermined (window >= degree + 2).
struct WindowSpec {
	std::size_t window = 48;
	std::size_t horizon = 48;
};

/// One candidate window: where it starts, how well its polynomial maps
/// it onto the target window, and that polynomial. Degenerate windows
/// keep the -inf sentinel score and can never be selected.
struct Match {
	std::size_t start = 0;
	double r2 = -std::numeric_limits<double>::infinity();
	SimilarityFunction fn{};
	bool degenerate = false;
};

enum class ScanMode {
	Naive, // per-window QR fit, the reference path
	Fast,  // prefix-sum moments + fused normal equations, QR fallback
};

struct ScanOptions {
	ScanMode mode = ScanMode::Fast;
	unsigned threads = 0; // 0 = hardware concurrency
};

struct StartRange {
	std::size_t first = 0;
	std::size_t count = 0;
};

/// The last `window` observations, oldest first.
std::span<const double> target_window(const TimeSeries& ts, std::size_t window);

/// All candidate start indices whose window stays disjoint from the
/// target window and whose follow-up values exist inside the series.
StartRange valid_starts(std::size_t length, std::size_t window, std::size_t horizon);

/// Fits every candidate window against the target window and returns one
/// Match per valid start, ordered by start index. Pure; parallel
/// execution is bit-identical to serial.
std::vector<Match> scan(const TimeSeries& ts, const WindowSpec& spec, int degree,
                        const ScanOptions& options = {});

/// Greedy best-first selection with non-maximum suppression: candidates
/// are taken in descending r2 (ties broken toward the more recent start)
/// and skipped when they start within `min_separation` of an already
/// selected match.
std::vector<Match> select_matches(std::span<const Match> matches, std::size_t count,
                                  std::size_t min_separation);

} // namespace dtsf
