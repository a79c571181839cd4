#pragma once

#include "dtsf/scan.hpp"
#include "dtsf/time_series.hpp"

#include <optional>
#include <vector>

namespace dtsf {

enum class Aggregator { Median, Mean };

/// One point of the hyperparameter grid; also the knobs of a single
/// forecast run. The horizon is passed separately because it is a
/// property of the request, not of the search.
struct HyperParams {
	std::size_t window = 48;
	int degree = 1;
	std::size_t matches = 15;
	std::optional<std::size_t> min_separation; // default: window (disjoint matches)
	Aggregator aggregator = Aggregator::Median;

	std::size_t separation() const noexcept { return min_separation.value_or(window); }
};

/// Point forecast plus the spread of the per-match projections. All
/// per-step arrays hold `horizon` entries; `projections` is one row per
/// selected match, aligned with `matches`.
struct ForecastResult {
	std::vector<double> point;
	std::vector<double> q1;
	std::vector<double> median;
	std::vector<double> q3;
	std::vector<double> lo;
	std::vector<double> hi;
	std::vector<std::vector<double>> projections;
	std::vector<Match> matches; // descending r2, the selection order
	HyperParams params;
	std::size_t horizon = 0;
};

/// Maps the `horizon` observations following the candidate window
/// through its similarity function.
std::vector<double> project(const TimeSeries& ts, const Match& match, std::size_t window,
                            std::size_t horizon);

/// Aggregates the projections of already-selected matches into a
/// ForecastResult; `forecast` composes scan -> select -> assemble.
ForecastResult assemble_forecast(const TimeSeries& ts, std::vector<Match> selected,
                                 const HyperParams& params, std::size_t horizon);

ForecastResult forecast(const TimeSeries& ts, const HyperParams& params, std::size_t horizon,
                        const ScanOptions& options = {});

/// Element-wise max of every forecast and interval array with `floor`.
ForecastResult clamp_floor(ForecastResult result, double floor);

} // namespace dtsf
