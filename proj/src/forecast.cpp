#include "dtsf/forecast.hpp"

#include "dtsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dtsf {
namespace {

// Linear interpolation between order statistics (quantile type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
	const std::size_t n = sorted.size();
	if (n == 1) return sorted[0];
	const double pos = p * static_cast<double>(n - 1);
	const std::size_t lo = static_cast<std::size_t>(pos);
	const double frac = pos - static_cast<double>(lo);
	if (lo + 1 >= n) return sorted[n - 1];
	return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

std::vector<double> project(const TimeSeries& ts, const Match& match, std::size_t window,
                            std::size_t horizon) {
	if (match.degenerate)
		throw Error(ErrorCode::DegenerateWindow, "cannot project a degenerate match");
	if (match.start + window + horizon > ts.size())
		throw Error(ErrorCode::InvalidArgument,
		            "match at " + std::to_string(match.start) +
		                " has no follow-up of " + std::to_string(horizon) + " observations");
	std::vector<double> out(horizon);
	const std::span<const double> values = ts.values();
	for (std::size_t i = 0; i < horizon; ++i)
		out[i] = match.fn(values[match.start + window + i]);
	return out;
}

ForecastResult assemble_forecast(const TimeSeries& ts, std::vector<Match> selected,
                                 const HyperParams& params, std::size_t horizon) {
	if (selected.empty())
		throw Error(ErrorCode::TooFewMatches, "no matches to aggregate", 0);

	ForecastResult result;
	result.params = params;
	result.horizon = horizon;
	result.projections.reserve(selected.size());
	for (const Match& match : selected)
		result.projections.push_back(project(ts, match, params.window, horizon));
	result.matches = std::move(selected);

	const std::size_t m = result.projections.size();
	result.point.resize(horizon);
	result.q1.resize(horizon);
	result.median.resize(horizon);
	result.q3.resize(horizon);
	result.lo.resize(horizon);
	result.hi.resize(horizon);

	std::vector<double> column(m);
	for (std::size_t i = 0; i < horizon; ++i) {
		for (std::size_t k = 0; k < m; ++k) column[k] = result.projections[k][i];
		std::sort(column.begin(), column.end());
		result.lo[i] = column.front();
		result.hi[i] = column.back();
		result.q1[i] = quantile_sorted(column, 0.25);
		result.median[i] = quantile_sorted(column, 0.5);
		result.q3[i] = quantile_sorted(column, 0.75);
		if (params.aggregator == Aggregator::Median) {
			result.point[i] = result.median[i];
		} else {
			double sum = 0.0;
			for (double v : column) sum += v;
			result.point[i] = sum / static_cast<double>(m);
		}
	}
	return result;
}

ForecastResult forecast(const TimeSeries& ts, const HyperParams& params, std::size_t horizon,
                        const ScanOptions& options) {
	if (params.matches == 0)
		throw Error(ErrorCode::InvalidArgument, "match count must be positive");
	const auto matches = scan(ts, WindowSpec{params.window, horizon}, params.degree, options);
	auto selected = select_matches(matches, params.matches, params.separation());
	return assemble_forecast(ts, std::move(selected), params, horizon);
}

ForecastResult clamp_floor(ForecastResult result, double floor) {
	auto apply = [floor](std::vector<double>& values) {
		for (double& v : values) v = std::max(v, floor);
	};
	apply(result.point);
	apply(result.q1);
	apply(result.median);
	apply(result.q3);
	apply(result.lo);
	apply(result.hi);
	return result;
}

} // namespace dtsf
