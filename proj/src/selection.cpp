#include "dtsf/selection.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <tuple>

namespace dtsf {
namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point start) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ErrorReport mean_of(const std::vector<const ErrorReport*>& reports) {
	ErrorReport mean;
	if (reports.empty()) {
		const double nan = std::numeric_limits<double>::quiet_NaN();
		mean.mae = mean.rmse = mean.smape = mean.mf = nan;
		return mean;
	}
	for (const ErrorReport* r : reports) {
		mean.mae += r->mae;
		mean.rmse += r->rmse;
		mean.smape += r->smape;
		mean.mf += r->mf;
		mean.horizon = r->horizon;
	}
	const double n = static_cast<double>(reports.size());
	mean.mae /= n;
	mean.rmse /= n;
	mean.smape /= n;
	mean.mf /= n;
	return mean;
}

} // namespace

SelectionResult holdout_select(const TimeSeries& ts, const Grid& grid, std::size_t horizon,
                               Aggregator aggregator, const ScanOptions& options) {
	if (grid.windows.empty() || grid.degrees.empty() || grid.match_counts.empty())
		throw Error(ErrorCode::InvalidArgument, "grid lists must be non-empty");
	if (horizon == 0)
		throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
	if (ts.size() <= horizon)
		throw Error(ErrorCode::InsufficientData,
		            "series too short to hold out " + std::to_string(horizon) + " observations");

	const TimeSeries train = ts.prefix(ts.size() - horizon);
	const std::span<const double> held_out = ts.values().subspan(ts.size() - horizon);

	SelectionResult result;
	result.table.reserve(grid.size());
	double best_mae = k_inf;
	std::tuple<std::size_t, int, std::size_t> best_key{};
	bool any_ok = false;

	for (std::size_t w : grid.windows) {
		for (int degree : grid.degrees) {
			// One scan serves every match count of this (window, degree).
			std::vector<Match> shared;
			std::optional<ErrorCode> scan_failure;
			try {
				shared = scan(train, WindowSpec{w, horizon}, degree, options);
			} catch (const Error& e) {
				scan_failure = e.code();
			}
			for (std::size_t m : grid.match_counts) {
				ConfigScore score;
				score.window = w;
				score.degree = degree;
				score.matches = m;
				score.mae = k_inf;
				if (scan_failure) {
					score.failure = scan_failure;
				} else {
					try {
						HyperParams params{w, degree, m, w, aggregator};
						auto selected = select_matches(shared, m, w);
						const ForecastResult fc =
							assemble_forecast(train, std::move(selected), params, horizon);
						score.mae = mae(held_out, fc.point);
					} catch (const Error& e) {
						score.failure = e.code();
					}
				}
				if (!score.failure) {
					any_ok = true;
					const std::tuple<std::size_t, int, std::size_t> key{w, degree, m};
					if (score.mae < best_mae || (score.mae == best_mae && key < best_key)) {
						best_mae = score.mae;
						best_key = key;
					}
				}
				result.table.push_back(score);
			}
		}
	}

	if (!any_ok)
		throw Error(ErrorCode::AllConfigsFailed,
		            "every grid configuration failed on the holdout");

	result.best.window = std::get<0>(best_key);
	result.best.degree = std::get<1>(best_key);
	result.best.matches = std::get<2>(best_key);
	result.best.min_separation = result.best.window;
	result.best.aggregator = aggregator;
	return result;
}

BacktestReport backtest(const TimeSeries& ts, std::span<const std::size_t> eval_points,
                        const Grid& grid, std::size_t horizon, bool with_naive,
                        Aggregator aggregator, const ScanOptions& options) {
	if (eval_points.empty())
		throw Error(ErrorCode::InvalidArgument, "no evaluation points given");
	if (horizon == 0)
		throw Error(ErrorCode::InvalidArgument, "horizon must be positive");

	const auto run_start = std::chrono::steady_clock::now();
	BacktestReport report;
	report.horizon = horizon;

	for (std::size_t p : eval_points) {
		BacktestRow dtsf_row;
		dtsf_row.eval_index = p;
		dtsf_row.method = "dtsf";
		if (p < ts.size()) dtsf_row.eval_epoch = ts.timestamp_at(p);

		const auto point_start = std::chrono::steady_clock::now();
		try {
			if (p == 0 || p + horizon > ts.size())
				throw Error(ErrorCode::InsufficientData,
				            "eval point " + std::to_string(p) +
				                " leaves no room for a " + std::to_string(horizon) +
				                "-step holdout inside the series");
			const TimeSeries train = ts.prefix(p);
			const std::span<const double> actual = ts.values().subspan(p, horizon);
			const SelectionResult sel = holdout_select(train, grid, horizon, aggregator, options);
			const ForecastResult fc = forecast(train, sel.best, horizon, options);
			dtsf_row.metrics = evaluate(actual, fc.point);
			dtsf_row.chosen = sel.best;
			dtsf_row.ok = true;
		} catch (const Error& e) {
			dtsf_row.error = e.what();
		}
		dtsf_row.seconds = seconds_since(point_start);
		report.rows.push_back(std::move(dtsf_row));

		if (with_naive) {
			BacktestRow naive_row;
			naive_row.eval_index = p;
			naive_row.method = "naive";
			if (p < ts.size()) naive_row.eval_epoch = ts.timestamp_at(p);
			const auto naive_start = std::chrono::steady_clock::now();
			try {
				if (p == 0 || p + horizon > ts.size())
					throw Error(ErrorCode::InsufficientData,
					            "eval point " + std::to_string(p) + " out of range");
				const TimeSeries train = ts.prefix(p);
				const std::span<const double> actual = ts.values().subspan(p, horizon);
				const std::vector<double> nf = naive_forecast(train, horizon);
				naive_row.metrics = evaluate(actual, nf);
				naive_row.ok = true;
			} catch (const Error& e) {
				naive_row.error = e.what();
			}
			naive_row.seconds = seconds_since(naive_start);
			report.rows.push_back(std::move(naive_row));
		}
	}

	std::vector<std::string> methods{"dtsf"};
	if (with_naive) methods.emplace_back("naive");
	for (const std::string& method : methods) {
		MethodSummary summary;
		summary.method = method;
		std::vector<const ErrorReport*> oks;
		double seconds = 0.0;
		std::size_t rows = 0;
		for (const BacktestRow& row : report.rows) {
			if (row.method != method) continue;
			++rows;
			seconds += row.seconds;
			if (row.ok) oks.push_back(&row.metrics);
		}
		summary.points = oks.size();
		summary.mean_metrics = mean_of(oks);
		summary.mean_seconds = rows > 0 ? seconds / static_cast<double>(rows) : 0.0;
		report.aggregates.push_back(std::move(summary));
	}

	report.total_seconds = seconds_since(run_start);
	return report;
}

} // namespace dtsf
