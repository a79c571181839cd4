#pragma once

#include "dtsf/error.hpp"
#include "dtsf/forecast.hpp"
#include "dtsf/metrics.hpp"
#include "dtsf/time_series.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtsf {

/// Hyperparameter grid; defaults reproduce the 4 x 5 x 3 = 60 combination
/// search of window lengths, polynomial degrees and match counts.
struct Grid {
	std::vector<std::size_t> windows{24, 48, 72, 96, 120};
	std::vector<int> degrees{1, 2, 3, 4};
	std::vector<std::size_t> match_counts{15, 25, 50};

	std::size_t size() const noexcept {
		return windows.size() * degrees.size() * match_counts.size();
	}
};

struct ConfigScore {
	std::size_t window = 0;
	int degree = 0;
	std::size_t matches = 0;
	double mae = 0.0; // +inf when the configuration failed
	std::optional<ErrorCode> failure;
};

struct SelectionResult {
	HyperParams best;
	std::vector<ConfigScore> table; // grid order
};

/// Scores every grid combination by its error on the final `horizon`
/// observations (forecast from the truncated series, compare against the
/// held-out values) and returns the argmin. Failing configurations score
/// +inf; ties break toward smaller window, then degree, then match count.
/// min_separation is pinned to the window length during the search.
SelectionResult holdout_select(const TimeSeries& ts, const Grid& grid, std::size_t horizon,
                               Aggregator aggregator = Aggregator::Median,
                               const ScanOptions& options = {});

struct BacktestRow {
	std::size_t eval_index = 0;
	std::int64_t eval_epoch = 0;
	std::string method; // "dtsf" or "naive"
	bool ok = false;
	ErrorReport metrics;
	double seconds = 0.0;
	std::optional<HyperParams> chosen; // dtsf rows: the holdout winner
	std::string error;
};

struct MethodSummary {
	std::string method;
	std::size_t points = 0; // rows that scored successfully
	ErrorReport mean_metrics;
	double mean_seconds = 0.0;
};

struct BacktestReport {
	std::vector<BacktestRow> rows;
	std::vector<MethodSummary> aggregates;
	std::size_t horizon = 0;
	double total_seconds = 0.0;
};

/// Walk-forward evaluation: for every eval point p, hyperparameters are
/// re-selected on values[0, p) alone, the next `horizon` steps are
/// forecast and scored against the observed values. Per-point failures
/// are recorded, not fatal.
BacktestReport backtest(const TimeSeries& ts, std::span<const std::size_t> eval_points,
                        const Grid& grid, std::size_t horizon, bool with_naive,
                        Aggregator aggregator = Aggregator::Median,
                        const ScanOptions& options = {});

} // namespace dtsf
