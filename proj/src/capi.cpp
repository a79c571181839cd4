#include "dtsf.h"

#include "dtsf/calendar.hpp"
#include "dtsf/csv.hpp"
#include "dtsf/error.hpp"
#include "dtsf/forecast.hpp"
#include "dtsf/metrics.hpp"
#include "dtsf/scan.hpp"
#include "dtsf/selection.hpp"
#include "dtsf/time_series.hpp"

#include <algorithm>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

struct dtsf_series {
	dtsf::TimeSeries impl;
};

struct dtsf_match_list {
	std::vector<dtsf::Match> impl;
};

struct dtsf_forecast {
	dtsf::ForecastResult impl;
};

struct dtsf_grid_result {
	dtsf::SelectionResult impl;
	size_t horizon;
	int aggregator;
};

struct dtsf_backtest {
	dtsf::BacktestReport impl;
};

namespace {

thread_local std::string g_last_error;

dtsf_status map_code(dtsf::ErrorCode code) {
	using dtsf::ErrorCode;
	switch (code) {
	case ErrorCode::InvalidArgument: return DTSF_ERR_INVALID_ARGUMENT;
	case ErrorCode::Io: return DTSF_ERR_IO;
	case ErrorCode::MalformedRecord: return DTSF_ERR_MALFORMED_RECORD;
	case ErrorCode::IrregularSpacing: return DTSF_ERR_IRREGULAR_SPACING;
	case ErrorCode::EmptySeries: return DTSF_ERR_EMPTY_SERIES;
	case ErrorCode::InsufficientData: return DTSF_ERR_INSUFFICIENT_DATA;
	case ErrorCode::DegenerateWindow: return DTSF_ERR_DEGENERATE_WINDOW;
	case ErrorCode::DegenerateTarget: return DTSF_ERR_DEGENERATE_TARGET;
	case ErrorCode::TooFewMatches: return DTSF_ERR_TOO_FEW_MATCHES;
	case ErrorCode::LengthMismatch: return DTSF_ERR_LENGTH_MISMATCH;
	case ErrorCode::ZeroDenominator: return DTSF_ERR_ZERO_DENOMINATOR;
	case ErrorCode::AllConfigsFailed: return DTSF_ERR_ALL_CONFIGS_FAILED;
	}
	return DTSF_ERR_INTERNAL;
}

dtsf_status fail(dtsf_status status, const char* message) {
	g_last_error = message;
	return status;
}

template <typename Fn>
dtsf_status guarded(Fn&& fn) noexcept {
	try {
		return fn();
	} catch (const dtsf::Error& e) {
		g_last_error = e.what();
		return map_code(e.code());
	} catch (const std::exception& e) {
		g_last_error = e.what();
		return DTSF_ERR_INTERNAL;
	} catch (...) {
		g_last_error = "unknown error";
		return DTSF_ERR_INTERNAL;
	}
}

dtsf::CsvOptions to_cpp(const dtsf_csv_options* options) {
	dtsf::CsvOptions out;
	if (options == nullptr) return out;
	out.delimiter = options->delimiter != '\0' ? options->delimiter : ',';
	if (options->has_header >= 0) out.has_header = options->has_header != 0;
	if (options->timestamp_column != nullptr) out.timestamp_column = options->timestamp_column;
	if (options->value_column != nullptr) out.value_column = options->value_column;
	out.step_seconds = options->step_seconds;
	out.interpolate_gaps = options->interpolate_gaps != 0;
	return out;
}

dtsf::HyperParams to_cpp_params(const dtsf_params& params) {
	dtsf::HyperParams out;
	out.window = params.window;
	out.degree = params.degree;
	out.matches = params.matches;
	if (params.min_separation >= 0)
		out.min_separation = static_cast<std::size_t>(params.min_separation);
	out.aggregator = params.aggregator == DTSF_AGG_MEAN ? dtsf::Aggregator::Mean
	                                                    : dtsf::Aggregator::Median;
	return out;
}

dtsf::ScanOptions to_scan_options(int naive_scan, unsigned int threads) {
	dtsf::ScanOptions out;
	out.mode = naive_scan != 0 ? dtsf::ScanMode::Naive : dtsf::ScanMode::Fast;
	out.threads = threads;
	return out;
}

dtsf::Grid to_cpp_grid(const dtsf_grid* grid) {
	dtsf::Grid out; // defaults already hold the standard 60-combination grid
	if (grid == nullptr) return out;
	if (grid->windows != nullptr && grid->n_windows > 0)
		out.windows.assign(grid->windows, grid->windows + grid->n_windows);
	if (grid->degrees != nullptr && grid->n_degrees > 0)
		out.degrees.assign(grid->degrees, grid->degrees + grid->n_degrees);
	if (grid->match_counts != nullptr && grid->n_match_counts > 0)
		out.match_counts.assign(grid->match_counts, grid->match_counts + grid->n_match_counts);
	return out;
}

void fill_match_info(const dtsf::Match& match, dtsf_match_info* out) {
	out->start = match.start;
	out->r2 = match.r2;
	out->degree = match.fn.degree;
	std::fill(std::begin(out->beta), std::end(out->beta), 0.0);
	for (std::size_t i = 0; i < match.fn.beta.size(); ++i) out->beta[i] = match.fn.beta[i];
}

void fill_params(const dtsf::HyperParams& params, std::size_t horizon, dtsf_params* out) {
	dtsf_params_init(out);
	out->window = params.window;
	out->horizon = horizon;
	out->degree = params.degree;
	out->matches = params.matches;
	out->min_separation = static_cast<long long>(params.separation());
	out->aggregator = params.aggregator == dtsf::Aggregator::Mean ? DTSF_AGG_MEAN
	                                                              : DTSF_AGG_MEDIAN;
}

void fill_metrics(const dtsf::ErrorReport& report, dtsf_metric_set* out) {
	out->mae = report.mae;
	out->rmse = report.rmse;
	out->smape = report.smape;
	out->mf = report.mf;
}

} // namespace

extern "C" {

const char* dtsf_status_name(dtsf_status status) {
	switch (status) {
	case DTSF_OK: return "ok";
	case DTSF_ERR_INVALID_ARGUMENT: return "invalid argument";
	case DTSF_ERR_IO: return "i/o error";
	case DTSF_ERR_MALFORMED_RECORD: return "malformed record";
	case DTSF_ERR_IRREGULAR_SPACING: return "irregular spacing";
	case DTSF_ERR_EMPTY_SERIES: return "empty series";
	case DTSF_ERR_INSUFFICIENT_DATA: return "insufficient data";
	case DTSF_ERR_DEGENERATE_WINDOW: return "degenerate window";
	case DTSF_ERR_DEGENERATE_TARGET: return "degenerate target";
	case DTSF_ERR_TOO_FEW_MATCHES: return "too few matches";
	case DTSF_ERR_LENGTH_MISMATCH: return "length mismatch";
	case DTSF_ERR_ZERO_DENOMINATOR: return "zero denominator";
	case DTSF_ERR_ALL_CONFIGS_FAILED: return "all configurations failed";
	case DTSF_ERR_INTERNAL: return "internal error";
	}
	return "unknown";
}

const char* dtsf_last_error(void) {
	return g_last_error.c_str();
}

const char* dtsf_version(void) {
	return "0.1.0";
}

void dtsf_csv_options_init(dtsf_csv_options* options) {
	if (options == nullptr) return;
	options->delimiter = ',';
	options->has_header = -1;
	options->timestamp_column = nullptr;
	options->value_column = nullptr;
	options->step_seconds = 0;
	options->interpolate_gaps = 0;
}

void dtsf_params_init(dtsf_params* params) {
	if (params == nullptr) return;
	params->window = 48;
	params->horizon = 48;
	params->degree = 1;
	params->matches = 15;
	params->min_separation = -1;
	params->aggregator = DTSF_AGG_MEDIAN;
	params->naive_scan = 0;
	params->threads = 0;
}

dtsf_status dtsf_series_create(const double* values, size_t length, long long start_epoch,
                               long long step_seconds, dtsf_series** out) {
	if (values == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		*out = new dtsf_series{dtsf::TimeSeries(std::vector<double>(values, values + length),
		                                        start_epoch, step_seconds)};
		return DTSF_OK;
	});
}

dtsf_status dtsf_series_load_csv(const char* path, const dtsf_csv_options* options,
                                 dtsf_series** out) {
	if (path == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		*out = new dtsf_series{dtsf::load_csv_file(path, to_cpp(options))};
		return DTSF_OK;
	});
}

dtsf_status dtsf_series_parse_csv(const char* text, size_t length,
                                  const dtsf_csv_options* options, dtsf_series** out) {
	if (text == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		std::istringstream stream(std::string(text, length));
		*out = new dtsf_series{dtsf::load_csv(stream, to_cpp(options))};
		return DTSF_OK;
	});
}

dtsf_status dtsf_series_aggregate(const dtsf_series* series, size_t factor, int reducer,
                                  dtsf_series** out) {
	if (series == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const dtsf::Reducer r =
			reducer == DTSF_REDUCE_MEDIAN ? dtsf::Reducer::Median : dtsf::Reducer::Mean;
		*out = new dtsf_series{series->impl.aggregate(factor, r)};
		return DTSF_OK;
	});
}

void dtsf_series_free(dtsf_series* series) {
	delete series;
}

size_t dtsf_series_length(const dtsf_series* series) {
	return series != nullptr ? series->impl.size() : 0;
}

const double* dtsf_series_values(const dtsf_series* series) {
	return series != nullptr ? series->impl.values().data() : nullptr;
}

long long dtsf_series_start(const dtsf_series* series) {
	return series != nullptr ? series->impl.start_epoch() : 0;
}

long long dtsf_series_step(const dtsf_series* series) {
	return series != nullptr ? series->impl.step_seconds() : 0;
}

long long dtsf_series_timestamp_at(const dtsf_series* series, size_t index) {
	return series != nullptr ? series->impl.timestamp_at(index) : 0;
}

dtsf_status dtsf_series_summary(const dtsf_series* series, dtsf_summary* out) {
	if (series == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const dtsf::SummaryStats stats = series->impl.summary();
		out->mean = stats.mean;
		out->sd = stats.sd;
		out->min = stats.min;
		out->max = stats.max;
		out->length = stats.length;
		return DTSF_OK;
	});
}

dtsf_status dtsf_series_index_of_day(const dtsf_series* series, const char* day, size_t* out) {
	if (series == nullptr || day == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const auto midnight = dtsf::parse_date(day);
		if (!midnight)
			throw dtsf::Error(dtsf::ErrorCode::InvalidArgument,
			                  std::string("unparseable date '") + day + "'");
		const dtsf::TimeSeries& ts = series->impl;
		const long long day_start = *midnight;
		const long long day_end = day_start + 86400;
		const long long start = ts.start_epoch();
		const long long step = ts.step_seconds();
		long long index = (day_start - start + step - 1) / step; // first index at/after midnight
		if (day_start < start) index = 0;
		if (index < 0 || static_cast<size_t>(index) >= ts.size() ||
		    ts.timestamp_at(static_cast<size_t>(index)) >= day_end ||
		    ts.timestamp_at(static_cast<size_t>(index)) < day_start)
			throw dtsf::Error(dtsf::ErrorCode::InvalidArgument,
			                  std::string("no observation on ") + day);
		*out = static_cast<size_t>(index);
		return DTSF_OK;
	});
}

dtsf_status dtsf_format_time(long long epoch_seconds, char* buffer, size_t size) {
	if (buffer == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null buffer");
	return guarded([&] {
		const std::string text = dtsf::format_timestamp(epoch_seconds);
		if (size <= text.size())
			throw dtsf::Error(dtsf::ErrorCode::InvalidArgument, "buffer too small");
		std::memcpy(buffer, text.c_str(), text.size() + 1);
		return DTSF_OK;
	});
}

dtsf_status dtsf_scan(const dtsf_series* series, const dtsf_params* params,
                      dtsf_match_list** out) {
	if (series == nullptr || params == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const dtsf::HyperParams hp = to_cpp_params(*params);
		const auto matches = dtsf::scan(series->impl,
		                                dtsf::WindowSpec{hp.window, params->horizon}, hp.degree,
		                                to_scan_options(params->naive_scan, params->threads));
		auto selected = dtsf::select_matches(matches, hp.matches, hp.separation());
		*out = new dtsf_match_list{std::move(selected)};
		return DTSF_OK;
	});
}

size_t dtsf_match_list_size(const dtsf_match_list* list) {
	return list != nullptr ? list->impl.size() : 0;
}

dtsf_status dtsf_match_list_get(const dtsf_match_list* list, size_t index,
                                dtsf_match_info* out) {
	if (list == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	if (index >= list->impl.size())
		return fail(DTSF_ERR_INVALID_ARGUMENT, "match index out of range");
	fill_match_info(list->impl[index], out);
	return DTSF_OK;
}

void dtsf_match_list_free(dtsf_match_list* list) {
	delete list;
}

dtsf_status dtsf_run_forecast(const dtsf_series* series, const dtsf_params* params,
                              dtsf_forecast** out) {
	if (series == nullptr || params == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		*out = new dtsf_forecast{dtsf::forecast(series->impl, to_cpp_params(*params),
		                                        params->horizon,
		                                        to_scan_options(params->naive_scan,
		                                                        params->threads))};
		return DTSF_OK;
	});
}

size_t dtsf_forecast_horizon(const dtsf_forecast* forecast) {
	return forecast != nullptr ? forecast->impl.horizon : 0;
}

#define DTSF_FORECAST_ARRAY(name)                                            \
	const double* dtsf_forecast_##name(const dtsf_forecast* forecast) {      \
		return forecast != nullptr ? forecast->impl.name.data() : nullptr;   \
	}

DTSF_FORECAST_ARRAY(point)
DTSF_FORECAST_ARRAY(q1)
DTSF_FORECAST_ARRAY(median)
DTSF_FORECAST_ARRAY(q3)
DTSF_FORECAST_ARRAY(lo)
DTSF_FORECAST_ARRAY(hi)

#undef DTSF_FORECAST_ARRAY

size_t dtsf_forecast_match_count(const dtsf_forecast* forecast) {
	return forecast != nullptr ? forecast->impl.matches.size() : 0;
}

dtsf_status dtsf_forecast_match(const dtsf_forecast* forecast, size_t index,
                                dtsf_match_info* out) {
	if (forecast == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	if (index >= forecast->impl.matches.size())
		return fail(DTSF_ERR_INVALID_ARGUMENT, "match index out of range");
	fill_match_info(forecast->impl.matches[index], out);
	return DTSF_OK;
}

const double* dtsf_forecast_projection(const dtsf_forecast* forecast, size_t index) {
	if (forecast == nullptr || index >= forecast->impl.projections.size()) return nullptr;
	return forecast->impl.projections[index].data();
}

dtsf_status dtsf_forecast_clamp(dtsf_forecast* forecast, double floor) {
	if (forecast == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		forecast->impl = dtsf::clamp_floor(std::move(forecast->impl), floor);
		return DTSF_OK;
	});
}

void dtsf_forecast_free(dtsf_forecast* forecast) {
	delete forecast;
}

dtsf_status dtsf_select(const dtsf_series* series, const dtsf_grid* grid, size_t horizon,
                        int aggregator, int naive_scan, unsigned int threads,
                        dtsf_grid_result** out) {
	if (series == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const dtsf::Aggregator agg =
			aggregator == DTSF_AGG_MEAN ? dtsf::Aggregator::Mean : dtsf::Aggregator::Median;
		auto selection = dtsf::holdout_select(series->impl, to_cpp_grid(grid), horizon, agg,
		                                      to_scan_options(naive_scan, threads));
		*out = new dtsf_grid_result{std::move(selection), horizon, aggregator};
		return DTSF_OK;
	});
}

dtsf_status dtsf_grid_result_best(const dtsf_grid_result* result, dtsf_params* out) {
	if (result == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	fill_params(result->impl.best, result->horizon, out);
	return DTSF_OK;
}

size_t dtsf_grid_result_size(const dtsf_grid_result* result) {
	return result != nullptr ? result->impl.table.size() : 0;
}

dtsf_status dtsf_grid_result_row(const dtsf_grid_result* result, size_t index,
                                 dtsf_config_score* out) {
	if (result == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	if (index >= result->impl.table.size())
		return fail(DTSF_ERR_INVALID_ARGUMENT, "row index out of range");
	const dtsf::ConfigScore& score = result->impl.table[index];
	out->window = score.window;
	out->degree = score.degree;
	out->matches = score.matches;
	out->mae = score.mae;
	out->failed = score.failure.has_value() ? 1 : 0;
	out->failure = score.failure ? map_code(*score.failure) : DTSF_OK;
	return DTSF_OK;
}

void dtsf_grid_result_free(dtsf_grid_result* result) {
	delete result;
}

dtsf_status dtsf_run_backtest(const dtsf_series* series, const size_t* eval_indices,
                              size_t n_eval, const dtsf_grid* grid, size_t horizon,
                              int with_naive, int aggregator, int naive_scan,
                              unsigned int threads, dtsf_backtest** out) {
	if (series == nullptr || eval_indices == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const dtsf::Aggregator agg =
			aggregator == DTSF_AGG_MEAN ? dtsf::Aggregator::Mean : dtsf::Aggregator::Median;
		std::vector<std::size_t> points(eval_indices, eval_indices + n_eval);
		auto report = dtsf::backtest(series->impl, points, to_cpp_grid(grid), horizon,
		                             with_naive != 0, agg, to_scan_options(naive_scan, threads));
		*out = new dtsf_backtest{std::move(report)};
		return DTSF_OK;
	});
}

size_t dtsf_backtest_row_count(const dtsf_backtest* report) {
	return report != nullptr ? report->impl.rows.size() : 0;
}

dtsf_status dtsf_backtest_get_row(const dtsf_backtest* report, size_t index,
                                  dtsf_backtest_row* out) {
	if (report == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	if (index >= report->impl.rows.size())
		return fail(DTSF_ERR_INVALID_ARGUMENT, "row index out of range");
	const dtsf::BacktestRow& row = report->impl.rows[index];
	out->eval_index = row.eval_index;
	out->eval_time = row.eval_epoch;
	out->method = row.method.c_str();
	out->ok = row.ok ? 1 : 0;
	fill_metrics(row.metrics, &out->metrics);
	out->seconds = row.seconds;
	out->has_chosen = row.chosen.has_value() ? 1 : 0;
	if (row.chosen)
		fill_params(*row.chosen, report->impl.horizon, &out->chosen);
	else
		dtsf_params_init(&out->chosen);
	out->error = row.ok ? nullptr : row.error.c_str();
	return DTSF_OK;
}

size_t dtsf_backtest_aggregate_count(const dtsf_backtest* report) {
	return report != nullptr ? report->impl.aggregates.size() : 0;
}

dtsf_status dtsf_backtest_get_aggregate(const dtsf_backtest* report, size_t index,
                                        dtsf_backtest_aggregate* out) {
	if (report == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	if (index >= report->impl.aggregates.size())
		return fail(DTSF_ERR_INVALID_ARGUMENT, "aggregate index out of range");
	const dtsf::MethodSummary& summary = report->impl.aggregates[index];
	out->method = summary.method.c_str();
	out->points = summary.points;
	fill_metrics(summary.mean_metrics, &out->metrics);
	out->mean_seconds = summary.mean_seconds;
	return DTSF_OK;
}

double dtsf_backtest_total_seconds(const dtsf_backtest* report) {
	return report != nullptr ? report->impl.total_seconds : 0.0;
}

void dtsf_backtest_free(dtsf_backtest* report) {
	delete report;
}

#define DTSF_METRIC(name)                                                              \
	dtsf_status dtsf_##name(const double* y, const double* yhat, size_t length,        \
	                        double* out) {                                             \
		if (y == nullptr || yhat == nullptr || out == nullptr)                         \
			return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");                   \
		return guarded([&] {                                                           \
			*out = dtsf::name(std::span<const double>(y, length),                      \
			                  std::span<const double>(yhat, length));                  \
			return DTSF_OK;                                                            \
		});                                                                            \
	}

DTSF_METRIC(mae)
DTSF_METRIC(rmse)
DTSF_METRIC(smape)
DTSF_METRIC(mf)

#undef DTSF_METRIC

dtsf_status dtsf_naive_forecast(const dtsf_series* series, size_t horizon, double* out) {
	if (series == nullptr || out == nullptr)
		return fail(DTSF_ERR_INVALID_ARGUMENT, "null argument");
	return guarded([&] {
		const std::vector<double> values = dtsf::naive_forecast(series->impl, horizon);
		std::copy(values.begin(), values.end(), out);
		return DTSF_OK;
	});
}

} // extern "C"
