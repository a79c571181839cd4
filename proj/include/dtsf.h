/*
 * dtsf — dynamic time scan forecasting, C API.
 *
 * Every object the library hands out is an opaque handle owned by the
 * caller and released with the matching *_free function. Functions
 * return DTSF_OK or an error code; dtsf_last_error() holds a
 * human-readable message for the last failing call on this thread.
 * Pointers returned by accessors stay valid until the owning handle is
 * freed; handles are immutable after creation and safe to share across
 * threads.
 */

#ifndef DTSF_H
#define DTSF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DTSF_API __declspec(dllexport)
#else
#define DTSF_API __attribute__((visibility("default")))
#endif

typedef enum dtsf_status {
	DTSF_OK = 0,
	DTSF_ERR_INVALID_ARGUMENT = 1,
	DTSF_ERR_IO = 2,
	DTSF_ERR_MALFORMED_RECORD = 3,
	DTSF_ERR_IRREGULAR_SPACING = 4,
	DTSF_ERR_EMPTY_SERIES = 5,
	DTSF_ERR_INSUFFICIENT_DATA = 6,
	DTSF_ERR_DEGENERATE_WINDOW = 7,
	DTSF_ERR_DEGENERATE_TARGET = 8,
	DTSF_ERR_TOO_FEW_MATCHES = 9,
	DTSF_ERR_LENGTH_MISMATCH = 10,
	DTSF_ERR_ZERO_DENOMINATOR = 11,
	DTSF_ERR_ALL_CONFIGS_FAILED = 12,
	DTSF_ERR_INTERNAL = 13
} dtsf_status;

DTSF_API const char* dtsf_status_name(dtsf_status status);
DTSF_API const char* dtsf_last_error(void);
DTSF_API const char* dtsf_version(void);

/* ------------------------------------------------------------------ */
/* Series                                                              */
/* ------------------------------------------------------------------ */

typedef struct dtsf_series dtsf_series;

enum { DTSF_REDUCE_MEAN = 0, DTSF_REDUCE_MEDIAN = 1 };
enum { DTSF_AGG_MEDIAN = 0, DTSF_AGG_MEAN = 1 };

typedef struct dtsf_csv_options {
	char delimiter;                /* default ',' */
	int has_header;                /* -1 auto-detect, 0 no, 1 yes */
	const char* timestamp_column;  /* 0-based index as text, or header name; NULL = "0" */
	const char* value_column;      /* NULL = "1" */
	long long step_seconds;        /* expected spacing; 0 = infer */
	int interpolate_gaps;          /* fill isolated missing values */
} dtsf_csv_options;

DTSF_API void dtsf_csv_options_init(dtsf_csv_options* options);

DTSF_API dtsf_status dtsf_series_create(const double* values, size_t length,
                                        long long start_epoch, long long step_seconds,
                                        dtsf_series** out);
DTSF_API dtsf_status dtsf_series_load_csv(const char* path, const dtsf_csv_options* options,
                                          dtsf_series** out);
DTSF_API dtsf_status dtsf_series_parse_csv(const char* text, size_t length,
                                           const dtsf_csv_options* options, dtsf_series** out);
DTSF_API dtsf_status dtsf_series_aggregate(const dtsf_series* series, size_t factor,
                                           int reducer, dtsf_series** out);
DTSF_API void dtsf_series_free(dtsf_series* series);

DTSF_API size_t dtsf_series_length(const dtsf_series* series);
DTSF_API const double* dtsf_series_values(const dtsf_series* series);
DTSF_API long long dtsf_series_start(const dtsf_series* series);
DTSF_API long long dtsf_series_step(const dtsf_series* series);
DTSF_API long long dtsf_series_timestamp_at(const dtsf_series* series, size_t index);

typedef struct dtsf_summary {
	double mean;
	double sd;
	double min;
	double max;
	size_t length;
} dtsf_summary;

DTSF_API dtsf_status dtsf_series_summary(const dtsf_series* series, dtsf_summary* out);

/* Index of the first observation falling on the calendar day
 * "YYYY-MM-DD" (UTC). */
DTSF_API dtsf_status dtsf_series_index_of_day(const dtsf_series* series, const char* day,
                                              size_t* out);

/* Formats epoch seconds as "YYYY-MM-DDTHH:MM:SS"; buffer needs at least
 * 20 bytes. */
DTSF_API dtsf_status dtsf_format_time(long long epoch_seconds, char* buffer, size_t size);

/* ------------------------------------------------------------------ */
/* Scanning and forecasting                                            */
/* ------------------------------------------------------------------ */

typedef struct dtsf_params {
	size_t window;
	size_t horizon;
	int degree;               /* 1..4 */
	size_t matches;
	long long min_separation; /* -1 = window length (disjoint matches) */
	int aggregator;           /* DTSF_AGG_MEDIAN | DTSF_AGG_MEAN */
	int naive_scan;           /* nonzero forces the reference per-window fit */
	unsigned int threads;     /* 0 = hardware concurrency */
} dtsf_params;

DTSF_API void dtsf_params_init(dtsf_params* params);

typedef struct dtsf_match_info {
	size_t start;
	double r2;
	int degree;
	double beta[5]; /* ascending powers; entries above degree are 0 */
} dtsf_match_info;

typedef struct dtsf_match_list dtsf_match_list;

/* Scan + selection: the `matches` best candidate windows, descending r2. */
DTSF_API dtsf_status dtsf_scan(const dtsf_series* series, const dtsf_params* params,
                               dtsf_match_list** out);
DTSF_API size_t dtsf_match_list_size(const dtsf_match_list* list);
DTSF_API dtsf_status dtsf_match_list_get(const dtsf_match_list* list, size_t index,
                                         dtsf_match_info* out);
DTSF_API void dtsf_match_list_free(dtsf_match_list* list);

typedef struct dtsf_forecast dtsf_forecast;

DTSF_API dtsf_status dtsf_run_forecast(const dtsf_series* series, const dtsf_params* params,
                                       dtsf_forecast** out);
DTSF_API size_t dtsf_forecast_horizon(const dtsf_forecast* forecast);
DTSF_API const double* dtsf_forecast_point(const dtsf_forecast* forecast);
DTSF_API const double* dtsf_forecast_q1(const dtsf_forecast* forecast);
DTSF_API const double* dtsf_forecast_median(const dtsf_forecast* forecast);
DTSF_API const double* dtsf_forecast_q3(const dtsf_forecast* forecast);
DTSF_API const double* dtsf_forecast_lo(const dtsf_forecast* forecast);
DTSF_API const double* dtsf_forecast_hi(const dtsf_forecast* forecast);
DTSF_API size_t dtsf_forecast_match_count(const dtsf_forecast* forecast);
DTSF_API dtsf_status dtsf_forecast_match(const dtsf_forecast* forecast, size_t index,
                                         dtsf_match_info* out);
/* Row of the projections matrix for one match; `horizon` values. */
DTSF_API const double* dtsf_forecast_projection(const dtsf_forecast* forecast, size_t index);
/* Element-wise max of all forecast and interval arrays with `floor`. */
DTSF_API dtsf_status dtsf_forecast_clamp(dtsf_forecast* forecast, double floor);
DTSF_API void dtsf_forecast_free(dtsf_forecast* forecast);

/* ------------------------------------------------------------------ */
/* Hyperparameter search and backtesting                               */
/* ------------------------------------------------------------------ */

typedef struct dtsf_grid {
	const size_t* windows;      /* NULL = {24, 48, 72, 96, 120} */
	size_t n_windows;
	const int* degrees;         /* NULL = {1, 2, 3, 4} */
	size_t n_degrees;
	const size_t* match_counts; /* NULL = {15, 25, 50} */
	size_t n_match_counts;
} dtsf_grid;

typedef struct dtsf_config_score {
	size_t window;
	int degree;
	size_t matches;
	double mae; /* +inf when failed */
	int failed;
	dtsf_status failure;
} dtsf_config_score;

typedef struct dtsf_grid_result dtsf_grid_result;

DTSF_API dtsf_status dtsf_select(const dtsf_series* series, const dtsf_grid* grid,
                                 size_t horizon, int aggregator, int naive_scan,
                                 unsigned int threads, dtsf_grid_result** out);
DTSF_API dtsf_status dtsf_grid_result_best(const dtsf_grid_result* result, dtsf_params* out);
DTSF_API size_t dtsf_grid_result_size(const dtsf_grid_result* result);
DTSF_API dtsf_status dtsf_grid_result_row(const dtsf_grid_result* result, size_t index,
                                          dtsf_config_score* out);
DTSF_API void dtsf_grid_result_free(dtsf_grid_result* result);

typedef struct dtsf_metric_set {
	double mae;
	double rmse;
	double smape;
	double mf;
} dtsf_metric_set;

typedef struct dtsf_backtest_row {
	size_t eval_index;
	long long eval_time;
	const char* method; /* owned by the report */
	int ok;
	dtsf_metric_set metrics;
	double seconds;
	int has_chosen;
	dtsf_params chosen;
	const char* error; /* NULL when ok */
} dtsf_backtest_row;

typedef struct dtsf_backtest_aggregate {
	const char* method;
	size_t points;
	dtsf_metric_set metrics;
	double mean_seconds;
} dtsf_backtest_aggregate;

typedef struct dtsf_backtest dtsf_backtest;

DTSF_API dtsf_status dtsf_run_backtest(const dtsf_series* series, const size_t* eval_indices,
                                       size_t n_eval, const dtsf_grid* grid, size_t horizon,
                                       int with_naive, int aggregator, int naive_scan,
                                       unsigned int threads, dtsf_backtest** out);
DTSF_API size_t dtsf_backtest_row_count(const dtsf_backtest* report);
DTSF_API dtsf_status dtsf_backtest_get_row(const dtsf_backtest* report, size_t index,
                                           dtsf_backtest_row* out);
DTSF_API size_t dtsf_backtest_aggregate_count(const dtsf_backtest* report);
DTSF_API dtsf_status dtsf_backtest_get_aggregate(const dtsf_backtest* report, size_t index,
                                                 dtsf_backtest_aggregate* out);
DTSF_API double dtsf_backtest_total_seconds(const dtsf_backtest* report);
DTSF_API void dtsf_backtest_free(dtsf_backtest* report);

/* ------------------------------------------------------------------ */
/* Error metrics and the naive baseline                                */
/* ------------------------------------------------------------------ */

DTSF_API dtsf_status dtsf_mae(const double* y, const double* yhat, size_t length, double* out);
DTSF_API dtsf_status dtsf_rmse(const double* y, const double* yhat, size_t length, double* out);
DTSF_API dtsf_status dtsf_smape(const double* y, const double* yhat, size_t length, double* out);
DTSF_API dtsf_status dtsf_mf(const double* y, const double* yhat, size_t length, double* out);

/* Repeats the final `horizon` observations into `out` (>= horizon doubles). */
DTSF_API dtsf_status dtsf_naive_forecast(const dtsf_series* series, size_t horizon, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DTSF_H */
