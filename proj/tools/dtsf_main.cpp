// dtsf command-line front end: ingest a CSV series, then scan for
// matches, forecast, grid-search hyperparameters, backtest, or print
// summary statistics. Talks to the engine exclusively through the C API
// in dtsf.h; output is JSON or tidy CSV suitable for external plotting.

#include <dtsf.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

// Exit codes: 0 success, 1 algorithm error, 2 i/o or parse error,
// 3 invalid arguments.
enum ExitCode { kOk = 0, kAlgorithm = 1, kIo = 2, kUsage = 3 };

int exit_code_for(dtsf_status status, bool loading) {
	switch (status) {
	case DTSF_OK: return kOk;
	case DTSF_ERR_INVALID_ARGUMENT: return kUsage;
	case DTSF_ERR_IO: return kIo;
	case DTSF_ERR_MALFORMED_RECORD:
	case DTSF_ERR_IRREGULAR_SPACING: return kIo;
	case DTSF_ERR_EMPTY_SERIES: return loading ? kIo : kAlgorithm;
	default: return kAlgorithm;
	}
}

int complain(dtsf_status status, bool loading) {
	std::cerr << "dtsf: " << dtsf_last_error() << "\n";
	return exit_code_for(status, loading);
}

std::string fmt(double value) {
	char buffer[40];
	const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
	if (ec != std::errc()) return "nan";
	return std::string(buffer, ptr);
}

std::string iso(long long epoch) {
	char buffer[24];
	if (dtsf_format_time(epoch, buffer, sizeof(buffer)) != DTSF_OK) return "";
	return buffer;
}

std::string join_csv_row(const std::vector<std::string>& cells) {
	std::string row;
	for (std::size_t i = 0; i < cells.size(); ++i) {
		if (i > 0) row += ',';
		row += cells[i];
	}
	row += '\n';
	return row;
}

// ------------------------------------------------------------------
// Options
// ------------------------------------------------------------------

struct CommonOpts {
	std::string input;
	std::string timestamp_col = "0";
	std::string value_col = "1";
	std::string delimiter = ",";
	std::string header = "auto"; // auto|yes|no
	long long step_seconds = 0;
	bool interpolate = false;
	std::size_t aggregate = 1;
	std::string output = "-";
	std::string format = "json";
	std::string config;
};

struct ScanCliOpts {
	std::size_t window = 48;
	std::size_t horizon = 48;
	int degree = 1;
	std::size_t matches = 15;
	long long min_sep = -1;
	std::string aggregator = "median";
	double clamp_floor = 0.0;
	bool all_projections = false;
	bool naive_scan = false;
	unsigned threads = 0;
};

struct GridCliOpts {
	std::vector<std::size_t> windows;
	std::vector<int> degrees;
	std::vector<std::size_t> match_counts;
};

struct BacktestCliOpts {
	std::vector<std::size_t> eval_indices;
	std::vector<std::string> eval_dates;
	bool with_naive = false;
};

const std::vector<std::size_t> kDefaultWindows{24, 48, 72, 96, 120};
const std::vector<int> kDefaultDegrees{1, 2, 3, 4};
const std::vector<std::size_t> kDefaultMatchCounts{15, 25, 50};

// ------------------------------------------------------------------
// JSON config file: flat object, keys are long option names; command
// line flags take precedence over config values.
// ------------------------------------------------------------------

struct ConfigBinding {
	CLI::Option* option = nullptr;
	std::function<void(const json&)> apply;
};

using ConfigMap = std::map<std::string, ConfigBinding>;

template <typename T>
void assign_from_json(T& var, const json& value) {
	if constexpr (std::is_same_v<T, std::string>) {
		var = value.is_string() ? value.get<std::string>() : value.dump();
	} else if constexpr (std::is_same_v<T, bool>) {
		var = value.get<bool>();
	} else if constexpr (std::is_same_v<T, std::vector<std::size_t>> ||
	                     std::is_same_v<T, std::vector<int>> ||
	                     std::is_same_v<T, std::vector<std::string>>) {
		var.clear();
		if (value.is_array()) {
			for (const auto& item : value) {
				typename T::value_type one;
				assign_from_json(one, item);
				var.push_back(one);
			}
		} else {
			// Accept "24,48,72" the way the command line does.
			std::string text = value.is_string() ? value.get<std::string>() : value.dump();
			std::size_t begin = 0;
			while (begin <= text.size()) {
				const std::size_t end = text.find(',', begin);
				const std::string piece =
					text.substr(begin, end == std::string::npos ? end : end - begin);
				if (!piece.empty()) {
					typename T::value_type one;
					assign_from_json(one, json(piece));
					var.push_back(one);
				}
				if (end == std::string::npos) break;
				begin = end + 1;
			}
		}
	} else {
		// Numbers, possibly spelled as strings.
		if (value.is_string()) {
			var = static_cast<T>(std::stod(value.get<std::string>()));
		} else {
			var = value.get<T>();
		}
	}
}

std::string config_key(const std::string& cli_name) {
	const std::size_t start = cli_name.find_first_not_of('-');
	const std::size_t comma = cli_name.find(',', start);
	return cli_name.substr(start, comma == std::string::npos ? comma : comma - start);
}

template <typename T>
CLI::Option* add_opt(CLI::App* cmd, ConfigMap& reg, const std::string& name, T& var,
                     const std::string& desc) {
	CLI::Option* opt = cmd->add_option(name, var, desc);
	reg[config_key(name)] = ConfigBinding{opt, [&var](const json& v) { assign_from_json(var, v); }};
	return opt;
}

CLI::Option* add_flag(CLI::App* cmd, ConfigMap& reg, const std::string& name, bool& var,
                      const std::string& desc) {
	CLI::Option* opt = cmd->add_flag(name, var, desc);
	reg[config_key(name)] = ConfigBinding{opt, [&var](const json& v) { var = v.get<bool>(); }};
	return opt;
}

// Returns an exit code, or -1 to continue.
int apply_config_file(const CommonOpts& common, const ConfigMap& reg) {
	if (common.config.empty()) return -1;
	std::ifstream file(common.config);
	if (!file) {
		std::cerr << "dtsf: cannot open config file '" << common.config << "'\n";
		return kIo;
	}
	json parsed;
	try {
		parsed = json::parse(file);
	} catch (const std::exception& e) {
		std::cerr << "dtsf: config file '" << common.config << "': " << e.what() << "\n";
		return kIo;
	}
	if (!parsed.is_object()) {
		std::cerr << "dtsf: config file must hold a JSON object\n";
		return kUsage;
	}
	for (const auto& [key, value] : parsed.items()) {
		const auto it = reg.find(key);
		if (it == reg.end()) {
			std::cerr << "dtsf: config key '" << key << "' is not an option of this command\n";
			return kUsage;
		}
		if (it->second.option->count() > 0) continue; // command line wins
		try {
			it->second.apply(value);
		} catch (const std::exception& e) {
			std::cerr << "dtsf: config key '" << key << "': " << e.what() << "\n";
			return kUsage;
		}
	}
	return -1;
}

// ------------------------------------------------------------------
// Series loading and output writing
// ------------------------------------------------------------------

struct SeriesHandle {
	dtsf_series* ptr = nullptr;
	SeriesHandle() = default;
	SeriesHandle(const SeriesHandle&) = delete;
	SeriesHandle& operator=(const SeriesHandle&) = delete;
	~SeriesHandle() { dtsf_series_free(ptr); }
};

// Returns an exit code, or -1 on success.
int load_series(const CommonOpts& common, SeriesHandle& series) {
	if (common.input.empty()) {
		std::cerr << "dtsf: --input is required\n";
		return kUsage;
	}
	if (common.delimiter.size() != 1) {
		std::cerr << "dtsf: --delimiter must be a single character\n";
		return kUsage;
	}
	dtsf_csv_options opts;
	dtsf_csv_options_init(&opts);
	opts.delimiter = common.delimiter[0];
	if (common.header == "yes")
		opts.has_header = 1;
	else if (common.header == "no")
		opts.has_header = 0;
	else
		opts.has_header = -1;
	opts.timestamp_column = common.timestamp_col.c_str();
	opts.value_column = common.value_col.c_str();
	opts.step_seconds = common.step_seconds;
	opts.interpolate_gaps = common.interpolate ? 1 : 0;

	dtsf_status status = dtsf_series_load_csv(common.input.c_str(), &opts, &series.ptr);
	if (status != DTSF_OK) return complain(status, true);

	if (common.aggregate > 1) {
		dtsf_series* reduced = nullptr;
		status = dtsf_series_aggregate(series.ptr, common.aggregate, DTSF_REDUCE_MEAN, &reduced);
		if (status != DTSF_OK) return complain(status, true);
		dtsf_series_free(series.ptr);
		series.ptr = reduced;
	}
	return -1;
}

int write_output(const CommonOpts& common, const std::string& payload) {
	if (common.output.empty() || common.output == "-") {
		std::cout << payload;
		return std::cout ? kOk : kIo;
	}
	std::ofstream file(common.output, std::ios::binary | std::ios::trunc);
	if (!file) {
		std::cerr << "dtsf: cannot open '" << common.output << "' for writing\n";
		return kIo;
	}
	file << payload;
	file.flush();
	if (!file) {
		std::cerr << "dtsf: failed to write '" << common.output << "'\n";
		return kIo;
	}
	return kOk;
}

json input_block(const CommonOpts& common, const dtsf_series* series) {
	json block;
	block["path"] = common.input;
	block["length"] = dtsf_series_length(series);
	block["start"] = iso(dtsf_series_start(series));
	block["step_seconds"] = dtsf_series_step(series);
	if (common.aggregate > 1) block["aggregate"] = common.aggregate;
	return block;
}

dtsf_params build_params(const ScanCliOpts& opts) {
	dtsf_params params;
	dtsf_params_init(&params);
	params.window = opts.window;
	params.horizon = opts.horizon;
	params.degree = opts.degree;
	params.matches = opts.matches;
	params.min_separation = opts.min_sep;
	params.aggregator = opts.aggregator == "mean" ? DTSF_AGG_MEAN : DTSF_AGG_MEDIAN;
	params.naive_scan = opts.naive_scan ? 1 : 0;
	params.threads = opts.threads;
	return params;
}

json params_block(const dtsf_params& params) {
	json block;
	block["window"] = params.window;
	block["horizon"] = params.horizon;
	block["degree"] = params.degree;
	block["matches"] = params.matches;
	block["min_separation"] = params.min_separation;
	block["aggregator"] = params.aggregator == DTSF_AGG_MEAN ? "mean" : "median";
	return block;
}

json match_entry(const dtsf_match_info& info, const dtsf_series* series, std::size_t window) {
	const std::size_t n = dtsf_series_length(series);
	const long long step = dtsf_series_step(series);
	const std::size_t age_steps = n - (info.start + window);
	json entry;
	entry["start"] = info.start;
	entry["start_time"] = iso(dtsf_series_timestamp_at(series, info.start));
	entry["age_steps"] = age_steps;
	entry["age_days"] =
		static_cast<double>(age_steps) * static_cast<double>(step) / 86400.0;
	entry["r2"] = info.r2;
	json coeffs = json::array();
	for (int q = 0; q <= info.degree; ++q) coeffs.push_back(info.beta[q]);
	entry["coefficients"] = coeffs;
	return entry;
}

// ------------------------------------------------------------------
// Commands
// ------------------------------------------------------------------

int run_stats(const CommonOpts& common) {
	SeriesHandle series;
	if (int rc = load_series(common, series); rc >= 0) return rc;

	dtsf_summary summary{};
	const dtsf_status status = dtsf_series_summary(series.ptr, &summary);
	if (status != DTSF_OK) return complain(status, false);
	const std::size_t n = dtsf_series_length(series.ptr);

	std::string payload;
	if (common.format == "json") {
		json doc;
		doc["command"] = "stats";
		doc["input"] = input_block(common, series.ptr);
		json stats;
		stats["length"] = summary.length;
		stats["start"] = iso(dtsf_series_start(series.ptr));
		stats["end"] = iso(dtsf_series_timestamp_at(series.ptr, n - 1));
		stats["step_seconds"] = dtsf_series_step(series.ptr);
		stats["mean"] = summary.mean;
		stats["sd"] = summary.sd;
		stats["min"] = summary.min;
		stats["max"] = summary.max;
		doc["stats"] = stats;
		payload = doc.dump(2) + "\n";
	} else {
		payload = "length,start,end,step_seconds,mean,sd,min,max\n";
		payload += join_csv_row({std::to_string(summary.length),
		                         iso(dtsf_series_start(series.ptr)),
		                         iso(dtsf_series_timestamp_at(series.ptr, n - 1)),
		                         std::to_string(dtsf_series_step(series.ptr)), fmt(summary.mean),
		                         fmt(summary.sd), fmt(summary.min), fmt(summary.max)});
	}
	return write_output(common, payload);
}

int run_scan(const CommonOpts& common, const ScanCliOpts& opts) {
	SeriesHandle series;
	if (int rc = load_series(common, series); rc >= 0) return rc;

	const dtsf_params params = build_params(opts);
	dtsf_match_list* list = nullptr;
	const dtsf_status status = dtsf_scan(series.ptr, &params, &list);
	if (status != DTSF_OK) return complain(status, false);
	const std::unique_ptr<dtsf_match_list, decltype(&dtsf_match_list_free)> guard(
		list, &dtsf_match_list_free);

	std::string payload;
	if (common.format == "json") {
		json doc;
		doc["command"] = "scan";
		doc["input"] = input_block(common, series.ptr);
		doc["params"] = params_block(params);
		json matches = json::array();
		for (std::size_t i = 0; i < dtsf_match_list_size(list); ++i) {
			dtsf_match_info info{};
			dtsf_match_list_get(list, i, &info);
			json entry = match_entry(info, series.ptr, params.window);
			entry["rank"] = i + 1;
			matches.push_back(entry);
		}
		doc["matches"] = matches;
		payload = doc.dump(2) + "\n";
	} else {
		std::string header = "rank,start,start_time,age_steps,age_days,r2";
		for (int q = 0; q <= params.degree; ++q) header += ",b" + std::to_string(q);
		payload = header + "\n";
		const std::size_t n = dtsf_series_length(series.ptr);
		const long long step = dtsf_series_step(series.ptr);
		for (std::size_t i = 0; i < dtsf_match_list_size(list); ++i) {
			dtsf_match_info info{};
			dtsf_match_list_get(list, i, &info);
			const std::size_t age_steps = n - (info.start + params.window);
			std::vector<std::string> cells{
				std::to_string(i + 1), std::to_string(info.start),
				iso(dtsf_series_timestamp_at(series.ptr, info.start)),
				std::to_string(age_steps),
				fmt(static_cast<double>(age_steps) * static_cast<double>(step) / 86400.0),
				fmt(info.r2)};
			for (int q = 0; q <= info.degree; ++q) cells.push_back(fmt(info.beta[q]));
			payload += join_csv_row(cells);
		}
	}
	return write_output(common, payload);
}

int run_forecast(const CommonOpts& common, const ScanCliOpts& opts, bool clamp_given) {
	SeriesHandle series;
	if (int rc = load_series(common, series); rc >= 0) return rc;

	const dtsf_params params = build_params(opts);
	dtsf_forecast* fc = nullptr;
	dtsf_status status = dtsf_run_forecast(series.ptr, &params, &fc);
	if (status != DTSF_OK) return complain(status, false);
	const std::unique_ptr<dtsf_forecast, decltype(&dtsf_forecast_free)> guard(
		fc, &dtsf_forecast_free);

	if (clamp_given) {
		status = dtsf_forecast_clamp(fc, opts.clamp_floor);
		if (status != DTSF_OK) return complain(status, false);
	}

	const std::size_t h = dtsf_forecast_horizon(fc);
	const std::size_t n = dtsf_series_length(series.ptr);
	const long long start = dtsf_series_start(series.ptr);
	const long long step = dtsf_series_step(series.ptr);
	const double* point = dtsf_forecast_point(fc);
	const double* q1 = dtsf_forecast_q1(fc);
	const double* median = dtsf_forecast_median(fc);
	const double* q3 = dtsf_forecast_q3(fc);
	const double* lo = dtsf_forecast_lo(fc);
	const double* hi = dtsf_forecast_hi(fc);
	const std::size_t m = dtsf_forecast_match_count(fc);

	std::string payload;
	if (common.format == "json") {
		json doc;
		doc["command"] = "forecast";
		doc["input"] = input_block(common, series.ptr);
		json pblock = params_block(params);
		if (clamp_given)
			pblock["clamp_floor"] = opts.clamp_floor;
		else
			pblock["clamp_floor"] = nullptr;
		doc["params"] = pblock;
		json matches = json::array();
		for (std::size_t i = 0; i < m; ++i) {
			dtsf_match_info info{};
			dtsf_forecast_match(fc, i, &info);
			matches.push_back(match_entry(info, series.ptr, params.window));
		}
		doc["matches"] = matches;
		json rows = json::array();
		for (std::size_t i = 0; i < h; ++i) {
			json row;
			row["step"] = i + 1;
			row["timestamp"] = iso(start + static_cast<long long>(n + i) * step);
			row["point"] = point[i];
			row["q1"] = q1[i];
			row["median"] = median[i];
			row["q3"] = q3[i];
			row["lo"] = lo[i];
			row["hi"] = hi[i];
			rows.push_back(row);
		}
		doc["forecast"] = rows;
		if (opts.all_projections) {
			json projections = json::array();
			for (std::size_t k = 0; k < m; ++k) {
				const double* proj = dtsf_forecast_projection(fc, k);
				json row = json::array();
				for (std::size_t i = 0; i < h; ++i) row.push_back(proj[i]);
				projections.push_back(row);
			}
			doc["projections"] = projections;
		}
		payload = doc.dump(2) + "\n";
	} else {
		std::string header = "step,timestamp,point,q1,median,q3,lo,hi";
		if (opts.all_projections)
			for (std::size_t k = 1; k <= m; ++k) header += ",proj" + std::to_string(k);
		payload = header + "\n";
		for (std::size_t i = 0; i < h; ++i) {
			std::vector<std::string> cells{
				std::to_string(i + 1), iso(start + static_cast<long long>(n + i) * step),
				fmt(point[i]), fmt(q1[i]), fmt(median[i]), fmt(q3[i]), fmt(lo[i]), fmt(hi[i])};
			if (opts.all_projections)
				for (std::size_t k = 0; k < m; ++k)
					cells.push_back(fmt(dtsf_forecast_projection(fc, k)[i]));
			payload += join_csv_row(cells);
		}
	}
	return write_output(common, payload);
}

dtsf_grid build_grid(const GridCliOpts& grid) {
	dtsf_grid out{nullptr, 0, nullptr, 0, nullptr, 0};
	if (!grid.windows.empty()) {
		out.windows = grid.windows.data();
		out.n_windows = grid.windows.size();
	}
	if (!grid.degrees.empty()) {
		out.degrees = grid.degrees.data();
		out.n_degrees = grid.degrees.size();
	}
	if (!grid.match_counts.empty()) {
		out.match_counts = grid.match_counts.data();
		out.n_match_counts = grid.match_counts.size();
	}
	return out;
}

json grid_block(const GridCliOpts& grid) {
	json block;
	block["windows"] = grid.windows.empty() ? kDefaultWindows : grid.windows;
	block["degrees"] = grid.degrees.empty() ? kDefaultDegrees : grid.degrees;
	block["match_counts"] = grid.match_counts.empty() ? kDefaultMatchCounts : grid.match_counts;
	return block;
}

int run_select(const CommonOpts& common, const GridCliOpts& grid_opts, std::size_t horizon,
               const std::string& aggregator, bool naive_scan, unsigned threads) {
	SeriesHandle series;
	if (int rc = load_series(common, series); rc >= 0) return rc;

	const dtsf_grid grid = build_grid(grid_opts);
	dtsf_grid_result* result = nullptr;
	const dtsf_status status =
		dtsf_select(series.ptr, &grid, horizon,
	                aggregator == "mean" ? DTSF_AGG_MEAN : DTSF_AGG_MEDIAN,
	                naive_scan ? 1 : 0, threads, &result);
	if (status != DTSF_OK) return complain(status, false);
	const std::unique_ptr<dtsf_grid_result, decltype(&dtsf_grid_result_free)> guard(
		result, &dtsf_grid_result_free);

	dtsf_params best;
	dtsf_grid_result_best(result, &best);

	std::string payload;
	if (common.format == "json") {
		json doc;
		doc["command"] = "select";
		doc["input"] = input_block(common, series.ptr);
		doc["horizon"] = horizon;
		doc["aggregator"] = aggregator;
		doc["grid"] = grid_block(grid_opts);
		json best_block;
		best_block["window"] = best.window;
		best_block["degree"] = best.degree;
		best_block["matches"] = best.matches;
		best_block["min_separation"] = best.min_separation;
		doc["best"] = best_block;
		json table = json::array();
		for (std::size_t i = 0; i < dtsf_grid_result_size(result); ++i) {
			dtsf_config_score row{};
			dtsf_grid_result_row(result, i, &row);
			json entry;
			entry["window"] = row.window;
			entry["degree"] = row.degree;
			entry["matches"] = row.matches;
			entry["mae"] = row.failed ? json(nullptr) : json(row.mae);
			entry["failed"] = row.failed != 0;
			if (row.failed) entry["failure"] = dtsf_status_name(row.failure);
			table.push_back(entry);
		}
		doc["table"] = table;
		payload = doc.dump(2) + "\n";
	} else {
		payload = "window,degree,matches,mae,failed,failure,selected\n";
		for (std::size_t i = 0; i < dtsf_grid_result_size(result); ++i) {
			dtsf_config_score row{};
			dtsf_grid_result_row(result, i, &row);
			const bool selected = !row.failed && row.window == best.window &&
			                      row.degree == best.degree && row.matches == best.matches;
			payload += join_csv_row({std::to_string(row.window), std::to_string(row.degree),
			                         std::to_string(row.matches),
			                         row.failed ? "" : fmt(row.mae),
			                         row.failed ? "1" : "0",
			                         row.failed ? dtsf_status_name(row.failure) : "",
			                         selected ? "1" : "0"});
		}
	}
	return write_output(common, payload);
}

int run_backtest(const CommonOpts& common, const GridCliOpts& grid_opts,
                 const BacktestCliOpts& bt, std::size_t horizon, bool horizon_given,
                 const std::string& aggregator, bool naive_scan, unsigned threads) {
	SeriesHandle series;
	if (int rc = load_series(common, series); rc >= 0) return rc;

	if (bt.eval_indices.empty() == bt.eval_dates.empty()) {
		std::cerr << "dtsf: backtest needs exactly one of --eval-indices or --eval-dates\n";
		return kUsage;
	}

	std::vector<std::size_t> points = bt.eval_indices;
	std::size_t h = horizon;
	if (!bt.eval_dates.empty()) {
		for (const std::string& day : bt.eval_dates) {
			std::size_t index = 0;
			const dtsf_status status = dtsf_series_index_of_day(series.ptr, day.c_str(), &index);
			if (status != DTSF_OK) return complain(status, false);
			points.push_back(index);
		}
		if (!horizon_given) {
			const long long step = dtsf_series_step(series.ptr);
			if (86400 % step != 0) {
				std::cerr << "dtsf: step does not divide one day; pass --horizon explicitly\n";
				return kUsage;
			}
			h = static_cast<std::size_t>(86400 / step); // forecast the whole day
		}
	} else if (!horizon_given) {
		std::cerr << "dtsf: --horizon is required with --eval-indices\n";
		return kUsage;
	}

	const dtsf_grid grid = build_grid(grid_opts);
	dtsf_backtest* report = nullptr;
	const dtsf_status status = dtsf_run_backtest(
		series.ptr, points.data(), points.size(), &grid, h, bt.with_naive ? 1 : 0,
		aggregator == "mean" ? DTSF_AGG_MEAN : DTSF_AGG_MEDIAN, naive_scan ? 1 : 0, threads,
		&report);
	if (status != DTSF_OK) return complain(status, false);
	const std::unique_ptr<dtsf_backtest, decltype(&dtsf_backtest_free)> guard(
		report, &dtsf_backtest_free);

	std::string payload;
	if (common.format == "json") {
		json doc;
		doc["command"] = "backtest";
		doc["input"] = input_block(common, series.ptr);
		doc["horizon"] = h;
		doc["aggregator"] = aggregator;
		doc["grid"] = grid_block(grid_opts);
		json rows = json::array();
		for (std::size_t i = 0; i < dtsf_backtest_row_count(report); ++i) {
			dtsf_backtest_row row{};
			dtsf_backtest_get_row(report, i, &row);
			json entry;
			entry["eval_index"] = row.eval_index;
			entry["eval_time"] = iso(row.eval_time);
			entry["method"] = row.method;
			entry["ok"] = row.ok != 0;
			if (row.ok) {
				entry["mae"] = row.metrics.mae;
				entry["rmse"] = row.metrics.rmse;
				entry["smape"] = row.metrics.smape;
				entry["mf"] = row.metrics.mf;
			} else {
				entry["error"] = row.error != nullptr ? row.error : "";
			}
			entry["seconds"] = row.seconds;
			if (row.has_chosen) {
				json chosen;
				chosen["window"] = row.chosen.window;
				chosen["degree"] = row.chosen.degree;
				chosen["matches"] = row.chosen.matches;
				entry["chosen"] = chosen;
			}
			rows.push_back(entry);
		}
		doc["rows"] = rows;
		json aggregates = json::array();
		for (std::size_t i = 0; i < dtsf_backtest_aggregate_count(report); ++i) {
			dtsf_backtest_aggregate agg{};
			dtsf_backtest_get_aggregate(report, i, &agg);
			json entry;
			entry["method"] = agg.method;
			entry["points"] = agg.points;
			entry["mae"] = agg.metrics.mae;
			entry["rmse"] = agg.metrics.rmse;
			entry["smape"] = agg.metrics.smape;
			entry["mf"] = agg.metrics.mf;
			entry["mean_seconds"] = agg.mean_seconds;
			aggregates.push_back(entry);
		}
		doc["aggregates"] = aggregates;
		doc["total_seconds"] = dtsf_backtest_total_seconds(report);
		payload = doc.dump(2) + "\n";
	} else {
		payload = "scope,eval_index,eval_time,method,ok,mae,rmse,smape,mf,seconds,"
		          "window,degree,matches,error\n";
		for (std::size_t i = 0; i < dtsf_backtest_row_count(report); ++i) {
			dtsf_backtest_row row{};
			dtsf_backtest_get_row(report, i, &row);
			std::vector<std::string> cells{"point",
			                               std::to_string(row.eval_index),
			                               iso(row.eval_time),
			                               row.method,
			                               row.ok ? "1" : "0"};
			if (row.ok) {
				cells.push_back(fmt(row.metrics.mae));
				cells.push_back(fmt(row.metrics.rmse));
				cells.push_back(fmt(row.metrics.smape));
				cells.push_back(fmt(row.metrics.mf));
			} else {
				cells.insert(cells.end(), {"", "", "", ""});
			}
			cells.push_back(fmt(row.seconds));
			if (row.has_chosen) {
				cells.push_back(std::to_string(row.chosen.window));
				cells.push_back(std::to_string(row.chosen.degree));
				cells.push_back(std::to_string(row.chosen.matches));
			} else {
				cells.insert(cells.end(), {"", "", ""});
			}
			cells.push_back(row.ok || row.error == nullptr ? "" : row.error);
			payload += join_csv_row(cells);
		}
		for (std::size_t i = 0; i < dtsf_backtest_aggregate_count(report); ++i) {
			dtsf_backtest_aggregate agg{};
			dtsf_backtest_get_aggregate(report, i, &agg);
			payload += join_csv_row({"aggregate", "", "", agg.method,
			                         std::to_string(agg.points), fmt(agg.metrics.mae),
			                         fmt(agg.metrics.rmse), fmt(agg.metrics.smape),
			                         fmt(agg.metrics.mf), fmt(agg.mean_seconds), "", "", "", ""});
		}
	}
	return write_output(common, payload);
}

void add_common(CLI::App* cmd, ConfigMap& reg, CommonOpts& common) {
	add_opt(cmd, reg, "--input", common.input, "Input CSV path")->required();
	add_opt(cmd, reg, "--timestamp-col", common.timestamp_col,
	        "Timestamp column: 0-based index or header name");
	add_opt(cmd, reg, "--value-col", common.value_col,
	        "Value column: 0-based index or header name");
	add_opt(cmd, reg, "--delimiter", common.delimiter, "Field delimiter (default ',')");
	add_opt(cmd, reg, "--header", common.header, "Header row: auto|yes|no")
		->check(CLI::IsMember({"auto", "yes", "no"}));
	add_opt(cmd, reg, "--step-seconds", common.step_seconds,
	        "Expected spacing in seconds (0 = infer)");
	add_flag(cmd, reg, "--interpolate", common.interpolate,
	         "Fill isolated missing values from their neighbours");
	add_opt(cmd, reg, "--aggregate", common.aggregate,
	        "Aggregate N consecutive observations by their mean");
	add_opt(cmd, reg, "--output", common.output, "Output path ('-' = stdout)");
	add_opt(cmd, reg, "--format", common.format, "Output format: json|csv")
		->check(CLI::IsMember({"json", "csv"}));
	cmd->add_option("--config", common.config, "JSON config file (flags take precedence)");
}

void add_scan_params(CLI::App* cmd, ConfigMap& reg, ScanCliOpts& opts) {
	add_opt(cmd, reg, "--window", opts.window, "Scanning window length (observations)");
	add_opt(cmd, reg, "--horizon", opts.horizon, "Forecast horizon (observations)");
	add_opt(cmd, reg, "--degree", opts.degree, "Similarity polynomial degree (1-4)")
		->check(CLI::Range(1, 4));
	add_opt(cmd, reg, "--matches", opts.matches, "Number of best matches");
	add_opt(cmd, reg, "--min-sep", opts.min_sep,
	        "Minimum start-index gap between matches (-1 = window)");
	add_flag(cmd, reg, "--naive-scan", opts.naive_scan, "Use the reference per-window solver");
	add_opt(cmd, reg, "--threads", opts.threads, "Scan worker threads (0 = hardware)");
}

void add_grid(CLI::App* cmd, ConfigMap& reg, GridCliOpts& grid) {
	add_opt(cmd, reg, "--grid-windows", grid.windows,
	        "Window lengths to search (default 24,48,72,96,120)")
		->delimiter(',');
	add_opt(cmd, reg, "--grid-degrees", grid.degrees, "Degrees to search (default 1,2,3,4)")
		->delimiter(',');
	add_opt(cmd, reg, "--grid-matches", grid.match_counts,
	        "Match counts to search (default 15,25,50)")
		->delimiter(',');
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"dynamic time scan forecasting"};
	app.require_subcommand(1);

	CommonOpts common;
	ScanCliOpts scan_opts;
	GridCliOpts grid_opts;
	BacktestCliOpts bt_opts;
	std::string aggregator = "median";
	std::size_t horizon = 48;
	bool naive_scan = false;
	unsigned threads = 0;
	const auto agg_check = CLI::IsMember({"median", "mean"});

	ConfigMap stats_reg, scan_reg, forecast_reg, select_reg, backtest_reg;

	CLI::App* cmd_stats = app.add_subcommand("stats", "Summary statistics of the input series");
	add_common(cmd_stats, stats_reg, common);

	CLI::App* cmd_scan = app.add_subcommand("scan", "Locate the best-matching windows");
	add_common(cmd_scan, scan_reg, common);
	add_scan_params(cmd_scan, scan_reg, scan_opts);

	CLI::App* cmd_forecast = app.add_subcommand("forecast", "Point forecast with intervals");
	add_common(cmd_forecast, forecast_reg, common);
	add_scan_params(cmd_forecast, forecast_reg, scan_opts);
	add_opt(cmd_forecast, forecast_reg, "--aggregator", scan_opts.aggregator,
	        "Projection aggregator: median|mean")
		->check(agg_check);
	bool clamp_given = false;
	CLI::Option* clamp_opt = cmd_forecast->add_option(
		"--clamp-floor", scan_opts.clamp_floor,
		"Clamp forecasts and intervals to at least this value");
	forecast_reg["clamp-floor"] =
		ConfigBinding{clamp_opt, [&](const json& v) {
						  assign_from_json(scan_opts.clamp_floor, v);
						  clamp_given = true;
					  }};
	add_flag(cmd_forecast, forecast_reg, "--all-projections", scan_opts.all_projections,
	         "Include the full per-match projection matrix");

	CLI::App* cmd_select = app.add_subcommand(
		"select", "Grid-search hyperparameters on the most recent holdout");
	add_common(cmd_select, select_reg, common);
	add_grid(cmd_select, select_reg, grid_opts);
	add_opt(cmd_select, select_reg, "--horizon", horizon, "Holdout/forecast horizon")->required();
	add_opt(cmd_select, select_reg, "--aggregator", aggregator, "Projection aggregator")
		->check(agg_check);
	add_flag(cmd_select, select_reg, "--naive-scan", naive_scan,
	         "Use the reference per-window solver");
	add_opt(cmd_select, select_reg, "--threads", threads, "Scan worker threads");

	CLI::App* cmd_backtest =
		app.add_subcommand("backtest", "Walk-forward evaluation against the naive baseline");
	add_common(cmd_backtest, backtest_reg, common);
	add_grid(cmd_backtest, backtest_reg, grid_opts);
	bool bt_horizon_given = false;
	CLI::Option* horizon_opt = cmd_backtest->add_option(
		"--horizon", horizon, "Forecast horizon (defaults to one day with --eval-dates)");
	backtest_reg["horizon"] = ConfigBinding{horizon_opt, [&](const json& v) {
												assign_from_json(horizon, v);
												bt_horizon_given = true;
											}};
	add_opt(cmd_backtest, backtest_reg, "--eval-indices", bt_opts.eval_indices,
	        "Evaluation points as series indices")
		->delimiter(',');
	add_opt(cmd_backtest, backtest_reg, "--eval-dates", bt_opts.eval_dates,
	        "Evaluation days as YYYY-MM-DD; each forecasts that whole day")
		->delimiter(',');
	add_flag(cmd_backtest, backtest_reg, "--with-naive", bt_opts.with_naive,
	         "Also run the naive previous-day baseline");
	add_opt(cmd_backtest, backtest_reg, "--aggregator", aggregator, "Projection aggregator")
		->check(agg_check);
	add_flag(cmd_backtest, backtest_reg, "--naive-scan", naive_scan,
	         "Use the reference per-window solver");
	add_opt(cmd_backtest, backtest_reg, "--threads", threads, "Scan worker threads");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return kUsage;
	}

	const ConfigMap* reg = nullptr;
	if (cmd_stats->parsed()) reg = &stats_reg;
	if (cmd_scan->parsed()) reg = &scan_reg;
	if (cmd_forecast->parsed()) reg = &forecast_reg;
	if (cmd_select->parsed()) reg = &select_reg;
	if (cmd_backtest->parsed()) reg = &backtest_reg;
	if (reg != nullptr) {
		if (int rc = apply_config_file(common, *reg); rc >= 0) return rc;
	}

	if (cmd_stats->parsed()) return run_stats(common);
	if (cmd_scan->parsed()) return run_scan(common, scan_opts);
	if (cmd_forecast->parsed())
		return run_forecast(common, scan_opts, clamp_given || clamp_opt->count() > 0);
	if (cmd_select->parsed())
		return run_select(common, grid_opts, horizon, aggregator, naive_scan, threads);
	if (cmd_backtest->parsed())
		return run_backtest(common, grid_opts, bt_opts, horizon,
		                    bt_horizon_given || horizon_opt->count() > 0, aggregator,
		                    naive_scan, threads);
	return kUsage;
}
