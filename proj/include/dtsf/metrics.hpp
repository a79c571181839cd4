#pragma once

#include "dtsf/time_series.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dtsf {

struct ErrorReport {
	double mae = 0.0;
	double rmse = 0.0;
	double smape = 0.0;
	double mf = 0.0;
	std::size_t horizon = 0;
};

double mae(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);

/// Symmetric MAPE, (2/k) * sum |y - yhat| / (|y| + |yhat|); bounded [0, 2].
double smape(std::span<const double> y, std::span<const double> yhat);

/// Model-fitting statistic, k * sum (y - yhat)^2 / (sum y)^2.
double mf(std::span<const double> y, std::span<const double> yhat);

ErrorReport evaluate(std::span<const double> y, std::span<const double> yhat);

/// Baseline that repeats the final `horizon` observed values.
std::vector<double> naive_forecast(const TimeSeries& ts, std::size_t horizon);

} // namespace dtsf
