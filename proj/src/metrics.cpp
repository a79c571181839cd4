#include "dtsf/metrics.hpp"

#include "dtsf/error.hpp"

#include <cmath>
#include <string>

namespace dtsf {
namespace {

void check_lengths(std::span<const double> y, std::span<const double> yhat) {
	if (y.size() != yhat.size() || y.empty())
		throw Error(ErrorCode::LengthMismatch,
		            "metric inputs must be equal-length and non-empty (got " +
		                std::to_string(y.size()) + " and " + std::to_string(yhat.size()) + ")");
}

} // namespace

double mae(std::span<const double> y, std::span<const double> yhat) {
	check_lengths(y, yhat);
	double acc = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - yhat[i]);
	return acc / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
	check_lengths(y, yhat);
	double acc = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double d = y[i] - yhat[i];
		acc += d * d;
	}
	return std::sqrt(acc / static_cast<double>(y.size()));
}

double smape(std::span<const double> y, std::span<const double> yhat) {
	check_lengths(y, yhat);
	double acc = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double denom = std::abs(y[i]) + std::abs(yhat[i]);
		if (denom == 0.0)
			throw Error(ErrorCode::ZeroDenominator,
			            "sMAPE pair at index " + std::to_string(i) + " is identically zero",
			            static_cast<std::int64_t>(i));
		acc += std::abs(y[i] - yhat[i]) / denom;
	}
	return 2.0 * acc / static_cast<double>(y.size());
}

double mf(std::span<const double> y, std::span<const double> yhat) {
	check_lengths(y, yhat);
	double sum_y = 0.0;
	double ss = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		sum_y += y[i];
		const double d = y[i] - yhat[i];
		ss += d * d;
	}
	if (sum_y == 0.0)
		throw Error(ErrorCode::ZeroDenominator, "MF denominator: observed values sum to zero");
	return static_cast<double>(y.size()) * ss / (sum_y * sum_y);
}

ErrorReport evaluate(std::span<const double> y, std::span<const double> yhat) {
	ErrorReport report;
	report.mae = mae(y, yhat);
	report.rmse = rmse(y, yhat);
	report.smape = smape(y, yhat);
	report.mf = mf(y, yhat);
	report.horizon = y.size();
	return report;
}

std::vector<double> naive_forecast(const TimeSeries& ts, std::size_t horizon) {
	if (horizon == 0)
		throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
	if (ts.size() < horizon)
		throw Error(ErrorCode::InsufficientData,
		            "series of " + std::to_string(ts.size()) +
		                " observations cannot repeat the last " + std::to_string(horizon));
	const std::span<const double> tail = ts.values().subspan(ts.size() - horizon);
	return std::vector<double>(tail.begin(), tail.end());
}

} // namespace dtsf
