#include "dtsf/time_series.hpp"

#include "dtsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dtsf {
namespace {

// Neumaier-compensated sum; keeps long aggregates exact to ~1 ulp.
double stable_sum(std::span<const double> values) {
	double sum = 0.0;
	double comp = 0.0;
	for (double v : values) {
		const double t = sum + v;
		if (std::abs(sum) >= std::abs(v))
			comp += (sum - t) + v;
		else
			comp += (v - t) + sum;
		sum = t;
	}
	return sum + comp;
}

double block_median(std::span<const double> block, std::vector<double>& scratch) {
	scratch.assign(block.begin(), block.end());
	std::sort(scratch.begin(), scratch.end());
	const std::size_t n = scratch.size();
	if (n % 2 == 1) return scratch[n / 2];
	return 0.5 * (scratch[n / 2 - 1] + scratch[n / 2]);
}

} // namespace

TimeSeries::TimeSeries(std::vector<double> values, std::int64_t start_epoch,
                       std::int64_t step_seconds)
	: values_(std::move(values)), start_epoch_(start_epoch), step_seconds_(step_seconds) {
	if (values_.empty())
		throw Error(ErrorCode::EmptySeries, "time series must contain at least one observation");
	if (step_seconds_ <= 0)
		throw Error(ErrorCode::InvalidArgument, "time series step must be positive");
	for (std::size_t i = 0; i < values_.size(); ++i) {
		if (!std::isfinite(values_[i]))
			throw Error(ErrorCode::InvalidArgument,
			            "non-finite value at index " + std::to_string(i), static_cast<std::int64_t>(i));
	}
}

TimeSeries TimeSeries::prefix(std::size_t count) const {
	if (count == 0)
		throw Error(ErrorCode::EmptySeries, "prefix of length zero");
	if (count > size())
		throw Error(ErrorCode::InvalidArgument, "prefix longer than series");
	return TimeSeries(std::vector<double>(values_.begin(), values_.begin() + count),
	                  start_epoch_, step_seconds_);
}

TimeSeries TimeSeries::aggregate(std::size_t factor, Reducer reducer) const {
	if (factor == 0)
		throw Error(ErrorCode::InvalidArgument, "aggregation factor must be positive");
	if (factor == 1) return *this;
	const std::size_t blocks = size() / factor;
	if (blocks == 0)
		throw Error(ErrorCode::EmptySeries, "aggregation would produce an empty series");
	std::vector<double> out;
	out.reserve(blocks);
	std::vector<double> scratch;
	for (std::size_t b = 0; b < blocks; ++b) {
		const std::span<const double> block(values_.data() + b * factor, factor);
		if (reducer == Reducer::Mean)
			out.push_back(stable_sum(block) / static_cast<double>(factor));
		else
			out.push_back(block_median(block, scratch));
	}
	return TimeSeries(std::move(out), start_epoch_,
	                  step_seconds_ * static_cast<std::int64_t>(factor));
}

SummaryStats TimeSeries::summary() const {
	SummaryStats stats;
	stats.length = size();
	stats.mean = stable_sum(values_) / static_cast<double>(size());
	stats.min = *std::min_element(values_.begin(), values_.end());
	stats.max = *std::max_element(values_.begin(), values_.end());
	if (size() > 1) {
		double ss = 0.0;
		for (double v : values_) {
			const double d = v - stats.mean;
			ss += d * d;
		}
		stats.sd = std::sqrt(ss / static_cast<double>(size() - 1));
	}
	return stats;
}

} // namespace dtsf
