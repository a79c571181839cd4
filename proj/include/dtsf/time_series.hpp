#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dtsf {

enum class Reducer { Mean, Median };

struct SummaryStats {
	double mean = 0.0;
	double sd = 0.0; // sample standard deviation, n-1 denominator
	double min = 0.0;
	double max = 0.0;
	std::size_t length = 0;
};

/// Uniformly spaced univariate series. Values are validated finite on
/// construction and never change afterwards, so instances are safe to
/// share across threads. Timestamps are carried for reporting only;
/// every algorithm works on integer indices.
class TimeSeries {
public:
	TimeSeries(std::vector<double> values, std::int64_t start_epoch = 0,
	           std::int64_t step_seconds = 1);

	std::size_t size() const noexcept { return values_.size(); }
	std::span<const double> values() const noexcept { return values_; }
	double operator[](std::size_t i) const noexcept { return values_[i]; }

	std::int64_t start_epoch() const noexcept { return start_epoch_; }
	std::int64_t step_seconds() const noexcept { return step_seconds_; }
	std::int64_t timestamp_at(std::size_t i) const noexcept {
		return start_epoch_ + static_cast<std::int64_t>(i) * step_seconds_;
	}

	/// First `count` observations, same start and step.
	TimeSeries prefix(std::size_t count) const;

	/// Reduces consecutive disjoint blocks of `factor` observations into
	/// one; a trailing partial block is dropped. Step grows by `factor`.
	TimeSeries aggregate(std::size_t factor, Reducer reducer = Reducer::Mean) const;

	SummaryStats summary() const;

private:
	std::vector<double> values_;
	std::int64_t start_epoch_;
	std::int64_t step_seconds_;
};

} // namespace dtsf
