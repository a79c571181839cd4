#include "dtsf/scan.hpp"

#include "dtsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace dtsf {
namespace {

void validate_spec(const WindowSpec& spec, int degree) {
	if (degree < 1 || degree > k_max_degree)
		throw Error(ErrorCode::InvalidArgument,
		            "degree must be between 1 and " + std::to_string(k_max_degree));
	if (spec.window < static_cast<std::size_t>(degree) + 2)
		throw Error(ErrorCode::InvalidArgument,
		            "window " + std::to_string(spec.window) +
		                " cannot support degree " + std::to_string(degree));
	if (spec.horizon < 1 || spec.horizon > spec.window)
		throw Error(ErrorCode::InvalidArgument,
		            "horizon must satisfy 1 <= horizon <= window");
}

// Compensated prefix sums of (v - anchor)^k so any window's mean and
// variance come from two O(1) differences, independent of thread layout.
struct Prefixes {
	double anchor = 0.0;
	std::vector<double> sum1;
	std::vector<double> sum2;

	static Prefixes build(std::span<const double> values) {
		Prefixes p;
		double raw = 0.0, comp = 0.0;
		for (double v : values) {
			const double t = raw + v;
			if (std::abs(raw) >= std::abs(v))
				comp += (raw - t) + v;
			else
				comp += (v - t) + raw;
			raw = t;
		}
		p.anchor = (raw + comp) / static_cast<double>(values.size());

		p.sum1.resize(values.size() + 1);
		p.sum2.resize(values.size() + 1);
		double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0;
		p.sum1[0] = 0.0;
		p.sum2[0] = 0.0;
		for (std::size_t i = 0; i < values.size(); ++i) {
			const double d = values[i] - p.anchor;
			double t = s1 + d;
			if (std::abs(s1) >= std::abs(d))
				c1 += (s1 - t) + d;
			else
				c1 += (d - t) + s1;
			s1 = t;
			p.sum1[i + 1] = s1 + c1;

			const double dd = d * d;
			t = s2 + dd;
			if (std::abs(s2) >= std::abs(dd))
				c2 += (s2 - t) + dd;
			else
				c2 += (dd - t) + s2;
			s2 = t;
			p.sum2[i + 1] = s2 + c2;
		}
		return p;
	}
};

} // namespace

std::span<const double> target_window(const TimeSeries& ts, std::size_t window) {
	if (window == 0)
		throw Error(ErrorCode::InvalidArgument, "window must be positive");
	if (ts.size() < window)
		throw Error(ErrorCode::InsufficientData,
		            "series of " + std::to_string(ts.size()) +
		                " observations has no window of " + std::to_string(window));
	return ts.values().subspan(ts.size() - window);
}

StartRange valid_starts(std::size_t length, std::size_t window, std::size_t horizon) {
	if (window == 0 || horizon == 0 || horizon > window)
		throw Error(ErrorCode::InvalidArgument,
		            "horizon must satisfy 1 <= horizon <= window");
	// Disjointness from the target window: s + w - 1 <= N - w - 1.
	// Follow-up availability: s + w + h - 1 <= N - 1.
	// At N = 2w exactly one candidate remains, abutting the target; its
	// follow-up lies inside the target region, which is what makes the
	// most-recent-window special case work.
	if (length < 2 * window || length < window + horizon)
		throw Error(ErrorCode::InsufficientData,
		            "series of " + std::to_string(length) +
		                " observations has no candidate window of " + std::to_string(window));
	const std::size_t last = std::min(length - 2 * window, length - window - horizon);
	return {0, last + 1};
}

std::vector<Match> scan(const TimeSeries& ts, const WindowSpec& spec, int degree,
                        const ScanOptions& options) {
	validate_spec(spec, degree);
	const StartRange range = valid_starts(ts.size(), spec.window, spec.horizon);
	const std::size_t w = spec.window;
	const std::span<const double> values = ts.values();

	const TargetStats target = TargetStats::compute(target_window(ts, w));
	if (target.degenerate())
		throw Error(ErrorCode::DegenerateTarget, "target window has zero variance");

	const bool fast = options.mode == ScanMode::Fast;
	Prefixes prefixes;
	double var_floor = 0.0;
	if (fast) {
		prefixes = Prefixes::build(values);
		const double global_var =
			(prefixes.sum2[ts.size()] -
			 prefixes.sum1[ts.size()] * prefixes.sum1[ts.size()] / static_cast<double>(ts.size())) /
			static_cast<double>(ts.size());
		// Below this the prefix-difference variance is untrustworthy; such
		// windows take the exact QR path instead.
		var_floor = std::max(1e-9 * global_var, 1e-300);
	}

	std::vector<Match> matches(range.count);
	auto worker = [&](std::size_t begin, std::size_t end) {
		FitScratch scratch;
		for (std::size_t i = begin; i < end; ++i) {
			const std::size_t s = range.first + i;
			const std::span<const double> x = values.subspan(s, w);
			FitResult fit;
			if (fast) {
				const double s1 = prefixes.sum1[s + w] - prefixes.sum1[s];
				const double s2 = prefixes.sum2[s + w] - prefixes.sum2[s];
				const double mean = prefixes.anchor + s1 / static_cast<double>(w);
				const double var =
					(s2 - s1 * s1 / static_cast<double>(w)) / static_cast<double>(w - 1);
				if (var > var_floor && std::isfinite(var))
					fit = fit_window_moments(x, mean, var, target, degree, scratch);
				else
					fit = fit_window_qr(x, target, degree, scratch);
			} else {
				fit = fit_window_qr(x, target, degree, scratch);
			}
			Match& m = matches[i];
			m.start = s;
			m.degenerate = fit.degenerate;
			if (!fit.degenerate) {
				m.r2 = fit.r2;
				m.fn = fit.fn;
			} else {
				m.fn.degree = degree;
			}
		}
	};

	unsigned threads = options.threads != 0 ? options.threads
	                                        : std::max(1u, std::thread::hardware_concurrency());
	threads = static_cast<unsigned>(
		std::min<std::size_t>(threads, std::max<std::size_t>(1, range.count)));
	if (threads <= 1) {
		worker(0, range.count);
	} else {
		std::vector<std::thread> pool;
		pool.reserve(threads);
		const std::size_t chunk = (range.count + threads - 1) / threads;
		for (unsigned t = 0; t < threads; ++t) {
			const std::size_t begin = static_cast<std::size_t>(t) * chunk;
			const std::size_t end = std::min(range.count, begin + chunk);
			if (begin >= end) break;
			pool.emplace_back(worker, begin, end);
		}
		for (std::thread& th : pool) th.join();
	}
	return matches;
}

std::vector<Match> select_matches(std::span<const Match> matches, std::size_t count,
                                  std::size_t min_separation) {
	if (count == 0)
		throw Error(ErrorCode::InvalidArgument, "match count must be positive");

	std::vector<std::size_t> order;
	order.reserve(matches.size());
	for (std::size_t i = 0; i < matches.size(); ++i)
		if (!matches[i].degenerate) order.push_back(i);
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		if (matches[a].r2 != matches[b].r2) return matches[a].r2 > matches[b].r2;
		return matches[a].start > matches[b].start;
	});

	std::vector<Match> selected;
	selected.reserve(count);
	for (std::size_t idx : order) {
		const Match& candidate = matches[idx];
		bool clear = true;
		for (const Match& kept : selected) {
			const std::size_t gap = candidate.start > kept.start ? candidate.start - kept.start
			                                                     : kept.start - candidate.start;
			if (gap < min_separation) {
				clear = false;
				break;
			}
		}
		if (!clear) continue;
		selected.push_back(candidate);
		if (selected.size() == count) return selected;
	}
	throw Error(ErrorCode::TooFewMatches,
	            "requested " + std::to_string(count) + " matches but only " +
	                std::to_string(selected.size()) + " survive selection",
	            static_cast<std::int64_t>(selected.size()));
}

} // namespace dtsf
