// Test-only reference implementations, deliberately independent of the
// library's solvers: long-double normal equations with Gauss-Jordan
// pivoting instead of Householder QR or fused moment accumulation, and a
// straight quadratic-time re-implementation of greedy match selection.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace oracle {

struct PolyFit {
	bool ok = false;
	std::array<long double, 5> beta{}; // ascending powers of x
	long double r2 = 0.0L;
};

// Least squares of y on powers of x. The predictor is standardised with
// its own long-double mean/sd (plain loops), the normal equations are
// solved by Gaussian elimination with partial pivoting, and coefficients
// are expanded back to raw powers via binomials.
inline PolyFit polyfit(std::span<const double> x, std::span<const double> y, int degree) {
	PolyFit out;
	const std::size_t n = x.size();
	const int p = degree + 1;

	long double mean = 0.0L;
	for (double v : x) mean += v;
	mean /= static_cast<long double>(n);
	long double ss = 0.0L;
	for (double v : x) ss += (v - mean) * (v - mean);
	const long double sd = std::sqrt(ss / static_cast<long double>(n - 1));
	if (!(sd > 0.0L)) return out;

	std::vector<long double> z(n);
	for (std::size_t j = 0; j < n; ++j) z[j] = (x[j] - mean) / sd;

	// Normal equations G c = r on the standardised design.
	long double g[5][5] = {};
	long double rhs[5] = {};
	for (std::size_t j = 0; j < n; ++j) {
		long double pow_i = 1.0L;
		for (int i = 0; i < p; ++i) {
			long double pow_k = pow_i * pow_i; // z^(i+k) starting at k = i
			for (int k = i; k < p; ++k) {
				g[i][k] += pow_k;
				pow_k *= z[j];
			}
			rhs[i] += pow_i * y[j];
			pow_i *= z[j];
		}
	}
	for (int i = 0; i < p; ++i)
		for (int k = 0; k < i; ++k) g[i][k] = g[k][i];

	// Gaussian elimination with partial pivoting.
	int perm[5] = {0, 1, 2, 3, 4};
	for (int col = 0; col < p; ++col) {
		int pivot = col;
		for (int row = col + 1; row < p; ++row)
			if (std::abs(g[row][col]) > std::abs(g[pivot][col])) pivot = row;
		if (g[pivot][col] == 0.0L) return out;
		if (pivot != col) {
			for (int k = 0; k < p; ++k) std::swap(g[col][k], g[pivot][k]);
			std::swap(rhs[col], rhs[pivot]);
			std::swap(perm[col], perm[pivot]);
		}
		for (int row = col + 1; row < p; ++row) {
			const long double f = g[row][col] / g[col][col];
			for (int k = col; k < p; ++k) g[row][k] -= f * g[col][k];
			rhs[row] -= f * rhs[col];
		}
	}
	long double coeff[5] = {};
	for (int row = p - 1; row >= 0; --row) {
		long double acc = rhs[row];
		for (int k = row + 1; k < p; ++k) acc -= g[row][k] * coeff[k];
		coeff[row] = acc / g[row][row];
	}

	// Residuals and r2, straight from the definition.
	long double y_mean = 0.0L;
	for (double v : y) y_mean += v;
	y_mean /= static_cast<long double>(n);
	long double ss_tot = 0.0L, ss_res = 0.0L;
	for (std::size_t j = 0; j < n; ++j) {
		long double pred = 0.0L, zp = 1.0L;
		for (int i = 0; i < p; ++i) {
			pred += coeff[i] * zp;
			zp *= z[j];
		}
		ss_tot += (y[j] - y_mean) * (y[j] - y_mean);
		ss_res += (y[j] - pred) * (y[j] - pred);
	}
	if (!(ss_tot > 0.0L)) return out;

	// Expand to raw powers of x.
	static constexpr int choose[5][5] = {
		{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
	for (int q = 0; q <= degree; ++q) {
		long double acc = 0.0L;
		for (int i = q; i <= degree; ++i) {
			long double shift = 1.0L;
			for (int k = 0; k < i - q; ++k) shift *= -mean;
			long double sd_pow = 1.0L;
			for (int k = 0; k < i; ++k) sd_pow *= sd;
			acc += coeff[i] * choose[i][q] * shift / sd_pow;
		}
		out.beta[static_cast<std::size_t>(q)] = acc;
	}
	out.r2 = 1.0L - ss_res / ss_tot;
	out.ok = true;
	return out;
}

struct ScoredStart {
	std::size_t start = 0;
	double r2 = -std::numeric_limits<double>::infinity();
	bool usable = false;
};

// Greedy best-first selection with non-maximum suppression, written as
// the obvious O(n^2) loop.
inline std::vector<std::size_t> select_greedy(const std::vector<ScoredStart>& scored,
                                              std::size_t count, std::size_t min_separation) {
	std::vector<std::size_t> remaining;
	for (std::size_t i = 0; i < scored.size(); ++i)
		if (scored[i].usable) remaining.push_back(i);

	std::vector<std::size_t> chosen_starts;
	while (chosen_starts.size() < count) {
		std::size_t best = scored.size();
		for (std::size_t idx : remaining) {
			bool blocked = false;
			for (std::size_t kept : chosen_starts) {
				const std::size_t a = scored[idx].start;
				const std::size_t gap = a > kept ? a - kept : kept - a;
				if (gap < min_separation) {
					blocked = true;
					break;
				}
			}
			if (blocked) continue;
			if (best == scored.size() || scored[idx].r2 > scored[best].r2 ||
			    (scored[idx].r2 == scored[best].r2 && scored[idx].start > scored[best].start))
				best = idx;
		}
		if (best == scored.size()) break;
		chosen_starts.push_back(scored[best].start);
		remaining.erase(std::find(remaining.begin(), remaining.end(), best));
	}
	return chosen_starts;
}

// Quantile with linear interpolation between order statistics.
inline double quantile7(std::vector<double> values, double p) {
	std::sort(values.begin(), values.end());
	if (values.size() == 1) return values[0];
	const double pos = p * static_cast<double>(values.size() - 1);
	const std::size_t lo = static_cast<std::size_t>(pos);
	if (lo + 1 >= values.size()) return values.back();
	return values[lo] + (pos - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

} // namespace oracle
