#include "dtsf/least_squares.hpp"

#include "dtsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtsf {
namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();

// Binomial coefficients up to the largest supported degree.
constexpr int k_choose[k_max_degree + 1][k_max_degree + 1] = {
	{1, 0, 0, 0, 0},
	{1, 1, 0, 0, 0},
	{1, 2, 1, 0, 0},
	{1, 3, 3, 1, 0},
	{1, 4, 6, 4, 1},
};

double stable_sum(std::span<const double> values) {
	double sum = 0.0, comp = 0.0;
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

// Expands f(x) = sum_p gamma_p ((x - mean)/sd)^p into raw powers of x.
SimilarityFunction map_to_raw(const double* gamma, int degree, double mean, double sd) {
	SimilarityFunction fn;
	fn.degree = degree;
	double inv_sd_pow[k_max_degree + 1];
	inv_sd_pow[0] = 1.0;
	for (int p = 1; p <= degree; ++p) inv_sd_pow[p] = inv_sd_pow[p - 1] / sd;
	for (int q = 0; q <= degree; ++q) {
		double acc = 0.0;
		for (int p = q; p <= degree; ++p) {
			double shift = 1.0; // (-mean)^(p-q)
			for (int k = 0; k < p - q; ++k) shift *= -mean;
			acc += gamma[p] * k_choose[p][q] * shift * inv_sd_pow[p];
		}
		fn.beta[static_cast<std::size_t>(q)] = acc;
	}
	return fn;
}

// Singular values of a small (<=5x5) matrix by one-sided Jacobi rotations.
void jacobi_singular_values(double m[][k_max_degree + 1], int n, double* sigma) {
	for (int sweep = 0; sweep < 30; ++sweep) {
		bool rotated = false;
		for (int i = 0; i < n - 1; ++i) {
			for (int j = i + 1; j < n; ++j) {
				double a = 0.0, b = 0.0, c = 0.0;
				for (int k = 0; k < n; ++k) {
					a += m[i][k] * m[i][k];
					b += m[j][k] * m[j][k];
					c += m[i][k] * m[j][k];
				}
				if (std::abs(c) <= 1e-30 || c * c <= 1e-30 * a * b) continue;
				rotated = true;
				const double zeta = (b - a) / (2.0 * c);
				const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
				                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
				const double cs = 1.0 / std::sqrt(1.0 + t * t);
				const double sn = cs * t;
				for (int k = 0; k < n; ++k) {
					const double mi = m[i][k];
					const double mj = m[j][k];
					m[i][k] = cs * mi - sn * mj;
					m[j][k] = sn * mi + cs * mj;
				}
			}
		}
		if (!rotated) break;
	}
	for (int i = 0; i < n; ++i) {
		double norm = 0.0;
		for (int k = 0; k < n; ++k) norm += m[i][k] * m[i][k];
		sigma[i] = std::sqrt(norm);
	}
}

struct WindowMoments {
	double mean = 0.0;
	double sample_var = 0.0;
};

WindowMoments direct_moments(std::span<const double> x) {
	WindowMoments m;
	m.mean = stable_sum(x) / static_cast<double>(x.size());
	double ss = 0.0;
	for (double v : x) {
		const double d = v - m.mean;
		ss += d * d;
	}
	m.sample_var = x.size() > 1 ? ss / static_cast<double>(x.size() - 1) : 0.0;
	return m;
}

} // namespace

TargetStats TargetStats::compute(std::span<const double> y) {
	TargetStats stats;
	stats.y = y;
	stats.mean = stable_sum(y) / static_cast<double>(y.size());
	stats.centered.resize(y.size());
	double ss = 0.0;
	for (std::size_t j = 0; j < y.size(); ++j) {
		const double d = y[j] - stats.mean;
		stats.centered[j] = d;
		ss += d * d;
	}
	stats.ss_tot = ss;
	return stats;
}

FitResult fit_window_qr(std::span<const double> x, const TargetStats& target, int degree,
                        FitScratch& scratch) {
	const std::size_t w = x.size();
	const int cols = degree + 1;
	FitResult out;

	const WindowMoments m = direct_moments(x);
	const double sd = std::sqrt(m.sample_var);
	if (!(sd > 0.0) || !std::isfinite(sd)) {
		out.degenerate = true;
		out.r2 = -k_inf;
		return out;
	}

	// Column-major design on the scaled predictor: 1, z, z^2, ...
	scratch.design.resize(w * static_cast<std::size_t>(cols));
	scratch.rhs.assign(target.y.begin(), target.y.end());
	double* a = scratch.design.data();
	double* b = scratch.rhs.data();
	for (std::size_t j = 0; j < w; ++j) {
		const double z = (x[j] - m.mean) / sd;
		a[j] = 1.0;
		double zp = 1.0;
		for (int p = 1; p < cols; ++p) {
			zp *= z;
			a[static_cast<std::size_t>(p) * w + j] = zp;
		}
	}

	// Householder QR, reflectors applied to the right-hand side as well.
	double rdiag[k_max_degree + 1] = {};
	for (int k = 0; k < cols; ++k) {
		double* col = a + static_cast<std::size_t>(k) * w;
		double norm = 0.0;
		for (std::size_t i = static_cast<std::size_t>(k); i < w; ++i) norm += col[i] * col[i];
		norm = std::sqrt(norm);
		if (norm == 0.0) {
			rdiag[k] = 0.0;
			continue;
		}
		const double alpha = col[static_cast<std::size_t>(k)] > 0.0 ? -norm : norm;
		col[static_cast<std::size_t>(k)] -= alpha;
		double vtv = 0.0;
		for (std::size_t i = static_cast<std::size_t>(k); i < w; ++i) vtv += col[i] * col[i];
		rdiag[k] = alpha;
		if (vtv == 0.0) continue;
		for (int j = k + 1; j < cols; ++j) {
			double* cj = a + static_cast<std::size_t>(j) * w;
			double dot = 0.0;
			for (std::size_t i = static_cast<std::size_t>(k); i < w; ++i) dot += col[i] * cj[i];
			const double scale = 2.0 * dot / vtv;
			for (std::size_t i = static_cast<std::size_t>(k); i < w; ++i) cj[i] -= scale * col[i];
		}
		double dot = 0.0;
		for (std::size_t i = static_cast<std::size_t>(k); i < w; ++i) dot += col[i] * b[i];
		const double scale = 2.0 * dot / vtv;
		for (std::size_t i = static_cast<std::size_t>(k); i < w; ++i) b[i] -= scale * col[i];
	}

	// R lives in the top triangle: diagonal in rdiag, off-diagonal in the
	// untouched rows of later columns.
	double r[k_max_degree + 1][k_max_degree + 1] = {};
	for (int i = 0; i < cols; ++i) {
		r[i][i] = rdiag[i];
		for (int j = i + 1; j < cols; ++j) r[i][j] = a[static_cast<std::size_t>(j) * w + i];
	}

	double sigma[k_max_degree + 1] = {};
	{
		double rc[k_max_degree + 1][k_max_degree + 1] = {};
		for (int i = 0; i < cols; ++i)
			for (int j = 0; j < cols; ++j) rc[i][j] = r[i][j];
		jacobi_singular_values(rc, cols, sigma);
	}
	const double sigma_max = *std::max_element(sigma, sigma + cols);
	const double sigma_min = *std::min_element(sigma, sigma + cols);
	if (!(sigma_max > 0.0) || sigma_min < k_rank_tolerance * sigma_max) {
		out.degenerate = true;
		out.r2 = -k_inf;
		return out;
	}

	double gamma[k_max_degree + 1] = {};
	for (int i = cols - 1; i >= 0; --i) {
		double acc = b[i];
		for (int j = i + 1; j < cols; ++j) acc -= r[i][j] * gamma[j];
		gamma[i] = acc / r[i][i];
	}

	// Explicit residuals keep r2 accurate even when the fit is near exact.
	double ss_res = 0.0;
	for (std::size_t j = 0; j < w; ++j) {
		const double z = (x[j] - m.mean) / sd;
		double pred = gamma[cols - 1];
		for (int p = cols - 2; p >= 0; --p) pred = pred * z + gamma[p];
		const double resid = target.y[j] - pred;
		ss_res += resid * resid;
	}

	out.fn = map_to_raw(gamma, degree, m.mean, sd);
	out.r2 = 1.0 - ss_res / target.ss_tot;
	return out;
}

FitResult fit_window_moments(std::span<const double> x, double mean, double sample_var,
                             const TargetStats& target, int degree, FitScratch& scratch) {
	const std::size_t w = x.size();
	const int cols = degree + 1;

	const double sd = std::sqrt(sample_var);
	if (!(sd > 0.0) || !std::isfinite(sd)) {
		FitResult out;
		out.degenerate = true;
		out.r2 = -k_inf;
		return out;
	}

	// One fused pass: powers of the scaled predictor for the Gram matrix,
	// cross moments against the centred target for the right-hand side.
	// Extended-precision accumulators keep the normal equations clean
	// enough for the 1e-8 agreement gate against the QR path.
	long double zp_sum[2 * k_max_degree + 1] = {};
	long double cross_acc[k_max_degree + 1] = {};
	const int max_pow = 2 * degree;
	const double* yc = target.centered.data();
	for (std::size_t j = 0; j < w; ++j) {
		const long double z = (x[j] - mean) / sd;
		long double zp = 1.0L;
		for (int p = 1; p <= max_pow; ++p) {
			zp *= z;
			zp_sum[p] += zp;
			if (p <= degree) cross_acc[p] += zp * yc[j];
		}
	}
	zp_sum[0] = static_cast<long double>(w);
	cross_acc[0] = 0.0L; // sum of centred target is zero by construction

	double g[k_max_degree + 1][k_max_degree + 1];
	double cross[k_max_degree + 1];
	for (int p = 0; p < cols; ++p) {
		cross[p] = static_cast<double>(cross_acc[p]);
		for (int q = 0; q < cols; ++q) g[p][q] = static_cast<double>(zp_sum[p + q]);
	}

	// LDL^T without pivoting; bail out to the QR fitter when a pivot
	// collapses so borderline windows get the exact rank rule.
	double max_diag = 0.0;
	for (int p = 0; p < cols; ++p) max_diag = std::max(max_diag, g[p][p]);
	const double pivot_floor = 1e-8 * max_diag;

	double l[k_max_degree + 1][k_max_degree + 1] = {};
	double d[k_max_degree + 1] = {};
	for (int j = 0; j < cols; ++j) {
		double dj = g[j][j];
		for (int k = 0; k < j; ++k) dj -= l[j][k] * l[j][k] * d[k];
		if (!(dj > pivot_floor) || !std::isfinite(dj))
			return fit_window_qr(x, target, degree, scratch);
		d[j] = dj;
		l[j][j] = 1.0;
		for (int i = j + 1; i < cols; ++i) {
			double acc = g[i][j];
			for (int k = 0; k < j; ++k) acc -= l[i][k] * l[j][k] * d[k];
			l[i][j] = acc / dj;
		}
	}

	auto solve_ldl = [&](const double* rhs, double* out) {
		for (int i = 0; i < cols; ++i) {
			double acc = rhs[i];
			for (int k = 0; k < i; ++k) acc -= l[i][k] * out[k];
			out[i] = acc;
		}
		for (int i = 0; i < cols; ++i) out[i] /= d[i];
		for (int i = cols - 1; i >= 0; --i) {
			double acc = out[i];
			for (int k = i + 1; k < cols; ++k) acc -= l[k][i] * out[k];
			out[i] = acc;
		}
	};

	double gamma[k_max_degree + 1] = {};
	solve_ldl(cross, gamma);

	// One step of iterative refinement with an extended-precision
	// residual recovers the accuracy the squared condition number of the
	// normal equations costs.
	double resid[k_max_degree + 1];
	for (int i = 0; i < cols; ++i) {
		long double acc = cross_acc[i];
		for (int k = 0; k < cols; ++k)
			acc -= zp_sum[i + k] * static_cast<long double>(gamma[k]);
		resid[i] = static_cast<double>(acc);
	}
	double delta[k_max_degree + 1] = {};
	solve_ldl(resid, delta);
	for (int i = 0; i < cols; ++i) gamma[i] += delta[i];

	double explained = 0.0;
	for (int p = 1; p < cols; ++p) explained += gamma[p] * cross[p];
	const double ss_res = std::max(0.0, target.ss_tot - explained);

	FitResult out;
	gamma[0] += target.mean; // undo the target centring in the intercept
	out.fn = map_to_raw(gamma, degree, mean, sd);
	out.r2 = 1.0 - ss_res / target.ss_tot;
	return out;
}

std::pair<SimilarityFunction, double> fit_similarity(std::span<const double> x,
                                                     std::span<const double> y, int degree) {
	if (degree < 1 || degree > k_max_degree)
		throw Error(ErrorCode::InvalidArgument,
		            "degree must be between 1 and " + std::to_string(k_max_degree));
	if (x.size() != y.size())
		throw Error(ErrorCode::LengthMismatch, "candidate and target windows differ in length");
	if (x.size() < static_cast<std::size_t>(degree) + 2)
		throw Error(ErrorCode::InvalidArgument,
		            "window of " + std::to_string(x.size()) +
		                " observations cannot support degree " + std::to_string(degree));

	const TargetStats target = TargetStats::compute(y);
	if (target.degenerate())
		throw Error(ErrorCode::DegenerateTarget, "target window has zero variance");

	FitScratch scratch;
	const FitResult fit = fit_window_qr(x, target, degree, scratch);
	if (fit.degenerate)
		throw Error(ErrorCode::DegenerateWindow, "candidate window is rank deficient");
	return {fit.fn, fit.r2};
}

} // namespace dtsf
