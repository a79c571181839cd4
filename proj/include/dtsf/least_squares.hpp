#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace dtsf {

inline constexpr int k_max_degree = 4;

/// A window counts as rank deficient when the smallest singular value of
/// its scaled design matrix falls below this fraction of the largest.
inline constexpr double k_rank_tolerance = 1e-10;

/// Polynomial mapping candidate-window values onto target-window values.
/// Coefficients are stored in ascending powers of x; entries above
/// `degree` are zero.
struct SimilarityFunction {
	int degree = 1;
	std::array<double, k_max_degree + 1> beta{};

	double operator()(double x) const noexcept {
		double acc = beta[static_cast<std::size_t>(degree)];
		for (int p = degree - 1; p >= 0; --p)
			acc = acc * x + beta[static_cast<std::size_t>(p)];
		return acc;
	}

	std::span<const double> coefficients() const noexcept {
		return {beta.data(), static_cast<std::size_t>(degree) + 1};
	}
};

/// Target-window quantities shared by every candidate fit of one scan.
struct TargetStats {
	std::span<const double> y;
	double mean = 0.0;
	double ss_tot = 0.0;          // sum of squared deviations from mean
	std::vector<double> centered; // y - mean

	static TargetStats compute(std::span<const double> y);
	bool degenerate() const noexcept { return !(ss_tot > 0.0); }
};

struct FitResult {
	bool degenerate = false;
	SimilarityFunction fn{};
	double r2 = 0.0;
};

/// Reusable per-thread buffers for the window fitters.
struct FitScratch {
	std::vector<double> design;
	std::vector<double> rhs;
};

/// Reference fit: Householder QR of the design matrix built from the
/// centred, variance-scaled predictor, rank check on the singular values
/// of R, residuals evaluated explicitly.
FitResult fit_window_qr(std::span<const double> x, const TargetStats& target, int degree,
                        FitScratch& scratch);

/// Accelerated fit: one fused pass accumulates the moments of the scaled
/// predictor and its cross moments with the target, then solves the
/// normal equations of the scaled design. Falls back to the QR fitter
/// whenever the factorisation looks ill conditioned, so both paths agree
/// on which windows are degenerate. `mean`/`sample_var` come from the
/// caller (scan keeps prefix sums).
FitResult fit_window_moments(std::span<const double> x, double mean, double sample_var,
                             const TargetStats& target, int degree, FitScratch& scratch);

/// Fits `degree`-th order least squares mapping x onto y and returns the
/// coefficients with the coefficient of determination. Throws
/// DegenerateWindow / DegenerateTarget instead of returning sentinels.
std::pair<SimilarityFunction, double> fit_similarity(std::span<const double> x,
                                                     std::span<const double> y, int degree);

} // namespace dtsf
