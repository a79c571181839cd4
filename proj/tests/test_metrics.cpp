#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dtsf/error.hpp"
#include "dtsf/metrics.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using dtsf::Error;
using dtsf::ErrorCode;
using dtsf::TimeSeries;

TEST_CASE("worked examples") {
	const std::vector<double> y{2.0, 4.0};
	const std::vector<double> yhat{1.0, 5.0};

	CHECK(dtsf::mae(y, yhat) == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(dtsf::rmse(y, yhat) == doctest::Approx(1.0).epsilon(1e-12));
	// (2/2) * (1/3 + 1/9) = 4/9
	CHECK(dtsf::smape(y, yhat) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
	// 2 * (1 + 1) / (2 + 4)^2 = 1/9
	CHECK(dtsf::mf(y, yhat) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("perfect forecasts score zero everywhere") {
	const std::vector<double> y{1.5, 2.5, 3.5};
	CHECK(dtsf::mae(y, y) == 0.0);
	CHECK(dtsf::rmse(y, y) == 0.0);
	CHECK(dtsf::smape(y, y) == 0.0);
	CHECK(dtsf::mf(y, y) == 0.0);
	const auto report = dtsf::evaluate(y, y);
	CHECK(report.mae == 0.0);
	CHECK(report.horizon == 3);
}

TEST_CASE("smape saturates at two for opposite signs") {
	CHECK(dtsf::smape(std::vector<double>{1.0}, std::vector<double>{-1.0}) ==
	      doctest::Approx(2.0));
}

TEST_CASE("error paths") {
	const std::vector<double> y{1.0, 2.0};
	try {
		dtsf::mae(y, std::vector<double>{1.0});
		FAIL("expected LengthMismatch");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::LengthMismatch);
	}
	CHECK_THROWS_AS(dtsf::rmse({}, {}), Error);
	try {
		dtsf::smape(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0});
		FAIL("expected ZeroDenominator");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::ZeroDenominator);
		CHECK(e.index() == 0);
	}
	try {
		dtsf::mf(std::vector<double>{-1.0, 1.0}, std::vector<double>{0.0, 0.0});
		FAIL("expected ZeroDenominator");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::ZeroDenominator);
	}
}

TEST_CASE("metric properties on random pairs") {
	std::mt19937 rng(99);
	std::uniform_real_distribution<double> dist(0.1, 20.0);
	for (int trial = 0; trial < 1000; ++trial) {
		std::vector<double> y(8), yhat(8);
		for (std::size_t i = 0; i < y.size(); ++i) {
			y[i] = dist(rng);
			yhat[i] = dist(rng);
		}
		const double m = dtsf::mae(y, yhat);
		const double r = dtsf::rmse(y, yhat);
		const double s = dtsf::smape(y, yhat);
		CHECK(r >= m - 1e-15);
		CHECK(s >= 0.0);
		CHECK(s <= 2.0);
		CHECK(s == doctest::Approx(dtsf::smape(yhat, y)).epsilon(1e-12)); // symmetry

		// A common permutation of the pairs changes nothing.
		std::vector<std::size_t> perm(y.size());
		for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
		std::shuffle(perm.begin(), perm.end(), rng);
		std::vector<double> yp(y.size()), yhp(y.size());
		for (std::size_t i = 0; i < perm.size(); ++i) {
			yp[i] = y[perm[i]];
			yhp[i] = yhat[perm[i]];
		}
		CHECK(dtsf::mae(yp, yhp) == doctest::Approx(m).epsilon(1e-12));
		CHECK(dtsf::rmse(yp, yhp) == doctest::Approx(r).epsilon(1e-12));
	}
}

TEST_CASE("naive baseline repeats the most recent observations") {
	const TimeSeries ts({1.0, 2.0, 3.0, 4.0}, 0, 1);
	CHECK(dtsf::naive_forecast(ts, 2) == std::vector<double>{3.0, 4.0});
	CHECK(dtsf::naive_forecast(ts, 4) == std::vector<double>{1.0, 2.0, 3.0, 4.0});
	try {
		dtsf::naive_forecast(ts, 5);
		FAIL("expected InsufficientData");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::InsufficientData);
	}
}

TEST_CASE("naive is exact on a series whose period equals the horizon") {
	const std::size_t period = 12;
	const auto values = synthetic::periodic(10 * period, period, 2.0, 6.0);
	// Forecast the last cycle from everything before it.
	const TimeSeries head(std::vector<double>(values.begin(), values.end() - period), 0, 1);
	const auto nf = dtsf::naive_forecast(head, period);
	const std::vector<double> actual(values.end() - period, values.end());
	CHECK(dtsf::mae(actual, nf) == 0.0);
}
