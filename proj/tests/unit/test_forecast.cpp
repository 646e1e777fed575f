#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "horizon/errors.hpp"
#include "horizon/forecast.hpp"
#include "oracles.hpp"

using namespace horizon;
using namespace horizon::forecast;
using doctest::Approx;

namespace {

constexpr double kLn10 = std::numbers::ln10;
const double kSevenMonthDoubling = std::log(2.0) / (7.0 / 12.0);
const double kCompute45 = std::log(4.5);

// Horizons doubling every seven months, sampled every two months across [2019, 2025].
std::vector<HorizonObservation> doubling_history(double y2019 = 1.0, double p80_ratio = 0.25) {
    std::vector<HorizonObservation> out;
    for (int i = 0; i <= 36; ++i) {
        const double t = 2019.0 + i / 6.0;
        const double y = y2019 * std::exp(kSevenMonthDoubling * (t - 2019.0));
        out.push_back(oracle::horizon_row("m" + std::to_string(i), t, y, y * p80_ratio));
    }
    return out;
}

ComputePath straight(double t0, double l0, double t1, double growth) {
    return ComputePath({{t0, l0}, {t1, l0 + growth * (t1 - t0) / kLn10}});
}

scaling::ConcaveFit concave(double beta, double rho) {
    scaling::ConcaveFit f;
    f.beta_coef = beta;
    f.rho = rho;
    return f;
}

double max_rel_diff(const TimeSeries& a, const TimeSeries& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points()[i].t == b.points()[i].t);
        worst = std::max(worst, std::abs(a.points()[i].value / b.points()[i].value - 1.0));
    }
    return worst;
}

// Slowdown: compute grows at `g` until `t_slow`, then at `g_after`.
ComputePath slowdown(double t0, double t_slow, double t1, double g, double g_after) {
    const double l_slow = 25.0 + g * (t_slow - t0) / kLn10;
    return ComputePath({{t0, 25.0}, {t_slow, l_slow}, {t1, l_slow + g_after * (t1 - t_slow) / kLn10}});
}

}  // namespace

TEST_CASE("monthly grid") {
    const auto g = monthly_grid(2025.0, 2026.0);
    CHECK(g.size() == 13);
    CHECK(g.front() == 2025.0);
    CHECK(g.back() == Approx(2026.0).epsilon(1e-15));
    const auto off = monthly_grid(2025.0, 2025.3);
    CHECK(off.back() == 2025.3);
    CHECK(off.size() == 5);
}

TEST_CASE("usd to flop path") {
    const TimeSeries flat_price({{2018, 1e17}, {2021, 1e17}, {2025, 1e17}});
    std::vector<Sample> doubling;
    for (int i = 0; i < 6; ++i) doubling.push_back({2025.0 + i, 1e9 * std::pow(2.0, i)});
    const auto p = usd_to_flop_path(TimeSeries(doubling), flat_price);
    CHECK(p.growth_rate(2027.5) == Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(p.log_interp(2025.0) == Approx(26.0).epsilon(1e-14));

    std::vector<Sample> improving;
    for (int i = 0; i < 8; ++i) improving.push_back({2018.0 + i, 1e16 * std::pow(1.35, i)});
    const auto q = usd_to_flop_path(TimeSeries({{2025, 1e9}, {2030, 1e9}}), TimeSeries(improving));
    CHECK(q.growth_rate(2027.0) == Approx(std::log(1.35)).epsilon(1e-12));

    std::vector<Sample> scaled;
    for (const auto& s : doubling) scaled.push_back({s.t, 10 * s.value});
    const auto r = usd_to_flop_path(TimeSeries(scaled), flat_price);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r.knots()[i].log10_flop - p.knots()[i].log10_flop == Approx(1.0).epsilon(1e-13));
    }

    CHECK_THROWS_AS(usd_to_flop_path(TimeSeries({{2025, 1e9}, {2026, -1}}), flat_price), DomainError);
    CHECK_THROWS_AS(usd_to_flop_path(TimeSeries({{2025, 1e9}, {2026, 2e9}}), TimeSeries({{2020, 1}, {2021, 2}})),
                    InsufficientDataError);
}

TEST_CASE("compute path from spend rejects mixed units") {
    const TimeSeries price({{2018, 1e17}, {2025, 2e17}});
    std::vector<SpendRecord> spend{{2020, 1e24, SpendUnit::flop}, {2021, 1e9, SpendUnit::usd}};
    CHECK_THROWS_AS(compute_path_from_spend(spend, price), InputError);
    spend[1].unit = SpendUnit::flop;
    spend[1].value = 1e25;
    CHECK(compute_path_from_spend(spend, price).log_interp(2021) == Approx(25.0));
}

TEST_CASE("calibrate") {
    const auto hist = doubling_history();
    const auto k = straight(2018.0, 24.0, 2026.0, kCompute45);
    const auto cal = calibrate(hist, k, Reliability::p50, {2019.0, 2025.0});
    CHECK(cal.past_gY == Approx(1.188).epsilon(1e-3));
    CHECK(cal.past_gK == Approx(kCompute45).epsilon(1e-12));
    CHECK(cal.c == Approx(0.790).epsilon(1e-3));
    CHECK(cal.c == cal.past_gY / cal.past_gK);
    CHECK(cal.t0 == 2025.0);
    CHECK(cal.y0 == Approx(std::exp(kSevenMonthDoubling * 6.0)).epsilon(1e-10));

    const auto same = calibrate(hist, straight(2018.0, 24.0, 2026.0, kSevenMonthDoubling), Reliability::p50,
                                {2019.0, 2025.0});
    CHECK(same.c == Approx(1.0).epsilon(1e-12));

    std::vector<HorizonObservation> flat;
    for (int i = 0; i < 5; ++i) flat.push_back(oracle::horizon_row("f", 2019.0 + i, 30.0));
    CHECK(calibrate(flat, k, Reliability::p50, {2019.0, 2025.0}).c == 0.0);

    CHECK_THROWS_AS(calibrate({oracle::horizon_row("x", 2020, 3.0)}, k, Reliability::p50, {2019, 2025}),
                    InsufficientDataError);
    CHECK_THROWS_AS(calibrate(hist, ComputePath({{2018, 25}, {2026, 25}}), Reliability::p50, {2019, 2025}),
                    CalibrationError);
    CHECK_THROWS_AS(calibrate(hist, straight(2020.0, 24.0, 2026.0, 1.0), Reliability::p50, {2019, 2025}),
                    CalibrationError);
}

TEST_CASE("forecast identity and proportionality") {
    const auto hist = doubling_history();
    const auto cal = calibrate(hist, straight(2018.0, 24.0, 2026.0, kCompute45), Reliability::p50, {2019, 2025});
    const auto trend = trend_path(cal, 2040.0);

    const auto same = forecast_horizon(cal, straight(2025.0, 30.0, 2030.0, cal.past_gK), 2040.0);
    CHECK(max_rel_diff(same, trend) < 1e-9);

    const auto half = forecast_horizon(cal, straight(2025.0, 30.0, 2030.0, cal.past_gK / 2), 2040.0);
    for (double year = 2026.0; year < 2039.0; year += 2.5) {
        const auto pts = half.points();
        const auto at = [&](double t) {
            const auto it = std::min_element(pts.begin(), pts.end(), [&](const Sample& a, const Sample& b) {
                return std::abs(a.t - t) < std::abs(b.t - t);
            });
            return *it;
        };
        const auto a = at(year);
        const auto b = at(year + 1.0);
        const double slope = (std::log(b.value) - std::log(a.value)) / (b.t - a.t);
        CHECK(std::abs(slope - cal.past_gY / 2) < 1e-9);
    }
}

TEST_CASE("forecast closed form and milestones") {
    CalibrationResult cal{0.79, 0.79 * 1.504, 1.504, 2025.0, 15.0, Reliability::p50};
    const auto path = forecast_horizon(cal, straight(2025.0, 27.0, 2026.0, 1.504), 2031.0);
    const auto pts = path.points();
    const auto it = std::find_if(pts.begin(), pts.end(), [](const Sample& s) { return std::abs(s.t - 2030.5) < 1e-9; });
    REQUIRE(it != pts.end());
    CHECK(it->value == Approx(15.0 * std::exp(0.79 * 1.504 * 5.5)).epsilon(1e-12));
    CHECK(it->value == Approx(10300).epsilon(0.01));

    CalibrationResult ex{1.0, 1.188, 1.188, 2025.0, 15.0, Reliability::p50};
    const auto trend = trend_path(ex, 2035.0);
    const auto date = milestone_date(trend, 10020.0);
    REQUIRE(date);
    CHECK(*date == Approx(2025.0 + std::log(668.0) / 1.188).epsilon(1e-12));
    CHECK(*date == Approx(2030.5).epsilon(1e-3));
    CHECK(*milestone_date(trend, 5.0) == 2025.0);
    CHECK_FALSE(milestone_date(TimeSeries({{2025, 10}, {2030, 10}}), 60.0).has_value());
    CHECK_THROWS_AS(forecast_horizon(ex, straight(2025.0, 27.0, 2026.0, 1.0), 2024.0), DomainError);
}

TEST_CASE("milestone delays") {
    CalibrationResult cal{1.0, 1.2, 1.2, 2025.0, 30.0, Reliability::p50};
    const auto trend = trend_path(cal, 2045.0);
    for (const auto& m : milestone_delays(trend, trend, default_milestones())) {
        REQUIRE(m.delay_years);
        CHECK(*m.delay_years == 0.0);
    }
    const auto slow = forecast_horizon(cal, slowdown(2025.0, 2027.0, 2030.0, 1.2, 0.4), 2045.0);
    const auto table = milestone_delays(trend, slow, default_milestones());
    for (std::size_t i = 1; i < table.size(); ++i) CHECK(*table[i].delay_years >= *table[i - 1].delay_years);

    const auto stall = forecast_horizon(cal, ComputePath({{2025, 25}, {2026, 25}}), 2045.0);
    const auto unreached = milestone_delays(trend, stall, default_milestones());
    CHECK_FALSE(unreached.back().date_forecast.has_value());
    CHECK_FALSE(unreached.back().delay_years.has_value());
    CHECK(unreached.back().date_trend.has_value());
}

TEST_CASE("default milestone ladder uses work-time minutes") {
    const auto m = default_milestones();
    REQUIRE(m.size() == 4);
    CHECK(m[0].threshold_minutes == 60);
    CHECK(m[1].threshold_minutes == 480);
    CHECK(m[2].threshold_minutes == 2400);
    CHECK(m[3].threshold_minutes == 10020);
}

TEST_CASE("delays grow with threshold across random slowdowns") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        CalibrationResult cal{0.5 + u(rng), 0, 0.8 + u(rng), 2025.0, 10.0 + 50 * u(rng), Reliability::p50};
        cal.past_gY = cal.c * cal.past_gK;
        const double t_slow = 2025.0 + 3 * u(rng);
        const auto trend = trend_path(cal, 2060.0);
        const auto fc = forecast_horizon(cal, slowdown(2025.0, t_slow, 2040.0, cal.past_gK, cal.past_gK * u(rng)),
                                         2060.0);
        std::vector<Milestone> ladder;
        for (double m = 2 * cal.y0; m < 1e6; m *= 3) ladder.push_back({"", m});
        double prev = -INFINITY;
        for (const auto& o : milestone_delays(trend, fc, ladder)) {
            if (!o.delay_years || *o.date_trend < t_slow) continue;
            CHECK(*o.delay_years >= prev - 1e-9);
            prev = *o.delay_years;
        }
    }
}

TEST_CASE("linear forecast properties") {
    const auto hist = doubling_history(1.0, 0.25);
    const auto k = straight(2018.0, 24.0, 2026.0, kCompute45);
    const auto cal = calibrate(hist, k, Reliability::p50, {2019, 2025});
    const auto future = slowdown(2025.0, 2027.0, 2030.0, 1.5, 0.5);

    SUBCASE("level shift leaves the forecast unchanged") {
        const auto a = forecast_horizon(cal, future, 2045.0);
        const auto b = forecast_horizon(cal, future.shifted(2.7), 2045.0);
        CHECK(max_rel_diff(a, b) < 1e-12);
    }
    SUBCASE("lower growth gives a pointwise lower path and later milestones") {
        const auto hi = forecast_horizon(cal, future, 2045.0);
        const auto lo = forecast_horizon(cal, slowdown(2025.0, 2027.0, 2030.0, 1.5, 0.3), 2045.0);
        for (std::size_t i = 0; i < hi.size(); ++i) CHECK(lo.points()[i].value <= hi.points()[i].value);
        const auto trend = trend_path(cal, 2045.0);
        const auto a = milestone_delays(trend, hi, default_milestones());
        const auto b = milestone_delays(trend, lo, default_milestones());
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].date_forecast && b[i].date_forecast) CHECK(*b[i].date_forecast >= *a[i].date_forecast);
            if (!a[i].date_forecast) CHECK_FALSE(b[i].date_forecast.has_value());
        }
    }
    SUBCASE("history-then-projection is continuous at the seam") {
        const auto joined = ComputePath({{2018, 24.0}, {2025, 24.0 + 7 * kCompute45 / kLn10}, {2030, 28.5}});
        const auto fc = forecast_horizon(cal, joined, 2035.0);
        const auto pts = fc.points();
        CHECK(pts.front().value == Approx(cal.y0).epsilon(1e-14));
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(std::abs(std::log(pts[i].value / pts[i - 1].value)) < 0.2);
        }
    }
    SUBCASE("p80 anchored lower with equal c: later dates and larger delays") {
        const auto cal80 = calibrate(hist, k, Reliability::p80, {2019, 2025});
        CHECK(cal80.c == Approx(cal.c).epsilon(1e-12));
        CHECK(cal80.y0 < cal.y0);
        const auto d50 = milestone_delays(trend_path(cal, 2060.0), forecast_horizon(cal, future, 2060.0),
                                          default_milestones());
        const auto d80 = milestone_delays(trend_path(cal80, 2060.0), forecast_horizon(cal80, future, 2060.0),
                                          default_milestones());
        for (std::size_t i = 0; i < d50.size(); ++i) {
            CHECK(*d80[i].date_trend >= *d50[i].date_trend);
            CHECK(*d80[i].date_forecast >= *d50[i].date_forecast);
            CHECK(*d80[i].delay_years >= *d50[i].delay_years - 1e-12);
        }
    }
}

TEST_CASE("concave forecast") {
    growth::GrowthParams p;
    p.lambda_over_beta = 0.95;
    p.training_share = 0.1;

    SUBCASE("rho = 0 reduces to the linear forecast") {
        const auto fit = concave(0.454, 0.0);
        const double c = 0.454 * (1 + 0.95);
        CalibrationResult cal{c, c * 1.3, 1.3, 2025.3, 42.0, Reliability::p50};
        const auto path = slowdown(2024.0, 2027.4, 2031.0, 1.3, 0.45);
        const auto lin = forecast_horizon(cal, path, 2040.0);
        const auto con = forecast_horizon_concave(cal.t0, cal.y0, path, fit, p, 2040.0);
        CHECK(max_rel_diff(lin, con) < 1e-8);
    }
    SUBCASE("matches the closed form on a constant-growth path") {
        const auto fit = concave(40.0, -0.08);
        const double g = 1.1;
        const auto path = straight(2025.0, 26.0, 2026.0, g);
        const auto con = forecast_horizon_concave(2025.0, 20.0, path, fit, p, 2035.0);
        for (const auto& s : con.points()) {
            const double gain =
                oracle::concave_closed_form_gain(40.0, -0.08, 1.95, 0.1, 26.0, g / kLn10, s.t - 2025.0);
            CHECK(std::log(s.value / 20.0) == Approx(gain).epsilon(1e-9));
        }
    }
    SUBCASE("flat compute gives a flat horizon") {
        const auto con =
            forecast_horizon_concave(2025.0, 20.0, ComputePath({{2025, 26}, {2030, 26}}), concave(40, -0.1), p, 2032);
        for (const auto& s : con.points()) CHECK(s.value == Approx(20.0).epsilon(1e-14));
    }
    SUBCASE("rho < 0 under a slowdown is never ahead of the matched linear forecast") {
        const auto fit = concave(60.0, -0.09);
        const auto path = slowdown(2025.0, 2026.0, 2030.0, 1.2, 0.5);
        const double k0 = 0.1 * std::pow(10.0, path.log_interp(2025.0));
        const double c = scaling::local_elasticity(fit, k0) * 1.95;
        CalibrationResult cal{c, c * 1.2, 1.2, 2025.0, 60.0, Reliability::p50};
        const auto lin = forecast_horizon(cal, path, 2060.0);
        const auto con = forecast_horizon_concave(2025.0, 60.0, path, fit, p, 2060.0);
        const auto trend = trend_path(cal, 2060.0);
        const auto a = milestone_delays(trend, lin, default_milestones());
        const auto b = milestone_delays(trend, con, default_milestones());
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!b[i].date_forecast) continue;
            REQUIRE(a[i].date_forecast);
            CHECK(*b[i].date_forecast >= *a[i].date_forecast - 1e-9);
        }
    }
    SUBCASE("level shift changes the concave forecast") {
        const auto fit = concave(60.0, -0.09);
        const auto path = straight(2025.0, 26.0, 2030.0, 1.0);
        const auto a = forecast_horizon_concave(2025.0, 30.0, path, fit, p, 2035.0);
        const auto b = forecast_horizon_concave(2025.0, 30.0, path.shifted(1.0), fit, p, 2035.0);
        CHECK(b.back().value < a.back().value);
    }
    SUBCASE("overflow is reported with its time") {
        const auto fit = concave(1e6, 0.5);
        try {
            forecast_horizon_concave(2025.0, 30.0, straight(2025.0, 26.0, 2030.0, 5.0), fit, p, 2100.0);
            FAIL("expected overflow");
        } catch (const IntegrationError& e) {
            CHECK(e.time() >= 2025.0);
        }
    }
}

TEST_CASE("lambda/beta fit against the concave model") {
    const auto fit = concave(50.0, -0.1);
    const auto k = slowdown(2018.0, 2022.0, 2026.0, 1.3, 0.9);
    const auto series = [&](double lb, double noise_sd, std::uint64_t seed) {
        growth::GrowthParams p;
        p.lambda_over_beta = lb;
        const auto path = forecast_horizon_concave(2019.0, 2.0, k, fit, p, 2025.5);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, noise_sd);
        std::vector<Sample> out;
        for (std::size_t i = 0; i < path.size(); i += 3) {
            out.push_back({path.points()[i].t, path.points()[i].value * std::exp(noise(rng))});
        }
        return out;
    };
    CHECK(fit_lambda_over_beta_concave(series(0.95, 0.0, 1), k, fit, 0.1) == Approx(0.95).epsilon(1e-8));
    CHECK(std::abs(fit_lambda_over_beta_concave(series(0.95, 0.02, 2), k, fit, 0.1) - 0.95) < 0.02);

    // rho = 0: ln Y = a + gamma (1 + lambda/beta) ln K, so recovery is exact.
    const auto lin = concave(0.454, 0.0);
    std::vector<Sample> exact;
    for (double t = 2019.0; t <= 2025.0; t += 0.25) {
        exact.push_back({t, std::exp(-1.0 + 0.454 * 1.95 * k.log_interp(t) * kLn10)});
    }
    CHECK(fit_lambda_over_beta_concave(exact, k, lin, 0.1) == Approx(0.95).epsilon(1e-10));

    const std::vector<Sample> single{{2020.0, 5.0}};
    CHECK_THROWS_AS(fit_lambda_over_beta_concave(single, k, fit, 0.1), InsufficientDataError);
    const std::vector<Sample> outside{{2030.0, 5.0}, {2031.0, 6.0}};
    CHECK_THROWS_AS(fit_lambda_over_beta_concave(outside, k, fit, 0.1), InsufficientDataError);
}

TEST_CASE("select horizons honours reliability and window") {
    std::vector<HorizonObservation> obs{oracle::horizon_row("a", 2019.5, 10, std::nullopt),
                                        oracle::horizon_row("b", 2020.5, 20, 5),
                                        oracle::horizon_row("c", 2026.5, 40, 10)};
    CHECK(select_horizons(obs, Reliability::p50, {2019, 2025}).size() == 2);
    CHECK(select_horizons(obs, Reliability::p80, {2019, 2025}).size() == 1);
    CHECK(select_horizons(obs, Reliability::p80, {2019, 2027}).size() == 2);
}
