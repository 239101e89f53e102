#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fkpp/field.hpp"
#include "fkpp/front_analysis.hpp"

using namespace fkpp;

namespace {

std::vector<DelaySample> synthetic(double t0, double t1, std::size_t n, auto&& d) {
    std::vector<DelaySample> s;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
        s.push_back({t, d(t)});
    }
    return s;
}

FrontTrace trace_of(auto&& X) {
    FrontTrace tr;
    for (int i = 1; i <= 100; ++i) {
        const double t = 10.0 * i;
        tr.samples.push_back({t, X(t)});
    }
    return tr;
}

}  // namespace

TEST_CASE("locate_front interpolates the rightmost crossing") {
    std::vector<double> x, u;
    for (int i = 0; i <= 100; ++i) {
        x.push_back(0.5 * i);
        const double xi = 0.5 * i;
        u.push_back(xi <= 7.0 ? 1.0 : (xi >= 7.5 ? 0.0 : 1.0 - (xi - 7.0) / 0.5));
    }
    // the grid has no point inside (7, 7.5), so refine to see the interpolation
    std::vector<double> xf, uf;
    for (int i = 0; i <= 400; ++i) {
        const double xi = 0.125 * i;
        xf.push_back(xi);
        uf.push_back(xi <= 7.0 ? 1.0 : (xi >= 7.5 ? 0.0 : 1.0 - (xi - 7.0) / 0.5));
    }
    CHECK(*locate_front(x, u, 0.5) == doctest::Approx(7.25));
    CHECK(*locate_front(xf, uf, 0.5) == doctest::Approx(7.25));

    std::vector<double> flat(x.size(), 0.01);
    CHECK(!locate_front(x, flat, 0.1).has_value());

    // tents centred at 10 and 39, each of half-width 2 and height 1
    std::vector<double> bumps(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        bumps[i] = std::max({0.0, 1.0 - std::abs(x[i] - 10.0) / 2.0, 1.0 - std::abs(x[i] - 39.0) / 2.0});
    CHECK(*locate_front(x, bumps, 0.5) == doctest::Approx(40.0));
}

TEST_CASE("locate_front on a field uses lab coordinates") {
    Field f;
    f.grid.x_left = -5.0;
    f.grid.dx = 0.5;
    f.grid.n = 21;
    f.grid.shift_cells = 4;
    f.values.assign(21, 0.0);
    for (std::size_t i = 0; i < 21; ++i) f.values[i] = f.grid.x(i) <= 0.0 ? 1.0 : 0.0;
    CHECK(*locate_front(f, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("delay series") {
    for (const auto& d : delay_series(trace_of([](double t) { return 2.0 * t; }))) CHECK(d.d == 0.0);
    for (const auto& d : delay_series(trace_of([](double t) { return 2.0 * t - 1.5 * std::log(t); })))
        CHECK(d.d == doctest::Approx(1.5 * std::log(d.t)).epsilon(1e-12));
    for (const auto& d : delay_series(trace_of([](double t) { return 2.0 * t - 3.0 * std::pow(t, 0.4); })))
        CHECK(d.d == doctest::Approx(3.0 * std::pow(d.t, 0.4)).epsilon(1e-12));
}

TEST_CASE("log fit recovers exact models") {
    const auto a = fit_log_delay(synthetic(10, 2000, 200, [](double t) { return 1.5 * std::log(t) + 4.0; }), 10, 2000);
    CHECK(std::abs(a.coefficient - 1.5) < 1e-6);
    CHECK(std::abs(a.offset - 4.0) < 1e-6);
    CHECK(a.rms_residual < 1e-10);
    const auto b = fit_log_delay(synthetic(10, 2000, 200, [](double) { return 7.0; }), 10, 2000);
    CHECK(std::abs(b.coefficient) < 1e-6);
}

TEST_CASE("power fit recovers exact models") {
    const auto a = fit_power_delay(synthetic(10, 2000, 200, [](double t) { return 3.0 * std::pow(t, 0.4); }), 10, 2000);
    CHECK(std::abs(a.exponent - 0.4) < 1e-6);
    CHECK(std::abs(a.coefficient - 3.0) < 1e-6);
}

TEST_CASE("model selection on a logarithmic series") {
    const auto s = synthetic(1000, 10000, 500, [](double t) { return 1.5 * std::log(t); });
    const auto p = fit_power_delay(s, 1000, 10000);
    const auto l = fit_log_delay(s, 1000, 10000);
    CHECK(p.exponent < 0.15);
    CHECK(l.rms_residual < p.rms_residual);
}

TEST_CASE("fits reproduce their own model") {
    const auto s = synthetic(50, 3000, 300, [](double t) { return 2.0 * std::pow(t, 1.0 / 3.0) + 0.3 * std::sin(t / 50.0); });
    const auto p = fit_power_delay(s, 100, 3000);
    const auto l = fit_log_delay(s, 100, 3000);
    std::vector<DelaySample> sp, sl;
    for (const auto& x : s) {
        sp.push_back({x.t, p.evaluate(x.t)});
        sl.push_back({x.t, l.evaluate(x.t)});
    }
    const auto p2 = fit_power_delay(sp, 100, 3000);
    const auto l2 = fit_log_delay(sl, 100, 3000);
    CHECK(std::abs(p2.exponent - p.exponent) < 1e-8);
    CHECK(std::abs(p2.coefficient - p.coefficient) < 1e-8);
    CHECK(std::abs(l2.coefficient - l.coefficient) < 1e-8);
    CHECK(std::abs(l2.offset - l.offset) < 1e-8);
}

TEST_CASE("fit errors") {
    const auto s = synthetic(10, 100, 10, [](double t) { return t; });
    CHECK_THROWS_AS(fit_log_delay(s, 10, 100), std::invalid_argument);
    const auto s2 = synthetic(1, 100, 100, [](double t) { return t - 50.0; });
    CHECK_THROWS_AS(fit_power_delay(s2, 10, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_log_delay(s2, 5, 100), std::invalid_argument);
}

TEST_CASE("predicted exponents") {
    CHECK(predicted_exponent(2.0).beta == doctest::Approx(1.0 / 3.0));
    CHECK(predicted_exponent(2.0).gamma == doctest::Approx(2.0 / 3.0));
    CHECK(predicted_exponent(3.0).beta == 0.0);
    CHECK(predicted_exponent(3.0).gamma == 0.5);
    CHECK(predicted_exponent(1.5).beta == doctest::Approx(0.6));
    CHECK(predicted_exponent(1.5).gamma == doctest::Approx(0.8));
    CHECK_THROWS_AS(predicted_exponent(1.0), std::invalid_argument);
    for (double r = 1.01; r < 20.0; r += 0.37) {
        const auto p = predicted_exponent(r);
        CHECK(std::abs(2.0 * p.gamma - 1.0 - p.beta) < 1e-15);
    }
}

TEST_CASE("log ratio band") {
    const auto s = synthetic(100, 1000, 100, [](double t) { return 2.0 * std::log(t); });
    const auto b = log_ratio_band(s, 100, 1000);
    CHECK(b.min == doctest::Approx(2.0));
    CHECK(b.max == doctest::Approx(2.0));
}
