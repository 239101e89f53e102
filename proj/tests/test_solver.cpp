#include <doctest.h>

#include <cmath>
#include <memory>

#include "fkpp/front_analysis.hpp"
#include "fkpp/kernels.hpp"
#include "fkpp/solver.hpp"

using namespace fkpp;

namespace {

Field constant_field(double value, std::size_t n, double dx) {
    Field f;
    f.grid.x_left = -0.5 * dx * static_cast<double>(n - 1);
    f.grid.dx = dx;
    f.grid.n = n;
    f.values.assign(n, value);
    f.left_plateau = value;
    f.right_value = value;
    return f;
}

std::shared_ptr<const SampledKernel> kernel(double r, double L, double dx = 0.05) {
    return std::make_shared<const SampledKernel>(make_algebraic_kernel({r, L, dx}));
}

}  // namespace

TEST_CASE("zero is a fixed point") {
    SolverConfig cfg;
    cfg.model = NonlocalModel{kernel(2.0, 20.0)};
    Field f = constant_field(0.0, 400, 0.05);
    for (int i = 0; i < 5; ++i) f = step(f, cfg);
    for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("one is an equilibrium of the classic model") {
    SolverConfig cfg;
    cfg.model = LocalClassicModel{};
    cfg.startup_steps = 2;
    Integrator integ(constant_field(1.0, 400, 0.05), cfg);
    for (int i = 0; i < 10; ++i) integ.step();
    for (double v : integ.field().values) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("small data grows like the linearized heat flow") {
    // u0 = a exp(-x^2/4s) evolves as a sqrt(s/(s+t)) exp(-x^2/(4(s+t))) e^t while phi*u is negligible
    const double s = 1.0, a = 1e-6;
    SolverConfig cfg;
    cfg.model = NonlocalModel{kernel(2.0, 100.0)};
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.front_levels.clear();
    cfg.startup_steps = 2;
    InitialProfile u0;
    u0.kind = InitialProfile::Kind::gaussian;
    u0.x_left = -50.0;
    u0.x_right = 50.0;
    u0.amplitude = a;
    u0.width = s;
    Integrator integ(make_initial_field(u0, cfg), cfg);
    const double sup0 = integ.field().sup();
    while (integ.field().t < 1.0 - 1e-12) integ.step();
    const double ratio = integ.field().sup() / sup0;
    const double oracle = std::exp(1.0) * std::sqrt(s / (s + 1.0));
    CHECK(std::abs(ratio / oracle - 1.0) < 0.01);
}

TEST_CASE("runs are bit-identical") {
    SolverConfig cfg;
    cfg.model = NonlocalModel{kernel(2.0, 100.0)};
    cfg.t_end = 20.0;
    cfg.window_margin = 40.0;
    cfg.left_bc = LeftBoundary::neumann;
    cfg.shift_tolerance = 1e-2;
    cfg.snapshot_stride = 250;
    InitialProfile u0;
    u0.x_left = -60.0;
    u0.x_right = 60.0;
    const auto a = run(cfg, u0);
    const auto b = run(cfg, u0);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(a.snapshots[i].values == b.snapshots[i].values);
        CHECK(a.snapshots[i].grid.shift_cells == b.snapshots[i].grid.shift_cells);
    }
    CHECK(!a.report.shift_log.empty());
}

TEST_CASE("shift_window bookkeeping") {
    SolverConfig cfg;
    InitialProfile u0;
    u0.x_left = -20.0;
    u0.x_right = 20.0;
    Field f = make_initial_field(u0, cfg);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double x = f.grid.x(i);
        f.values[i] = x < 0.0 ? 1.0 : std::exp(-x);
    }
    f.values.back() = 0.0;

    SUBCASE("identity") {
        const Field g = shift_window(f, 0.0);
        CHECK(g.values == f.values);
        CHECK(g.grid.shift_cells == f.grid.shift_cells);
    }
    SUBCASE("composition") {
        const Field ab = shift_window(shift_window(f, 0.5), 1.25);
        const Field once = shift_window(f, 1.75);
        CHECK(ab.values == once.values);
        CHECK(ab.grid.shift_cells == once.grid.shift_cells);
        CHECK(ab.grid.frame_shift() == once.grid.frame_shift());
    }
    SUBCASE("lab positions of retained samples are unchanged") {
        const Field g = shift_window(f, 3.0);
        const std::size_t cells = 60;
        for (std::size_t i = 0; i + cells < f.values.size(); ++i) {
            CHECK(g.grid.x(i) == f.grid.x(i + cells));
            CHECK(g.values[i] == f.values[i + cells]);
        }
        for (std::size_t i = f.values.size() - cells; i < f.values.size(); ++i) CHECK(g.values[i] == 0.0);
        const auto X0 = locate_front(f, 0.1);
        const auto X1 = locate_front(g, 0.1);
        REQUIRE(X0);
        REQUIRE(X1);
        CHECK(*X0 == *X1);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(shift_window(f, 0.03), std::invalid_argument);
        CHECK_THROWS_AS(shift_window(f, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(shift_window(f, 21.0), std::runtime_error);
    }
}

TEST_CASE("nonnegativity from step data") {
    for (int model = 0; model < 3; ++model) {
        SolverConfig cfg;
        cfg.t_end = 30.0;
        cfg.window_margin = 60.0;
        InitialProfile u0;
        u0.x_left = -60.0;
        u0.x_right = 80.0;
        if (model == 0) cfg.model = LocalClassicModel{};
        if (model == 1) {
            cfg.model = NonlocalModel{kernel(2.0, 200.0)};
            cfg.left_bc = LeftBoundary::neumann;
            cfg.shift_tolerance = 1e-2;
        }
        if (model == 2) {
            cfg.model = LocalFrModel{FrParams{}};
            u0.amplitude = FrParams{}.theta_f;
            cfg.front_levels = {0.05};
        }
        const auto res = run(cfg, u0);
        CAPTURE(model);
        CHECK(res.report.min_value >= -1e-10);
        CHECK(std::isfinite(res.report.M_report));
        CHECK(res.report.stability_flags.empty());
    }
}

TEST_CASE("second-order convergence in time") {
    std::vector<double> X;
    for (double dt : {0.04, 0.02, 0.01}) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 100.0;
        cfg.window_margin = 100.0;
        cfg.trace_stride = static_cast<std::size_t>(std::llround(1.0 / dt));
        InitialProfile u0;
        u0.x_left = -100.0;
        u0.x_right = 150.0;
        const auto res = run(cfg, u0);
        REQUIRE(!res.traces[0].samples.empty());
        CHECK(res.traces[0].samples.back().t == doctest::Approx(100.0));
        X.push_back(res.traces[0].samples.back().X);
    }
    const double ratio = std::abs(X[0] - X[1]) / std::abs(X[1] - X[2]);
    CAPTURE(ratio);
    CHECK(ratio >= 1.8);
}

TEST_CASE("delay series is independent of window shifting") {
    SolverConfig moving;
    moving.t_end = 200.0;
    moving.window_margin = 200.0;
    moving.trace_stride = 100;
    SolverConfig fixed = moving;
    fixed.shifting = false;
    InitialProfile small, large;
    small.x_left = large.x_left = -100.0;
    small.x_right = 350.0;
    large.x_right = 700.0;
    const auto a = run(moving, small);
    const auto b = run(fixed, large);
    CHECK(!a.report.shift_log.empty());
    CHECK(b.report.shift_log.empty());
    const auto da = delay_series(a.traces[0]);
    const auto db = delay_series(b.traces[0]);
    REQUIRE(da.size() == db.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::abs(da[i].d - db[i].d));
    CAPTURE(worst);
    CHECK(worst < 1e-6);
}

TEST_CASE("front reaching the right edge is an error") {
    SolverConfig cfg;
    cfg.t_end = 30.0;
    cfg.shifting = false;
    InitialProfile u0;
    u0.x_left = -10.0;
    u0.x_right = 20.0;
    cfg.window_margin = 5.0;
    CHECK_THROWS_AS(run(cfg, u0), std::runtime_error);
}

TEST_CASE("config validation") {
    SolverConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(validate(cfg, 0.05), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.window_margin = 0.1;
    CHECK_THROWS_AS(validate(cfg, 0.05), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.model = NonlocalModel{};
    CHECK_THROWS_AS(validate(cfg, 0.05), std::invalid_argument);
    cfg.model = NonlocalModel{kernel(2.0, 10.0, 0.1)};
    CHECK_THROWS_AS(validate(cfg, 0.05), std::invalid_argument);
}
