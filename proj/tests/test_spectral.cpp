#include <doctest.h>

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fkpp/spectral.hpp"

using namespace fkpp;

namespace {

std::vector<double> bump(const std::vector<double>& y, double a, double b) {
    std::vector<double> z(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > a && y[i] < b) {
            const double s = std::sin(std::numbers::pi * (y[i] - a) / (b - a));
            z[i] = s * s;
        }
    return z;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("psi closed form") {
    const double c = 1.0 / std::sqrt(2.0 * std::sqrt(std::numbers::pi));
    CHECK(psi_exact(0.0) == 0.0);
    CHECK(psi_exact(2.0) == doctest::Approx(2.0 * std::exp(-0.5) * c).epsilon(1e-15));
    CHECK_THROWS_AS(psi_exact(-1.0), std::domain_error);

    // second derivative against a difference quotient, and M psi = 0
    for (double y : {0.3, 0.5, 1.0, 2.0, 3.7, 5.0, 11.0}) {
        const double h = 1e-4;
        const double fd = (psi_exact(y + h) - 2.0 * psi_exact(y) + psi_exact(y - h)) / (h * h);
        CHECK(psi_exact_dd(y) == doctest::Approx(fd).epsilon(1e-6).scale(1e-6));
        const double Mpsi = -psi_exact_dd(y) + (y * y / 16.0 - 0.75) * psi_exact(y);
        CHECK(std::abs(Mpsi) < 1e-14);
    }

    // unit L2 norm on the half-line, Simpson on [0, 40]
    const int n = 4000;
    const double h = 40.0 / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * psi_exact(i * h) * psi_exact(i * h);
    }
    CHECK(s * h / 3.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("operator assembly") {
    const auto op = assemble_operator(0.2, 40.0, 0.01);
    REQUIRE(op.size() == 3999);
    CHECK(op.y.front() == doctest::Approx(0.01));
    CHECK(op.y.back() == doctest::Approx(39.99));
    for (std::size_t i : {std::size_t{0}, std::size_t{1000}, std::size_t{3998}}) {
        const double y = op.y[i];
        CHECK(op.potential[i] == doctest::Approx(y * y / 16.0 - 0.75 + 0.2 * (y / 8.0 + 0.2 / 16.0)));
        CHECK(op.matrix.diag[i] == doctest::Approx(2e4 + op.potential[i]));
    }
    for (std::size_t i = 0; i + 1 < op.size(); ++i) REQUIRE(op.matrix.upper[i] == op.matrix.lower[i + 1]);

    CHECK_THROWS_AS(assemble_operator(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(assemble_operator(0.1, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_operator(0.1, 40.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_operator(0.1, 40.0, 0.03), std::invalid_argument);
}

TEST_CASE("Sturm bisection on the discrete Laplacian") {
    const std::size_t n = 10;
    Tridiagonal a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.diag[i] = 2.0;
        if (i > 0) a.lower[i] = -1.0;
        if (i + 1 < n) a.upper[i] = -1.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double exact = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
        CHECK(tridiagonal_eigenvalue(a, k) == doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK(sturm_count(a, 0.0) == 0);
    CHECK(sturm_count(a, 4.0) == n);
    CHECK(sturm_count(a, 2.0 - 2.0 * std::cos(3.5 * std::numbers::pi / 11.0)) == 3);
    CHECK_THROWS_AS(tridiagonal_eigenvalue(a, n), std::invalid_argument);
}

TEST_CASE("principal pair against LAPACK dstev") {
    for (double eps : {0.0, 0.3}) {
        const auto op = assemble_operator(eps, 40.0, 0.02);
        const auto eig = principal_eigs(op);
        const lapack_int n = static_cast<lapack_int>(op.size());
        std::vector<double> d = op.matrix.diag, e(op.matrix.upper.begin(), op.matrix.upper.end() - 1);
        std::vector<double> z(static_cast<std::size_t>(n) * n);
        REQUIRE(LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, d.data(), e.data(), z.data(), n) == 0);
        CHECK(eig.lambda_eps == doctest::Approx(d[0]).epsilon(1e-9).scale(1.0));
        CHECK(eig.mu_eps == doctest::Approx(d[1]).epsilon(1e-9).scale(1.0));
        double sum = 0.0;
        for (lapack_int i = 0; i < n; ++i) sum += z[i];
        const double sign = sum < 0 ? -1.0 : 1.0;
        double diff = 0.0;
        for (lapack_int i = 0; i < n; ++i)
            diff = std::max(diff, std::abs(eig.psi_eps[i] - sign * z[i] / std::sqrt(op.dy)));
        CHECK(diff < 1e-8);
    }
}

TEST_CASE("epsilon = 0 recovers the Hermite pair") {
    const auto op = assemble_operator(0.0, 40.0, 1e-3);
    const auto eig = principal_eigs(op);
    CHECK(std::abs(eig.lambda_eps) < 1e-4);
    CHECK(eig.mu_eps == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(l2_norm(eig.psi_eps, op.dy) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*std::min_element(eig.psi_eps.begin(), eig.psi_eps.end()) > -1e-12);
    std::vector<double> exact(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) exact[i] = psi_exact(op.y[i]);
    CHECK(max_abs_diff(eig.psi_eps, exact) < 1e-3);
}

TEST_CASE("principal eigenvalue converges at second order") {
    std::vector<double> lam;
    for (double dy : {0.04, 0.02, 0.01}) lam.push_back(principal_eigs(assemble_operator(0.2, 40.0, dy)).lambda_eps);
    const double ratio = (lam[0] - lam[1]) / (lam[1] - lam[2]);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));

    // truncation at Y = 40 is invisible next to Y = 60
    const double l40 = principal_eigs(assemble_operator(0.2, 40.0, 0.01)).lambda_eps;
    const double l60 = principal_eigs(assemble_operator(0.2, 60.0, 0.01)).lambda_eps;
    CHECK(std::abs(l40 - l60) < 1e-9);
}

TEST_CASE("lambda_eps positive, monotone in eps, with a gap above 1/2") {
    const std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
    std::vector<double> lam, dist;
    for (double e : eps) {
        const auto op = assemble_operator(e, 40.0, 1e-3);
        const auto eig = principal_eigs(op);
        CHECK(eig.lambda_eps > 0.0);
        CHECK(eig.mu_eps > 0.5);
        CHECK(eig.mu_eps > eig.lambda_eps);
        lam.push_back(eig.lambda_eps);
        double d = 0.0;
        for (std::size_t i = 0; i < op.size(); ++i) d = std::max(d, std::abs(eig.psi_eps[i] - psi_exact(op.y[i])));
        dist.push_back(d);
    }
    for (std::size_t k = 1; k < eps.size(); ++k) {
        CHECK(lam[k] < lam[k - 1]);
        CHECK(dist[k] < dist[k - 1]);
    }
}

TEST_CASE("projection is conserved without drift") {
    EvolutionOptions opt;
    opt.tau_end = 10.0;
    const auto y = assemble_operator(0.0, opt.Y, opt.dy).y;
    const auto z0 = bump(y, 1.0, 8.0);
    for (const Drift& drift : {Drift{DriftA1{0.0, 0.4}}, Drift{DriftA2{0.0}}}) {
        const auto ev = evolve_selfsimilar(z0, drift, opt);
        const double p0 = ev.records.front().projection;
        double worst = 0.0;
        for (const auto& r : ev.records) worst = std::max(worst, std::abs(r.projection - p0));
        CHECK(worst < 1e-6 * std::abs(p0));
        CHECK(ev.records.back().tau == doctest::Approx(10.0));
        CHECK(ev.records.back().orthogonal_norm < 1e-3 * ev.records.front().orthogonal_norm);
    }
}

TEST_CASE("constant drift: projection decays at the principal eigenvalue") {
    EvolutionOptions opt;
    opt.tau_end = 10.0;
    const auto y = assemble_operator(0.1, opt.Y, opt.dy).y;
    const auto ev = evolve_selfsimilar(bump(y, 1.0, 8.0), DriftA2{0.1}, opt);
    REQUIRE(ev.lambda > 0.0);
    const double p0 = ev.records.front().projection;
    for (const auto& r : ev.records) CHECK(r.projection == doctest::Approx(p0 * std::exp(-ev.lambda * r.tau)).epsilon(0.01));

    // the orthogonal remainder decays monotonically once the initial transient has passed
    double prev = INFINITY;
    for (const auto& r : ev.records)
        if (r.tau >= 1.0) {
            CHECK(r.orthogonal_norm <= prev);
            prev = r.orthogonal_norm;
        }
    CHECK(ev.records.back().orthogonal_norm < 1e-3 * ev.records.front().orthogonal_norm);
}

TEST_CASE("decaying drift: projection deviation is linear in eps") {
    EvolutionOptions opt;
    opt.tau_end = 10.0;
    const auto y = assemble_operator(0.0, opt.Y, opt.dy).y;
    const auto z0 = bump(y, 1.0, 8.0);
    std::vector<double> dev;
    for (double eps : {0.05, 0.1}) {
        const auto ev = evolve_selfsimilar(z0, DriftA1{eps, 0.4}, opt);
        const double p0 = ev.records.front().projection;
        double d = 0.0;
        for (const auto& r : ev.records) d = std::max(d, std::abs(r.projection - p0));
        dev.push_back(d);
    }
    CHECK(dev[0] > 0.0);
    CHECK(dev[1] / dev[0] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("decaying drift: orthogonal part tracks the forcing rate") {
    EvolutionOptions opt;
    opt.tau_end = 20.0;
    const auto y = assemble_operator(0.0, opt.Y, opt.dy).y;
    const auto ev = evolve_selfsimilar(bump(y, 1.0, 8.0), DriftA1{0.1, 0.4}, opt);
    // the forced response builds up, then decays monotonically past its peak
    const auto by_norm = [](const auto& a, const auto& b) { return a.orthogonal_norm < b.orthogonal_norm; };
    auto trough = ev.records.begin();
    while (trough + 1 != ev.records.end() && (trough + 1)->orthogonal_norm < trough->orthogonal_norm) ++trough;
    const auto peak = std::max_element(trough, ev.records.end(), by_norm);
    CHECK(trough->tau < peak->tau);
    CHECK(peak->tau < 15.0);
    for (auto it = peak + 1; it != ev.records.end(); ++it) CHECK(it->orthogonal_norm <= (it - 1)->orthogonal_norm);
    // late decay rate of the remainder approaches 1/2 - gamma
    auto at = [&](double tau) {
        for (const auto& r : ev.records)
            if (std::abs(r.tau - tau) < 1e-9) return r.orthogonal_norm;
        throw std::runtime_error("missing record");
    };
    const double rate = std::log(at(15.0) / at(20.0)) / 5.0;
    CHECK(rate == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("symmetrized and unsymmetrized evolutions agree") {
    EvolutionOptions opt;
    opt.tau_end = 3.0;
    opt.dtau = 0.005;
    const auto y = assemble_operator(0.0, opt.Y, opt.dy).y;
    const auto z0 = bump(y, 1.0, 8.0);
    for (const Drift& drift : {Drift{DriftA1{0.1, 0.4}}, Drift{DriftA2{0.1}}}) {
        std::vector<double> zbar0(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) zbar0[i] = symmetrizing_weight(drift, y[i]) * z0[i];
        const auto sym = evolve_selfsimilar(z0, drift, opt);
        const auto direct = evolve_unsymmetrized(zbar0, drift, opt);
        double scale = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            scale = std::max(scale, std::abs(direct[i]));
            if (y[i] < opt.Y - 5.0)
                diff = std::max(diff, std::abs(symmetrizing_weight(drift, y[i]) * sym.final_profile[i] - direct[i]));
        }
        CHECK(diff < 1e-6 * scale);
    }
}

TEST_CASE("evolution input validation") {
    EvolutionOptions opt;
    opt.dy = 0.01;
    opt.tau_end = 1.0;
    const auto y = assemble_operator(0.0, opt.Y, opt.dy).y;
    CHECK_THROWS_AS(evolve_selfsimilar(std::vector<double>(y.size() - 1, 0.0), DriftA2{}, opt), std::invalid_argument);
    CHECK_THROWS_AS(evolve_selfsimilar(bump(y, 0.5, 8.0), DriftA2{}, opt), std::invalid_argument);
    CHECK_THROWS_AS(evolve_selfsimilar(bump(y, 1.0, 39.5), DriftA2{}, opt), std::invalid_argument);
    auto bad = bump(y, 1.0, 8.0);
    bad[300] = NAN;
    CHECK_THROWS_AS(evolve_selfsimilar(bad, DriftA2{}, opt), std::invalid_argument);

    EvolutionOptions fast = opt;
    fast.dtau = 0.5;
    CHECK_THROWS_AS(evolve_selfsimilar(bump(y, 1.0, 8.0), DriftA1{1.0, 0.4}, fast), std::runtime_error);
    CHECK_NOTHROW(evolve_selfsimilar(bump(y, 1.0, 8.0), DriftA2{1.0}, fast));
}
