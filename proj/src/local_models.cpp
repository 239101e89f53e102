#include "fkpp/local_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fkpp {

double GompertzParams::Theta_g() const { return theta_g * std::exp(-std::pow(A_g, 1.0 / (r - 1.0))); }

void validate(const GompertzParams& p) {
    if (!(p.theta_g > 0.0)) throw std::invalid_argument("gompertz: theta_g must be positive");
    if (!(p.A_g >= 1.0)) throw std::invalid_argument("gompertz: A_g must be at least 1");
    if (!(p.r > 1.0)) throw std::invalid_argument("gompertz: r must exceed 1");
}

double gompertz_g(double t, double u, const GompertzParams& p) {
    if (u <= 0.0) return 0.0;
    if (u > p.Theta_g()) return 1.0;
    const double L = std::log(p.theta_g / u);
    const double offset = std::pow(p.A_g, 1.0 / (p.r - 1.0));
    const double m = std::max(1.0, std::pow(L / (t + offset), 0.5 * (p.r - 1.0)));
    return p.A_g * m * std::pow(L, 1.0 - p.r);
}

void validate(const FrParams& p) {
    if (!(p.r > 1.0)) throw std::invalid_argument("f_r: r must exceed 1");
    if (!(p.A_f > 0.0)) throw std::invalid_argument("f_r: A_f must be positive");
    const double zero = std::exp(-std::pow(p.A_f, 1.0 / (p.r - 1.0)));
    if (std::abs(zero - p.theta_f) > 1e-12) throw std::invalid_argument("f_r: theta_f inconsistent with A_f");
}

double fr_nonlinearity(double u, const FrParams& p) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("f_r: u outside [0, 1]");
    if (u == 0.0) return 0.0;
    const double L = -std::log(u);
    if (L <= 0.0) return 0.0;
    return u * std::max(0.0, 1.0 - p.A_f * std::pow(L, 1.0 - p.r));
}

double wave_nonlinearity(double V, double A_V, double M, double r) {
    if (V <= 0.0) return 0.0;
    if (V >= M) return -std::numeric_limits<double>::infinity();
    return V * (1.0 - A_V * std::pow(std::log(M / V), 1.0 - r));
}

double TravelingWave::plateau_exact() const { return M * std::exp(-std::pow(A_V, 1.0 / (r - 1.0))); }

double TravelingWave::residual_sup() const {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < V.size(); ++i) {
        const double d2 = (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (h * h);
        const double d1 = (V[i + 1] - V[i - 1]) / (2.0 * h);
        worst = std::max(worst, std::abs(d2 + 2.0 * d1 + wave_nonlinearity(V[i], A_V, M, r)));
    }
    return worst;
}

double TravelingWave::far_field_variation(double lo, double hi) const {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (xi[i] < lo || xi[i] > hi) continue;
        const double q = V[i] / (xi[i] * std::exp(-xi[i]));
        mn = std::min(mn, q);
        mx = std::max(mx, q);
        sum += q;
        ++count;
    }
    if (count == 0) throw std::runtime_error("traveling wave: profile does not cover the far-field window");
    return (mx - mn) / (sum / static_cast<double>(count));
}

bool TravelingWave::monotone() const {
    for (std::size_t i = 1; i < V.size(); ++i)
        if (V[i] > V[i - 1]) return false;
    return true;
}

namespace {

using State = std::array<double, 2>;

struct WaveOde {
    double A, M, r;
    State operator()(const State& s) const { return {s[1], -2.0 * s[1] - wave_nonlinearity(s[0], A, M, r)}; }
};

// same ODE in the deviation d = V_- - V, accurate while d is tiny
struct DeviationOde {
    double A, M, r, plateau;
    State operator()(const State& s) const {
        const double L0 = std::pow(A, 1.0 / (r - 1.0));
        const double eps = -std::log1p(-s[0] / plateau) / L0;
        const double bracket = -std::expm1((1.0 - r) * std::log1p(eps));
        return {s[1], -2.0 * s[1] + (plateau - s[0]) * bracket};
    }
};

template <class Ode>
State rk4(const Ode& f, const State& s, double h) {
    const State k1 = f(s);
    const State k2 = f({s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]});
    const State k3 = f({s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]});
    const State k4 = f({s[0] + h * k3[0], s[1] + h * k3[1]});
    return {s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// backward shot from the far field; +1 overshoots the plateau, -1 turns back below it
int shoot(const WaveOde& f, double b, double plateau, const WaveOptions& opt) {
    const double x0 = opt.xi_right;
    State s{(x0 + b) * std::exp(-x0), (1.0 - x0 - b) * std::exp(-x0)};
    const long steps = std::lround((opt.xi_right - opt.xi_left) / opt.h);
    for (long j = 0; j < steps; ++j) {
        s = rk4(f, s, -opt.h);
        if (!std::isfinite(s[0]) || s[0] >= plateau) return +1;
        if (s[1] >= 0.0 || s[0] <= 0.0) return -1;
    }
    return s[0] > 0.5 * plateau ? +1 : -1;
}

// fraction theta in [0,1] of the step h from s at which the first component reaches target
template <class Ode>
double crossing_fraction(const Ode& f, const State& s, double h, double target) {
    double lo = 0.0, hi = 1.0;
    const double g_lo = s[0] - target;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double g = rk4(f, s, mid * h)[0] - target;
        ((g > 0.0) == (g_lo > 0.0) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TravelingWave traveling_wave(double A_V, double M, double r, const WaveOptions& opt) {
    if (!(r > 1.0)) throw std::invalid_argument("traveling wave: r must exceed 1");
    if (!(A_V >= 1.0)) throw std::invalid_argument("traveling wave: A_V must be at least 1");
    if (!(M > 0.0)) throw std::invalid_argument("traveling wave: M must be positive");
    if (!(opt.h > 0.0) || !(opt.xi_right > opt.xi_left)) throw std::invalid_argument("traveling wave: bad grid");

    TravelingWave wave;
    wave.A_V = A_V;
    wave.M = M;
    wave.r = r;
    wave.h = opt.h;
    const double plateau = wave.plateau_exact();
    wave.plateau = plateau;
    const WaveOde f{A_V, M, r};
    if (!(opt.stitch_fraction > 0.0 && opt.stitch_fraction < 1.0))
        throw std::invalid_argument("traveling wave: stitch fraction must lie in (0, 1)");
    const double stitch_dev = opt.stitch_fraction * plateau;

    // bracket the far-field parameter b
    const double scan_lo = -opt.xi_right + 1.0, scan_hi = 40.0;
    double prev_b = scan_lo;
    int prev = shoot(f, prev_b, plateau, opt);
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double b = scan_lo + 1.0; b <= scan_hi; b += 1.0) {
        const int s = shoot(f, b, plateau, opt);
        if (s != prev) {
            lo = prev_b;
            hi = b;
            found = true;
            break;
        }
        prev_b = b;
        prev = s;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "traveling wave: shooting failed to bracket b in [" << scan_lo << ", " << scan_hi << "]";
        throw std::runtime_error(msg.str());
    }
    const int s_lo = shoot(f, lo, plateau, opt);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (shoot(f, mid, plateau, opt) == s_lo ? lo : hi) = mid;
    }
    const double b = 0.5 * (lo + hi);
    wave.shooting_b = b;

    // far-field branch on the grid xi_right - j h, stopped where the plateau branch takes over
    std::vector<double> right_V;
    const double x0 = opt.xi_right;
    State s{(x0 + b) * std::exp(-x0), (1.0 - x0 - b) * std::exp(-x0)};
    right_V.push_back(s[0]);
    double stitch_xi = 0.0;
    const long steps = std::lround((opt.xi_right - opt.xi_left) / opt.h);
    long j = 0;
    for (; j < steps; ++j) {
        State next = rk4(f, s, -opt.h);
        if (plateau - next[0] <= stitch_dev) {
            // crossing between grid points j and j+1
            const double frac = crossing_fraction(f, s, -opt.h, plateau - stitch_dev);
            stitch_xi = opt.xi_right - (static_cast<double>(j) + frac) * opt.h;
            break;
        }
        s = next;
        right_V.push_back(s[0]);
    }
    if (j == steps) throw std::runtime_error("traveling wave: far-field branch never approached the plateau");
    const long last_right = j;  // grid index (from the right) of the last far-field sample

    // plateau branch: delta = plateau - V grows like e^{mu xi}
    const double k = (r - 1.0) * std::pow(A_V, -1.0 / (r - 1.0));
    const double mu = -1.0 + std::sqrt(1.0 + k);
    const double delta0 = 1e-9;
    const DeviationOde dev_ode{A_V, M, r, plateau};
    const auto plateau_branch = [&](double start_xi, double start_delta, double end_xi, std::vector<double>* out) {
        State p{start_delta, mu * start_delta};
        double xcur = start_xi;
        double crossing = std::numeric_limits<double>::quiet_NaN();
        if (out) out->push_back(plateau - p[0]);
        while (xcur < end_xi - 0.5 * opt.h) {
            const State next = rk4(dev_ode, p, opt.h);
            if (std::isnan(crossing) && next[0] >= stitch_dev) crossing = xcur + opt.h * crossing_fraction(dev_ode, p, opt.h, stitch_dev);
            p = next;
            xcur += opt.h;
            if (out) out->push_back(plateau - p[0]);
        }
        return crossing;
    };
    const double trial = plateau_branch(0.0, delta0, 40.0, nullptr);
    if (std::isnan(trial)) throw std::runtime_error("traveling wave: plateau branch did not leave the plateau");
    const double shift = stitch_xi - trial;  // the branch started at 0 must start at shift
    const long left_count = std::lround((opt.xi_right - opt.xi_left) / opt.h) - last_right;
    const double grid_start = opt.xi_right - static_cast<double>(last_right + left_count) * opt.h;
    const double grid_stitch = opt.xi_right - static_cast<double>(last_right + 1) * opt.h;
    // first grid point right of the branch origin; the linear mode is exact enough to its left
    const long first = std::max(0L, static_cast<long>(std::ceil((shift - grid_start) / opt.h)));
    const double branch_start = grid_start + static_cast<double>(first) * opt.h;
    const double d_start = delta0 * std::exp(mu * (branch_start - shift));
    std::vector<double> left_V;
    for (long i = 0; i < first; ++i) {
        const double x = grid_start + static_cast<double>(i) * opt.h;
        left_V.push_back(plateau - d_start * std::exp(mu * (x - branch_start)));
    }
    plateau_branch(branch_start, d_start, grid_stitch, &left_V);
    if (static_cast<long>(left_V.size()) != left_count) throw std::logic_error("traveling wave: stitch bookkeeping");

    // assemble left to right
    wave.V = left_V;
    for (long i = static_cast<long>(right_V.size()) - 1; i >= 0; --i) wave.V.push_back(right_V[static_cast<std::size_t>(i)]);
    wave.xi.resize(wave.V.size());
    const double xi0 = opt.xi_right - static_cast<double>(wave.V.size() - 1) * opt.h;
    for (std::size_t i = 0; i < wave.V.size(); ++i) wave.xi[i] = xi0 + static_cast<double>(i) * opt.h;

    // position the wave: choose the translation that makes V/(xi e^{-xi}) flattest on the kappa window
    const auto variation = [&](double shift_xi) {
        TravelingWave w = wave;
        for (double& x : w.xi) x += shift_xi;
        return w.far_field_variation(opt.kappa_lo, opt.kappa_hi);
    };
    double a = -5.0, c = 5.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = c - g * (c - a), x2 = a + g * (c - a);
    double f1 = variation(x1), f2 = variation(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - g * (c - a);
            f1 = variation(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (c - a);
            f2 = variation(x2);
        }
    }
    // snap to the grid so sample positions stay multiples of h
    wave.s_0 = std::round(0.5 * (a + c) / opt.h) * opt.h;
    for (double& x : wave.xi) x += wave.s_0;

    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < wave.xi.size(); ++i) {
        if (wave.xi[i] < opt.kappa_lo || wave.xi[i] > opt.kappa_hi) continue;
        sum += wave.V[i] / (wave.xi[i] * std::exp(-wave.xi[i]));
        ++count;
    }
    wave.kappa = sum / static_cast<double>(count);
    return wave;
}

void write_wave_csv(const std::string& path, const TravelingWave& wave) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "xi,V\n" << std::setprecision(17);
    for (std::size_t i = 0; i < wave.xi.size(); ++i) os << wave.xi[i] << ',' << wave.V[i] << '\n';
}

}  // namespace fkpp
