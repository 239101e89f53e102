#include "fkpp/theory_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fkpp/solver.hpp"
#include "fkpp/special_functions.hpp"

namespace fkpp {

namespace {

constexpr double kFloor = 1e-300;

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

double field_sup(const Field& f) { return std::max({f.sup(), f.left_plateau, f.right_value}); }

void check_inside(const Field& f, double x) {
    const double lo = f.grid.x(0), hi = f.grid.x_right();
    if (x < lo - 1e-12 || x > hi + 1e-12)
        throw std::out_of_range("sample x=" + std::to_string(x) + " outside the grid [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
}

// erf(a) - erf(b) without cancellation when both arguments share a sign
double erf_diff(double a, double b) {
    if (a >= 0.0 && b >= 0.0) return std::erfc(b) - std::erfc(a);
    if (a <= 0.0 && b <= 0.0) return std::erfc(-a) - std::erfc(-b);
    return std::erf(a) - std::erf(b);
}

}  // namespace

// ---- Harnack ----

HarnackParams harnack_params(double p, double c_sup) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("harnack: p must exceed 1");
    if (!(c_sup >= 0.0)) throw std::invalid_argument("harnack: sup|c| must be nonnegative");
    HarnackParams h;
    h.p = p;
    h.s = (p + 1.0) / (2.0 * p);
    const double sp = h.s * p;
    h.beta = (sp * sp / (sp - 1.0) + sp) / (4.0 * p);
    h.alpha = 2.0 * c_sup;
    h.C = std::pow(2.0, (p - 1.0) / (2.0 * p));
    return h;
}

std::vector<HarnackSample> harnack_samples(double x_lo, double x_hi, double y_max, double t_lo, double t_hi,
                                           std::size_t nx, std::size_t ny, std::size_t nt) {
    if (nx == 0 || ny == 0 || nt == 0) throw std::invalid_argument("harnack samples: empty axis");
    if (!(t_lo > 0.0) || t_hi < t_lo) throw std::invalid_argument("harnack samples: bad lag range");
    const auto lin = [](double a, double b, std::size_t n, std::size_t i) {
        return n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    std::vector<HarnackSample> out;
    out.reserve(nx * ny * nt);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nt; ++k)
                out.push_back({lin(x_lo, x_hi, nx, i), lin(-y_max, y_max, ny, j),
                               std::exp(lin(std::log(t_lo), std::log(t_hi), nt, k))});
    return out;
}

HarnackReport harnack_check(const std::vector<Field>& snapshots, double p, double T, double c_sup,
                            const std::vector<HarnackSample>& samples) {
    HarnackReport rep;
    rep.T = T;
    rep.params = harnack_params(p, c_sup);
    const auto at_T = std::find_if(snapshots.begin(), snapshots.end(), [&](const Field& f) { return same_time(f.t, T); });
    if (at_T == snapshots.end()) throw std::invalid_argument("harnack: no snapshot at T=" + std::to_string(T));
    const Field& u = *at_T;
    const HarnackParams& h = rep.params;

    double worst = -std::numeric_limits<double>::infinity();
    for (const HarnackSample& s : samples) {
        if (!(s.t > 0.0)) throw std::invalid_argument("harnack: sample lag must be positive");
        check_inside(u, s.x);
        check_inside(u, s.x + s.y);
        const double ux = u.value_at(s.x);
        if (ux < kFloor) {
            ++rep.excluded;
            continue;
        }
        double sup = 0.0;
        for (const Field& f : snapshots)
            if (f.t >= T - s.t - 1e-9 * std::max(1.0, T) && f.t <= T + 1e-9 * std::max(1.0, T)) sup = std::max(sup, field_sup(f));
        const double uxy = u.value_at(s.x + s.y);
        ++rep.used;
        double log_ratio = -std::numeric_limits<double>::infinity();
        if (uxy > 0.0)
            log_ratio = std::log(uxy) - (1.0 - 1.0 / p) * std::log(sup) - std::log(ux) / p - h.alpha * s.t - h.beta * s.y * s.y / s.t;
        if (log_ratio <= std::log(h.C) + 1e-12) ++rep.holding;
        if (log_ratio > worst) {
            worst = log_ratio;
            rep.witness = s;
        }
    }
    rep.C_fit = rep.used ? std::exp(worst) : 0.0;
    rep.pass = rep.used > 0 && std::isfinite(rep.C_fit) && rep.holding == rep.used;
    return rep;
}

// ---- convolution bound ----

ConvBoundReport conv_bound_check(const Field& field, const SampledKernel& kernel, double M) {
    if (field.t < 1.0) throw std::invalid_argument("convolution bound: needs t >= 1, got " + std::to_string(field.t));
    if (M < field_sup(field) + 1.0) throw std::invalid_argument("convolution bound: M must be at least sup u + 1");
    const double r = kernel.spec.r;
    const std::vector<double> conv = convolve(field, kernel);
    ConvBoundReport rep;
    rep.t = field.t;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const double u = field.values[i];
        if (u < kFloor) {
            ++rep.excluded;
            continue;
        }
        const double L = std::log(M / u);
        const double shape = std::max(1.0, std::pow(L / field.t, 0.5 * (r - 1.0))) * std::pow(L, 1.0 - r);
        const double ratio = conv[i] / shape;
        rep.x.push_back(field.grid.x(i));
        rep.lhs.push_back(conv[i]);
        rep.ratio.push_back(ratio);
        if (ratio > rep.C_conv) {
            rep.C_conv = ratio;
            rep.witness_x = field.grid.x(i);
        }
        ++rep.used;
    }
    return rep;
}

// ---- super-solution ----

void validate(const SupersolutionParams& p) {
    if (!(p.r > 1.0 && p.r < 3.0)) throw std::invalid_argument("super-solution: r must lie in (1, 3)");
    if (std::abs(p.gamma - 2.0 / (1.0 + p.r)) > 1e-12) throw std::invalid_argument("super-solution: gamma must equal 2/(1+r)");
    if (!(p.B > 0.0) || !(p.c_phi > 0.0) || !(p.C_phi > 0.0) || !(p.delta_phi > 0.0) || !(p.T > 0.0))
        throw std::invalid_argument("super-solution: constants must be positive");
    if (2.0 * p.c_phi > p.C_phi) throw std::invalid_argument("super-solution: requires 2 c_phi <= C_phi");
}

SupersolutionPartials supersolution_partials(const SupersolutionParams& p, double t, double x) {
    const double b = 2.0 * p.gamma - 1.0;
    const double e = x - 2.0 * t + 2.0 * p.c_phi * std::pow(t, b);
    SupersolutionPartials d;
    d.v = p.B * std::exp(-e);
    d.v_t = d.v * (2.0 - 2.0 * p.c_phi * b * std::pow(t, b - 1.0));
    d.v_xx = d.v;
    return d;
}

double supersolution_identity_residual(const SupersolutionParams& p, double t, double x) {
    const SupersolutionPartials d = supersolution_partials(p, t, x);
    const double rate = 1.0 - 2.0 * p.c_phi * (2.0 * p.gamma - 1.0) * std::pow(t, p.gamma * (1.0 - p.r));
    return (d.v_t - d.v_xx - d.v * rate) / d.v;
}

double log_right_edge_gaussian(double gamma, double t, double x0) {
    if (!(t > 0.0)) throw std::invalid_argument("right-edge bound: t must be positive");
    const double z = (2.0 * t + std::pow(t, gamma) - x0) / (2.0 * std::sqrt(t));
    return t - std::numbers::ln2 + log_erfc(z);
}

SupersolutionParams fit_supersolution_params(const std::vector<Field>& snapshots, double r, double T, double M, double x0) {
    SupersolutionParams p;
    p.r = r;
    p.gamma = 2.0 / (1.0 + r);
    p.M = M;
    const double b = 2.0 * p.gamma - 1.0;
    std::vector<const Field*> late;
    for (const Field& f : snapshots)
        if (f.t >= T - 1e-9 * std::max(1.0, T)) late.push_back(&f);
    if (late.empty()) throw std::invalid_argument("super-solution fit: no snapshot at or after T");
    std::sort(late.begin(), late.end(), [](const Field* a, const Field* c) { return a->t < c->t; });
    p.T = late.front()->t;

    // inf of u behind the point where it first falls below half its left value
    double behind = std::numeric_limits<double>::infinity();
    for (const Field* f : late) {
        double m = f->left_plateau;
        for (double v : f->values) {
            if (v < 0.5 * f->left_plateau) break;
            m = std::min(m, v);
        }
        behind = std::min(behind, m);
    }
    p.delta_phi = 0.5 * behind;
    if (!(p.delta_phi > 0.0)) throw std::runtime_error("super-solution fit: no plateau behind the front");

    p.C_phi = 0.0;
    for (const Field* f : late) {
        double x_drop = f->grid.x_right();
        for (std::size_t i = 0; i < f->values.size(); ++i)
            if (f->values[i] < p.delta_phi) {
                x_drop = f->grid.x(i);
                break;
            }
        p.C_phi = std::max(p.C_phi, (2.0 * f->t - x_drop) / std::pow(f->t, b));
    }
    if (!(p.C_phi > 0.0)) throw std::runtime_error("super-solution fit: front ahead of 2t");

    const double A = kernel_bound_constant(r);
    const double c_lower = std::pow(2.0, 1.0 - r) * p.delta_phi / (A * (r - 1.0) * 2.0 * b);
    p.c_phi = std::min({0.5 * p.C_phi, 0.125, c_lower});

    const double t_last = late.back()->t;
    double log_C0 = -std::numeric_limits<double>::infinity();
    const std::size_t n = 400;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = p.T * std::pow(t_last / p.T, static_cast<double>(k) / static_cast<double>(n - 1));
        log_C0 = std::max(log_C0, log_right_edge_gaussian(p.gamma, t, x0) + std::pow(t, p.gamma) + 0.25 * std::pow(t, b));
    }
    for (const Field* f : late)
        log_C0 = std::max(log_C0, log_right_edge_gaussian(p.gamma, f->t, x0) + std::pow(f->t, p.gamma) + 0.25 * std::pow(f->t, b));
    p.C0 = std::exp(log_C0);
    const double B_init = M * std::exp(std::pow(p.T, p.gamma) + 2.0 * p.c_phi * std::pow(p.T, b));
    p.B = std::max({M, p.C0, B_init});
    return p;
}

SupersolutionReport supersolution_check(const std::vector<Field>& snapshots, const SupersolutionParams& p,
                                        std::size_t samples_per_time) {
    validate(p);
    if (samples_per_time == 0) throw std::invalid_argument("super-solution: need at least one sample per time");
    const double b = 2.0 * p.gamma - 1.0;
    const double log_B = std::log(p.B);
    SupersolutionReport rep;
    rep.right_edge_ok = rep.left_edge_ok = rep.initial_slice_ok = true;
    rep.lower_bound_ok = p.C_phi * std::pow(p.T, (1.0 - p.r) / (1.0 + p.r)) <= 1.0;
    rep.worst_log_ratio = -std::numeric_limits<double>::infinity();
    const double tol = 1e-9 * std::max(1.0, p.T);
    bool any = false;
    for (const Field& f : snapshots) {
        if (f.t < p.T - tol) continue;
        any = true;
        const double t = f.t;
        const double left = 2.0 * t - p.C_phi * std::pow(t, b);
        const double right = 2.0 * t + std::pow(t, p.gamma);
        const auto log_v = [&](double x) { return log_B - (x - 2.0 * t + 2.0 * p.c_phi * std::pow(t, b)); };
        const bool initial = std::abs(t - p.T) <= tol;

        for (std::size_t k = 0; k < samples_per_time; ++k) {
            const double x = left + (right - left) * static_cast<double>(k + 1) / static_cast<double>(samples_per_time + 1);
            const double u = f.value_at(x);
            ++rep.samples;
            rep.max_identity_residual = std::max(rep.max_identity_residual, std::abs(supersolution_identity_residual(p, t, x)));
            if (initial && (log_v(x) < std::log(p.M) || u > p.M)) rep.initial_slice_ok = false;
            if (u <= 0.0) continue;
            const double lr = std::log(u) - log_v(x);
            if (lr > rep.worst_log_ratio) {
                rep.worst_log_ratio = lr;
                rep.witness_t = t;
                rep.witness_x = x;
            }
            if (lr > 0.0) {
                ++rep.violations;
                if (x - left > 5.0 * f.grid.dx) ++rep.violations_off_edge;
            }
        }

        // right edge: u <= Gaussian bound <= C0 exp(-t^g - t^b/4) <= vbar
        const double log_gauss = log_right_edge_gaussian(p.gamma, t, 0.0);
        const double u_right = f.value_at(right);
        const double log_mid = std::log(p.C0) - std::pow(t, p.gamma) - 0.25 * std::pow(t, b);
        if ((u_right > 0.0 && std::log(u_right) > log_gauss + 1e-9) || log_gauss > log_mid + 1e-9 || log_mid > log_v(right) + 1e-9)
            rep.right_edge_ok = false;

        // left edge: vbar >= M >= u
        if (log_v(left) < std::log(p.M) - 1e-12 || f.value_at(left) > p.M) rep.left_edge_ok = false;

        // lower plateau bound behind the left edge
        double inf_behind = f.left_plateau;
        for (std::size_t i = 0; i < f.values.size() && f.grid.x(i) <= left; ++i) inf_behind = std::min(inf_behind, f.values[i]);
        if (inf_behind < p.delta_phi) rep.lower_bound_ok = false;
    }
    if (!any) throw std::invalid_argument("super-solution: no snapshot at or after T");
    rep.fraction_ok = rep.samples ? 1.0 - static_cast<double>(rep.violations) / static_cast<double>(rep.samples) : 0.0;
    rep.pass = rep.fraction_ok >= 0.999 && rep.violations_off_edge == 0 && rep.right_edge_ok && rep.left_edge_ok &&
               rep.initial_slice_ok && rep.max_identity_residual < 1e-10;
    return rep;
}

// ---- sub-solution ----

double SubsolutionParams::a0() const {
    return gamma * gamma * (1.0 - gamma) * (1.0 - gamma) / (8.0 * (2.0 * gamma - 1.0));
}

void validate(const SubsolutionParams& p) {
    if (!(p.gamma > 0.5 && p.gamma < 1.0)) throw std::invalid_argument("sub-solution: gamma must lie in (1/2, 1)");
    if (!std::isfinite(p.a)) throw std::invalid_argument("sub-solution: a must be finite");
}

namespace {

struct Phi {
    double value, xi, xixi, t;
};

Phi sub_phi(const SubsolutionParams& p, double t, double xi) {
    const double g = p.gamma, s = 1.0 + t;
    const double K = g * g / (4.0 * (2.0 * g - 1.0)) + p.a;
    Phi f;
    f.value = -xi - 0.5 * g * xi * std::pow(s, g - 1.0) - std::pow(s, g) - K * std::pow(s, 2.0 * g - 1.0) - xi * xi / (2.0 * s);
    f.xi = -1.0 - 0.5 * g * std::pow(s, g - 1.0) - xi / s;
    f.xixi = -1.0 / s;
    f.t = -0.5 * g * (g - 1.0) * xi * std::pow(s, g - 2.0) - g * std::pow(s, g - 1.0) - K * (2.0 * g - 1.0) * std::pow(s, 2.0 * g - 2.0) +
          xi * xi / (2.0 * s * s);
    return f;
}

}  // namespace

double subsolution_value(const SubsolutionParams& p, double t, double xi) {
    validate(p);
    if (xi == 0.0) return 0.0;
    return xi * std::pow(1.0 + t, -3.0) * std::exp(sub_phi(p, t, xi).value);
}

SubsolutionPartials subsolution_partials(const SubsolutionParams& p, double t, double xi) {
    validate(p);
    const double s = 1.0 + t;
    const Phi f = sub_phi(p, t, xi);
    const double pre = std::pow(s, -3.0) * std::exp(f.value);
    SubsolutionPartials d;
    d.v = xi * pre;
    d.v_t = pre * xi * (-3.0 / s + f.t);
    d.v_xi = pre * (1.0 + xi * f.xi);
    d.v_xixi = pre * (2.0 * f.xi + xi * f.xixi + xi * f.xi * f.xi);
    return d;
}

double subsolution_residual(const SubsolutionParams& p, double t, double xi) {
    validate(p);
    const double s = 1.0 + t;
    const Phi f = sub_phi(p, t, xi);
    const double speed = 2.0 + p.gamma * std::pow(s, p.gamma - 1.0);
    return xi * (-3.0 / s + f.t) - speed * (1.0 + xi * f.xi) - 2.0 * f.xi - xi * (f.xixi + f.xi * f.xi) - xi;
}

double subsolution_residual_reduced(const SubsolutionParams& p, double t, double xi) {
    validate(p);
    const double g = p.gamma, s = 1.0 + t;
    return xi * (-p.a * (2.0 * g - 1.0) * std::pow(s, 2.0 * g - 2.0) + 0.5 * g * (1.0 - g) * xi * std::pow(s, g - 2.0) - xi * xi / (2.0 * s * s));
}

std::vector<SubsolutionSample> subsolution_samples(double t_max, double xi_max, std::size_t nt, std::size_t nx) {
    if (nt < 2 || nx == 0) throw std::invalid_argument("sub-solution samples: need nt >= 2 and nx >= 1");
    if (!(t_max > 0.0) || !(xi_max > 0.0)) throw std::invalid_argument("sub-solution samples: ranges must be positive");
    std::vector<SubsolutionSample> out;
    out.reserve(nt * nx);
    const double ls = std::log1p(t_max);
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = i == 0 ? 0.0 : (i + 1 == nt ? t_max : std::expm1(ls * static_cast<double>(i) / static_cast<double>(nt - 1)));
        for (std::size_t j = 1; j <= nx; ++j) out.push_back({t, xi_max * static_cast<double>(j) / static_cast<double>(nx)});
    }
    return out;
}

SubsolutionReport subsolution_check(const SubsolutionParams& p, const std::vector<SubsolutionSample>& samples) {
    validate(p);
    SubsolutionReport rep;
    rep.worst = -std::numeric_limits<double>::infinity();
    for (const SubsolutionSample& s : samples) {
        const double r = subsolution_residual(p, s.t, s.xi);
        if (r > rep.worst) {
            rep.worst = r;
            rep.witness = s;
        }
        if (r > 0.0) ++rep.positive;
        ++rep.samples;
    }
    return rep;
}

// ---- Dirichlet heat lower bound ----

double dirichlet_barrier(double gamma) { return std::pow(3.0, gamma) + 3.0; }

DirichletLower dirichlet_heat_lower(double gamma, double delta_w, double x_w, double z) {
    DirichletLower d;
    d.x_bar0 = dirichlet_barrier(gamma);
    if (x_w < d.x_bar0 + 1.0) throw std::invalid_argument("dirichlet bound: x_w must be at least x_bar0 + 1");
    if (!(delta_w > 0.0) || !(z > 0.0)) throw std::invalid_argument("dirichlet bound: delta_w and z must be positive");
    const double b = x_w - d.x_bar0;
    const double q = std::sqrt(8.0);
    d.z = z;
    d.image_integral = 0.5 * delta_w * (erf_diff(z / q, (z - b) / q) - erf_diff((z + b) / q, z / q));
    d.cosh_bound = delta_w * std::exp(-z * z / 8.0 - b * b / 8.0) / std::sqrt(8.0 * std::numbers::pi) * (2.0 / z) *
                   (std::cosh(z * b / 4.0) - 1.0);
    d.gaussian = delta_w * std::exp(-z * z / 8.0);
    return d;
}

DirichletReport dirichlet_heat_check(double gamma, double delta_w, double x_w, double z_lo, double z_hi, std::size_t count,
                                     double dx, double dt) {
    if (count < 2 || !(z_hi > z_lo) || !(z_lo > 0.0)) throw std::invalid_argument("dirichlet check: bad z range");
    DirichletReport rep;
    rep.x_bar0 = dirichlet_barrier(gamma);
    const double b = x_w - rep.x_bar0;
    rep.cosh_below_image = true;
    for (std::size_t k = 0; k < count; ++k) {
        const double z = z_lo + (z_hi - z_lo) * static_cast<double>(k) / static_cast<double>(count - 1);
        rep.rows.push_back(dirichlet_heat_lower(gamma, delta_w, x_w, z));
        const DirichletLower& d = rep.rows.back();
        rep.C = std::max(rep.C, d.gaussian / d.cosh_bound);
        if (d.cosh_bound > d.image_integral * (1.0 + 1e-14)) rep.cosh_below_image = false;
    }

    // half-line heat solve on [0, z_hi + b + 30] with the wall at 0
    SolverConfig cfg;
    cfg.model = LinearModel{0.0};
    cfg.dt = dt;
    cfg.t_end = 2.0;
    cfg.shifting = false;
    cfg.front_levels = {};
    Field f;
    f.grid.x_left = 0.0;
    f.grid.dx = dx;
    f.grid.n = static_cast<std::size_t>(std::lround((z_hi + b + 30.0) / dx)) + 1;
    f.values.assign(f.grid.n, 0.0);
    f.left_plateau = 0.0;
    f.right_value = 0.0;
    for (std::size_t i = 1; i + 1 < f.grid.n; ++i) {
        const double x = f.grid.x(i);
        if (std::abs(x - b) <= 1e-9 * dx) f.values[i] = 0.5 * delta_w;
        else if (x < b) f.values[i] = delta_w;
    }
    Integrator integ(f, cfg);
    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / dt));
    for (std::size_t s = 0; s < steps; ++s) integ.step();

    rep.numeric_dominates = true;
    for (const DirichletLower& d : rep.rows) {
        const double num = integ.field().value_at(d.z);
        rep.numeric.push_back(num);
        rep.max_numeric_error = std::max(rep.max_numeric_error, std::abs(num - d.image_integral) / d.image_integral);
        if (num < d.gaussian / rep.C) rep.numeric_dominates = false;
    }
    return rep;
}

}  // namespace fkpp
