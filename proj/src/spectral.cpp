#include "fkpp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fkpp {

SelfSimilarOperator assemble_operator(double epsilon, double Y, double dy) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("self-similar operator: epsilon must be >= 0");
    if (!(Y >= 30.0)) throw std::invalid_argument("self-similar operator: Y must be at least 30");
    if (!(dy > 0.0) || dy > 1.0) throw std::invalid_argument("self-similar operator: dy must lie in (0, 1]");
    const long cells = std::lround(Y / dy);
    if (std::abs(static_cast<double>(cells) * dy - Y) > 1e-9 * Y) throw std::invalid_argument("self-similar operator: Y must be a multiple of dy");
    SelfSimilarOperator op;
    op.epsilon = epsilon;
    op.Y = Y;
    op.dy = dy;
    const std::size_t n = static_cast<std::size_t>(cells - 1);
    op.y.resize(n);
    op.potential.resize(n);
    op.matrix = Tridiagonal(n);
    const double k = 1.0 / (dy * dy);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = dy * static_cast<double>(i + 1);
        op.y[i] = y;
        op.potential[i] = y * y / 16.0 - 0.75 + epsilon * (y / 8.0 + epsilon / 16.0);
        op.matrix.diag[i] = 2.0 * k + op.potential[i];
        if (i > 0) op.matrix.lower[i] = -k;
        if (i + 1 < n) op.matrix.upper[i] = -k;
    }
    return op;
}

double psi_exact(double y) {
    if (y < 0.0) throw std::domain_error("psi: y must be nonnegative");
    return y * std::exp(-y * y / 8.0) / std::sqrt(2.0 * std::sqrt(std::numbers::pi));
}

double psi_exact_dd(double y) {
    if (y < 0.0) throw std::domain_error("psi: y must be nonnegative");
    // (y e^{-y^2/8})'' = (y^3/16 - 3y/4) e^{-y^2/8}
    return (y * y * y / 16.0 - 0.75 * y) * std::exp(-y * y / 8.0) / std::sqrt(2.0 * std::sqrt(std::numbers::pi));
}

std::size_t sturm_count(const Tridiagonal& a, double x) {
    const std::size_t n = a.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(a.diag[i]), std::abs(a.lower[i]), std::abs(a.upper[i])});
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, scale * scale);
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e2 = i > 0 ? a.lower[i] * a.upper[i - 1] : 0.0;
        q = a.diag[i] - x - (i > 0 ? e2 / q : 0.0);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

double tridiagonal_eigenvalue(const Tridiagonal& a, std::size_t k, double tol) {
    const std::size_t n = a.size();
    if (k >= n) throw std::invalid_argument("eigenvalue index out of range");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double rad = (i > 0 ? std::abs(a.lower[i]) : 0.0) + (i + 1 < n ? std::abs(a.upper[i]) : 0.0);
        lo = std::min(lo, a.diag[i] - rad);
        hi = std::max(hi, a.diag[i] + rad);
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol * std::max(1.0, std::abs(mid)) || mid <= lo || mid >= hi) return mid;
        (sturm_count(a, mid) > k ? hi : lo) = mid;
    }
    throw std::runtime_error("eigen bisection did not converge");
}

double inner(const std::vector<double>& a, const std::vector<double>& b, double dy) {
    if (a.size() != b.size()) throw std::invalid_argument("inner product: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * dy;
}

double l2_norm(const std::vector<double>& a, double dy) { return std::sqrt(inner(a, a, dy)); }

EigenResult principal_eigs(const SelfSimilarOperator& op) {
    const std::size_t n = op.size();
    if (n < 3) throw std::invalid_argument("principal eigenpair: operator not assembled");
    EigenResult res;
    res.epsilon = op.epsilon;
    res.y = op.y;
    res.lambda_eps = tridiagonal_eigenvalue(op.matrix, 0);
    res.mu_eps = tridiagonal_eigenvalue(op.matrix, 1);

    // inverse iteration at the computed eigenvalue
    Tridiagonal shifted = op.matrix;
    double sigma = res.lambda_eps;
    std::vector<double> x(n, 1.0), prev;
    TridiagonalLU lu;
    for (int attempt = 0;; ++attempt) {
        try {
            for (std::size_t i = 0; i < n; ++i) shifted.diag[i] = op.matrix.diag[i] - sigma;
            lu = TridiagonalLU(shifted);
            break;
        } catch (const std::runtime_error&) {
            if (attempt > 4) throw;
            sigma -= 1e-10 * std::max(1.0, std::abs(sigma));
        }
    }
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        prev = x;
        lu.solve(x);
        double sum = 0.0;
        for (double v : x) sum += v;
        const double norm = l2_norm(x, op.dy) * (sum < 0.0 ? -1.0 : 1.0);
        if (!(std::abs(norm) > 0.0) || !std::isfinite(norm)) throw std::runtime_error("principal eigenpair: inverse iteration broke down");
        for (double& v : x) v /= norm;
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(x[i] - prev[i]));
        if (it > 0 && diff < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) throw std::runtime_error("principal eigenpair: inverse iteration hit the iteration cap");
    res.psi_eps = std::move(x);
    return res;
}

namespace {

double drift_amplitude(const Drift& drift, double tau) {
    if (const auto* a1 = std::get_if<DriftA1>(&drift)) return a1->epsilon * std::exp((a1->gamma - 0.5) * tau);
    return 0.5 * std::get<DriftA2>(drift).epsilon;
}

double drift_epsilon(const Drift& drift) {
    return std::visit([](const auto& d) { return d.epsilon; }, drift);
}

void check_profile(const std::vector<double>& z, const SelfSimilarOperator& op) {
    if (z.size() != op.size())
        throw std::invalid_argument("self-similar evolution: profile has " + std::to_string(z.size()) + " points, grid has " +
                                    std::to_string(op.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i])) throw std::invalid_argument("self-similar evolution: non-finite initial value");
        if ((op.y[i] < 1.0 || op.y[i] > op.Y - 1.0) && z[i] != 0.0)
            throw std::invalid_argument("self-similar evolution: initial profile must vanish within one unit of both ends");
    }
}

void check_cfl(const Drift& drift, const EvolutionOptions& opt) {
    if (!std::holds_alternative<DriftA1>(drift)) return;
    const auto& d = std::get<DriftA1>(drift);
    const double peak = d.epsilon * std::max(1.0, std::exp((d.gamma - 0.5) * opt.tau_end));
    const double cfl = opt.dtau * peak * std::max(1.0, opt.Y / 4.0);
    if (cfl > 1.0) {
        std::ostringstream msg;
        msg << "self-similar evolution: explicit drift unstable, dtau * eps * Y/4 = " << cfl << " > 1";
        throw std::runtime_error(msg.str());
    }
}

void check_options(const EvolutionOptions& opt) {
    if (!(opt.dtau > 0.0) || !(opt.tau_end > 0.0)) throw std::invalid_argument("self-similar evolution: dtau and tau_end must be positive");
    if (opt.record_stride == 0) throw std::invalid_argument("self-similar evolution: record_stride must be positive");
}

// d/dy on the interior grid with zero Dirichlet ends
void centered_derivative(const std::vector<double>& z, double dy, std::vector<double>& out) {
    const std::size_t n = z.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? z[i - 1] : 0.0;
        const double right = i + 1 < n ? z[i + 1] : 0.0;
        out[i] = (right - left) / (2.0 * dy);
    }
}

// CN for z_tau = -A z + F(tau, z), F explicit (AB2 after a first Euler step)
template <class Explicit>
void crank_nicolson(const Tridiagonal& A, std::vector<double>& z, double dtau, std::size_t steps, Explicit&& F,
                    const std::function<void(std::size_t, const std::vector<double>&)>& observe) {
    const std::size_t n = z.size();
    Tridiagonal lhs = A;
    for (std::size_t i = 0; i < n; ++i) {
        lhs.lower[i] *= 0.5 * dtau;
        lhs.upper[i] *= 0.5 * dtau;
        lhs.diag[i] = 1.0 + 0.5 * dtau * A.diag[i];
    }
    const TridiagonalLU lu(lhs);
    std::vector<double> Az(n), f(n), f_prev(n), rhs(n);
    bool have_prev = false;
    observe(0, z);
    for (std::size_t s = 0; s < steps; ++s) {
        const double tau = dtau * static_cast<double>(s);
        const bool active = F(tau, z, f);
        A.multiply(z, Az);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = z[i] - 0.5 * dtau * Az[i];
            if (active) rhs[i] += dtau * (have_prev ? 1.5 * f[i] - 0.5 * f_prev[i] : f[i]);
        }
        lu.solve(rhs);
        z.swap(rhs);
        f_prev.swap(f);
        have_prev = active;
        observe(s + 1, z);
    }
}

}  // namespace

double symmetrizing_weight(const Drift& drift, double y) {
    if (std::holds_alternative<DriftA1>(drift)) return std::exp(-y * y / 8.0);
    return std::exp(-y * y / 8.0 - std::get<DriftA2>(drift).epsilon * y / 4.0);
}

Evolution evolve_selfsimilar(const std::vector<double>& zeta0, const Drift& drift, const EvolutionOptions& opt) {
    check_options(opt);
    check_cfl(drift, opt);
    const bool a1 = std::holds_alternative<DriftA1>(drift);
    const SelfSimilarOperator op = assemble_operator(a1 ? 0.0 : drift_epsilon(drift), opt.Y, opt.dy);
    check_profile(zeta0, op);

    Evolution ev;
    ev.y = op.y;
    std::vector<double> basis(op.size());
    if (a1) {
        for (std::size_t i = 0; i < op.size(); ++i) basis[i] = psi_exact(op.y[i]);
        ev.lambda = 0.0;
    } else {
        EigenResult eig = principal_eigs(op);
        basis = std::move(eig.psi_eps);
        ev.lambda = eig.lambda_eps;
    }

    const auto steps = static_cast<std::size_t>(std::llround(opt.tau_end / opt.dtau));
    std::vector<double> dz(op.size());
    const auto explicit_part = [&](double tau, const std::vector<double>& z, std::vector<double>& f) {
        if (!a1) return false;
        const double amp = drift_amplitude(drift, tau);
        centered_derivative(z, op.dy, dz);
        for (std::size_t i = 0; i < z.size(); ++i) f[i] = amp * (dz[i] - 0.25 * op.y[i] * z[i]);
        return true;
    };
    const auto observe = [&](std::size_t s, const std::vector<double>& z) {
        if (s % opt.record_stride != 0 && s != steps) return;
        EvolutionRecord rec;
        rec.tau = opt.dtau * static_cast<double>(s);
        rec.projection = inner(basis, z, op.dy);
        double rest = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double d = z[i] - rec.projection * basis[i];
            rest += d * d;
        }
        rec.orthogonal_norm = std::sqrt(rest * op.dy);
        ev.records.push_back(rec);
    };
    std::vector<double> z = zeta0;
    crank_nicolson(op.matrix, z, opt.dtau, steps, explicit_part, observe);
    ev.final_profile = std::move(z);
    return ev;
}

std::vector<double> evolve_unsymmetrized(const std::vector<double>& zeta_bar0, const Drift& drift, const EvolutionOptions& opt) {
    check_options(opt);
    check_cfl(drift, opt);
    const bool a1 = std::holds_alternative<DriftA1>(drift);
    const SelfSimilarOperator grid = assemble_operator(0.0, opt.Y, opt.dy);
    check_profile(zeta_bar0, grid);
    const std::size_t n = grid.size();
    const double dy = opt.dy;

    // A = -(d2 + (y/2 + c) d + 1), c = eps/2 for A2 and 0 for A1
    const double c = a1 ? 0.0 : drift_amplitude(drift, 0.0);
    Tridiagonal A(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double adv = 0.5 * grid.y[i] + c;
        A.diag[i] = 2.0 / (dy * dy) - 1.0;
        if (i > 0) A.lower[i] = -(1.0 / (dy * dy) - adv / (2.0 * dy));
        if (i + 1 < n) A.upper[i] = -(1.0 / (dy * dy) + adv / (2.0 * dy));
    }
    std::vector<double> dz(n);
    const auto explicit_part = [&](double tau, const std::vector<double>& z, std::vector<double>& f) {
        if (!a1) return false;
        const double amp = drift_amplitude(drift, tau);
        centered_derivative(z, dy, dz);
        for (std::size_t i = 0; i < n; ++i) f[i] = amp * dz[i];
        return true;
    };
    std::vector<double> z = zeta_bar0;
    const auto steps = static_cast<std::size_t>(std::llround(opt.tau_end / opt.dtau));
    crank_nicolson(A, z, opt.dtau, steps, explicit_part, [](std::size_t, const std::vector<double>&) {});
    return z;
}

void write_eigen_csv(const std::string& path, const EigenResult& eig) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "y,psi_eps,psi\n" << std::setprecision(17);
    for (std::size_t i = 0; i < eig.y.size(); ++i) os << eig.y[i] << ',' << eig.psi_eps[i] << ',' << psi_exact(eig.y[i]) << '\n';
}

void write_evolution_csv(const std::string& path, const Evolution& ev) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "tau,projection,orthogonal_norm\n" << std::setprecision(17);
    for (const EvolutionRecord& r : ev.records) os << r.tau << ',' << r.projection << ',' << r.orthogonal_norm << '\n';
}

}  // namespace fkpp
