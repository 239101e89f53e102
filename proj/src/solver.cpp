#include "fkpp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace fkpp {

std::string model_name(const Model& model) {
    struct Visitor {
        std::string operator()(const NonlocalModel&) const { return "nonlocal"; }
        std::string operator()(const LocalClassicModel&) const { return "local_classic"; }
        std::string operator()(const LocalFrModel&) const { return "local_fr"; }
        std::string operator()(const LocalGompertzModel&) const { return "local_gompertz"; }
        std::string operator()(const LinearModel&) const { return "linear"; }
    };
    return std::visit(Visitor{}, model);
}

void validate(const SolverConfig& config, double dx) {
    if (!(config.dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    if (!(config.t_end > 0.0)) throw std::invalid_argument("solver: t_end must be positive");
    if (!(dx > 0.0)) throw std::invalid_argument("solver: dx must be positive");
    if (!(config.window_margin >= 10.0 * dx)) throw std::invalid_argument("solver: window_margin must be at least 10 dx");
    if (!(config.shift_chunk >= 0.0)) throw std::invalid_argument("solver: shift_chunk must be nonnegative");
    if (config.trace_stride == 0) throw std::invalid_argument("solver: trace_stride must be positive");
    if (config.reaction_order < 1 || config.reaction_order > 3) throw std::invalid_argument("solver: reaction_order must be 1, 2 or 3");
    for (double l : config.front_levels)
        if (!(l > 0.0)) throw std::invalid_argument("solver: front levels must be positive");
    if (const auto* nl = std::get_if<NonlocalModel>(&config.model)) {
        if (!nl->kernel) throw std::invalid_argument("solver: nonlocal model without kernel");
        if (std::abs(nl->kernel->spec.dx - dx) > 1e-12 * dx) throw std::invalid_argument("solver: kernel dx differs from grid dx");
    }
    if (const auto* fr = std::get_if<LocalFrModel>(&config.model)) validate(fr->params);
    if (const auto* g = std::get_if<LocalGompertzModel>(&config.model)) validate(g->params);
}

Field make_initial_field(const InitialProfile& u0, const SolverConfig& config) {
    if (!(u0.dx > 0.0) || !(u0.x_right > u0.x_left)) throw std::invalid_argument("initial profile: bad domain");
    Field f;
    f.grid.x_left = u0.x_left;
    f.grid.dx = u0.dx;
    f.grid.n = static_cast<std::size_t>(std::lround((u0.x_right - u0.x_left) / u0.dx)) + 1;
    if (f.grid.n < 16) throw std::invalid_argument("initial profile: fewer than 16 grid points");
    f.values.resize(f.grid.n);
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const double x = f.grid.x(i);
        double v = 0.0;
        switch (u0.kind) {
            case InitialProfile::Kind::step: v = x <= u0.x0 ? u0.amplitude : 0.0; break;
            case InitialProfile::Kind::bump: v = std::abs(x - u0.x0) <= 0.5 * u0.width ? u0.amplitude : 0.0; break;
            case InitialProfile::Kind::gaussian:
                v = u0.amplitude * std::exp(-(x - u0.x0) * (x - u0.x0) / (4.0 * u0.width));
                break;
        }
        f.values[i] = v;
    }
    f.left_plateau = u0.kind == InitialProfile::Kind::step ? u0.amplitude : 0.0;
    if (config.left_bc == LeftBoundary::dirichlet) f.values.front() = f.left_plateau;
    f.right_value = 0.0;
    f.values.back() = 0.0;
    return f;
}

namespace {

void check_shift_cells(double amount, double dx, std::int64_t& cells) {
    const double c = amount / dx;
    cells = std::llround(c);
    if (std::abs(c - static_cast<double>(cells)) > 1e-9 * std::max(1.0, std::abs(c)))
        throw std::invalid_argument("shift_window: amount is not a multiple of dx");
    if (cells < 0) throw std::invalid_argument("shift_window: amount must be nonnegative");
}

void shift_values(std::vector<double>& v, std::size_t cells, double fill) {
    if (cells >= v.size()) {
        std::fill(v.begin(), v.end(), fill);
        return;
    }
    std::move(v.begin() + static_cast<std::ptrdiff_t>(cells), v.end(), v.begin());
    std::fill(v.end() - static_cast<std::ptrdiff_t>(cells), v.end(), fill);
}

void check_data_loss(const Field& f, std::size_t cells, double tol) {
    if (cells >= f.values.size()) throw std::runtime_error("shift_window: shift larger than the window (data loss)");
    for (std::size_t i = 0; i < cells; ++i) {
        if (std::abs(f.values[i] - f.left_plateau) > tol) {
            std::ostringstream msg;
            msg << "shift_window: would discard u = " << f.values[i] << " at x = " << f.grid.x(i)
                << ", not within " << tol << " of the plateau " << f.left_plateau << " (data loss)";
            throw std::runtime_error(msg.str());
        }
    }
}

}  // namespace

double Field::value_at(double x_lab) const {
    const double s = (x_lab - grid.x(0)) / grid.dx;
    if (s < 0.0) return left_plateau;
    if (s > static_cast<double>(values.size() - 1)) return right_value;
    const std::size_t i = std::min(static_cast<std::size_t>(s), values.size() - 2);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

double Field::sup() const { return *std::max_element(values.begin(), values.end()); }
double Field::inf() const { return *std::min_element(values.begin(), values.end()); }

Field shift_window(const Field& field, double amount, double tolerance) {
    std::int64_t cells = 0;
    check_shift_cells(amount, field.grid.dx, cells);
    Field out = field;
    if (cells == 0) return out;
    check_data_loss(field, static_cast<std::size_t>(cells), tolerance);
    shift_values(out.values, static_cast<std::size_t>(cells), field.right_value);
    out.grid.shift_cells += cells;
    return out;
}

Integrator::Integrator(Field initial, SolverConfig config)
    : field_(std::move(initial)), config_(std::move(config)), dx_(field_.grid.dx) {
    validate(config_, dx_);
    const std::size_t n = field_.values.size();
    if (n < 16) throw std::invalid_argument("solver: fewer than 16 grid points");

    if (config_.laplacian == Laplacian::compact) {
        mass_off_ = 1.0 / 12.0;
        mass_diag_ = 10.0 / 12.0;
    }
    const auto assemble = [&](double theta_dt) {
        Tridiagonal a(n);
        const double k = theta_dt / (dx_ * dx_);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            a.lower[i] = mass_off_ - k;
            a.diag[i] = mass_diag_ + 2.0 * k;
            a.upper[i] = mass_off_ - k;
        }
        if (config_.left_bc == LeftBoundary::dirichlet) {
            a.diag[0] = 1.0;
        } else {
            a.diag[0] = mass_diag_ + 2.0 * k;
            a.upper[0] = 2.0 * (mass_off_ - k);
        }
        a.diag[n - 1] = 1.0;
        return TridiagonalLU(a);
    };
    cn_ = assemble(0.5 * config_.dt);
    be_ = assemble(config_.dt);

    if (const auto* nl = std::get_if<NonlocalModel>(&config_.model)) convolver_.emplace(*nl->kernel, n);
    reaction_now_.assign(n, 0.0);
    reaction_prev_.assign(n, 0.0);
    reaction_prev2_.assign(n, 0.0);
    blend_.assign(n, 0.0);
    conv_.assign(n, 0.0);
    rhs_.assign(n, 0.0);
    refresh_plateau();
    report_.M_report = field_.sup();
    report_.min_value = field_.inf();
}

void Integrator::refresh_plateau() {
    if (config_.left_bc == LeftBoundary::neumann) field_.left_plateau = field_.values.front();
}

void Integrator::reaction(std::vector<double>& out) {
    const auto& u = field_.values;
    const std::size_t n = u.size();
    double c_sup = report_.c_sup;
    struct Visitor {
        Integrator& self;
        const std::vector<double>& u;
        std::vector<double>& out;
        double& c_sup;
        void operator()(const NonlocalModel&) {
            self.convolver_->apply(u, self.field_.left_plateau, self.field_.right_value, self.conv_);
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double c = 1.0 - self.conv_[i];
                out[i] = u[i] * c;
                c_sup = std::max(c_sup, std::abs(c));
            }
        }
        void operator()(const LocalClassicModel&) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                out[i] = u[i] * (1.0 - u[i]);
                c_sup = std::max(c_sup, std::abs(1.0 - u[i]));
            }
        }
        void operator()(const LocalFrModel& m) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double v = std::clamp(u[i], 0.0, 1.0);
                const double f = fr_nonlinearity(v, m.params);
                out[i] = f;
                if (v > 0.0) c_sup = std::max(c_sup, f / v);
            }
        }
        void operator()(const LocalGompertzModel& m) {
            const double t = self.field_.t;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double c = 1.0 - gompertz_g(t, u[i], m.params);
                out[i] = u[i] > 0.0 ? u[i] * c : 0.0;
                c_sup = std::max(c_sup, std::abs(c));
            }
        }
        void operator()(const LinearModel& m) {
            for (std::size_t i = 0; i < u.size(); ++i) out[i] = m.c * u[i];
            c_sup = std::max(c_sup, std::abs(m.c));
        }
    };
    std::visit(Visitor{*this, u, out, c_sup}, config_.model);
    report_.c_sup = c_sup;
    (void)n;
}

void Integrator::step() {
    auto& u = field_.values;
    const std::size_t n = u.size();
    const double dt = config_.dt;
    reaction(reaction_now_);

    const bool startup = steps_ < config_.startup_steps;
    const int order = startup ? 1 : std::min(config_.reaction_order, history_ + 1);
    switch (order) {
        case 1: blend_ = reaction_now_; break;
        case 2:
            for (std::size_t i = 0; i < n; ++i) blend_[i] = 1.5 * reaction_now_[i] - 0.5 * reaction_prev_[i];
            break;
        default:
            for (std::size_t i = 0; i < n; ++i)
                blend_[i] = (23.0 * reaction_now_[i] - 16.0 * reaction_prev_[i] + 5.0 * reaction_prev2_[i]) / 12.0;
    }

    // rhs = (M + k K) u + dt M blend, with k = 0 for the backward-Euler start
    const double k = startup ? 0.0 : 0.5 * dt / (dx_ * dx_);
    const double a = mass_off_, b = mass_diag_;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double mu = a * (u[i - 1] + u[i + 1]) + b * u[i];
        const double mr = a * (blend_[i - 1] + blend_[i + 1]) + b * blend_[i];
        rhs_[i] = mu + k * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + dt * mr;
    }
    rhs_[0] = 2.0 * a * u[1] + b * u[0] + 2.0 * k * (u[1] - u[0]) + dt * (2.0 * a * blend_[1] + b * blend_[0]);
    if (config_.left_bc == LeftBoundary::dirichlet) rhs_[0] = field_.left_plateau;
    rhs_[n - 1] = field_.right_value;
    (startup ? be_ : cn_).solve(rhs_);

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(rhs_[i])) {
            std::ostringstream msg;
            msg << "solver: non-finite value at step " << steps_ + 1 << ", x = " << field_.grid.x(i);
            throw std::runtime_error(msg.str());
        }
    }
    u.swap(rhs_);
    reaction_prev2_.swap(reaction_prev_);
    reaction_prev_.swap(reaction_now_);
    history_ = std::min(history_ + 1, 2);
    ++steps_;
    field_.t = static_cast<double>(steps_) * dt;
    refresh_plateau();

    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    report_.M_report = std::max(report_.M_report, *mx);
    report_.min_value = std::min(report_.min_value, *mn);
    report_.step_count = steps_;
}

void Integrator::shift(std::int64_t cells) {
    if (cells <= 0) return;
    const auto c = static_cast<std::size_t>(cells);
    check_data_loss(field_, c, config_.shift_tolerance);
    shift_values(field_.values, c, field_.right_value);
    shift_values(reaction_prev_, c, 0.0);
    shift_values(reaction_prev2_, c, 0.0);
    field_.grid.shift_cells += cells;
    report_.shift_log.push_back({field_.t, static_cast<double>(cells) * dx_});
    refresh_plateau();
}

void Integrator::maybe_shift() {
    if (config_.front_levels.empty()) return;
    const auto X = locate_front(field_, config_.front_levels.front());
    if (!X) return;
    const double room = field_.grid.x_right() - *X;
    if (room < 10.0 * dx_) {
        std::ostringstream msg;
        msg << "solver: front reached the right boundary at t = " << field_.t << " (window too small)";
        throw std::runtime_error(msg.str());
    }
    if (!config_.shifting || room >= config_.window_margin) return;
    const auto cells = static_cast<std::int64_t>(std::ceil((config_.window_margin + config_.shift_chunk - room) / dx_));
    shift(cells);
}

Field step(const Field& field, const SolverConfig& config) {
    Integrator integ(field, config);
    integ.step();
    return integ.field();
}

RunResult run(const SolverConfig& config, const InitialProfile& u0) {
    DenormalGuard guard;
    RunResult result;
    Integrator integ(make_initial_field(u0, config), config);
    const auto nsteps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
    result.traces.resize(config.front_levels.size());
    for (std::size_t k = 0; k < config.front_levels.size(); ++k) result.traces[k].lambda = config.front_levels[k];

    std::vector<std::size_t> snap_steps;
    for (double t : config.snapshot_times) snap_steps.push_back(static_cast<std::size_t>(std::llround(t / config.dt)));
    std::sort(snap_steps.begin(), snap_steps.end());

    const auto record = [&](std::size_t s) {
        const Field& f = integ.field();
        if (s % config.trace_stride == 0) {
            for (std::size_t k = 0; k < config.front_levels.size(); ++k)
                if (const auto X = locate_front(f, config.front_levels[k])) result.traces[k].samples.push_back({f.t, *X});
        }
        const bool periodic = config.snapshot_stride > 0 && s % config.snapshot_stride == 0;
        if (periodic || std::binary_search(snap_steps.begin(), snap_steps.end(), s)) result.snapshots.push_back(f);
        if (config.record_sup_history) result.sup_history.emplace_back(f.t, f.sup());
    };

    record(0);
    for (std::size_t s = 1; s <= nsteps; ++s) {
        integ.step();
        integ.maybe_shift();
        record(s);
    }
    result.report = integ.report();
    result.report.final_plateau = integ.field().left_plateau;
    if (result.report.min_value < -1e-10) result.report.stability_flags.push_back("negative values below -1e-10");
    if (!std::isfinite(result.report.M_report)) result.report.stability_flags.push_back("non-finite sup");
    return result;
}

DenormalGuard::DenormalGuard() : saved_(0) {
#if defined(__SSE2__)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040u);
#endif
}

DenormalGuard::~DenormalGuard() {
#if defined(__SSE2__)
    _mm_setcsr(saved_);
#endif
}

}  // namespace fkpp
