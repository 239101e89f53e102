#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fkpp/convolver.hpp"
#include "fkpp/field.hpp"
#include "fkpp/front_analysis.hpp"
#include "fkpp/kernels.hpp"
#include "fkpp/local_models.hpp"
#include "fkpp/tridiag.hpp"

namespace fkpp {

struct NonlocalModel {
    std::shared_ptr<const SampledKernel> kernel;
};
struct LocalClassicModel {};
struct LocalFrModel {
    FrParams params;
};
struct LocalGompertzModel {
    GompertzParams params;
};
// u_t = u_xx + c u with constant c (c = 0 is the heat equation)
struct LinearModel {
    double c = 0.0;
};

using Model = std::variant<NonlocalModel, LocalClassicModel, LocalFrModel, LocalGompertzModel, LinearModel>;

std::string model_name(const Model& model);

enum class LeftBoundary { dirichlet, neumann };
// second_order: standard three-point Laplacian; compact: fourth-order Numerov form (still tridiagonal)
enum class Laplacian { second_order, compact };

struct SolverConfig {
    double dt = 0.02;
    double t_end = 100.0;
    Model model = LocalClassicModel{};
    double window_margin = 400.0;
    // extra room created by each shift beyond the margin
    double shift_chunk = 20.0;
    bool shifting = true;
    // largest allowed |u - left_plateau| among discarded cells
    double shift_tolerance = 1e-6;
    LeftBoundary left_bc = LeftBoundary::dirichlet;
    Laplacian laplacian = Laplacian::compact;
    std::size_t snapshot_stride = 0;  // steps; 0 disables periodic snapshots
    std::vector<double> snapshot_times;
    std::size_t trace_stride = 50;  // steps
    std::vector<double> front_levels{0.1};
    std::size_t startup_steps = 50;  // backward-Euler steps before Crank-Nicolson
    // explicit reaction: Adams-Bashforth order (1, 2 or 3) once enough history exists
    int reaction_order = 3;
    bool record_sup_history = false;
};

void validate(const SolverConfig& config, double dx);

struct ShiftEvent {
    double t;
    double amount;
};

struct SolverReport {
    double M_report = 0.0;
    double min_value = 0.0;
    // sup over all steps of |1 - phi*u| (nonlocal) or of the reaction rate f(u)/u
    double c_sup = 0.0;
    std::size_t step_count = 0;
    std::vector<ShiftEvent> shift_log;
    std::vector<std::string> stability_flags;
    double final_plateau = 0.0;
};

struct InitialProfile {
    enum class Kind { step, bump, gaussian };
    Kind kind = Kind::step;
    double x_left = -300.0;
    double x_right = 400.0;
    double dx = 0.05;
    double amplitude = 1.0;
    double x0 = 0.0;      // step: u = amplitude for x <= x0; bump/gaussian: center
    double width = 1.0;   // bump: support width; gaussian: u = amplitude exp(-(x-x0)^2/(4 width))
};

Field make_initial_field(const InitialProfile& u0, const SolverConfig& config);

// Translate the window right by amount (a multiple of dx), filling new cells with right_value.
Field shift_window(const Field& field, double amount, double tolerance = 1e-6);

class Integrator {
public:
    Integrator(Field initial, SolverConfig config);

    const Field& field() const { return field_; }
    const SolverConfig& config() const { return config_; }
    const SolverReport& report() const { return report_; }
    std::size_t steps_taken() const { return steps_; }

    void step();
    // shift by a multiple of dx, keeping the reaction history aligned
    void shift(std::int64_t cells);
    // shift if the front at the first level is within window_margin of the right edge
    void maybe_shift();
    // phi*u (nonlocal) on the current field
    const std::vector<double>& last_convolution() const { return conv_; }

private:
    void reaction(std::vector<double>& out);
    void refresh_plateau();

    Field field_;
    SolverConfig config_;
    SolverReport report_;
    std::size_t steps_ = 0;
    double dx_;
    TridiagonalLU cn_;
    TridiagonalLU be_;
    std::optional<Convolver> convolver_;
    double mass_off_ = 0.0;
    double mass_diag_ = 1.0;
    std::vector<double> reaction_now_;
    std::vector<double> reaction_prev_;
    std::vector<double> reaction_prev2_;
    std::vector<double> conv_;
    std::vector<double> rhs_;
    std::vector<double> blend_;
    int history_ = 0;
};

// One IMEX step of a fresh integrator (first-order start).
Field step(const Field& field, const SolverConfig& config);

struct RunResult {
    std::vector<Field> snapshots;
    std::vector<FrontTrace> traces;  // one per front level
    SolverReport report;
    // (t, sup_x u) after every step
    std::vector<std::pair<double, double>> sup_history;
};

RunResult run(const SolverConfig& config, const InitialProfile& u0);

// Flush denormals to zero on this thread for the lifetime of the guard.
class DenormalGuard {
public:
    DenormalGuard();
    ~DenormalGuard();
    DenormalGuard(const DenormalGuard&) = delete;
    DenormalGuard& operator=(const DenormalGuard&) = delete;

private:
    unsigned int saved_;
};

}  // namespace fkpp
