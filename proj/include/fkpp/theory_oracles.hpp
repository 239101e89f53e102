#pragma once

#include <cstddef>
#include <vector>

#include "fkpp/field.hpp"
#include "fkpp/kernels.hpp"

namespace fkpp {

// ---- local-in-time Harnack inequality ----
//   u(T, x+y) <= C sup_{[T-t,T]} u^{1-1/p} u(T,x)^{1/p} exp(alpha t + beta y^2 / t)

struct HarnackParams {
    double p = 2.0;
    double s = 0.75;     // (p+1)/(2p)
    double beta = 0.75;  // (s^2 p^2/(sp-1) + sp)/(4p)
    double alpha = 0.0;  // 2 sup|c|
    double C = 1.0;      // constant the heat-kernel argument produces, 2^{(p-1)/(2p)}
};

HarnackParams harnack_params(double p, double c_sup);

struct HarnackSample {
    double x = 0.0;
    double y = 0.0;
    double t = 1.0;  // time lag, the sup runs over [T - t, T]
};

// nx * ny * nt samples: x linear in [x_lo, x_hi], y linear in [-y_max, y_max], t log-spaced in [t_lo, t_hi]
std::vector<HarnackSample> harnack_samples(double x_lo, double x_hi, double y_max, double t_lo, double t_hi,
                                           std::size_t nx, std::size_t ny, std::size_t nt);

struct HarnackReport {
    double T = 0.0;
    HarnackParams params;
    double C_fit = 0.0;  // smallest C for which every used sample holds
    HarnackSample witness;
    std::size_t used = 0;
    std::size_t excluded = 0;  // u(T,x) below 1e-300
    std::size_t holding = 0;   // samples that hold with params.C
    bool pass = false;         // C_fit finite and no larger than params.C
};

// snapshots must contain one at time T and, for the sup, the times inside each window
HarnackReport harnack_check(const std::vector<Field>& snapshots, double p, double T, double c_sup,
                            const std::vector<HarnackSample>& samples);

// ---- convolution bound ----
//   phi*u <= C_conv max{1, (log(M/u)/t)^{(r-1)/2}} log(M/u)^{1-r}

struct ConvBoundReport {
    double t = 0.0;
    double C_conv = 0.0;
    double witness_x = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    std::vector<double> x;
    std::vector<double> lhs;    // phi*u
    std::vector<double> ratio;  // (phi*u) / shape, per used point
};

ConvBoundReport conv_bound_check(const Field& field, const SampledKernel& kernel, double M);

// ---- super-solution on P_T ----
//   vbar = B exp(-(x - 2t + 2 c_phi t^{2 gamma - 1}))

struct SupersolutionParams {
    double r = 2.0;
    double gamma = 2.0 / 3.0;
    double B = 1.0;
    double c_phi = 0.1;
    double C_phi = 1.0;
    double delta_phi = 0.1;
    double T = 1.0;
    double C0 = 1.0;  // right-edge Gaussian constant
    double M = 1.0;   // bound on u
};

void validate(const SupersolutionParams& params);

struct SupersolutionPartials {
    double v = 0.0;
    double v_t = 0.0;
    double v_xx = 0.0;
};

SupersolutionPartials supersolution_partials(const SupersolutionParams& params, double t, double x);
// (vbar_t - vbar_xx - vbar (1 - 2 c_phi (2 gamma - 1) t^{gamma (1-r)})) / vbar
double supersolution_identity_residual(const SupersolutionParams& params, double t, double x);

// Gaussian bound of the linearized solution from a step at x0 at the right edge 2t + t^gamma, in log form
double log_right_edge_gaussian(double gamma, double t, double x0);

// fits delta_phi, C_phi, c_phi, C0 and B from the snapshots at times >= T
SupersolutionParams fit_supersolution_params(const std::vector<Field>& snapshots, double r, double T, double M,
                                             double x0 = 0.0);

struct SupersolutionReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::size_t violations_off_edge = 0;  // more than 5 dx from the left edge of P_T
    double fraction_ok = 0.0;
    double worst_log_ratio = 0.0;  // max log(u / vbar)
    double witness_t = 0.0;
    double witness_x = 0.0;
    bool right_edge_ok = false;
    bool left_edge_ok = false;
    bool initial_slice_ok = false;
    bool lower_bound_ok = false;  // C_phi T^{(1-r)/(1+r)} <= 1 and inf u behind the left edge >= delta_phi
    double max_identity_residual = 0.0;
    bool pass = false;
};

SupersolutionReport supersolution_check(const std::vector<Field>& snapshots, const SupersolutionParams& params,
                                        std::size_t samples_per_time = 200);

// ---- sub-solution behind the moving Dirichlet boundary ----

struct SubsolutionParams {
    double gamma = 2.0 / 3.0;
    double a = 0.0;
    double a0() const;  // gamma^2 (1-gamma)^2 / (8 (2 gamma - 1))
};

void validate(const SubsolutionParams& params);

// v(t, xi) with xi the distance from the boundary 2t + (1+t)^gamma - 1
double subsolution_value(const SubsolutionParams& params, double t, double xi);

struct SubsolutionPartials {
    double v = 0.0;
    double v_t = 0.0;  // at fixed xi
    double v_xi = 0.0;
    double v_xixi = 0.0;
};

SubsolutionPartials subsolution_partials(const SubsolutionParams& params, double t, double xi);
// (vt_t - vt_xx - vt) / ((1+t)^{-3} e^Phi) for vt(t, x) = v(t, x - boundary(t))
double subsolution_residual(const SubsolutionParams& params, double t, double xi);
// the same quantity after simplification: xi [-a(2g-1)s^{2g-2} + g(1-g)/2 xi s^{g-2} - xi^2/(2 s^2)]
double subsolution_residual_reduced(const SubsolutionParams& params, double t, double xi);

struct SubsolutionSample {
    double t = 0.0;
    double xi = 0.0;
};

// nt log-spaced values of 1+t over [0, t_max] times nx offsets linear in (0, xi_max]
std::vector<SubsolutionSample> subsolution_samples(double t_max, double xi_max, std::size_t nt, std::size_t nx);

struct SubsolutionReport {
    double worst = 0.0;
    SubsolutionSample witness;
    std::size_t positive = 0;
    std::size_t samples = 0;
};

SubsolutionReport subsolution_check(const SubsolutionParams& params, const std::vector<SubsolutionSample>& samples);

// ---- Dirichlet heat lower bound at t = 2 ----
// z is the distance from the wall at x_bar0 = 3^gamma + 3; the initial datum is delta_w on (0, x_w - x_bar0)

double dirichlet_barrier(double gamma);

struct DirichletLower {
    double x_bar0 = 0.0;
    double z = 0.0;
    double image_integral = 0.0;  // exact half-line heat solution
    double cosh_bound = 0.0;
    double gaussian = 0.0;  // delta_w e^{-z^2/8}
};

DirichletLower dirichlet_heat_lower(double gamma, double delta_w, double x_w, double z);

struct DirichletReport {
    double x_bar0 = 0.0;
    double C = 0.0;  // smallest C with gaussian / C <= cosh bound on the range
    double max_numeric_error = 0.0;  // relative, numerical solve against the image integral
    bool cosh_below_image = false;
    bool numeric_dominates = false;  // numerical solve >= gaussian / C on the range
    std::vector<DirichletLower> rows;
    std::vector<double> numeric;
};

DirichletReport dirichlet_heat_check(double gamma, double delta_w, double x_w, double z_lo = 1.0, double z_hi = 10.0,
                                     std::size_t count = 91, double dx = 0.01, double dt = 1e-3);

}  // namespace fkpp
