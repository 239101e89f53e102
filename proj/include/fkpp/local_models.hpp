#pragma once

#include <string>
#include <vector>

namespace fkpp {

struct GompertzParams {
    double theta_g = 1.0;
    double A_g = 1.0;
    double r = 2.0;

    double Theta_g() const;
};

void validate(const GompertzParams& p);

// g(t,u) with the clamps g = 0 for u < 0 and g = 1 for u > Theta_g
double gompertz_g(double t, double u, const GompertzParams& p);

struct FrParams {
    double r = 2.0;
    double theta_f = 0.36787944117144233;  // e^{-1}
    double A_f = 1.0;
    double delta_f = 0.1353352832366127;  // e^{-2}
};

void validate(const FrParams& p);

// f_r(u) = u max(0, 1 - log(1/u)^{1-r}) for u in [0, 1]
double fr_nonlinearity(double u, const FrParams& p);

struct WaveOptions {
    double xi_left = -40.0;
    double xi_right = 40.0;
    double h = 1e-3;
    // the plateau branch is joined where V_- - V equals this fraction of V_-
    double stitch_fraction = 0.7;
    double kappa_lo = 10.0;
    double kappa_hi = 25.0;
};

struct TravelingWave {
    double A_V = 1.0;
    double M = 1.0;
    double r = 4.0;
    double h = 1e-3;
    std::vector<double> xi;
    std::vector<double> V;
    double kappa = 0.0;
    double s_0 = 0.0;
    double plateau = 0.0;
    double shooting_b = 0.0;

    double plateau_exact() const;
    // sup over interior points of |V'' + 2V' + f(V)| using centered differences
    double residual_sup() const;
    // (max - min)/mean of V/(xi e^{-xi}) on [lo, hi]
    double far_field_variation(double lo, double hi) const;
    bool monotone() const;
};

double wave_nonlinearity(double V, double A_V, double M, double r);

TravelingWave traveling_wave(double A_V, double M, double r, const WaveOptions& opt = {});

void write_wave_csv(const std::string& path, const TravelingWave& wave);

}  // namespace fkpp
