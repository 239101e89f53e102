#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fkpp {

struct Field;

struct FrontSample {
    double t;
    double X;
};

struct FrontTrace {
    double lambda = 0.1;
    std::vector<FrontSample> samples;
};

struct DelaySample {
    double t;
    double d;
};

struct DelayFit {
    enum class Model { log, power };
    Model model = Model::log;
    double coefficient = 0.0;  // log model: multiplier of log t; power model: prefactor
    double exponent = 0.0;     // power model only
    double offset = 0.0;       // log model only
    double rms_residual = 0.0; // in d units for both models
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t samples = 0;

    double evaluate(double t) const;
};

// rightmost crossing of level lambda, linearly interpolated; nullopt when u < lambda everywhere
std::optional<double> locate_front(const Field& field, double lambda);
std::optional<double> locate_front(const std::vector<double>& x, const std::vector<double>& u, double lambda);

std::vector<DelaySample> delay_series(const FrontTrace& trace);

DelayFit fit_log_delay(const std::vector<DelaySample>& series, double t_min, double t_max);
DelayFit fit_power_delay(const std::vector<DelaySample>& series, double t_min, double t_max);

struct ExponentPrediction {
    double beta;
    double gamma;
};
ExponentPrediction predicted_exponent(double r);

struct RatioBand {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};
// range of d(t)/log t over the window
RatioBand log_ratio_band(const std::vector<DelaySample>& series, double t_min, double t_max);

std::string fit_model_name(DelayFit::Model m);

void write_trace_csv(const std::string& path, const FrontTrace& trace);
void write_fit_json(const std::string& path, const DelayFit& fit);
// columns t, d, fitted_d
void write_plot_csv(const std::string& path, const std::vector<DelaySample>& series, const DelayFit& fit);

}  // namespace fkpp
