#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkpp {

inline constexpr int kSchemaVersion = 1;

// field is the dotted TOML path of the offending entry
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ModelSection {
    std::string kind = "local_classic";  // nonlocal, local_classic, local_fr, local_gompertz
    std::optional<double> r;
    double kernel_cutoff = 2000.0;
    double theta_g = 1.0;
    double A_g = 1.0;
    double A_f = 1.0;
    std::optional<std::string> left_bc;  // dirichlet or neumann; neumann by default for nonlocal

    bool operator==(const ModelSection&) const = default;
};

struct NumericsSection {
    double dx = 0.05;
    double dt = 0.02;
    double t_end = 2000.0;
    double window_margin = 400.0;
    double behind = 600.0;  // initial window extent behind the step
    double lambda = 0.1;
    std::optional<double> fit_t_min;  // default t_end/4
    std::optional<double> fit_t_max;  // default t_end
    double trace_interval = 1.0;      // time between front samples
    double snapshot_interval = 0.0;   // 0 disables snapshots.csv
    std::optional<double> shift_tolerance;

    bool operator==(const NumericsSection&) const = default;
};

struct ChecksSection {
    double exponent_tolerance = 0.1;        // |fitted - predicted| for algebraic regimes
    double log_exponent_max = 0.15;         // power exponent cap in log regimes
    std::vector<double> log_coefficient{1.25, 1.75};
    std::vector<double> log_ratio_band{1.2, 3.5};

    bool operator==(const ChecksSection&) const = default;
};

struct HarnackSection {
    std::vector<double> p{1.5, 2.0, 4.0};
    double T = 100.0;
    double lag_min = 0.1;
    double lag_max = 10.0;
    double y_max = 6.0;
    double x_behind = 40.0;  // sample x from front - x_behind to front + x_ahead
    double x_ahead = 20.0;
    int nx = 25;
    int ny = 20;
    int nt = 20;

    bool operator==(const HarnackSection&) const = default;
};

struct OraclesSection {
    double T = 500.0;
    std::vector<double> conv_times{100.0, 300.0, 1000.0};
    double snapshot_interval = 50.0;  // snapshots from T to t_end for the super-solution check
    std::vector<double> gammas{0.55, 2.0 / 3.0, 0.8};
    double subsolution_t_max = 100.0;
    double subsolution_xi_max = 50.0;
    int subsolution_nt = 200;
    int subsolution_nx = 200;
    double dirichlet_gamma = 2.0 / 3.0;
    double dirichlet_delta = 0.5;
    double dirichlet_x_w = 20.0;

    bool operator==(const OraclesSection&) const = default;
};

struct SpectralSection {
    std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
    double Y = 40.0;
    double dy = 1e-3;
    double tau_end = 10.0;
    double dtau = 0.01;
    double drift_epsilon = 0.1;
    double gamma = 0.4;
    std::vector<double> k_epsilons{0.05, 0.1};

    bool operator==(const SpectralSection&) const = default;
};

struct WaveSection {
    double A_V = 1.0;
    double M = 1.0;
    double r = 4.0;
    double h = 1e-3;
    double xi_left = -40.0;
    double xi_right = 40.0;

    bool operator==(const WaveSection&) const = default;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string experiment;  // delay_sweep, harnack, oracles, spectral, wave, local_gompertz
    std::string output_dir;
    ModelSection model;
    NumericsSection numerics;
    ChecksSection checks;
    HarnackSection harnack;
    OraclesSection oracles;
    SpectralSection spectral;
    WaveSection wave;

    bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& experiment_names();

// parse and validate; relative output_dir stays relative
ExperimentConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& config);

// full TOML document that parses back to an equal config
std::string to_toml(const ExperimentConfig& config);

}  // namespace fkpp
