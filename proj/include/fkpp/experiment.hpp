#pragma once

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fkpp/config.hpp"
#include "fkpp/front_analysis.hpp"
#include "fkpp/solver.hpp"

namespace fkpp {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentResult {
    std::string experiment;
    std::string output_dir;
    std::vector<CheckResult> checks;
    nlohmann::ordered_json summary;

    bool ok() const;
};

// solver setup implied by the model and numerics sections
SolverConfig solver_config(const ExperimentConfig& config);
InitialProfile initial_profile(const ExperimentConfig& config);

// ---- analyses over finished runs; dir empty means no files ----

struct DelayAnalysis {
    std::string regime;  // classic_log, algebraic, critical, log
    ExponentPrediction prediction{0.0, 0.0};
    DelayFit power;
    DelayFit log;
    RatioBand band;
    std::vector<CheckResult> checks;
};

DelayAnalysis analyze_delay(const ExperimentConfig& config, const RunResult& run, const std::string& dir);

std::vector<CheckResult> analyze_harnack(const ExperimentConfig& config, const std::string& run_name, const RunResult& run,
                                         double T, double x_lo, double x_hi, nlohmann::ordered_json& out);
// snapshot times T - lag for every sample lag, rounded up to the step grid
std::vector<double> harnack_snapshot_times(const HarnackSection& h, double T, double dt);

std::vector<CheckResult> analyze_supersolution(const ExperimentConfig& config, const RunResult& run, const std::string& dir,
                                               nlohmann::ordered_json& out);
std::vector<CheckResult> analyze_conv_bound(const ExperimentConfig& config, const RunResult& run, const std::string& dir,
                                            nlohmann::ordered_json& out);
std::vector<CheckResult> analyze_subsolution(const OraclesSection& o, nlohmann::ordered_json& out);
std::vector<CheckResult> analyze_dirichlet(const OraclesSection& o, nlohmann::ordered_json& out);
std::vector<CheckResult> analyze_spectral(const SpectralSection& s, const std::string& dir, nlohmann::ordered_json& out);
std::vector<CheckResult> analyze_wave(const WaveSection& w, const std::string& dir, nlohmann::ordered_json& out);

// runs the named experiment and writes its artifacts plus summary.json into output_dir
ExperimentResult run_experiment(const ExperimentConfig& config);

// "PASS name: detail" per check
void print_checks(std::ostream& os, const ExperimentResult& result);

struct SweepEntry {
    std::string output_dir;
    std::string experiment;
    bool ok = false;
    std::string error;  // set when the experiment threw
    std::vector<CheckResult> checks;
    std::optional<double> r;
    std::optional<double> fitted_exponent;
    std::optional<double> predicted_exponent;
};

struct SweepSummary {
    std::vector<SweepEntry> entries;  // sorted by output_dir

    bool ok() const;
    nlohmann::ordered_json to_json() const;
};

// every *.toml in dir, in name order
std::vector<ExperimentConfig> load_config_dir(const std::string& dir);
// throws ConfigError when two configs share an output directory
void check_distinct_outputs(const std::vector<ExperimentConfig>& configs);
SweepSummary sweep(const std::vector<ExperimentConfig>& configs, unsigned jobs);
void print_sweep(std::ostream& os, const SweepSummary& summary);

}  // namespace fkpp
