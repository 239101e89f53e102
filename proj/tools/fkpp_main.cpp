#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "fkpp/config.hpp"
#include "fkpp/experiment.hpp"
#include "fkpp/front_analysis.hpp"
#include "fkpp/io.hpp"
#include "fkpp/kernels.hpp"
#include "fkpp/solver.hpp"

namespace {

int run_command(const std::string& path) {
    const fkpp::ExperimentConfig config = fkpp::load_config(path);
    const fkpp::ExperimentResult result = fkpp::run_experiment(config);
    fkpp::print_checks(std::cout, result);
    std::cout << (result.ok() ? "PASS " : "FAIL ") << config.experiment << " -> " << config.output_dir << '\n';
    return result.ok() ? 0 : 1;
}

int sweep_command(const std::string& dir, unsigned jobs, const std::string& summary_path) {
    const auto configs = fkpp::load_config_dir(dir);
    const fkpp::SweepSummary summary = fkpp::sweep(configs, jobs);
    fkpp::print_sweep(std::cout, summary);
    if (!summary_path.empty()) fkpp::write_json(summary_path, summary.to_json());
    return summary.ok() ? 0 : 1;
}

int predict_command(double r) {
    const fkpp::ExponentPrediction p = fkpp::predicted_exponent(r);
    const char* regime = std::abs(r - 3.0) < 1e-12 ? "critical" : (r < 3.0 ? "algebraic" : "logarithmic");
    std::cout << std::setprecision(12) << "r " << r << "\ngamma " << p.gamma << "\nbeta " << p.beta << "\nregime " << regime << '\n';
    return 0;
}

int kernel_command(double r, double cutoff, double dx, const std::string& out) {
    const fkpp::SampledKernel k = fkpp::make_algebraic_kernel({r, cutoff, dx});
    fkpp::write_kernel_csv(out, k);
    std::cout << std::setprecision(12) << "samples " << k.values.size() << "\ntail_mass " << k.tail_mass_at_cutoff << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fisher-KPP front delay laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run one experiment from a TOML config");
    run->add_option("config", config_path, "experiment config")->required()->check(CLI::ExistingFile);

    std::string sweep_dir, summary_path;
    unsigned jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "run every *.toml config in a directory");
    sweep->add_option("dir", sweep_dir, "directory of configs")->required()->check(CLI::ExistingDirectory);
    sweep->add_option("--jobs,-j", jobs, "concurrent experiments")->check(CLI::PositiveNumber);
    sweep->add_option("--summary", summary_path, "write the aggregated summary as JSON");

    double r = 0.0;
    auto* predict = app.add_subcommand("predict-exponent", "delay exponent and competition scale for tail exponent r");
    predict->add_option("--r", r, "kernel tail exponent, r > 1")->required();

    double kr = 2.0, cutoff = 2000.0, dx = 0.05;
    std::string kernel_out;
    auto* kernel = app.add_subcommand("kernel", "dump a sampled kernel as CSV (x, phi)");
    kernel->add_option("--r", kr, "tail exponent")->required();
    kernel->add_option("--cutoff", cutoff, "half width of the sampled support");
    kernel->add_option("--dx", dx, "grid spacing");
    kernel->add_option("--out", kernel_out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    fkpp::DenormalGuard guard;
    try {
        if (*run) return run_command(config_path);
        if (*sweep) return sweep_command(sweep_dir, jobs, summary_path);
        if (*predict) return predict_command(r);
        if (*kernel) return kernel_command(kr, cutoff, dx, kernel_out);
    } catch (const fkpp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
