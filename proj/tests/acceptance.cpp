// End-to-end acceptance run: one PASS/FAIL line per criterion, artifacts under --out.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fkpp/config.hpp"
#include "fkpp/experiment.hpp"
#include "fkpp/io.hpp"
#include "fkpp/solver.hpp"

using namespace fkpp;

namespace {

struct Criterion {
    bool pass = true;
    std::vector<std::string> lines;

    void add(const CheckResult& c) {
        pass = pass && c.pass;
        lines.push_back(std::string(c.pass ? "ok   " : "bad  ") + c.name + ": " + c.detail);
    }
    void add(const std::vector<CheckResult>& cs) {
        for (const auto& c : cs) add(c);
    }
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

ExperimentConfig delay_config(const std::string& out, const std::string& kind, std::optional<double> r) {
    ExperimentConfig c;
    c.experiment = "delay_sweep";
    c.output_dir = out;
    c.model.kind = kind;
    c.model.r = r;
    c.numerics.dx = 0.05;
    c.numerics.dt = 0.02;
    c.numerics.t_end = 2000.0;
    validate(c);
    return c;
}

RunResult run_config(const ExperimentConfig& c, std::vector<double> snapshot_times = {}) {
    SolverConfig s = solver_config(c);
    s.snapshot_times = std::move(snapshot_times);
    return run(s, initial_profile(c));
}

CheckResult exponent_in(const DelayAnalysis& a, const std::string& tag, double lo, double hi) {
    const double b = a.power.exponent;
    return {tag + " power exponent", b >= lo && b <= hi, "beta = " + fmt(b) + ", required [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

// algebraic delay at r, inside predicted +- tol
Criterion sweep_point(const std::string& root, double r, double lo, double hi) {
    const ExperimentConfig c = delay_config(root + "/r" + fmt(r), "nonlocal", r);
    ensure_output_dir(c.output_dir);
    const DelayAnalysis a = analyze_delay(c, run_config(c), c.output_dir);
    Criterion k;
    k.add(exponent_in(a, "nonlocal r=" + fmt(r), lo, hi));
    return k;
}

// log regime: power exponent < max and the log model fits better
Criterion log_selected(const ExperimentConfig& c) {
    ensure_output_dir(c.output_dir);
    const DelayAnalysis a = analyze_delay(c, run_config(c), c.output_dir);
    Criterion k;
    k.add(a.checks);
    return k;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string out = "acceptance_out";
    app.add_option("--out", out, "artifact directory");
    CLI11_PARSE(app, argc, argv);

    DenormalGuard guard;
    ensure_output_dir(out);
    int failed = 0;

    const auto criterion = [&](int id, const std::string& title, const std::function<Criterion()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        Criterion k;
        try {
            k = body();
        } catch (const std::exception& e) {
            k.pass = false;
            k.lines.push_back(std::string("error: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& l : k.lines) std::cout << "      " << l << '\n';
        std::cout << (k.pass ? "PASS " : "FAIL ") << id << ". " << title << " (" << std::fixed << std::setprecision(1) << secs
                  << " s)" << std::defaultfloat << std::endl;
        if (!k.pass) ++failed;
    };

    criterion(1, "classical log delay coefficient near 3/2", [&] {
        ExperimentConfig c = delay_config(out + "/classic", "local_classic", std::nullopt);
        c.numerics.fit_t_min = 200.0;
        ensure_output_dir(c.output_dir);
        Criterion k;
        k.add(analyze_delay(c, run_config(c), c.output_dir).checks);
        return k;
    });

    // shared r=2 run for the algebraic delay, super-solution and convolution bound
    ExperimentConfig r2 = delay_config(out + "/nonlocal_r2", "nonlocal", 2.0);
    r2.experiment = "oracles";
    RunResult r2_run;
    criterion(2, "algebraic delay exponents for r = 2, 1.5, 2.5", [&] {
        std::vector<double> times = r2.oracles.conv_times;
        for (double t = r2.oracles.T; t <= r2.numerics.t_end + 1e-9; t += r2.oracles.snapshot_interval) times.push_back(t);
        ensure_output_dir(r2.output_dir);
        r2_run = run_config(r2, times);
        Criterion k;
        k.add(exponent_in(analyze_delay(r2, r2_run, r2.output_dir), "nonlocal r=2", 0.23, 0.43));
        for (const auto& [r, beta] : {std::pair{1.5, 0.6}, std::pair{2.5, 1.0 / 7.0}}) {
            const Criterion p = sweep_point(out, r, beta - 0.12, beta + 0.12);
            k.pass = k.pass && p.pass;
            k.lines.insert(k.lines.end(), p.lines.begin(), p.lines.end());
        }
        return k;
    });

    criterion(3, "r = 4 selects the logarithmic delay", [&] {
        ExperimentConfig c = delay_config(out + "/nonlocal_r4", "nonlocal", 4.0);
        c.numerics.lambda = 0.2;
        c.numerics.fit_t_min = 500.0;
        return log_selected(c);
    });

    criterion(4, "r = 3 keeps d/log t inside the critical bracket", [&] {
        ExperimentConfig c = delay_config(out + "/nonlocal_r3", "nonlocal", 3.0);
        c.numerics.fit_t_min = 500.0;
        return log_selected(c);
    });

    criterion(5, "Harnack inequality for heat and nonlocal runs", [&] {
        ExperimentConfig c;
        c.experiment = "harnack";
        c.output_dir = out + "/harnack";
        c.model.kind = "nonlocal";
        c.model.r = 2.0;
        Criterion k;
        k.add(run_experiment(c).checks);
        return k;
    });

    criterion(6, "sub-solution dichotomy", [&] {
        ExperimentConfig c;
        nlohmann::ordered_json j;
        Criterion k;
        k.add(analyze_subsolution(c.oracles, j));
        write_json(out + "/subsolution.json", j);
        return k;
    });

    nlohmann::ordered_json oracle_json;
    criterion(7, "super-solution domination at T = 500", [&] {
        if (r2_run.snapshots.empty()) throw std::runtime_error("the shared r = 2 run did not complete");
        Criterion k;
        k.add(analyze_supersolution(r2, r2_run, r2.output_dir, oracle_json["supersolution"]));
        return k;
    });

    criterion(8, "convolution bound stable across t = 100, 300, 1000", [&] {
        if (r2_run.snapshots.empty()) throw std::runtime_error("the shared r = 2 run did not complete");
        Criterion k;
        k.add(analyze_conv_bound(r2, r2_run, r2.output_dir, oracle_json["conv_bound"]));
        write_json(r2.output_dir + "/oracles.json", oracle_json);
        return k;
    });
    r2_run = RunResult{};

    criterion(9, "spectral suite", [&] {
        ExperimentConfig c;
        c.experiment = "spectral";
        c.output_dir = out + "/spectral";
        Criterion k;
        k.add(run_experiment(c).checks);
        return k;
    });

    criterion(10, "Gompertz-type local model: algebraic at r = 2, logarithmic at r = 4", [&] {
        const ExperimentConfig c2 = delay_config(out + "/fr_r2", "local_fr", 2.0);
        ensure_output_dir(c2.output_dir);
        Criterion k;
        k.add(exponent_in(analyze_delay(c2, run_config(c2), c2.output_dir), "local_fr r=2", 0.23, 0.43));
        ExperimentConfig c4 = delay_config(out + "/fr_r4", "local_fr", 4.0);
        c4.numerics.lambda = 0.2;
        c4.numerics.fit_t_min = 500.0;
        const Criterion l = log_selected(c4);
        k.pass = k.pass && l.pass;
        k.lines.insert(k.lines.end(), l.lines.begin(), l.lines.end());
        return k;
    });

    criterion(11, "traveling wave profile", [&] {
        ExperimentConfig c;
        c.experiment = "wave";
        c.output_dir = out + "/wave";
        Criterion k;
        k.add(run_experiment(c).checks);
        return k;
    });

    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << '\n';
    return failed == 0 ? 0 : 1;
}
