#include "fkpp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "fkpp/io.hpp"
#include "fkpp/kernels.hpp"
#include "fkpp/local_models.hpp"
#include "fkpp/spectral.hpp"
#include "fkpp/theory_oracles.hpp"

namespace fkpp {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

CheckResult check(std::string name, bool pass, std::string detail) { return {std::move(name), pass, std::move(detail)}; }

std::size_t steps_for(double interval, double dt) {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(interval / dt)));
}

double plateau_value(const ExperimentConfig& c) {
    const ModelSection& m = c.model;
    if (m.kind == "local_fr") return FrParams{}.theta_f;
    if (m.kind == "local_gompertz") return GompertzParams{m.theta_g, m.A_g, m.r.value_or(2.0)}.Theta_g();
    return 1.0;
}

nlohmann::ordered_json checks_json(const std::vector<CheckResult>& checks) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const CheckResult& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return a;
}

nlohmann::ordered_json fit_json(const DelayFit& f) {
    nlohmann::ordered_json j;
    j["model"] = fit_model_name(f.model);
    if (f.model == DelayFit::Model::power) j["exponent"] = f.exponent;
    j["coefficient"] = f.coefficient;
    if (f.model == DelayFit::Model::log) j["offset"] = f.offset;
    j["rms_residual"] = f.rms_residual;
    j["window"] = {f.t_min, f.t_max};
    return j;
}

void append(std::vector<CheckResult>& to, const std::vector<CheckResult>& from) { to.insert(to.end(), from.begin(), from.end()); }

}  // namespace

bool ExperimentResult::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

SolverConfig solver_config(const ExperimentConfig& c) {
    const ModelSection& m = c.model;
    const NumericsSection& n = c.numerics;
    SolverConfig s;
    s.dt = n.dt;
    s.t_end = n.t_end;
    s.window_margin = n.window_margin;
    s.trace_stride = steps_for(n.trace_interval, n.dt);
    s.snapshot_stride = n.snapshot_interval > 0.0 ? steps_for(n.snapshot_interval, n.dt) : 0;
    s.front_levels = {n.lambda};
    if (m.kind == "nonlocal") {
        s.model = NonlocalModel{std::make_shared<const SampledKernel>(make_algebraic_kernel({*m.r, m.kernel_cutoff, n.dx}))};
        s.left_bc = LeftBoundary::neumann;
        s.shift_tolerance = 0.1;
    } else if (m.kind == "local_fr") {
        FrParams p;
        p.r = *m.r;
        p.A_f = m.A_f;
        s.model = LocalFrModel{p};
    } else if (m.kind == "local_gompertz") {
        s.model = LocalGompertzModel{GompertzParams{m.theta_g, m.A_g, *m.r}};
    } else {
        s.model = LocalClassicModel{};
    }
    if (m.left_bc) s.left_bc = *m.left_bc == "neumann" ? LeftBoundary::neumann : LeftBoundary::dirichlet;
    if (n.shift_tolerance) s.shift_tolerance = *n.shift_tolerance;
    return s;
}

InitialProfile initial_profile(const ExperimentConfig& c) {
    InitialProfile u0;
    u0.kind = InitialProfile::Kind::step;
    u0.dx = c.numerics.dx;
    u0.x_left = -c.numerics.behind;
    u0.x_right = c.numerics.window_margin + 20.0;
    u0.x0 = 0.0;
    u0.amplitude = plateau_value(c);
    if (!(c.numerics.lambda < u0.amplitude))
        throw ConfigError("numerics.lambda", "must lie below the plateau value " + fmt(u0.amplitude));
    return u0;
}

// ---- delay fits ----

DelayAnalysis analyze_delay(const ExperimentConfig& c, const RunResult& run, const std::string& dir) {
    if (run.traces.empty()) throw std::runtime_error("delay analysis: the run recorded no front trace");
    const FrontTrace& trace = run.traces.front();
    const auto series = delay_series(trace);
    const double lo = c.numerics.fit_t_min.value_or(c.numerics.t_end / 4.0);
    const double hi = c.numerics.fit_t_max.value_or(c.numerics.t_end);
    const ChecksSection& ch = c.checks;

    DelayAnalysis a;
    a.power = fit_power_delay(series, lo, hi);
    a.log = fit_log_delay(series, lo, hi);
    a.band = log_ratio_band(series, lo, hi);
    const std::string model = c.model.kind;
    const std::string window = "[" + fmt(lo) + ", " + fmt(hi) + "]";
    DelayFit plotted = a.log;
    if (model == "local_classic") {
        a.regime = "classic_log";
        a.prediction = {0.0, 0.0};
        const bool pass = a.log.coefficient >= ch.log_coefficient[0] && a.log.coefficient <= ch.log_coefficient[1];
        a.checks.push_back(check("local_classic log coefficient", pass,
                                 "c = " + fmt(a.log.coefficient) + " over " + window + ", expected 3/2 within [" +
                                     fmt(ch.log_coefficient[0]) + ", " + fmt(ch.log_coefficient[1]) + "]"));
    } else {
        const double r = *c.model.r;
        a.prediction = predicted_exponent(r);
        const std::string tag = model + " r=" + fmt(r);
        if (std::abs(r - 3.0) < 1e-9) {
            a.regime = "critical";
            const bool pass = a.band.min >= ch.log_ratio_band[0] && a.band.max <= ch.log_ratio_band[1];
            a.checks.push_back(check(tag + " d/log t band", pass,
                                     "d/log t in [" + fmt(a.band.min) + ", " + fmt(a.band.max) + "] over " + window +
                                         ", allowed [" + fmt(ch.log_ratio_band[0]) + ", " + fmt(ch.log_ratio_band[1]) + "]"));
        } else if (r < 3.0) {
            a.regime = "algebraic";
            plotted = a.power;
            const double err = std::abs(a.power.exponent - a.prediction.beta);
            a.checks.push_back(check(tag + " delay exponent", err <= ch.exponent_tolerance,
                                     "beta = " + fmt(a.power.exponent) + " over " + window + ", predicted " +
                                         fmt(a.prediction.beta) + " +- " + fmt(ch.exponent_tolerance)));
        } else {
            a.regime = "log";
            const bool small = a.power.exponent < ch.log_exponent_max;
            const bool selected = a.log.rms_residual < a.power.rms_residual;
            a.checks.push_back(check(tag + " log model selected", small && selected,
                                     "power exponent " + fmt(a.power.exponent) + " (< " + fmt(ch.log_exponent_max) +
                                         "), rms log " + fmt(a.log.rms_residual) + " vs power " + fmt(a.power.rms_residual) +
                                         " over " + window));
        }
    }
    if (!dir.empty()) {
        write_trace_csv(join_path(dir, "trace.csv"), trace);
        write_fit_json(join_path(dir, "delay_fit.json"), a.power);
        write_fit_json(join_path(dir, "log_fit.json"), a.log);
        write_plot_csv(join_path(dir, "plot.csv"), series, plotted);
    }
    return a;
}

// ---- Harnack ----

std::vector<double> harnack_snapshot_times(const HarnackSection& h, double T, double dt) {
    std::set<long long> steps;
    const auto lag_samples = harnack_samples(0.0, 0.0, 1.0, h.lag_min, h.lag_max, 1, 1, static_cast<std::size_t>(h.nt));
    for (const HarnackSample& s : lag_samples) {
        const double start = std::max(0.0, T - s.t);
        steps.insert(static_cast<long long>(std::ceil(start / dt - 1e-9)));
    }
    steps.insert(std::llround(T / dt));
    std::vector<double> times;
    for (long long s : steps) times.push_back(static_cast<double>(s) * dt);
    return times;
}

std::vector<CheckResult> analyze_harnack(const ExperimentConfig& c, const std::string& run_name, const RunResult& run,
                                         double T, double x_lo, double x_hi, nlohmann::ordered_json& out) {
    const HarnackSection& h = c.harnack;
    const auto samples = harnack_samples(x_lo, x_hi, h.y_max, h.lag_min, h.lag_max, static_cast<std::size_t>(h.nx),
                                         static_cast<std::size_t>(h.ny), static_cast<std::size_t>(h.nt));
    std::vector<CheckResult> checks;
    for (double p : h.p) {
        const HarnackReport rep = harnack_check(run.snapshots, p, T, run.report.c_sup, samples);
        nlohmann::ordered_json j;
        j["run"] = run_name;
        j["p"] = p;
        j["T"] = T;
        j["s"] = rep.params.s;
        j["beta"] = rep.params.beta;
        j["alpha"] = rep.params.alpha;
        j["C_theory"] = rep.params.C;
        j["C_fit"] = rep.C_fit;
        j["used"] = rep.used;
        j["excluded"] = rep.excluded;
        j["holding"] = rep.holding;
        j["witness"] = {{"x", rep.witness.x}, {"y", rep.witness.y}, {"t", rep.witness.t}};
        out.push_back(j);
        const bool enough = rep.used >= 10000;
        checks.push_back(check("harnack " + run_name + " p=" + fmt(p), rep.pass && enough,
                               std::to_string(rep.holding) + "/" + std::to_string(rep.used) + " samples hold, C_fit " +
                                   fmt(rep.C_fit) + " <= C " + fmt(rep.params.C) + ", beta " + fmt(rep.params.beta, 6)));
    }
    return checks;
}

// ---- super-solution and convolution bound ----

std::vector<CheckResult> analyze_supersolution(const ExperimentConfig& c, const RunResult& run, const std::string& dir,
                                               nlohmann::ordered_json& out) {
    const double r = *c.model.r;
    const SupersolutionParams p = fit_supersolution_params(run.snapshots, r, c.oracles.T, run.report.M_report);
    const SupersolutionReport rep = supersolution_check(run.snapshots, p);
    nlohmann::ordered_json j;
    j["params"] = {{"r", p.r},         {"gamma", p.gamma}, {"B", p.B},   {"c_phi", p.c_phi}, {"C_phi", p.C_phi},
                   {"delta_phi", p.delta_phi}, {"T", p.T}, {"C0", p.C0}, {"M", p.M}};
    j["samples"] = rep.samples;
    j["violations"] = rep.violations;
    j["violations_off_edge"] = rep.violations_off_edge;
    j["fraction_ok"] = rep.fraction_ok;
    j["worst_log_ratio"] = rep.worst_log_ratio;
    j["witness"] = {{"t", rep.witness_t}, {"x", rep.witness_x}};
    j["right_edge_ok"] = rep.right_edge_ok;
    j["left_edge_ok"] = rep.left_edge_ok;
    j["initial_slice_ok"] = rep.initial_slice_ok;
    j["lower_bound_ok"] = rep.lower_bound_ok;
    j["max_identity_residual"] = rep.max_identity_residual;
    j["pass"] = rep.pass;
    out = j;
    if (!dir.empty()) write_json(join_path(dir, "supersolution.json"), j);
    return {check("super-solution domination T=" + fmt(p.T), rep.fraction_ok >= 0.999 && rep.violations_off_edge == 0,
                  fmt(100.0 * rep.fraction_ok, 6) + "% of " + std::to_string(rep.samples) + " samples, " +
                      std::to_string(rep.violations_off_edge) + " violations away from the left edge"),
            check("super-solution identity", rep.max_identity_residual < 1e-10,
                  "max residual " + fmt(rep.max_identity_residual, 3))};
}

std::vector<CheckResult> analyze_conv_bound(const ExperimentConfig& c, const RunResult& run, const std::string& dir,
                                            nlohmann::ordered_json& out) {
    const SampledKernel kernel = make_algebraic_kernel({*c.model.r, c.model.kernel_cutoff, c.numerics.dx});
    const double M = run.report.M_report + 1.0;
    std::ostringstream csv;
    csv << "t,x,phi_u,ratio\n" << std::setprecision(17);
    double lo = INFINITY, hi = 0.0;
    bool finite = true;
    out = nlohmann::ordered_json::array();
    for (double t : c.oracles.conv_times) {
        const auto it = std::find_if(run.snapshots.begin(), run.snapshots.end(),
                                     [&](const Field& f) { return std::abs(f.t - t) <= 1e-9 * std::max(1.0, t); });
        if (it == run.snapshots.end()) throw std::runtime_error("convolution bound: no snapshot at t=" + fmt(t));
        const ConvBoundReport rep = conv_bound_check(*it, kernel, M);
        finite = finite && std::isfinite(rep.C_conv) && rep.C_conv > 0.0;
        lo = std::min(lo, rep.C_conv);
        hi = std::max(hi, rep.C_conv);
        out.push_back({{"t", t}, {"C_conv", rep.C_conv}, {"witness_x", rep.witness_x}, {"used", rep.used}, {"excluded", rep.excluded}});
        for (std::size_t i = 0; i < rep.x.size(); ++i) csv << t << ',' << rep.x[i] << ',' << rep.lhs[i] << ',' << rep.ratio[i] << '\n';
    }
    if (!dir.empty()) write_text(join_path(dir, "conv_bound.csv"), csv.str());
    return {check("convolution bound", finite && hi <= 2.0 * lo,
                  "C_conv in [" + fmt(lo) + ", " + fmt(hi) + "] across " + std::to_string(c.oracles.conv_times.size()) +
                      " times, spread " + fmt(hi / lo))};
}

// ---- analytic oracles ----

std::vector<CheckResult> analyze_subsolution(const OraclesSection& o, nlohmann::ordered_json& out) {
    const auto samples = subsolution_samples(o.subsolution_t_max, o.subsolution_xi_max, static_cast<std::size_t>(o.subsolution_nt),
                                             static_cast<std::size_t>(o.subsolution_nx));
    std::vector<CheckResult> checks;
    out = nlohmann::ordered_json::array();
    for (double g : o.gammas) {
        SubsolutionParams at{g, 0.0};
        at.a = at.a0();
        const SubsolutionReport sub = subsolution_check(at, samples);
        SubsolutionParams half{g, 0.5 * at.a0()};
        const SubsolutionReport pos = subsolution_check(half, samples);
        out.push_back({{"gamma", g},
                       {"a0", at.a},
                       {"samples", sub.samples},
                       {"worst_at_a0", sub.worst},
                       {"positive_at_half_a0", pos.positive},
                       {"witness_at_half_a0", {{"t", pos.witness.t}, {"xi", pos.witness.xi}}},
                       {"worst_at_half_a0", pos.worst}});
        checks.push_back(check("sub-solution gamma=" + fmt(g), sub.worst <= 1e-10 && pos.positive >= 1,
                               "max residual " + fmt(sub.worst, 3) + " at a0 over " + std::to_string(sub.samples) +
                                   " samples, " + std::to_string(pos.positive) + " positive at a0/2"));
    }
    return checks;
}

std::vector<CheckResult> analyze_dirichlet(const OraclesSection& o, nlohmann::ordered_json& out) {
    const double x_w = std::max(o.dirichlet_x_w, dirichlet_barrier(o.dirichlet_gamma) + 1.0);
    const DirichletReport rep = dirichlet_heat_check(o.dirichlet_gamma, o.dirichlet_delta, x_w);
    out = {{"gamma", o.dirichlet_gamma},
           {"delta", o.dirichlet_delta},
           {"x_w", x_w},
           {"x_bar0", rep.x_bar0},
           {"C", rep.C},
           {"max_numeric_error", rep.max_numeric_error},
           {"cosh_below_image", rep.cosh_below_image},
           {"numeric_dominates", rep.numeric_dominates}};
    return {check("dirichlet heat lower bound", rep.cosh_below_image && rep.numeric_dominates && std::isfinite(rep.C),
                  "C = " + fmt(rep.C) + ", numeric error " + fmt(rep.max_numeric_error, 3))};
}

// ---- spectral ----

std::vector<CheckResult> analyze_spectral(const SpectralSection& s, const std::string& dir, nlohmann::ordered_json& out) {
    std::vector<CheckResult> checks;
    out = nlohmann::ordered_json::object();

    const SelfSimilarOperator op0 = assemble_operator(0.0, s.Y, s.dy);
    const EigenResult e0 = principal_eigs(op0);
    double l2 = 0.0;
    for (std::size_t i = 0; i < op0.size(); ++i) l2 += std::pow(e0.psi_eps[i] - psi_exact(op0.y[i]), 2);
    l2 = std::sqrt(l2 * op0.dy);
    out["epsilon_zero"] = {{"lambda", e0.lambda_eps}, {"mu", e0.mu_eps}, {"psi_l2_error", l2}};
    checks.push_back(check("spectral eps=0 principal pair", std::abs(e0.lambda_eps) <= 1e-4 && l2 < 1e-3,
                           "lambda " + fmt(e0.lambda_eps, 3) + ", |psi_num - psi|_2 " + fmt(l2, 3)));
    checks.push_back(check("spectral eps=0 second eigenvalue", std::abs(e0.mu_eps - 1.0) <= 1e-3, "mu " + fmt(e0.mu_eps, 8)));
    if (!dir.empty()) write_eigen_csv(join_path(dir, "eigen_eps0.csv"), e0);

    std::vector<double> eps = s.epsilons;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    std::vector<EigenResult> eigs;
    nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
    bool positive = true, gap = true, monotone = true;
    for (double e : eps) {
        eigs.push_back(principal_eigs(assemble_operator(e, s.Y, s.dy)));
        const EigenResult& r = eigs.back();
        positive = positive && r.lambda_eps > 0.0;
        gap = gap && r.mu_eps > 0.5 && r.lambda_eps < r.mu_eps;
        if (eigs.size() > 1) monotone = monotone && r.lambda_eps < eigs[eigs.size() - 2].lambda_eps;
        double dist = 0.0;
        for (std::size_t i = 0; i < r.y.size(); ++i) dist += std::pow(r.psi_eps[i] - psi_exact(r.y[i]), 2);
        sweep.push_back({{"epsilon", e}, {"lambda", r.lambda_eps}, {"mu", r.mu_eps}, {"psi_l2_distance", std::sqrt(dist * s.dy)}});
        if (!dir.empty()) {
            std::ostringstream name;
            name << "eigen_eps" << e << ".csv";
            write_eigen_csv(join_path(dir, name.str()), r);
        }
    }
    out["epsilon_sweep"] = sweep;
    std::string lams;
    for (const auto& r : eigs) lams += (lams.empty() ? "" : ", ") + fmt(r.lambda_eps);
    checks.push_back(check("spectral lambda_eps positive and monotone", positive && monotone, "lambda = " + lams));
    checks.push_back(check("spectral mu_eps > 1/2", gap, std::to_string(eigs.size()) + " values of eps"));

    EvolutionOptions opt;
    opt.tau_end = s.tau_end;
    opt.dtau = s.dtau;
    opt.Y = s.Y;
    opt.dy = s.dy;
    opt.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 / s.dtau)));
    std::vector<double> zeta0(op0.size(), 0.0);
    for (std::size_t i = 0; i < op0.size(); ++i) {
        const double y = op0.y[i];
        if (y > 1.0 && y < 8.0) zeta0[i] = std::pow(std::sin(std::numbers::pi * (y - 1.0) / 7.0), 2);
    }

    const Evolution cons = evolve_selfsimilar(zeta0, DriftA1{0.0, s.gamma}, opt);
    double drift0 = 0.0;
    for (const auto& r : cons.records) drift0 = std::max(drift0, std::abs(r.projection - cons.records.front().projection));
    out["conservation"] = {{"projection0", cons.records.front().projection}, {"max_change", drift0}};
    checks.push_back(check("spectral projection conserved at eps=0", drift0 <= 1e-6, "max change " + fmt(drift0, 3)));
    if (!dir.empty()) write_evolution_csv(join_path(dir, "evolution_eps0.csv"), cons);

    const Evolution a2 = evolve_selfsimilar(zeta0, DriftA2{s.drift_epsilon}, opt);
    double worst = 0.0;
    const double p0 = a2.records.front().projection;
    for (const auto& r : a2.records)
        worst = std::max(worst, std::abs(r.projection / (p0 * std::exp(-a2.lambda * r.tau)) - 1.0));
    out["constant_drift"] = {{"epsilon", s.drift_epsilon}, {"lambda", a2.lambda}, {"max_relative_error", worst},
                             {"orthogonal_final_ratio", a2.records.back().orthogonal_norm / a2.records.front().orthogonal_norm}};
    checks.push_back(check("spectral projection decays at lambda_eps", worst <= 0.01,
                           "eps " + fmt(s.drift_epsilon) + ", max relative error " + fmt(worst, 3) + " over tau in [0, " + fmt(s.tau_end) + "]"));
    if (!dir.empty()) write_evolution_csv(join_path(dir, "evolution_constant_drift.csv"), a2);

    nlohmann::ordered_json kj = nlohmann::ordered_json::array();
    double k_lo = INFINITY, k_hi = 0.0;
    for (double e : s.k_epsilons) {
        const Evolution a1 = evolve_selfsimilar(zeta0, DriftA1{e, s.gamma}, opt);
        double dev = 0.0;
        for (const auto& r : a1.records) dev = std::max(dev, std::abs(r.projection - a1.records.front().projection));
        k_lo = std::min(k_lo, dev / e);
        k_hi = std::max(k_hi, dev / e);
        kj.push_back({{"epsilon", e}, {"max_projection_change", dev}, {"K", dev / e},
                      {"orthogonal_final_ratio", a1.records.back().orthogonal_norm / a1.records.front().orthogonal_norm}});
        if (!dir.empty()) {
            std::ostringstream name;
            name << "evolution_decaying_drift_eps" << e << ".csv";
            write_evolution_csv(join_path(dir, name.str()), a1);
        }
    }
    out["decaying_drift"] = {{"gamma", s.gamma}, {"runs", kj}, {"K", k_hi}};
    checks.push_back(check("spectral decaying drift linear in eps", k_hi <= 1.25 * k_lo,
                           "K in [" + fmt(k_lo) + ", " + fmt(k_hi) + "]"));
    if (!dir.empty()) write_json(join_path(dir, "spectral_summary.json"), out);
    return checks;
}

// ---- traveling wave ----

std::vector<CheckResult> analyze_wave(const WaveSection& w, const std::string& dir, nlohmann::ordered_json& out) {
    WaveOptions opt;
    opt.h = w.h;
    opt.xi_left = w.xi_left;
    opt.xi_right = w.xi_right;
    const TravelingWave wave = traveling_wave(w.A_V, w.M, w.r, opt);
    const double residual = wave.residual_sup();
    const double variation = wave.far_field_variation(10.0, 25.0);
    const double plateau_err = std::abs(wave.plateau / wave.plateau_exact() - 1.0);
    out = {{"A_V", w.A_V},        {"M", w.M},       {"r", w.r},
           {"kappa", wave.kappa}, {"s_0", wave.s_0}, {"plateau", wave.plateau},
           {"plateau_exact", wave.plateau_exact()}, {"residual", residual}, {"far_field_variation", variation},
           {"monotone", wave.monotone()}, {"shooting_b", wave.shooting_b}};
    if (!dir.empty()) {
        write_wave_csv(join_path(dir, "wave.csv"), wave);
        write_json(join_path(dir, "wave.json"), out);
    }
    return {check("wave residual", residual < 1e-6, "sup residual " + fmt(residual, 3)),
            check("wave far field", variation < 0.1, "V/(xi e^-xi) varies by " + fmt(100.0 * variation, 3) + "% on [10, 25], kappa " + fmt(wave.kappa)),
            check("wave shape", wave.monotone() && plateau_err < 1e-4, "monotone, plateau relative error " + fmt(plateau_err, 3))};
}

// ---- experiments ----

namespace {

RunResult run_model(const ExperimentConfig& c, std::vector<double> extra_times = {}) {
    SolverConfig s = solver_config(c);
    s.snapshot_times = std::move(extra_times);
    return run(s, initial_profile(c));
}

void delay_experiment(const ExperimentConfig& c, ExperimentResult& res) {
    const RunResult run = run_model(c);
    const DelayAnalysis a = analyze_delay(c, run, c.output_dir);
    append(res.checks, a.checks);
    res.summary["model"] = c.model.kind;
    if (c.model.r) res.summary["r"] = *c.model.r;
    res.summary["regime"] = a.regime;
    res.summary["predicted"] = {{"beta", a.prediction.beta}, {"gamma", a.prediction.gamma}};
    res.summary["power_fit"] = fit_json(a.power);
    res.summary["log_fit"] = fit_json(a.log);
    res.summary["log_ratio_band"] = {{"min", a.band.min}, {"max", a.band.max}, {"mean", a.band.mean}};
    res.summary["solver"] = to_json(run.report);
    write_json(join_path(c.output_dir, "report.json"), to_json(run.report));
    if (c.numerics.snapshot_interval > 0.0) write_snapshots_csv(join_path(c.output_dir, "snapshots.csv"), run.snapshots);
}

void harnack_experiment(const ExperimentConfig& c, ExperimentResult& res) {
    const HarnackSection& h = c.harnack;
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();

    // heat equation from a narrow bump, sampled at T = lag_max
    SolverConfig heat;
    heat.model = LinearModel{0.0};
    heat.dt = 2e-3;
    heat.t_end = h.lag_max;
    heat.shifting = false;
    heat.front_levels = {};
    heat.snapshot_times = harnack_snapshot_times(h, h.lag_max, heat.dt);
    InitialProfile bump;
    bump.kind = InitialProfile::Kind::bump;
    bump.width = 0.1;
    bump.x_left = -40.0;
    bump.x_right = 40.0;
    bump.dx = 0.01;
    const RunResult heat_run = run(heat, bump);
    append(res.checks, analyze_harnack(c, "heat", heat_run, heat_run.snapshots.back().t, -10.0, 10.0, reports));

    ExperimentConfig nc = c;
    nc.numerics.t_end = h.T;
    SolverConfig s = solver_config(nc);
    s.snapshot_times = harnack_snapshot_times(h, h.T, s.dt);
    const RunResult nl = run(s, initial_profile(nc));
    const Field& last = nl.snapshots.back();
    const auto X = locate_front(last, c.numerics.lambda);
    if (!X) throw std::runtime_error("harnack: no front at T");
    append(res.checks, analyze_harnack(nc, "nonlocal", nl, last.t, *X - h.x_behind, *X + h.x_ahead, reports));
    res.summary["reports"] = reports;
    write_json(join_path(c.output_dir, "harnack.json"), reports);
}

void oracles_experiment(const ExperimentConfig& c, ExperimentResult& res) {
    nlohmann::ordered_json sub, dir, super, conv;
    append(res.checks, analyze_subsolution(c.oracles, sub));
    append(res.checks, analyze_dirichlet(c.oracles, dir));

    std::vector<double> times = c.oracles.conv_times;
    for (double t = c.oracles.T; t <= c.numerics.t_end + 1e-9; t += c.oracles.snapshot_interval) times.push_back(t);
    const RunResult run = run_model(c, times);
    append(res.checks, analyze_supersolution(c, run, c.output_dir, super));
    append(res.checks, analyze_conv_bound(c, run, c.output_dir, conv));
    res.summary["subsolution"] = sub;
    res.summary["dirichlet"] = dir;
    res.summary["supersolution"] = super;
    res.summary["conv_bound"] = conv;
    res.summary["solver"] = to_json(run.report);
    write_json(join_path(c.output_dir, "oracles.json"), res.summary);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c) {
    validate(c);
    ensure_output_dir(c.output_dir);
    ExperimentResult res;
    res.experiment = c.experiment;
    res.output_dir = c.output_dir;
    res.summary = nlohmann::ordered_json::object();
    try {
        if (c.experiment == "delay_sweep" || c.experiment == "local_gompertz") {
            delay_experiment(c, res);
        } else if (c.experiment == "harnack") {
            harnack_experiment(c, res);
        } else if (c.experiment == "oracles") {
            oracles_experiment(c, res);
        } else if (c.experiment == "spectral") {
            nlohmann::ordered_json j;
            append(res.checks, analyze_spectral(c.spectral, c.output_dir, j));
            res.summary["spectral"] = j;
        } else {
            nlohmann::ordered_json j;
            append(res.checks, analyze_wave(c.wave, c.output_dir, j));
            res.summary["wave"] = j;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(c.experiment + " in " + c.output_dir + ": " + e.what());
    }
    nlohmann::ordered_json summary;
    summary["experiment"] = c.experiment;
    summary["pass"] = res.ok();
    summary["checks"] = checks_json(res.checks);
    for (auto& [k, v] : res.summary.items()) summary[k] = v;
    res.summary = summary;
    write_json(join_path(c.output_dir, "summary.json"), res.summary);
    write_text(join_path(c.output_dir, "config.toml"), to_toml(c));
    return res;
}

void print_checks(std::ostream& os, const ExperimentResult& result) {
    for (const CheckResult& c : result.checks) os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

// ---- sweeps ----

bool SweepSummary::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return e.ok; });
}

nlohmann::ordered_json SweepSummary::to_json() const {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const SweepEntry& e : entries) {
        nlohmann::ordered_json j;
        j["output_dir"] = e.output_dir;
        j["experiment"] = e.experiment;
        j["pass"] = e.ok;
        if (!e.error.empty()) j["error"] = e.error;
        if (e.r) j["r"] = *e.r;
        if (e.fitted_exponent) j["fitted_exponent"] = *e.fitted_exponent;
        if (e.predicted_exponent) j["predicted_exponent"] = *e.predicted_exponent;
        j["checks"] = checks_json(e.checks);
        a.push_back(j);
    }
    return {{"runs", a}, {"pass", ok()}};
}

std::vector<ExperimentConfig> load_config_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".toml") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<ExperimentConfig> configs;
    for (const fs::path& p : files) {
        try {
            configs.push_back(load_config(p.string()));
        } catch (const ConfigError& e) {
            throw ConfigError(e.field(), std::string(e.what()) + " (in " + p.string() + ")");
        }
    }
    return configs;
}

void check_distinct_outputs(const std::vector<ExperimentConfig>& configs) {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const std::string key = fs::weakly_canonical(fs::absolute(configs[i].output_dir)).lexically_normal().string();
        const auto [it, fresh] = seen.emplace(key, i);
        if (!fresh)
            throw ConfigError("output_dir", "configs " + std::to_string(it->second) + " and " + std::to_string(i) +
                                                " both write to " + configs[i].output_dir);
    }
}

SweepSummary sweep(const std::vector<ExperimentConfig>& configs, unsigned jobs) {
    check_distinct_outputs(configs);
    for (const ExperimentConfig& c : configs) validate(c);
    std::vector<SweepEntry> entries(configs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        DenormalGuard guard;
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            const ExperimentConfig& c = configs[i];
            SweepEntry& e = entries[i];
            e.output_dir = c.output_dir;
            e.experiment = c.experiment;
            e.r = c.model.r;
            try {
                const ExperimentResult res = run_experiment(c);
                e.ok = res.ok();
                e.checks = res.checks;
                if (res.summary.contains("power_fit")) e.fitted_exponent = res.summary["power_fit"]["exponent"].get<double>();
                if (res.summary.contains("predicted") && c.model.r)
                    e.predicted_exponent = res.summary["predicted"]["beta"].get<double>();
            } catch (const std::exception& ex) {
                e.ok = false;
                e.error = ex.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    std::sort(entries.begin(), entries.end(), [](const SweepEntry& a, const SweepEntry& b) { return a.output_dir < b.output_dir; });
    return {std::move(entries)};
}

void print_sweep(std::ostream& os, const SweepSummary& s) {
    bool header = false;
    for (const SweepEntry& e : s.entries) {
        if (!e.error.empty()) {
            os << "FAIL " << e.output_dir << ": " << e.error << '\n';
            continue;
        }
        for (const CheckResult& c : e.checks) os << (c.pass ? "PASS " : "FAIL ") << e.output_dir << " " << c.name << ": " << c.detail << '\n';
    }
    for (const SweepEntry& e : s.entries) {
        if (!e.fitted_exponent || !e.predicted_exponent) continue;
        if (!header) {
            os << std::left << std::setw(32) << "run" << std::setw(8) << "r" << std::setw(12) << "fitted" << "predicted\n";
            header = true;
        }
        os << std::left << std::setw(32) << e.output_dir << std::setw(8) << fmt(*e.r) << std::setw(12) << fmt(*e.fitted_exponent)
           << fmt(*e.predicted_exponent) << '\n';
    }
    os << (s.ok() ? "PASS" : "FAIL") << " sweep: " << s.entries.size() << " runs\n";
}

}  // namespace fkpp
