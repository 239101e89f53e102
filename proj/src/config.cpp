#include "fkpp/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fkpp {

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"delay_sweep", "harnack", "oracles", "spectral", "wave", "local_gompertz"};
    return names;
}

namespace {

const std::vector<std::string> kModelKinds{"nonlocal", "local_classic", "local_fr", "local_gompertz"};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void reject_seeds(const toml::node& node, const std::string& path) {
    if (const auto* t = node.as_table()) {
        for (const auto& [k, v] : *t) {
            const std::string key(k.str());
            const std::string name = lower(key);
            if (name == "seed" || name.ends_with("_seed") || name.starts_with("seed_"))
                throw ConfigError(join(path, key), "random seeds are not accepted, every experiment is deterministic");
            reject_seeds(v, join(path, key));
        }
    } else if (const auto* a = node.as_array()) {
        for (std::size_t i = 0; i < a->size(); ++i) reject_seeds(*a->get(i), path + "[" + std::to_string(i) + "]");
    }
}

// reads the keys of one table and rejects anything left over
class Reader {
public:
    Reader(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

    bool has(const char* key) const { return table_ && table_->contains(key); }
    void mark(const char* key) { take(key); }

    void get(const char* key, double& out) {
        if (const toml::node* n = take(key)) out = number(*n, key);
    }
    void get(const char* key, std::optional<double>& out) {
        if (const toml::node* n = take(key)) out = number(*n, key);
    }
    void get(const char* key, int& out) {
        if (const toml::node* n = take(key)) {
            const auto v = n->value_exact<int64_t>();
            if (!v) throw ConfigError(join(path_, key), "expected an integer");
            if (*v < 0 || *v > 1'000'000'000) throw ConfigError(join(path_, key), "integer out of range");
            out = static_cast<int>(*v);
        }
    }
    void get(const char* key, std::string& out) {
        if (const toml::node* n = take(key)) {
            const auto v = n->value_exact<std::string>();
            if (!v) throw ConfigError(join(path_, key), "expected a string");
            out = *v;
        }
    }
    void get(const char* key, std::optional<std::string>& out) {
        std::string s;
        if (has(key)) {
            get(key, s);
            out = s;
        }
    }
    void get(const char* key, std::vector<double>& out) {
        if (const toml::node* n = take(key)) {
            const auto* a = n->as_array();
            if (!a) throw ConfigError(join(path_, key), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < a->size(); ++i) out.push_back(number(*a->get(i), key));
        }
    }

    void finish() const {
        if (!table_) return;
        for (const auto& [k, v] : *table_) {
            const std::string key(k.str());
            if (!used_.count(key)) throw ConfigError(join(path_, key), "unknown field");
        }
    }

private:
    const toml::node* take(const char* key) {
        if (!table_) return nullptr;
        const toml::node* n = table_->get(key);
        if (n) used_.insert(key);
        return n;
    }

    double number(const toml::node& n, const char* key) const {
        if (const auto i = n.value_exact<int64_t>()) return static_cast<double>(*i);
        if (const auto d = n.value_exact<double>()) return *d;
        throw ConfigError(join(path_, key), "expected a number");
    }

    const toml::table* table_;
    std::string path_;
    std::set<std::string> used_;
};

const toml::table* subtable(const toml::table& root, const char* key) {
    const toml::node* n = root.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(key, "expected a table");
    return n->as_table();
}

void positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be a positive finite number");
}

void band(const std::vector<double>& b, const std::string& field) {
    if (b.size() != 2 || !(b[0] < b[1])) throw ConfigError(field, "must be an increasing pair [lo, hi]");
}

template <class T>
toml::array to_array(const std::vector<T>& v) {
    toml::array a;
    for (const T& x : v) a.push_back(x);
    return a;
}

}  // namespace

void validate(const ExperimentConfig& c) {
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version) + ", expected " +
                                                std::to_string(kSchemaVersion));
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end())
        throw ConfigError("experiment", "unknown experiment '" + c.experiment + "'");
    if (c.output_dir.empty()) throw ConfigError("output_dir", "required");

    const ModelSection& m = c.model;
    if (std::find(kModelKinds.begin(), kModelKinds.end(), m.kind) == kModelKinds.end())
        throw ConfigError("model.kind", "unknown model '" + m.kind + "'");
    const bool runs_model = c.experiment != "spectral" && c.experiment != "wave";
    if (c.experiment == "harnack" || c.experiment == "oracles") {
        if (m.kind != "nonlocal") throw ConfigError("model.kind", c.experiment + " needs the nonlocal model");
    }
    if (c.experiment == "local_gompertz" && m.kind != "local_gompertz")
        throw ConfigError("model.kind", "local_gompertz needs the local_gompertz model");
    if (runs_model && m.kind != "local_classic" && !m.r) throw ConfigError("model.r", "required for " + c.experiment);
    if (m.r && !(*m.r > 1.0 && std::isfinite(*m.r))) throw ConfigError("model.r", "must exceed 1");
    positive(m.kernel_cutoff, "model.kernel_cutoff");
    positive(m.theta_g, "model.theta_g");
    if (!(m.A_g >= 1.0)) throw ConfigError("model.A_g", "must be at least 1");
    positive(m.A_f, "model.A_f");
    if (m.left_bc && *m.left_bc != "dirichlet" && *m.left_bc != "neumann")
        throw ConfigError("model.left_bc", "must be 'dirichlet' or 'neumann'");

    const NumericsSection& n = c.numerics;
    positive(n.dx, "numerics.dx");
    positive(n.dt, "numerics.dt");
    positive(n.t_end, "numerics.t_end");
    positive(n.window_margin, "numerics.window_margin");
    positive(n.behind, "numerics.behind");
    positive(n.lambda, "numerics.lambda");
    positive(n.trace_interval, "numerics.trace_interval");
    if (!(n.snapshot_interval >= 0.0)) throw ConfigError("numerics.snapshot_interval", "must be nonnegative");
    if (n.shift_tolerance) positive(*n.shift_tolerance, "numerics.shift_tolerance");
    if (n.trace_interval < n.dt) throw ConfigError("numerics.trace_interval", "must be at least dt");
    const double lo = n.fit_t_min.value_or(n.t_end / 4.0), hi = n.fit_t_max.value_or(n.t_end);
    if (n.fit_t_min) positive(*n.fit_t_min, "numerics.fit_t_min");
    if (!(lo < hi)) throw ConfigError("numerics.fit_t_min", "fit window must satisfy t_min < t_max");
    if (hi > n.t_end * (1.0 + 1e-12)) throw ConfigError("numerics.fit_t_max", "fit window must end by t_end");

    positive(c.checks.exponent_tolerance, "checks.exponent_tolerance");
    positive(c.checks.log_exponent_max, "checks.log_exponent_max");
    band(c.checks.log_coefficient, "checks.log_coefficient");
    band(c.checks.log_ratio_band, "checks.log_ratio_band");

    const HarnackSection& h = c.harnack;
    if (h.p.empty()) throw ConfigError("harnack.p", "needs at least one exponent");
    for (double p : h.p)
        if (!(p > 1.0)) throw ConfigError("harnack.p", "every p must exceed 1");
    positive(h.lag_min, "harnack.lag_min");
    if (!(h.lag_max >= h.lag_min)) throw ConfigError("harnack.lag_max", "must be at least lag_min");
    if (!(h.T > h.lag_max)) throw ConfigError("harnack.T", "must exceed lag_max");
    positive(h.y_max, "harnack.y_max");
    positive(h.x_behind, "harnack.x_behind");
    positive(h.x_ahead, "harnack.x_ahead");
    if (h.nx < 1 || h.ny < 1 || h.nt < 1) throw ConfigError("harnack.nx", "sample counts must be positive");

    const OraclesSection& o = c.oracles;
    positive(o.T, "oracles.T");
    if (o.conv_times.empty()) throw ConfigError("oracles.conv_times", "needs at least one time");
    for (double t : o.conv_times)
        if (!(t >= 1.0)) throw ConfigError("oracles.conv_times", "times must be at least 1");
    positive(o.snapshot_interval, "oracles.snapshot_interval");
    for (double g : o.gammas)
        if (!(g > 0.5 && g < 1.0)) throw ConfigError("oracles.gammas", "every gamma must lie in (1/2, 1)");
    positive(o.subsolution_t_max, "oracles.subsolution_t_max");
    positive(o.subsolution_xi_max, "oracles.subsolution_xi_max");
    if (o.subsolution_nt < 2 || o.subsolution_nx < 1) throw ConfigError("oracles.subsolution_nt", "sample counts too small");
    if (!(o.dirichlet_gamma > 0.5 && o.dirichlet_gamma < 1.0)) throw ConfigError("oracles.dirichlet_gamma", "must lie in (1/2, 1)");
    positive(o.dirichlet_delta, "oracles.dirichlet_delta");
    positive(o.dirichlet_x_w, "oracles.dirichlet_x_w");
    if (c.experiment == "oracles") {
        const double last = std::max(o.T, *std::max_element(o.conv_times.begin(), o.conv_times.end()));
        if (last > n.t_end) throw ConfigError("numerics.t_end", "must reach oracles.T and every oracles.conv_times entry");
    }

    const SpectralSection& s = c.spectral;
    if (s.epsilons.empty()) throw ConfigError("spectral.epsilons", "needs at least one value");
    for (double e : s.epsilons)
        if (!(e > 0.0)) throw ConfigError("spectral.epsilons", "values must be positive");
    if (!(s.Y >= 30.0)) throw ConfigError("spectral.Y", "must be at least 30");
    positive(s.dy, "spectral.dy");
    positive(s.tau_end, "spectral.tau_end");
    positive(s.dtau, "spectral.dtau");
    positive(s.drift_epsilon, "spectral.drift_epsilon");
    if (!(s.gamma > 0.0 && s.gamma < 0.5)) throw ConfigError("spectral.gamma", "must lie in (0, 1/2)");
    if (s.k_epsilons.size() < 2) throw ConfigError("spectral.k_epsilons", "needs at least two values");
    for (double e : s.k_epsilons)
        if (!(e > 0.0)) throw ConfigError("spectral.k_epsilons", "values must be positive");

    const WaveSection& w = c.wave;
    if (!(w.A_V >= 1.0)) throw ConfigError("wave.A_V", "must be at least 1");
    positive(w.M, "wave.M");
    if (!(w.r > 1.0)) throw ConfigError("wave.r", "must exceed 1");
    positive(w.h, "wave.h");
    if (!(w.xi_left < w.xi_right)) throw ConfigError("wave.xi_left", "must be below xi_right");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << e.description() << " at line " << e.source().begin.line;
        throw ConfigError("<document>", msg.str());
    }
    reject_seeds(root, "");

    ExperimentConfig c;
    Reader top(&root, "");
    if (!top.has("schema_version")) throw ConfigError("schema_version", "required");
    top.get("schema_version", c.schema_version);
    if (!top.has("experiment")) throw ConfigError("experiment", "required");
    top.get("experiment", c.experiment);
    if (!top.has("output_dir")) throw ConfigError("output_dir", "required");
    top.get("output_dir", c.output_dir);

    if (c.experiment == "harnack" || c.experiment == "oracles") c.model.kind = "nonlocal";
    if (c.experiment == "local_gompertz") c.model.kind = "local_gompertz";

    for (const char* key : {"model", "numerics", "checks", "harnack", "oracles", "spectral", "wave"}) {
        const toml::table* t = subtable(root, key);
        Reader rd(t, key);
        const std::string k = key;
        if (k == "model") {
            rd.get("kind", c.model.kind);
            rd.get("r", c.model.r);
            rd.get("kernel_cutoff", c.model.kernel_cutoff);
            rd.get("theta_g", c.model.theta_g);
            rd.get("A_g", c.model.A_g);
            rd.get("A_f", c.model.A_f);
            rd.get("left_bc", c.model.left_bc);
        } else if (k == "numerics") {
            auto& n = c.numerics;
            rd.get("dx", n.dx);
            rd.get("dt", n.dt);
            rd.get("t_end", n.t_end);
            rd.get("window_margin", n.window_margin);
            rd.get("behind", n.behind);
            rd.get("lambda", n.lambda);
            rd.get("fit_t_min", n.fit_t_min);
            rd.get("fit_t_max", n.fit_t_max);
            rd.get("trace_interval", n.trace_interval);
            rd.get("snapshot_interval", n.snapshot_interval);
            rd.get("shift_tolerance", n.shift_tolerance);
        } else if (k == "checks") {
            auto& ch = c.checks;
            rd.get("exponent_tolerance", ch.exponent_tolerance);
            rd.get("log_exponent_max", ch.log_exponent_max);
            rd.get("log_coefficient", ch.log_coefficient);
            rd.get("log_ratio_band", ch.log_ratio_band);
        } else if (k == "harnack") {
            auto& h = c.harnack;
            rd.get("p", h.p);
            rd.get("T", h.T);
            rd.get("lag_min", h.lag_min);
            rd.get("lag_max", h.lag_max);
            rd.get("y_max", h.y_max);
            rd.get("x_behind", h.x_behind);
            rd.get("x_ahead", h.x_ahead);
            rd.get("nx", h.nx);
            rd.get("ny", h.ny);
            rd.get("nt", h.nt);
        } else if (k == "oracles") {
            auto& o = c.oracles;
            rd.get("T", o.T);
            rd.get("conv_times", o.conv_times);
            rd.get("snapshot_interval", o.snapshot_interval);
            rd.get("gammas", o.gammas);
            rd.get("subsolution_t_max", o.subsolution_t_max);
            rd.get("subsolution_xi_max", o.subsolution_xi_max);
            rd.get("subsolution_nt", o.subsolution_nt);
            rd.get("subsolution_nx", o.subsolution_nx);
            rd.get("dirichlet_gamma", o.dirichlet_gamma);
            rd.get("dirichlet_delta", o.dirichlet_delta);
            rd.get("dirichlet_x_w", o.dirichlet_x_w);
        } else if (k == "spectral") {
            auto& s = c.spectral;
            rd.get("epsilons", s.epsilons);
            rd.get("Y", s.Y);
            rd.get("dy", s.dy);
            rd.get("tau_end", s.tau_end);
            rd.get("dtau", s.dtau);
            rd.get("drift_epsilon", s.drift_epsilon);
            rd.get("gamma", s.gamma);
            rd.get("k_epsilons", s.k_epsilons);
        } else {
            auto& w = c.wave;
            rd.get("A_V", w.A_V);
            rd.get("M", w.M);
            rd.get("r", w.r);
            rd.get("h", w.h);
            rd.get("xi_left", w.xi_left);
            rd.get("xi_right", w.xi_right);
        }
        rd.finish();
        top.mark(key);
    }
    top.finish();
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("<file>", "cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path);
}

std::string to_toml(const ExperimentConfig& c) {
    toml::table root;
    root.insert("schema_version", c.schema_version);
    root.insert("experiment", c.experiment);
    root.insert("output_dir", c.output_dir);

    toml::table model;
    model.insert("kind", c.model.kind);
    if (c.model.r) model.insert("r", *c.model.r);
    model.insert("kernel_cutoff", c.model.kernel_cutoff);
    model.insert("theta_g", c.model.theta_g);
    model.insert("A_g", c.model.A_g);
    model.insert("A_f", c.model.A_f);
    if (c.model.left_bc) model.insert("left_bc", *c.model.left_bc);
    root.insert("model", model);

    const auto& n = c.numerics;
    toml::table num{{"dx", n.dx},         {"dt", n.dt},
                    {"t_end", n.t_end},   {"window_margin", n.window_margin},
                    {"behind", n.behind}, {"lambda", n.lambda},
                    {"trace_interval", n.trace_interval}, {"snapshot_interval", n.snapshot_interval}};
    if (n.fit_t_min) num.insert("fit_t_min", *n.fit_t_min);
    if (n.fit_t_max) num.insert("fit_t_max", *n.fit_t_max);
    if (n.shift_tolerance) num.insert("shift_tolerance", *n.shift_tolerance);
    root.insert("numerics", num);

    const auto& ch = c.checks;
    root.insert("checks", toml::table{{"exponent_tolerance", ch.exponent_tolerance},
                                      {"log_exponent_max", ch.log_exponent_max},
                                      {"log_coefficient", to_array(ch.log_coefficient)},
                                      {"log_ratio_band", to_array(ch.log_ratio_band)}});
    const auto& h = c.harnack;
    root.insert("harnack", toml::table{{"p", to_array(h.p)},
                                       {"T", h.T},
                                       {"lag_min", h.lag_min},
                                       {"lag_max", h.lag_max},
                                       {"y_max", h.y_max},
                                       {"x_behind", h.x_behind},
                                       {"x_ahead", h.x_ahead},
                                       {"nx", h.nx},
                                       {"ny", h.ny},
                                       {"nt", h.nt}});
    const auto& o = c.oracles;
    root.insert("oracles", toml::table{{"T", o.T},
                                       {"conv_times", to_array(o.conv_times)},
                                       {"snapshot_interval", o.snapshot_interval},
                                       {"gammas", to_array(o.gammas)},
                                       {"subsolution_t_max", o.subsolution_t_max},
                                       {"subsolution_xi_max", o.subsolution_xi_max},
                                       {"subsolution_nt", o.subsolution_nt},
                                       {"subsolution_nx", o.subsolution_nx},
                                       {"dirichlet_gamma", o.dirichlet_gamma},
                                       {"dirichlet_delta", o.dirichlet_delta},
                                       {"dirichlet_x_w", o.dirichlet_x_w}});
    const auto& s = c.spectral;
    root.insert("spectral", toml::table{{"epsilons", to_array(s.epsilons)},
                                        {"Y", s.Y},
                                        {"dy", s.dy},
                                        {"tau_end", s.tau_end},
                                        {"dtau", s.dtau},
                                        {"drift_epsilon", s.drift_epsilon},
                                        {"gamma", s.gamma},
                                        {"k_epsilons", to_array(s.k_epsilons)}});
    const auto& w = c.wave;
    root.insert("wave", toml::table{{"A_V", w.A_V}, {"M", w.M}, {"r", w.r}, {"h", w.h}, {"xi_left", w.xi_left}, {"xi_right", w.xi_right}});

    std::ostringstream os;
    os << root << '\n';
    return os.str();
}

}  // namespace fkpp
