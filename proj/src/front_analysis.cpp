#include "fkpp/front_analysis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "fkpp/field.hpp"

namespace fkpp {

namespace {

std::optional<double> crossing(std::size_t n, double lambda, auto&& x, auto&& u) {
    for (std::size_t k = n; k-- > 0;) {
        if (u(k) >= lambda) {
            if (k + 1 == n) return x(k);
            const double a = u(k), b = u(k + 1);
            const double xa = x(k), xb = x(k + 1);
            return xa + (a - lambda) / (a - b) * (xb - xa);
        }
    }
    return std::nullopt;
}

struct LineFit {
    double slope, intercept;
};

LineFit least_squares(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (!(saa > 0.0)) throw std::invalid_argument("fit: degenerate window (no spread in t)");
    const double slope = sab / saa;
    return {slope, mb - slope * ma};
}

std::vector<DelaySample> window(const std::vector<DelaySample>& series, double t_min, double t_max) {
    if (!(t_min >= 10.0)) throw std::invalid_argument("fit: window must start at t >= 10");
    if (!(t_max > t_min)) throw std::invalid_argument("fit: empty window");
    std::vector<DelaySample> out;
    for (const auto& s : series)
        if (s.t >= t_min && s.t <= t_max) out.push_back(s);
    if (out.size() < 20) throw std::invalid_argument("fit: degenerate window (fewer than 20 samples)");
    return out;
}

double rms(const std::vector<DelaySample>& w, const DelayFit& fit) {
    double s = 0.0;
    for (const auto& p : w) {
        const double e = p.d - fit.evaluate(p.t);
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(w.size()));
}

}  // namespace

double DelayFit::evaluate(double t) const {
    if (model == Model::log) return coefficient * std::log(t) + offset;
    return coefficient * std::pow(t, exponent);
}

std::optional<double> locate_front(const Field& field, double lambda) {
    return crossing(field.values.size(), lambda, [&](std::size_t i) { return field.grid.x(i); },
                    [&](std::size_t i) { return field.values[i]; });
}

std::optional<double> locate_front(const std::vector<double>& x, const std::vector<double>& u, double lambda) {
    if (x.size() != u.size()) throw std::invalid_argument("locate_front: size mismatch");
    return crossing(u.size(), lambda, [&](std::size_t i) { return x[i]; }, [&](std::size_t i) { return u[i]; });
}

std::vector<DelaySample> delay_series(const FrontTrace& trace) {
    std::vector<DelaySample> out;
    out.reserve(trace.samples.size());
    for (const auto& s : trace.samples) out.push_back({s.t, 2.0 * s.t - s.X});
    return out;
}

DelayFit fit_log_delay(const std::vector<DelaySample>& series, double t_min, double t_max) {
    const auto w = window(series, t_min, t_max);
    std::vector<double> a, b;
    for (const auto& p : w) {
        a.push_back(std::log(p.t));
        b.push_back(p.d);
    }
    const LineFit lf = least_squares(a, b);
    DelayFit fit;
    fit.model = DelayFit::Model::log;
    fit.coefficient = lf.slope;
    fit.offset = lf.intercept;
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.samples = w.size();
    fit.rms_residual = rms(w, fit);
    return fit;
}

DelayFit fit_power_delay(const std::vector<DelaySample>& series, double t_min, double t_max) {
    const auto w = window(series, t_min, t_max);
    std::vector<double> a, b;
    for (const auto& p : w) {
        if (!(p.d > 0.0)) throw std::invalid_argument("fit_power_delay: nonpositive delay at t = " + std::to_string(p.t));
        a.push_back(std::log(p.t));
        b.push_back(std::log(p.d));
    }
    const LineFit lf = least_squares(a, b);
    DelayFit fit;
    fit.model = DelayFit::Model::power;
    fit.exponent = lf.slope;
    fit.coefficient = std::exp(lf.intercept);
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.samples = w.size();
    fit.rms_residual = rms(w, fit);
    return fit;
}

ExponentPrediction predicted_exponent(double r) {
    if (!(r > 1.0)) throw std::invalid_argument("predicted_exponent: r must exceed 1");
    return {(3.0 - r) / (1.0 + r), 2.0 / (1.0 + r)};
}

RatioBand log_ratio_band(const std::vector<DelaySample>& series, double t_min, double t_max) {
    RatioBand band{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    std::size_t count = 0;
    for (const auto& p : series) {
        if (p.t < t_min || p.t > t_max) continue;
        const double q = p.d / std::log(p.t);
        band.min = std::min(band.min, q);
        band.max = std::max(band.max, q);
        band.mean += q;
        ++count;
    }
    if (count == 0 || t_min <= 1.0) throw std::invalid_argument("log_ratio_band: empty window");
    band.mean /= static_cast<double>(count);
    return band;
}

std::string fit_model_name(DelayFit::Model m) { return m == DelayFit::Model::log ? "log" : "power"; }

void write_trace_csv(const std::string& path, const FrontTrace& trace) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,X,d\n" << std::setprecision(17);
    for (const auto& s : trace.samples) os << s.t << ',' << s.X << ',' << 2.0 * s.t - s.X << '\n';
}

void write_fit_json(const std::string& path, const DelayFit& fit) {
    nlohmann::ordered_json j;
    j["model"] = fit_model_name(fit.model);
    if (fit.model == DelayFit::Model::log) {
        j["coefficient"] = fit.coefficient;
        j["offset"] = fit.offset;
    } else {
        j["exponent"] = fit.exponent;
        j["coefficient"] = fit.coefficient;
    }
    j["rms_residual"] = fit.rms_residual;
    j["window"] = {fit.t_min, fit.t_max};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << std::setw(2) << j << '\n';
}

void write_plot_csv(const std::string& path, const std::vector<DelaySample>& series, const DelayFit& fit) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,d,fitted_d\n" << std::setprecision(17);
    for (const auto& p : series) os << p.t << ',' << p.d << ',' << (p.t > 0.0 ? fit.evaluate(p.t) : 0.0) << '\n';
}

}  // namespace fkpp
