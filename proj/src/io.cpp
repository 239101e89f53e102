#include "fkpp/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace fkpp {

namespace fs = std::filesystem;

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("output directory " + dir + " cannot be created: " + ec.message());
    const fs::path probe = fs::path(dir) / ".fkpp_write_probe";
    {
        std::ofstream os(probe);
        if (!os || !(os << "ok")) throw std::runtime_error("output directory " + dir + " is not writable");
    }
    fs::remove(probe, ec);
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path);
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << std::setw(2) << j << '\n';
}

void write_snapshots_csv(const std::string& path, const std::vector<Field>& snapshots) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,x_lab,u\n" << std::setprecision(17);
    for (const Field& f : snapshots)
        for (std::size_t i = 0; i < f.values.size(); ++i) os << f.t << ',' << f.grid.x(i) << ',' << f.values[i] << '\n';
}

nlohmann::ordered_json to_json(const SolverReport& report) {
    nlohmann::ordered_json j;
    j["M_report"] = report.M_report;
    j["min_value"] = report.min_value;
    j["c_sup"] = report.c_sup;
    j["step_count"] = report.step_count;
    j["final_plateau"] = report.final_plateau;
    j["shift_count"] = report.shift_log.size();
    double total = 0.0;
    for (const ShiftEvent& e : report.shift_log) total += e.amount;
    j["total_shift"] = total;
    j["stability_flags"] = report.stability_flags;
    return j;
}

}  // namespace fkpp
