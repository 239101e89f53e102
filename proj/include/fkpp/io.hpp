#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "fkpp/field.hpp"
#include "fkpp/solver.hpp"

namespace fkpp {

// creates the directory if needed and verifies it accepts files
void ensure_output_dir(const std::string& dir);

std::string join_path(const std::string& dir, const std::string& name);

void write_text(const std::string& path, const std::string& text);
// two-space indented, key order preserved
void write_json(const std::string& path, const nlohmann::ordered_json& j);

// columns t, x_lab, u
void write_snapshots_csv(const std::string& path, const std::vector<Field>& snapshots);

nlohmann::ordered_json to_json(const SolverReport& report);

}  // namespace fkpp
