#pragma once

// Matrix CSV files: one row per line, comma-separated decimals, no header.
// Values are written in shortest round-trip form, so write/read is exact.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sparsecov/matcore.hpp"

namespace sparsecov::io {

/// Rectangular, finite. Throws std::invalid_argument on malformed input.
Matrix read_matrix_csv(const std::filesystem::path& path);

/// As read_matrix_csv plus the SymmetricMatrix symmetry check.
SymmetricMatrix read_symmetric_csv(const std::filesystem::path& path);

std::string format_matrix_csv(const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace sparsecov::io
