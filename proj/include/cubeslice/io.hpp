#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cubeslice/densities.hpp"
#include "cubeslice/grassmann.hpp"

namespace cubeslice {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g
std::string format_double(double v);

/// {"n": n, "k": k, "basis": [[row 0], ..., [row n-1]]}
json to_json(const Subspace& s);
Subspace subspace_from_json(const json& j);

/// {"pieces": [[lo, hi, value], ...]}
json to_json(const StepDensity& f);
/// Validates on load; violations raise InvariantError naming the invariant.
StepDensity density_from_json(const json& j);

/// {"factors": [<density>, ...]}; a bare density or a list of densities is
/// also accepted.
json to_json(const ProductDensity& f);
ProductDensity product_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Report text: two-space indented JSON with a trailing newline.
std::string dump_report(const json& report);
/// Copy of `report` with every "runtime_ms" key removed (at any depth).
json strip_timing(const json& report);

/// CSV with a header row, 17 significant digits and LF line endings.
void emit_curve(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                const std::filesystem::path& path);
void emit_curve(const std::vector<std::pair<double, double>>& points,
                const std::filesystem::path& path);
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

}  // namespace cubeslice
