#include "cubeslice/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace cubeslice {
namespace {

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvariantError("numeric", where + " is not a number");
  return j.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const Subspace& s) {
  json rows = json::array();
  for (int i = 0; i < s.ambient_dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < s.dim(); ++j) row.push_back(s.basis()(i, j));
    rows.push_back(std::move(row));
  }
  return {{"n", s.ambient_dim()}, {"k", s.dim()}, {"basis", std::move(rows)}};
}

Subspace subspace_from_json(const json& j) {
  if (!j.is_object() || !j.contains("basis"))
    throw std::invalid_argument("subspace JSON needs a \"basis\" field");
  const json& rows = j.at("basis");
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("basis must be a nonempty array");
  const int n = static_cast<int>(rows.size());
  const int k = rows.at(0).is_array() ? static_cast<int>(rows.at(0).size()) : -1;
  if (k < 0) throw std::invalid_argument("basis rows must be arrays");
  if (j.contains("n") && j.at("n").get<int>() != n)
    throw std::invalid_argument("field n does not match the basis row count");
  if (j.contains("k") && j.at("k").get<int>() != k)
    throw std::invalid_argument("field k does not match the basis column count");
  Eigen::MatrixXd b(n, k);
  for (int i = 0; i < n; ++i) {
    if (!rows.at(i).is_array() || static_cast<int>(rows.at(i).size()) != k)
      throw std::invalid_argument("basis row " + std::to_string(i) + " has the wrong length");
    for (int c = 0; c < k; ++c)
      b(i, c) = number_at(rows.at(i).at(c), "basis entry (" + std::to_string(i) + "," +
                                                std::to_string(c) + ")");
  }
  return Subspace(std::move(b));
}

json to_json(const StepDensity& f) {
  json pieces = json::array();
  for (const Piece& p : f.pieces()) pieces.push_back({p.lo, p.hi, p.value});
  return {{"pieces", std::move(pieces)}};
}

StepDensity density_from_json(const json& j) {
  if (!j.is_object() || !j.contains("pieces") || !j.at("pieces").is_array())
    throw InvariantError("format", "density JSON needs a \"pieces\" array");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < j.at("pieces").size(); ++i) {
    const json& p = j.at("pieces").at(i);
    const std::string where = "piece " + std::to_string(i);
    if (!p.is_array() || p.size() != 3)
      throw InvariantError("format", where + " must be [lo, hi, value]");
    pieces.push_back({number_at(p[0], where + " lo"), number_at(p[1], where + " hi"),
                      number_at(p[2], where + " value")});
  }
  return StepDensity(std::move(pieces));
}

json to_json(const ProductDensity& f) {
  json factors = json::array();
  for (const auto& fi : f.factors()) factors.push_back(to_json(fi));
  return {{"factors", std::move(factors)}};
}

ProductDensity product_from_json(const json& j) {
  if (j.is_object() && j.contains("pieces")) return ProductDensity({density_from_json(j)});
  const json& list = j.is_object() && j.contains("factors") ? j.at("factors") : j;
  if (!list.is_array()) throw InvariantError("format", "expected a list of factor densities");
  std::vector<StepDensity> factors;
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      factors.push_back(density_from_json(list.at(i)));
    } catch (const InvariantError& e) {
      throw InvariantError(e.invariant(), "factor " + std::to_string(i) + ": " + e.what());
    }
  }
  return ProductDensity(std::move(factors));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move report into place at " + path.string());
  }
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

json strip_timing(const json& report) {
  if (report.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : report.items())
      if (key != "runtime_ms") out[key] = strip_timing(value);
    return out;
  }
  if (report.is_array()) {
    json out = json::array();
    for (const auto& v : report) out.push_back(strip_timing(v));
    return out;
  }
  return report;
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("curve has no points");
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("curve row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  return out.str();
}

void emit_curve(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                const std::filesystem::path& path) {
  write_atomic(path, format_csv(header, rows));
}

void emit_curve(const std::vector<std::pair<double, double>>& points,
                const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  for (const auto& [x, y] : points) rows.push_back({x, y});
  emit_curve({"x", "y"}, rows, path);
}

}  // namespace cubeslice
