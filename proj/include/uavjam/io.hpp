#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "uavjam/admm.hpp"
#include "uavjam/errors.hpp"
#include "uavjam/scenario.hpp"

namespace uavjam {

// Shortest decimal text that reads back to the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

// ---------------------------------------------------------------------------
// CSV (comma-separated, header row, LF, no quoting needed for our fields).

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index; throws naming the column when absent.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + std::string(name) + "'", 1, std::string(name));
  }
  double number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) {
      throw ParseError("not a number: '" + cell + "'", row + 2, header.at(col));
    }
    return v;
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()),
                       line_no, "");
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ParseError("empty CSV", 1, "");
  return t;
}

inline std::string deployment_csv(const Deployment& d) {
  std::string out = "uav_id,x,y,z,psi_rad\n";
  for (int i = 0; i < d.size(); ++i) {
    out += std::to_string(i) + "," + fmt_double(d.positions(i, 0)) + "," + fmt_double(d.positions(i, 1)) + "," +
           fmt_double(d.positions(i, 2)) + "," + fmt_double(d.azimuths[i]) + "\n";
  }
  return out;
}

inline std::string sinr_csv(const SolverReport& r) {
  std::string out = "target_id,sinr_linear,sinr_db\n";
  for (Eigen::Index k = 0; k < r.sinr_linear.size(); ++k) {
    out += std::to_string(k) + "," + fmt_double(r.sinr_linear[k]) + "," + fmt_double(r.sinr_db[k]) + "\n";
  }
  return out;
}

// Structured result document. With include_timing = false the wall time is
// written as 0 so repeated runs are byte-identical.
inline nlohmann::json report_to_json(const SolverReport& r, bool include_timing = true) {
  using nlohmann::json;
  json uavs = json::array();
  for (int i = 0; i < r.deployment.size(); ++i) {
    uavs.push_back({{"x", r.deployment.positions(i, 0)},
                    {"y", r.deployment.positions(i, 1)},
                    {"z", r.deployment.positions(i, 2)},
                    {"psi_rad", r.deployment.azimuths[i]}});
  }
  json lin = json::array();
  json db = json::array();
  for (Eigen::Index k = 0; k < r.sinr_linear.size(); ++k) {
    lin.push_back(r.sinr_linear[k]);
    db.push_back(r.sinr_db[k]);
  }
  return json{{"scheme", r.scheme},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"final_residual", r.final_residual},
              {"avg_sinr_linear", r.avg_sinr_linear},
              {"avg_sinr_db", r.avg_sinr_db},
              {"sinr_linear", lin},
              {"sinr_db", db},
              {"deployment", uavs},
              {"feasibility",
               {{"max_x_excess", r.feasibility.max_x_excess},
                {"min_target_distance", r.feasibility.min_target_distance},
                {"min_uav_distance", r.feasibility.min_uav_distance}}},
              {"residual_history", r.residual_history},
              {"objective_history", r.objective_history},
              {"smooth_history", r.smooth_history},
              {"wall_time_s", include_timing ? r.wall_time_s : 0.0}};
}

}  // namespace uavjam
