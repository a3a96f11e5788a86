#ifndef LAXLAB_IO_HPP
#define LAXLAB_IO_HPP

// Report and trajectory serialization. Reports are built as ordered JSON
// values and emitted with every floating-point number at 17 significant
// digits, so identical runs give byte-identical files.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "laxlab/error.hpp"
#include "laxlab/integrate.hpp"
#include "laxlab/linalg.hpp"

namespace laxlab {

using Json = nlohmann::ordered_json;

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json to_json(cplx c) { return Json::array({c.real(), c.imag()}); }

inline Json to_json(std::span<const cplx> v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(to_json(c));
  return a;
}

namespace detail {

inline void emit(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      os << (std::isfinite(x) ? format_number(x) : "null");
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric leaves stay on one line: [re, im] pairs and short vectors
      bool flat = true;
      for (const auto& e : j) flat = flat && e.is_primitive();
      if (flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(os, j[i], indent);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << inner;
        emit(os, j[i], indent + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        os << inner << Json(it.key()).dump() << ": ";
        emit(os, it.value(), indent + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << '}';
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline void write_json(std::ostream& os, const Json& j) {
  detail::emit(os, j, 0);
  os << '\n';
}

inline std::string json_string(const Json& j) {
  std::ostringstream os;
  write_json(os, j);
  return os.str();
}

// ---------------------------------------------------------------------------
// Trajectory CSV

inline std::vector<std::string> trajectory_columns(std::size_t n, bool with_frames) {
  std::vector<std::string> cols{"t"};
  for (const char* q : {"z", "v"})
    for (std::size_t i = 1; i <= n; ++i) {
      cols.push_back(std::string(q) + std::to_string(i) + "_re");
      cols.push_back(std::string(q) + std::to_string(i) + "_im");
    }
  if (with_frames)
    for (const char* q : {"F", "G"})
      for (std::size_t k = 0; k < n; ++k) {
        cols.push_back(std::string(q) + std::to_string(k) + "_re");
        cols.push_back(std::string(q) + std::to_string(k) + "_im");
      }
  if (with_frames) cols.push_back("F_drift");
  cols.push_back("energy_drift");
  cols.push_back("min_separation");
  return cols;
}

inline std::vector<double> trajectory_row(const Sample& s) {
  std::vector<double> row{s.state.t};
  auto put = [&](const std::vector<cplx>& v) {
    for (const auto& c : v) {
      row.push_back(c.real());
      row.push_back(c.imag());
    }
  };
  put(s.state.z);
  put(s.state.v);
  if (s.frame) {
    put(s.frame->F);
    put(s.frame->G);
    row.push_back(s.diag.F_drift);
  }
  row.push_back(s.diag.energy_drift);
  row.push_back(s.diag.min_separation);
  return row;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, std::size_t n) {
  const bool frames = !tr.samples.empty() && tr.samples.front().frame.has_value();
  const auto cols = trajectory_columns(n, frames);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& s : tr.samples) {
    const auto row = trajectory_row(s);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw LaxError("csv: no column '" + name + "'");
  }
};

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(is, line)) throw LaxError("csv: empty input");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw LaxError("csv: ragged row");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      row.push_back(std::stod(c, &used));
      if (used != c.size()) throw LaxError("csv: bad number '" + c + "'");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace laxlab

#endif  // LAXLAB_IO_HPP
