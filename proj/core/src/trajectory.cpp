#include "stlccp/trajectory.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "stlccp/parser.hpp"

namespace stlccp {

namespace {

// Shortest decimal that round-trips the double exactly.
std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.state_dim();
  const int m = traj.input_dim();
  if (n == 4 && m == 2) {
    out << "t,px,py,vx,vy,ux,uy\n";
  } else {
    out << "t";
    for (int i = 0; i < n; ++i) out << ",x" << i;
    for (int j = 0; j < m; ++j) out << ",u" << j;
    out << "\n";
  }
  for (int t = 0; t <= traj.horizon(); ++t) {
    out << t;
    for (int i = 0; i < n; ++i) out << "," << fmt(traj.states(t, i));
    for (int j = 0; j < m; ++j) {
      out << ",";
      if (t < traj.inputs.rows()) out << fmt(traj.inputs(t, j));
      // final row: no input exists at t = T, cell stays empty
    }
    out << "\n";
  }
}

void write_trajectory_csv_file(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory CSV");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t") {
    throw ParseError("trajectory CSV must start with a 't' column");
  }
  int n = 0, m = 0;
  for (size_t i = 1; i < header.size(); ++i) {
    const std::string& h = header[i];
    bool is_state = h == "px" || h == "py" || h == "vx" || h == "vy" ||
                    (!h.empty() && h[0] == 'x');
    bool is_input = h == "ux" || h == "uy" || (!h.empty() && h[0] == 'u');
    if (is_state && m == 0) ++n;
    else if (is_input) ++m;
    else throw ParseError("unrecognized trajectory CSV column '" + h + "'");
  }
  if (n == 0) throw ParseError("trajectory CSV has no state columns");

  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> inputs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != 1 + n + m) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(1 + n + m) + " cells, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      try {
        x[i] = std::stod(cells[1 + i]);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad state value '" +
                         cells[1 + i] + "'");
      }
    }
    states.push_back(std::move(x));
    bool has_input = false;
    for (int j = 0; j < m; ++j) has_input = has_input || !cells[1 + n + j].empty();
    if (has_input) {
      std::vector<double> u(m);
      for (int j = 0; j < m; ++j) {
        try {
          u[j] = std::stod(cells[1 + n + j]);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(lineno) +
                           ": bad input value '" + cells[1 + n + j] + "'");
        }
      }
      inputs.push_back(std::move(u));
    }
  }
  if (states.empty()) throw ParseError("trajectory CSV has no data rows");

  Trajectory traj;
  traj.states.resize(static_cast<Eigen::Index>(states.size()), n);
  for (size_t t = 0; t < states.size(); ++t) {
    for (int i = 0; i < n; ++i) traj.states(static_cast<Eigen::Index>(t), i) = states[t][i];
  }
  traj.inputs.resize(static_cast<Eigen::Index>(inputs.size()), m);
  for (size_t t = 0; t < inputs.size(); ++t) {
    for (int j = 0; j < m; ++j) traj.inputs(static_cast<Eigen::Index>(t), j) = inputs[t][j];
  }
  return traj;
}

Trajectory read_trajectory_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_trajectory_csv(in);
}

}  // namespace stlccp
