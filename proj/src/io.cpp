#include "nehari/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nehari {

namespace {

void write_string(std::ostream& os, const std::string& s) { os << json(s).dump(); }

void write_value(std::ostream& os, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        write_string(os, it.key());
        os << ": ";
        write_value(os, it.value(), depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k > 0) os << ",\n";
        os << pad;
        write_value(os, j[k], depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Reads `values` trailing columns per node after the index/coordinate columns.
std::vector<Eigen::VectorXd> read_columns(std::istream& is, const Grid& grid, int values) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::VectorXd> cols(static_cast<std::size_t>(values), Eigen::VectorXd::Zero(n));
  std::vector<bool> seen(grid.size(), false);
  const std::size_t expected = static_cast<std::size_t>(2 * grid.dim() + values);

  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: missing header row");
  int row = 1;
  std::size_t count = 0;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != expected) {
      throw std::runtime_error("csv row " + std::to_string(row) + ": expected " + std::to_string(expected) +
                               " columns, got " + std::to_string(cells.size()));
    }
    try {
      const int i = std::stoi(cells[0]);
      const int j = grid.dim() == 2 ? std::stoi(cells[1]) : 0;
      if (i < 0 || i >= grid.points(0) || (grid.dim() == 2 && (j < 0 || j >= grid.points(1)))) {
        throw std::runtime_error("index out of range");
      }
      const std::size_t k = grid.node(i, j);
      if (seen[k]) throw std::runtime_error("duplicate node");
      seen[k] = true;
      for (int c = 0; c < values; ++c) {
        cols[static_cast<std::size_t>(c)][static_cast<Eigen::Index>(k)] =
            std::stod(cells[static_cast<std::size_t>(2 * grid.dim() + c)]);
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("csv row " + std::to_string(row) + ": " + e.what());
    } catch (const std::logic_error&) {
      throw std::runtime_error("csv row " + std::to_string(row) + ": malformed number");
    }
    ++count;
  }
  if (count != grid.size()) {
    throw std::runtime_error("csv: expected " + std::to_string(grid.size()) + " nodes, got " +
                             std::to_string(count));
  }
  return cols;
}

void write_rows(std::ostream& os, const Grid& grid, const std::vector<const Eigen::VectorXd*>& cols,
                const std::vector<std::string>& names) {
  os << (grid.dim() == 2 ? "i,j,x,y" : "i,x");
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto idx = grid.multi_index(k);
    os << idx[0];
    if (grid.dim() == 2) os << ',' << idx[1];
    for (int a = 0; a < grid.dim(); ++a) os << ',' << format_double(grid.coordinate(a, idx[a]));
    for (const auto* c : cols) os << ',' << format_double((*c)[static_cast<Eigen::Index>(k)]);
    os << '\n';
  }
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_json(std::ostream& os, const json& j) {
  write_value(os, j, 0);
  os << '\n';
}

std::string dump_json(const json& j) {
  std::ostringstream os;
  write_json(os, j);
  return os.str();
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_json(os, j);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return json::parse(is);
}

json to_json(const ThresholdReport& r) {
  return {{"s4", r.s4},
          {"sup_A_bound", r.sup_A_bound},
          {"alpha", r.alpha},
          {"lambda_threshold", r.lambda_threshold},
          {"f_norm", r.f_norm},
          {"g_norm", r.g_norm},
          {"degenerate_sources", r.degenerate_sources},
          {"satisfied", r.satisfied}};
}

json to_json(const FiberingAnalysis& fa) {
  json roots = json::array();
  for (const auto& r : fa.roots) roots.push_back({{"t", r.t}, {"class", to_string(r.cls)}});
  return {{"norm_sq", fa.norm_sq}, {"A", fa.A},           {"B", fa.B},
          {"t_turn", fa.t_turn},   {"psi_max", fa.psi_max}, {"roots", roots}};
}

json to_json(const SolveReport& r) {
  json history = json::array();
  for (const auto& h : r.history) history.push_back(h.energy);
  return {{"branch", to_string(r.branch)},
          {"theta", r.theta},
          {"energy",
           {{"quadratic", r.energy.quadratic},
            {"quartic", r.energy.quartic},
            {"source", r.energy.source},
            {"total", r.energy.total}}},
          {"norm_sq", r.norm_sq},
          {"A", r.A},
          {"B", r.B},
          {"grad_norm", r.grad_norm},
          {"nehari_residual", r.nehari_residual},
          {"classification_value", r.classification_value},
          {"pde_residual", r.pde_residual},
          {"positive_u", r.positive_u},
          {"positive_v", r.positive_v},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"status", r.status},
          {"norm_min", r.norm_min},
          {"norm_max", r.norm_max},
          {"tau_bound", r.tau_bound},
          {"noise_injections", r.noise_injections},
          {"grad_tol", r.grad_tol},
          {"nehari_tol", r.nehari_tol},
          {"energy_history", history}};
}

json to_json(const std::vector<CheckResult>& checks) {
  json out = json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"limit", c.limit}});
  }
  return out;
}

void write_field_csv(std::ostream& os, const Field& w) { write_rows(os, w.grid, {&w.values}, {"value"}); }

Field read_field_csv(std::istream& is, const Grid& grid) {
  auto cols = read_columns(is, grid, 1);
  return Field(grid, std::move(cols[0]));
}

void write_pair_csv(std::ostream& os, const Pair& p) {
  write_rows(os, p.grid(), {&p.u.values, &p.v.values}, {"u", "v"});
}

Pair read_pair_csv(std::istream& is, const Grid& grid) {
  auto cols = read_columns(is, grid, 2);
  return Pair(Field(grid, std::move(cols[0])), Field(grid, std::move(cols[1])));
}

void write_pair_csv_file(const std::filesystem::path& path, const Pair& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_pair_csv(os, p);
}

Pair read_pair_csv_file(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_pair_csv(is, grid);
}

Field read_field_csv_file(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_field_csv(is, grid);
}

}  // namespace nehari
