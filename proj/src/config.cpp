#include "nehari/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nehari {

namespace {

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("config field '" + (path.empty() ? it.key() : path + "." + it.key()) + "': unknown key");
    }
  }
}

const json& object_at(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError("config field '" + path + "': missing");
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError("config field '" + path + "': expected an object");
  return v;
}

double number_at(const json& obj, const std::string& key, const std::string& path, std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("config field '" + path + "': missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config field '" + path + "': expected a number");
  return v.get<double>();
}

long long integer_at(const json& obj, const std::string& key, const std::string& path,
                     std::optional<long long> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("config field '" + path + "': missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("config field '" + path + "': expected an integer");
  return v.get<long long>();
}

std::vector<double> numbers_at(const json& obj, const std::string& key, const std::string& path, std::size_t n) {
  if (!obj.contains(key)) throw ConfigError("config field '" + path + "': missing");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != n) {
    throw ConfigError("config field '" + path + "': expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (!v[k].is_number()) throw ConfigError("config field '" + path + "[" + std::to_string(k) + "]': expected a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

SourceSpec parse_source(const json& obj, const std::string& path, int dim, const std::filesystem::path& base) {
  if (!obj.is_object()) throw ConfigError("config field '" + path + "': expected an object");
  if (!obj.contains("kind") || !obj.at("kind").is_string()) {
    throw ConfigError("config field '" + path + ".kind': expected one of constant, gaussian, eigen, csv");
  }
  const std::string kind = obj.at("kind").get<std::string>();
  SourceSpec s;
  if (kind == "constant") {
    reject_unknown(obj, path, {"kind", "value"});
    s.kind = SourceSpec::Kind::Constant;
    s.amplitude = number_at(obj, "value", path + ".value", std::nullopt);
  } else if (kind == "gaussian") {
    reject_unknown(obj, path, {"kind", "center", "width", "amplitude"});
    s.kind = SourceSpec::Kind::Gaussian;
    const auto c = numbers_at(obj, "center", path + ".center", static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) s.center[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)];
    s.width = number_at(obj, "width", path + ".width", std::nullopt);
    s.amplitude = number_at(obj, "amplitude", path + ".amplitude", std::nullopt);
    if (!(s.width > 0.0)) throw ConfigError("config field '" + path + ".width': must be positive");
  } else if (kind == "eigen") {
    reject_unknown(obj, path, {"kind", "amplitude"});
    s.kind = SourceSpec::Kind::Eigen;
    s.amplitude = number_at(obj, "amplitude", path + ".amplitude", 1.0);
  } else if (kind == "csv") {
    reject_unknown(obj, path, {"kind", "path"});
    s.kind = SourceSpec::Kind::Csv;
    if (!obj.contains("path") || !obj.at("path").is_string()) {
      throw ConfigError("config field '" + path + ".path': expected a string");
    }
    s.path = base / obj.at("path").get<std::string>();
  } else {
    throw ConfigError("config field '" + path + ".kind': unknown source kind '" + kind + "'");
  }
  if (!std::isfinite(s.amplitude)) throw ConfigError("config field '" + path + "': amplitude must be finite");
  return s;
}

json source_to_json(const SourceSpec& s, int dim) {
  switch (s.kind) {
    case SourceSpec::Kind::Constant:
      return {{"kind", "constant"}, {"value", s.amplitude}};
    case SourceSpec::Kind::Gaussian: {
      json c = json::array();
      for (int a = 0; a < dim; ++a) c.push_back(s.center[static_cast<std::size_t>(a)]);
      return {{"kind", "gaussian"}, {"center", c}, {"width", s.width}, {"amplitude", s.amplitude}};
    }
    case SourceSpec::Kind::Eigen:
      return {{"kind", "eigen"}, {"amplitude", s.amplitude}};
    case SourceSpec::Kind::Csv:
      return {{"kind", "csv"}, {"path", s.path.string()}};
  }
  return {};
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root, "", {"grid", "coefficients", "sources", "autoscale", "solver", "s4", "seed", "output"});

  ProblemConfig cfg;
  const json& grid = object_at(root, "grid", "grid");
  reject_unknown(grid, "grid", {"dim", "extent", "points"});
  cfg.dim = static_cast<int>(integer_at(grid, "dim", "grid.dim", std::nullopt));
  if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError("config field 'grid.dim': must be 1 or 2");
  const auto ext = numbers_at(grid, "extent", "grid.extent", static_cast<std::size_t>(cfg.dim));
  const auto pts = numbers_at(grid, "points", "grid.points", static_cast<std::size_t>(cfg.dim));
  for (int a = 0; a < cfg.dim; ++a) {
    const auto k = static_cast<std::size_t>(a);
    if (!(ext[k] > 0.0)) throw ConfigError("config field 'grid.extent': entries must be positive");
    if (pts[k] < 3 || pts[k] != std::floor(pts[k])) {
      throw ConfigError("config field 'grid.points': entries must be integers >= 3");
    }
    cfg.extents[k] = ext[k];
    cfg.points[k] = static_cast<int>(pts[k]);
  }

  const json& co = object_at(root, "coefficients", "coefficients");
  reject_unknown(co, "coefficients", {"lambda1", "lambda2", "mu1", "mu2", "beta"});
  cfg.lambda1 = number_at(co, "lambda1", "coefficients.lambda1", std::nullopt);
  cfg.lambda2 = number_at(co, "lambda2", "coefficients.lambda2", std::nullopt);
  cfg.mu1 = number_at(co, "mu1", "coefficients.mu1", std::nullopt);
  cfg.mu2 = number_at(co, "mu2", "coefficients.mu2", std::nullopt);
  cfg.beta = number_at(co, "beta", "coefficients.beta", std::nullopt);

  const json& src = object_at(root, "sources", "sources");
  reject_unknown(src, "sources", {"f", "g"});
  if (!src.contains("f")) throw ConfigError("config field 'sources.f': missing");
  if (!src.contains("g")) throw ConfigError("config field 'sources.g': missing");
  cfg.f = parse_source(src.at("f"), "sources.f", cfg.dim, base_dir);
  cfg.g = parse_source(src.at("g"), "sources.g", cfg.dim, base_dir);

  if (root.contains("autoscale")) {
    const json& as = object_at(root, "autoscale", "autoscale");
    reject_unknown(as, "autoscale", {"rho"});
    cfg.rho = number_at(as, "rho", "autoscale.rho", std::nullopt);
  }

  const auto seed = integer_at(root, "seed", "seed", 0);
  if (seed < 0) throw ConfigError("config field 'seed': must be nonnegative");
  cfg.solver.seed = static_cast<std::uint64_t>(seed);
  cfg.s4.seed = cfg.solver.seed;

  if (root.contains("solver")) {
    const json& s = object_at(root, "solver", "solver");
    reject_unknown(s, "solver", {"max_iters", "grad_tol", "nehari_tol", "armijo_factor", "armijo_slope", "initial_step"});
    cfg.solver.max_iters = static_cast<int>(integer_at(s, "max_iters", "solver.max_iters", cfg.solver.max_iters));
    cfg.solver.grad_tol = number_at(s, "grad_tol", "solver.grad_tol", cfg.solver.grad_tol);
    cfg.solver.nehari_tol = number_at(s, "nehari_tol", "solver.nehari_tol", cfg.solver.nehari_tol);
    cfg.solver.armijo_factor = number_at(s, "armijo_factor", "solver.armijo_factor", cfg.solver.armijo_factor);
    cfg.solver.armijo_slope = number_at(s, "armijo_slope", "solver.armijo_slope", cfg.solver.armijo_slope);
    cfg.solver.initial_step = number_at(s, "initial_step", "solver.initial_step", cfg.solver.initial_step);
    try {
      cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config field 'solver': ") + e.what());
    }
  }

  if (root.contains("s4")) {
    const json& s = object_at(root, "s4", "s4");
    reject_unknown(s, "s4", {"restarts", "max_iters", "tol"});
    cfg.s4.restarts = static_cast<int>(integer_at(s, "restarts", "s4.restarts", cfg.s4.restarts));
    cfg.s4.max_iters = static_cast<int>(integer_at(s, "max_iters", "s4.max_iters", cfg.s4.max_iters));
    cfg.s4.tol = number_at(s, "tol", "s4.tol", cfg.s4.tol);
    if (cfg.s4.restarts < 0 || cfg.s4.max_iters < 1 || !(cfg.s4.tol > 0.0)) {
      throw ConfigError("config field 's4': restarts >= 0, max_iters >= 1 and tol > 0 required");
    }
  }

  if (root.contains("output")) {
    if (!root.at("output").is_string()) throw ConfigError("config field 'output': expected a string");
    cfg.output = root.at("output").get<std::string>();
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

json config_to_json(const ProblemConfig& cfg) {
  json ext = json::array();
  json pts = json::array();
  for (int a = 0; a < cfg.dim; ++a) {
    ext.push_back(cfg.extents[static_cast<std::size_t>(a)]);
    pts.push_back(cfg.points[static_cast<std::size_t>(a)]);
  }
  json j = {{"grid", {{"dim", cfg.dim}, {"extent", ext}, {"points", pts}}},
            {"coefficients",
             {{"lambda1", cfg.lambda1}, {"lambda2", cfg.lambda2}, {"mu1", cfg.mu1}, {"mu2", cfg.mu2}, {"beta", cfg.beta}}},
            {"sources", {{"f", source_to_json(cfg.f, cfg.dim)}, {"g", source_to_json(cfg.g, cfg.dim)}}},
            {"solver",
             {{"max_iters", cfg.solver.max_iters},
              {"grad_tol", cfg.solver.grad_tol},
              {"nehari_tol", cfg.solver.nehari_tol},
              {"armijo_factor", cfg.solver.armijo_factor},
              {"armijo_slope", cfg.solver.armijo_slope},
              {"initial_step", cfg.solver.initial_step}}},
            {"s4", {{"restarts", cfg.s4.restarts}, {"max_iters", cfg.s4.max_iters}, {"tol", cfg.s4.tol}}},
            {"seed", cfg.solver.seed},
            {"output", cfg.output.string()}};
  if (cfg.rho) j["autoscale"] = {{"rho", *cfg.rho}};
  return j;
}

void validate_config(const ProblemConfig& cfg, bool force) {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError(std::string("config field 'coefficients.") + name + "': must be positive");
    }
  };
  positive(cfg.lambda1, "lambda1");
  positive(cfg.lambda2, "lambda2");
  positive(cfg.mu1, "mu1");
  positive(cfg.mu2, "mu2");
  const double floor = beta_lower_limit(cfg.mu1, cfg.mu2);
  if (!std::isfinite(cfg.beta) || !(cfg.beta > floor)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "config field 'coefficients.beta': must exceed -sqrt(mu1*mu2) = " << floor << ", got " << cfg.beta;
    throw ConfigError(msg.str());
  }
  if (cfg.rho) {
    const double rho = *cfg.rho;
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("config field 'autoscale.rho': must be positive");
    if (rho >= 1.0 && !force) {
      throw ConfigError("config field 'autoscale.rho': must lie in (0,1); values >= 1 need --force");
    }
  }
}

Grid make_grid(const ProblemConfig& cfg) {
  return cfg.dim == 1 ? Grid::line(cfg.extents[0], cfg.points[0])
                      : Grid::box(cfg.extents[0], cfg.extents[1], cfg.points[0], cfg.points[1]);
}

Field build_source(const SourceSpec& spec, const Grid& grid) {
  switch (spec.kind) {
    case SourceSpec::Kind::Constant: {
      Field out(grid);
      out.values.setConstant(spec.amplitude);
      return out;
    }
    case SourceSpec::Kind::Gaussian: {
      Field out(grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto idx = grid.multi_index(k);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
          const double d = grid.coordinate(a, idx[a]) - spec.center[static_cast<std::size_t>(a)];
          r2 += d * d;
        }
        out.values[static_cast<Eigen::Index>(k)] = spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
      }
      return out;
    }
    case SourceSpec::Kind::Eigen:
      return spec.amplitude * first_eigenvector(grid);
    case SourceSpec::Kind::Csv:
      try {
        return read_field_csv_file(spec.path, grid);
      } catch (const std::runtime_error& e) {
        throw ConfigError("source csv " + spec.path.string() + ": " + e.what());
      }
  }
  throw ConfigError("unknown source kind");
}

Problem build_problem(const ProblemConfig& cfg) {
  Problem pb;
  pb.grid = make_grid(cfg);
  pb.params.lambda1 = cfg.lambda1;
  pb.params.lambda2 = cfg.lambda2;
  pb.params.mu1 = cfg.mu1;
  pb.params.mu2 = cfg.mu2;
  pb.params.beta = cfg.beta;
  pb.params.f = build_source(cfg.f, pb.grid);
  pb.params.g = build_source(cfg.g, pb.grid);
  try {
    pb.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  pb.s4 = estimate_s4(pb.grid, std::min(cfg.lambda1, cfg.lambda2), cfg.s4);
  pb.threshold = compute_threshold(pb.params, pb.s4.value);
  if (cfg.rho) {
    const double current = std::max(pb.threshold.f_norm, pb.threshold.g_norm);
    if (current > 0.0) {
      pb.source_scale = *cfg.rho * pb.threshold.lambda_threshold / current;
      pb.params.f = pb.source_scale * pb.params.f;
      pb.params.g = pb.source_scale * pb.params.g;
      pb.threshold = compute_threshold(pb.params, pb.s4.value);
    }
  }
  return pb;
}

}  // namespace nehari
