#include "sunada_cli/inputs.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sunada/errors.hpp"

namespace sunada::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double number(const nlohmann::json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

group::Subgroup from_generators(const group::FiniteGroup& g, const std::vector<std::string>& cycles) {
  std::vector<group::ElementId> gens;
  for (const std::string& c : cycles) {
    const std::string t = trim(c);
    if (t.empty()) continue;
    const auto id = g.find(group::parse_cycles(t, g.degree()));
    if (!id) throw ConfigError("permutation " + t + " is not in the group");
    gens.push_back(*id);
  }
  return group::Subgroup::generated_by(g, gens);
}

}  // namespace

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

group::Subgroup parse_subgroup(const group::FiniteGroup& g, const std::string& spec) {
  const std::string s = trim(spec);
  const auto points = [&](const std::string& list) {
    std::vector<group::Point> pts;
    for (const std::string& item : split(list, ',')) {
      try {
        const long v = std::stol(item);
        if (v < 0 || static_cast<std::size_t>(v) >= g.degree()) throw ConfigError("point out of range: " + item);
        pts.push_back(static_cast<group::Point>(v));
      } catch (const std::logic_error&) {
        throw ConfigError("invalid point list: " + list);
      }
    }
    if (pts.empty()) throw ConfigError("empty point list");
    return pts;
  };
  if (s.rfind("point:", 0) == 0) {
    const auto pts = points(s.substr(6));
    if (pts.size() != 1) throw ConfigError("point stabilizer takes one point");
    return group::point_stabilizer(g, pts.front());
  }
  if (s.rfind("set:", 0) == 0) return group::set_stabilizer(g, points(s.substr(4)));
  return from_generators(g, split(s, ';'));
}

group::Subgroup parse_subgroup(const group::FiniteGroup& g, const nlohmann::json& spec) {
  if (spec.is_string()) return parse_subgroup(g, spec.get<std::string>());
  if (spec.is_array()) {
    std::vector<std::string> cycles;
    for (const auto& item : spec) {
      if (!item.is_string()) throw ConfigError("subgroup generators must be cycle strings");
      cycles.push_back(item.get<std::string>());
    }
    return from_generators(g, cycles);
  }
  throw ConfigError("subgroup must be a string or an array of cycle strings");
}

DiagramSpec load_diagram(const fs::path& path) {
  const nlohmann::json j = read_json(path);
  for (const char* key : {"group_file", "h1_gens", "h2_gens"})
    if (!j.contains(key)) throw ConfigError(std::string("diagram is missing '") + key + "'");
  fs::path group_file = j.at("group_file").get<std::string>();
  if (group_file.is_relative()) group_file = path.parent_path() / group_file;
  if (!fs::exists(group_file)) throw ConfigError("group file not found: " + group_file.string());

  const group::FiniteGroup g = group::load_group_file(group_file);
  DiagramSpec d{g, parse_subgroup(g, j.at("h1_gens")), parse_subgroup(g, j.at("h2_gens")), cover::Model::regular, 1};
  const std::string model = j.value("model", "regular");
  if (model == "product") {
    d.model = cover::Model::product;
    d.fiber_size = j.value("fiber_size", std::size_t{2});
  } else if (model != "regular") {
    throw ConfigError("model must be 'regular' or 'product'");
  }
  return d;
}

geo::Manifold manifold_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) throw ConfigError("manifold spec needs a 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  geo::Manifold m;
  if (kind == "flat_torus") {
    if (!params.contains("lattice")) throw ConfigError("flat_torus needs params.lattice");
    const auto rows = params.at("lattice").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n != 2 && n != 3) throw ConfigError("lattice must be 2x2 or 3x3");
    geo::Mat b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
        throw ConfigError("lattice must be square");
      for (Eigen::Index k = 0; k < n; ++k) b(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    m = geo::FlatTorus{b};
  } else if (kind == "round_sphere") {
    m = geo::RoundSphere{number(params, "radius", 1.0)};
  } else if (kind == "surface_of_revolution") {
    const std::string profile = params.value("profile", "torus");
    if (profile == "torus")
      m = geo::SurfaceOfRevolution{geo::torus_profile(number(params, "R", 2.0), number(params, "r", 1.0))};
    else if (profile == "catenoid")
      m = geo::SurfaceOfRevolution{geo::catenoid_profile(number(params, "c", 1.0), number(params, "half_width", 2.0))};
    else
      throw ConfigError("unknown profile '" + profile + "'");
  } else {
    throw ConfigError("unknown manifold kind '" + kind + "'");
  }
  try {
    geo::validate(m);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("invalid manifold: ") + e.what());
  }
  return m;
}

geo::Manifold load_manifold(const fs::path& path) { return manifold_from_json(read_json(path)); }

std::function<double(double)> named_function(const std::string& name) {
  if (name == "sin") return [](double x) { return std::sin(x); };
  if (name == "sin3") return [](double x) { return std::sin(3.0 * x); };
  if (name == "cos2") return [](double x) { return std::cos(2.0 * x); };
  if (name == "constant") return [](double) { return 1.0; };
  throw ConfigError("unknown function '" + name + "'");
}

StatphaseFixture statphase_from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("fixture must be a JSON object");
  StatphaseFixture f;
  if (spec.contains("h_list")) f.h_list = spec.at("h_list").get<std::vector<double>>();
  if (spec.value("kind", "stationary_phase") == "mollification") {
    f.mollification = true;
    f.function_name = spec.value("function", "sin");
    f.function = named_function(f.function_name);
    return f;
  }
  for (const char* key : {"phase", "amplitude", "N"})
    if (!spec.contains(key)) throw ConfigError(std::string("fixture is missing '") + key + "'");
  std::map<std::string, double> params;
  if (spec.contains("params"))
    for (const auto& [key, value] : spec.at("params").items()) params[key] = value.get<double>();
  try {
    f.problem = micro::make_problem(spec.at("phase").get<std::string>(), spec.at("amplitude").get<std::string>(),
                                    spec.at("N").get<int>(), params);
    micro::validate(f.problem);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return f;
}

StatphaseFixture load_statphase(const fs::path& path) { return statphase_from_json(read_json(path)); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != t.size()) throw ConfigError("invalid number '" + t + "'");
    out.push_back(v);
  }
  return out;
}

std::complex<double> parse_complex(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(',') != std::string::npos) {
    const std::vector<double> parts = parse_list(t);
    if (parts.size() != 2) throw ConfigError("complex value needs two components: " + text);
    return {parts[0], parts[1]};
  }
  if (!t.empty() && t.back() == 'i') {
    // Split at the last sign that is not part of an exponent.
    for (std::size_t k = t.size() - 1; k > 0; --k) {
      if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
        const std::vector<double> re = parse_list(t.substr(0, k));
        std::string im = t.substr(k, t.size() - k - 1);
        if (im == "+" || im == "-") im += "1";
        const std::vector<double> imv = parse_list(im[0] == '+' ? im.substr(1) : im);
        if (re.size() != 1 || imv.size() != 1) break;
        return {re[0], imv[0]};
      }
    }
    throw ConfigError("invalid complex value '" + text + "'");
  }
  const std::vector<double> re = parse_list(t);
  if (re.size() != 1) throw ConfigError("invalid complex value '" + text + "'");
  return {re[0], 0.0};
}

}  // namespace sunada::cli
