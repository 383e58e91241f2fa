#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sunada/cover.hpp"
#include "sunada/group.hpp"
#include "sunada/manifold.hpp"
#include "sunada/microlocal.hpp"

namespace sunada::cli {

/// Malformed or missing command-line input; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const std::filesystem::path& path);

/// Subgroup from a textual spec:
///   "point:3"             stabilizer of point 3
///   "set:0,1,3"           setwise stabilizer
///   "(0 1)(2 3);(1 2 4)"  generated by the listed permutations ("" or "()" gives the trivial group)
/// or from a JSON array of cycle strings.
group::Subgroup parse_subgroup(const group::FiniteGroup& g, const std::string& spec);
group::Subgroup parse_subgroup(const group::FiniteGroup& g, const nlohmann::json& spec);

struct DiagramSpec {
  group::FiniteGroup group;
  group::Subgroup h1;
  group::Subgroup h2;
  cover::Model model = cover::Model::regular;
  std::size_t fiber_size = 1;
};

/// {group_file, h1_gens, h2_gens, model, fiber_size}; group_file is resolved
/// relative to the diagram file.
DiagramSpec load_diagram(const std::filesystem::path& path);

/// {kind, params}:
///   flat_torus            {lattice: n x n rows}
///   round_sphere          {radius}
///   surface_of_revolution {profile: "torus", R, r} or {profile: "catenoid", c, half_width}
geo::Manifold manifold_from_json(const nlohmann::json& spec);
geo::Manifold load_manifold(const std::filesystem::path& path);

/// Either a stationary-phase problem {phase, amplitude, N, h_list, params}
/// or a mollification study {kind: "mollification", function, h_list}.
struct StatphaseFixture {
  bool mollification = false;
  micro::PhaseProblem problem;
  std::string function_name;
  std::function<double(double)> function;
  std::vector<double> h_list;
};

StatphaseFixture statphase_from_json(const nlohmann::json& spec);
StatphaseFixture load_statphase(const std::filesystem::path& path);

/// Smooth periodic test functions by name: sin, sin3, cos2, constant.
std::function<double(double)> named_function(const std::string& name);

/// "50,100,200" -> {50, 100, 200}.
std::vector<double> parse_list(const std::string& text);
/// "2", "2+0.5i", "2-1i" or "2,0.5".
std::complex<double> parse_complex(const std::string& text);

}  // namespace sunada::cli
