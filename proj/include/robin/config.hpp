#pragma once

#include <array>
#include <string>
#include <vector>

#include "robin/measures.hpp"
#include "robin/nonlinearity.hpp"
#include "robin/solver.hpp"
#include "robin/stochastic.hpp"

namespace robin {

// TOML-style sections of key = value pairs; numbers, strings, booleans and
// (nested) arrays are enough for the run configuration
struct RunConfig {
  // [mesh]
  bool has_box = false;
  int dim = 2;
  Vec3 lower{0, 0, 0};
  Vec3 upper{1, 1, 1};
  std::array<int, 3> divisions{8, 8, 8};
  std::string mesh_file;
  int refine = 0;

  // [data]
  std::string f_expr = "0";
  std::string beta_expr = "1";
  std::string h_expr = "0";
  std::array<std::string, 3> F_expr{"", "", ""};
  std::vector<std::pair<int, double>> atoms;
  std::vector<double> a_matrix;  // empty = I, 1 entry = scalar, d*d entries = full
  double lambda_bound = 0;       // 0 = derive from a

  // [nonlinearity]
  std::string kind = "power";  // power | mixed
  double gamma = 1.0, gamma1 = 1.0, gamma2 = 2.0;
  double c1 = 1.0, c2 = 1.0;

  // [solver]
  SolveOptions solver;

  // [mc]
  PathConfig mc;
  bool calibrate = true;  // calibrate c_ell before mc checks
  std::vector<Vec3> probes;

  // [output]
  std::string output_dir;
  bool write_fields = true;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Mesh build_mesh(const RunConfig& cfg);
ProblemData build_data(const RunConfig& cfg, const Mesh& mesh);
Nonlinearity build_nonlinearity(const RunConfig& cfg);                  // power kind
std::pair<Nonlinearity, Nonlinearity> build_mixed(const RunConfig& cfg);

}  // namespace robin
