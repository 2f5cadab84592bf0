#include "robin/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "robin/expr.hpp"

namespace robin {

namespace {

struct Value {
  enum class Kind { number, string, boolean, array } kind = Kind::number;
  double num = 0;
  std::string str;
  bool b = false;
  std::vector<Value> arr;
};

class ValueParser {
 public:
  explicit ValueParser(const std::string& s) : s_(s) {}
  Value run() {
    auto v = value();
    skip();
    if (pos_ != s_.size()) throw std::runtime_error("config: trailing characters in value '" + s_ + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  Value value() {
    skip();
    if (pos_ >= s_.size()) throw std::runtime_error("config: empty value");
    const char c = s_[pos_];
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string word = s_.substr(pos_, end - pos_);
      if (word == "true" || word == "false") {
        pos_ = end;
        Value v;
        v.kind = Value::Kind::boolean;
        v.b = (word == "true");
        return v;
      }
      throw std::runtime_error("config: bare words must be quoted: '" + word + "'");
    }
    std::size_t end = pos_;
    while (end < s_.size() && !std::isspace(static_cast<unsigned char>(s_[end])) &&
           s_[end] != ',' && s_[end] != ']')
      ++end;
    Value v;
    v.kind = Value::Kind::number;
    try {
      v.num = std::stod(s_.substr(pos_, end - pos_));
    } catch (...) {
      throw std::runtime_error("config: bad number '" + s_.substr(pos_, end - pos_) + "'");
    }
    pos_ = end;
    return v;
  }
  Value string_value() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') out += s_[pos_++];
    if (pos_ >= s_.size()) throw std::runtime_error("config: unterminated string");
    ++pos_;
    Value v;
    v.kind = Value::Kind::string;
    v.str = out;
    return v;
  }
  Value array_value() {
    ++pos_;
    Value v;
    v.kind = Value::Kind::array;
    skip();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    for (;;) {
      v.arr.push_back(value());
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      throw std::runtime_error("config: expected ',' or ']' in array");
    }
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

double want_num(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::number) throw std::runtime_error("config: " + key + " must be a number");
  return v.num;
}

std::string want_str(const Value& v, const std::string& key) {
  if (v.kind == Value::Kind::string) return v.str;
  if (v.kind == Value::Kind::number) {
    std::ostringstream os;
    os << v.num;
    return os.str();
  }
  throw std::runtime_error("config: " + key + " must be a string or number");
}

std::vector<double> want_num_array(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::array) throw std::runtime_error("config: " + key + " must be an array");
  std::vector<double> out;
  for (const auto& e : v.arr) out.push_back(want_num(e, key));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool saw_box_key = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.front() == '[') {
      if (line.back() != ']') throw std::runtime_error("config: bad section at line " + std::to_string(lineno));
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value at line " + std::to_string(lineno));
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    Value val = ValueParser(line.substr(eq + 1)).run();

    auto fail = [&]() -> std::runtime_error {
      return std::runtime_error("config: unknown key '" + section + "." + key + "'");
    };

    if (section == "mesh") {
      if (key == "dim") cfg.dim = static_cast<int>(want_num(val, key));
      else if (key == "lower" || key == "upper") {
        const auto a = want_num_array(val, key);
        for (std::size_t i = 0; i < a.size() && i < 3; ++i)
          (key == "lower" ? cfg.lower : cfg.upper)[i] = a[i];
        saw_box_key = true;
      } else if (key == "divisions") {
        if (val.kind == Value::Kind::number) {
          cfg.divisions = {static_cast<int>(val.num), static_cast<int>(val.num),
                           static_cast<int>(val.num)};
        } else {
          const auto a = want_num_array(val, key);
          for (std::size_t i = 0; i < a.size() && i < 3; ++i)
            cfg.divisions[i] = static_cast<int>(a[i]);
        }
        saw_box_key = true;
      } else if (key == "file") cfg.mesh_file = want_str(val, key);
      else if (key == "refine") cfg.refine = static_cast<int>(want_num(val, key));
      else throw fail();
    } else if (section == "data") {
      if (key == "f") cfg.f_expr = want_str(val, key);
      else if (key == "beta") cfg.beta_expr = want_str(val, key);
      else if (key == "h") cfg.h_expr = want_str(val, key);
      else if (key == "F") {
        if (val.kind != Value::Kind::array) throw std::runtime_error("config: F must be an array");
        for (std::size_t i = 0; i < val.arr.size() && i < 3; ++i)
          cfg.F_expr[i] = want_str(val.arr[i], key);
      } else if (key == "atoms") {
        if (val.kind != Value::Kind::array) throw std::runtime_error("config: atoms must be an array");
        for (const auto& pair : val.arr) {
          if (pair.kind != Value::Kind::array || pair.arr.size() != 2)
            throw std::runtime_error("config: each atom is [vertex, mass]");
          cfg.atoms.emplace_back(static_cast<int>(want_num(pair.arr[0], key)),
                                 want_num(pair.arr[1], key));
        }
      } else if (key == "a") {
        if (val.kind == Value::Kind::number) cfg.a_matrix = {val.num};
        else cfg.a_matrix = want_num_array(val, key);
      } else if (key == "Lambda" || key == "lambda") cfg.lambda_bound = want_num(val, key);
      else throw fail();
    } else if (section == "nonlinearity") {
      if (key == "kind") cfg.kind = want_str(val, key);
      else if (key == "gamma") cfg.gamma = want_num(val, key);
      else if (key == "gamma1") cfg.gamma1 = want_num(val, key);
      else if (key == "gamma2") cfg.gamma2 = want_num(val, key);
      else if (key == "c1") cfg.c1 = want_num(val, key);
      else if (key == "c2") cfg.c2 = want_num(val, key);
      else throw fail();
    } else if (section == "solver") {
      if (key == "n_max") cfg.solver.n_max = static_cast<long>(want_num(val, key));
      else if (key == "tol") cfg.solver.tol = want_num(val, key);
      else if (key == "tol_outer") cfg.solver.tol_outer = want_num(val, key);
      else if (key == "tol_mono") cfg.solver.tol_mono = want_num(val, key);
      else if (key == "omega") cfg.solver.omega = want_num(val, key);
      else if (key == "max_inner") cfg.solver.max_inner = static_cast<int>(want_num(val, key));
      else throw fail();
    } else if (section == "mc") {
      if (key == "dt") cfg.mc.dt = want_num(val, key);
      else if (key == "horizon_eps") cfg.mc.horizon_eps = want_num(val, key);
      else if (key == "n_paths") cfg.mc.n_paths = static_cast<long>(want_num(val, key));
      else if (key == "seed") cfg.mc.seed = static_cast<uint64_t>(want_num(val, key));
      else if (key == "c_ell") {
        cfg.mc.local_time_scale = want_num(val, key);
        cfg.calibrate = false;
      } else if (key == "calibrate") {
        if (val.kind != Value::Kind::boolean) throw std::runtime_error("config: calibrate is a boolean");
        cfg.calibrate = val.b;
      } else if (key == "probes") {
        if (val.kind != Value::Kind::array) throw std::runtime_error("config: probes must be an array");
        for (const auto& p : val.arr) {
          const auto a = want_num_array(p, key);
          Vec3 v{0, 0, 0};
          for (std::size_t i = 0; i < a.size() && i < 3; ++i) v[i] = a[i];
          cfg.probes.push_back(v);
        }
      } else throw fail();
    } else if (section == "output") {
      if (key == "directory") cfg.output_dir = want_str(val, key);
      else if (key == "write_fields") {
        if (val.kind != Value::Kind::boolean) throw std::runtime_error("config: write_fields is a boolean");
        cfg.write_fields = val.b;
      } else throw fail();
    } else {
      throw std::runtime_error("config: unknown section '" + section + "'");
    }
  }
  cfg.has_box = cfg.mesh_file.empty();
  if (!cfg.mesh_file.empty() && saw_box_key)
    throw std::runtime_error("config: give exactly one of a box spec or a mesh file");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Mesh build_mesh(const RunConfig& cfg) {
  Mesh m;
  if (cfg.has_box) {
    m = build_box_mesh(cfg.dim, cfg.lower, cfg.upper, cfg.divisions);
  } else {
    std::ifstream in(cfg.mesh_file);
    if (!in) throw std::runtime_error("config: cannot read mesh file " + cfg.mesh_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    m = load_mesh(ss.str());
  }
  for (int r = 0; r < cfg.refine; ++r) m = refine_uniform(m);
  return m;
}

ProblemData build_data(const RunConfig& cfg, const Mesh& mesh) {
  ProblemData data;
  const Expr f = Expr::parse(cfg.f_expr);
  const Expr beta = Expr::parse(cfg.beta_expr);
  const Expr h = Expr::parse(cfg.h_expr);
  data.f = Field::Zero(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) data.f[v] = f.eval(mesh.vertices[v]);
  if (data.f.lpNorm<Eigen::Infinity>() == 0 && cfg.atoms.empty() &&
      cfg.F_expr[0].empty() && cfg.F_expr[1].empty() && cfg.F_expr[2].empty())
    data.f.resize(0);
  data.beta = BoundaryField::from_function(mesh, [&](const Vec3& x) { return beta.eval(x); });
  data.h = BoundaryField::from_function(mesh, [&](const Vec3& x) { return h.eval(x); });
  data.atoms = cfg.atoms;

  if (!cfg.F_expr[0].empty() || !cfg.F_expr[1].empty() || !cfg.F_expr[2].empty()) {
    std::array<Expr, 3> Fe;
    for (int a = 0; a < mesh.dim; ++a)
      Fe[a] = Expr::parse(cfg.F_expr[a].empty() ? "0" : cfg.F_expr[a]);
    data.F.resize(mesh.n_simplices());
    for (int s = 0; s < mesh.n_simplices(); ++s) {
      const Vec3 c = mesh.simplex_centroid(s);
      for (int a = 0; a < mesh.dim; ++a) data.F[s][a] = Fe[a].eval(c);
    }
  }

  if (!cfg.a_matrix.empty()) {
    CoeffMat A = CoeffMat::Identity();
    if (cfg.a_matrix.size() == 1) {
      for (int i = 0; i < mesh.dim; ++i) A(i, i) = cfg.a_matrix[0];
    } else if (static_cast<int>(cfg.a_matrix.size()) == mesh.dim * mesh.dim) {
      for (int i = 0; i < mesh.dim; ++i)
        for (int j = 0; j < mesh.dim; ++j) A(i, j) = cfg.a_matrix[i * mesh.dim + j];
    } else {
      throw std::runtime_error("config: a must be a scalar or a d*d matrix");
    }
    data.coeff_a.assign(mesh.n_simplices(), A);
  }
  if (cfg.lambda_bound > 0) {
    data.lambda_bound = cfg.lambda_bound;
  } else if (!data.coeff_a.empty()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        data.coeff_a[0].topLeftCorner(mesh.dim, mesh.dim));
    data.lambda_bound = std::max({1.0, es.eigenvalues().maxCoeff(),
                                  1.0 / std::max(1e-300, es.eigenvalues().minCoeff())});
  } else {
    data.lambda_bound = 1.0;
  }
  return data;
}

Nonlinearity build_nonlinearity(const RunConfig& cfg) {
  if (cfg.kind == "power") {
    if (cfg.c1 != cfg.c2)
      return Nonlinearity::custom(
          [c = cfg.c1, g = cfg.gamma](double y) { return c * std::pow(y, -g); }, cfg.gamma,
          cfg.c1, cfg.c2);
    return Nonlinearity::power(cfg.c1, cfg.gamma);
  }
  if (cfg.kind == "mixed")
    throw std::runtime_error("config: mixed nonlinearity: use build_mixed");
  throw std::runtime_error("config: unknown nonlinearity kind '" + cfg.kind + "'");
}

std::pair<Nonlinearity, Nonlinearity> build_mixed(const RunConfig& cfg) {
  if (cfg.kind != "mixed") throw std::runtime_error("config: nonlinearity kind is not mixed");
  return {Nonlinearity::power(cfg.c1, cfg.gamma1), Nonlinearity::power(cfg.c1, cfg.gamma2)};
}

}  // namespace robin
