#include "robin/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace robin {

Json verdict_json(const EstimateVerdict& v) {
  Json j;
  j["name"] = v.name;
  j["lhs"] = v.lhs;
  j["rhs"] = v.rhs;
  j["slack"] = v.slack;
  j["allowance"] = v.allowance;
  j["pass"] = v.pass;
  j["context"] = v.context;
  return j;
}

Json solve_report_json(const SolveReport& rep) {
  Json j;
  Json stages = Json::array();
  for (const auto& st : rep.stages) {
    Json s;
    s["n"] = st.n;
    s["iterations"] = st.iterations;
    s["residual"] = st.residual;
    s["newton"] = st.newton_used;
    stages.push_back(s);
  }
  j["stages"] = stages;
  j["final_residual"] = rep.final_residual;
  j["hg_l1"] = rep.hg_l1;
  j["min_u"] = rep.min_u;
  j["monotone_ok"] = rep.monotone_ok;
  j["worst_monotonicity_violation"] = rep.worst_monotonicity_violation;
  j["uniqueness_guaranteed"] = rep.uniqueness_guaranteed;
  j["green_iterations"] = rep.green_iterations;
  return j;
}

Json fk_json(const FKEstimate& est) {
  Json j;
  j["mean"] = est.mean;
  j["stderr"] = est.stderr_;
  j["interior_mean"] = est.interior_mean;
  j["boundary_mean"] = est.boundary_mean;
  j["truncation_bound"] = est.truncation_bound;
  j["n_paths"] = est.n_paths;
  return j;
}

Json exponent_json(const ExponentTable& t) {
  Json j;
  j["p"] = t.p.str();
  j["q"] = t.q.str();
  j["r"] = t.r.str();
  j["m_interior"] = t.m_interior.str();
  j["m_grad"] = t.m_grad.str();
  j["m_boundary"] = t.m_boundary.str();
  j["in_paper_regime"] = t.in_paper_regime;
  return j;
}

std::string field_csv(const Mesh& mesh, const Field& u) {
  std::ostringstream out;
  char buf[96];
  out << "vertex";
  for (int a = 0; a < mesh.dim; ++a) out << ",x" << (a + 1);
  out << ",value\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    out << v;
    for (int a = 0; a < mesh.dim; ++a) {
      std::snprintf(buf, sizeof buf, ",%.17g", mesh.vertices[v][a]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g", u[v]);
    out << buf << "\n";
  }
  return out.str();
}

Field field_from_csv(const std::string& text, int expect_size) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("field csv: empty");
  Field u = Field::Zero(expect_size);
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int v;
    double x;
    if (!(ls >> v)) throw std::runtime_error("field csv: bad row");
    double last = 0;
    while (ls >> x) last = x;
    if (v < 0 || v >= expect_size) throw std::runtime_error("field csv: vertex out of range");
    u[v] = last;
    ++count;
  }
  if (count != expect_size) throw std::runtime_error("field csv: row count mismatch");
  return u;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace robin
