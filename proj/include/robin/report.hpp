#pragma once

#include <json.hpp>
#include <string>

#include "robin/estimates.hpp"
#include "robin/solver.hpp"
#include "robin/stochastic.hpp"

namespace robin {

using Json = nlohmann::ordered_json;

Json verdict_json(const EstimateVerdict& v);
Json solve_report_json(const SolveReport& rep);  // timings intentionally omitted
Json fk_json(const FKEstimate& est);
Json exponent_json(const ExponentTable& t);

// CSV of (vertex, coordinates..., value) with 17 significant digits
std::string field_csv(const Mesh& mesh, const Field& u);
Field field_from_csv(const std::string& text, int expect_size);

// write-to-temp-then-rename so partial outputs never appear
void atomic_write(const std::string& path, const std::string& content);

}  // namespace robin
