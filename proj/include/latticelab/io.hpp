#pragma once

#include <string>

#include <json.hpp>

#include "latticelab/body.hpp"
#include "latticelab/lorentz.hpp"
#include "latticelab/norms.hpp"

namespace llab {

using Json = nlohmann::ordered_json;

// Stable key order, doubles with 17 significant digits, non-finite numbers as strings.
std::string dump_json(const Json& j, int indent = 2);

Json num(double v);
Json vec_json(const Vec& v);
Json vecs_json(const std::vector<Vec>& vs);
Json estimate_json(const ConstantEstimate& e);

// Numbers, or the strings "inf"/"infinity" for the exponent value infinity.
double read_number(const Json& j, const std::string& path);
Vec read_vec(const Json& j, const std::string& path);

Json norm_to_json(const NormSpec& s);
Json lattice_to_json(const NormedLattice& X);
NormPtr norm_from_json(const Json& j, std::size_t dim, const std::string& path);
NormedLattice lattice_from_json(const Json& j, const std::string& path = "");
NormedLattice load_lattice(const std::string& path);

StepFunction step_from_json(const Json& j);
SolidConvexBody body_from_json(const Json& j, const std::string& path = "");
Json body_to_json(const SolidConvexBody& B);

Json read_json_file(const std::string& path);

}  // namespace llab
