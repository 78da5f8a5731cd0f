#pragma once

#include "cansys/boundary_relation.hpp"
#include "cansys/canonical_system.hpp"
#include "cansys/spectral.hpp"

#include <json.hpp>

#include <string>

namespace cansys {

using Json = nlohmann::json;

/// Complex scalars are encoded as [re, im]; matrices as arrays of rows.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path);

Json system_to_json(const CanonicalSystem& s);
CanonicalSystem system_from_json(const Json& j);

Json condition_to_json(const BoundaryCondition& bc);
BoundaryCondition condition_from_json(const Json& j);

/// Abstract-relation document: either a raw Gamma graph or assembled
/// triplet-plus-coupling data over a base relation graph.
struct RelationDocument {
    BoundaryRelation relation;
};
RelationDocument relation_from_json(const Json& j);

/// Loads and parses a JSON file; errors carry the file name.
Json load_json_file(const std::string& filename);

}  // namespace cansys
