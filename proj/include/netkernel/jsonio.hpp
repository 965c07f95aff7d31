#pragma once

#include <json.hpp>

#include "netkernel/linsolve.hpp"
#include "netkernel/model.hpp"

namespace netkernel {

// Rejects keys outside `allowed`; every config object is schema-checked.
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& context);

// Basis schema: {kind, dim, singular_cutoff, functions: [{kind, exponent,
// support, frequency, knots, coefs}]}. Infinite support bounds serialize as
// the string "inf".
nlohmann::json basis_to_json(const BasisSpec& basis);
BasisSpec basis_from_json(const nlohmann::json& j);

nlohmann::json system_to_json(const SystemSpec& spec);
SystemSpec system_from_json(const nlohmann::json& j);

nlohmann::json regularizer_to_json(const Regularizer& reg);
Regularizer regularizer_from_json(const nlohmann::json& j);

}  // namespace netkernel
