#pragma once

#include "ergobound/models.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace ergobound {

/// Builds a model from {"model": "jacobi"|"tanou"|"maoclass"|"custom", "params": {...}}.
///
/// Built-ins take jacobi {a, b, sigma2}, tanou {rho}, maoclass {gamma}.
/// Custom models take lower, upper (number, "inf" or "-inf"),
/// lower_boundary / upper_boundary ("reflecting" | "inaccessible"),
/// drift and diffusion_sq as Expr JSON, and an optional reference_point.
DiffusionSpec model_from_json(const nlohmann::json& doc);

DiffusionSpec load_model_file(const std::string& path);

} // namespace ergobound
