#include "ergobound/model_io.hpp"

#include "ergobound/errors.hpp"
#include "ergobound/expr.hpp"

#include <fstream>
#include <limits>

namespace ergobound {

namespace {

double endpoint(const nlohmann::json& v, const char* key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw DomainError(std::string("custom model: '") + key + "' must be a number, \"inf\" or \"-inf\"");
}

Boundary boundary(const nlohmann::json& params, const char* key) {
    if (!params.contains(key)) return Boundary::inaccessible;
    const auto s = params.at(key).get<std::string>();
    if (s == "reflecting") return Boundary::reflecting;
    if (s == "inaccessible") return Boundary::inaccessible;
    throw DomainError(std::string("custom model: '") + key + "' must be \"reflecting\" or \"inaccessible\"");
}

double number(const nlohmann::json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_number()) {
        throw DomainError(std::string("model parameter '") + key + "' is required and must be numeric");
    }
    return params.at(key).get<double>();
}

} // namespace

DiffusionSpec model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("model") || !doc.at("model").is_string()) {
        throw DomainError("model document needs a string 'model' field");
    }
    const auto kind = doc.at("model").get<std::string>();
    const nlohmann::json params = doc.value("params", nlohmann::json::object());
    if (!params.is_object()) throw DomainError("'params' must be an object");

    if (kind == "jacobi") {
        return DiffusionSpec::jacobi(number(params, "a"), number(params, "b"), number(params, "sigma2"));
    }
    if (kind == "tanou") {
        return DiffusionSpec::tan_ou(number(params, "rho"));
    }
    if (kind == "maoclass") {
        return DiffusionSpec::mao_class(number(params, "gamma"));
    }
    if (kind == "custom") {
        for (const char* key : {"lower", "upper", "drift", "diffusion_sq"}) {
            if (!params.contains(key)) {
                throw DomainError(std::string("custom model: missing '") + key + "'");
            }
        }
        StateInterval iv{endpoint(params.at("lower"), "lower"), endpoint(params.at("upper"), "upper"),
                         boundary(params, "lower_boundary"), boundary(params, "upper_boundary")};
        const Expr drift = Expr::from_json(params.at("drift"));
        const Expr diff = Expr::from_json(params.at("diffusion_sq"));
        std::optional<double> x0;
        if (params.contains("reference_point")) x0 = number(params, "reference_point");
        const std::string name = params.value("name", std::string("custom"));
        return DiffusionSpec(iv, drift, diff, x0, name);
    }
    throw DomainError("unknown model '" + kind + "'");
}

DiffusionSpec load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    return model_from_json(doc);
}

} // namespace ergobound
