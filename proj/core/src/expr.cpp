#include "ergobound/expr.hpp"

#include "ergobound/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ergobound {

struct Expr::Node {
    Op op;
    double value = 0.0;
    std::vector<double> coefficients;
    std::vector<Expr> children;
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double c) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = c;
    return Expr(std::move(n));
}

Expr Expr::variable() {
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    return Expr(std::move(n));
}

Expr Expr::polynomial(std::vector<double> coefficients) {
    if (coefficients.empty()) {
        throw DomainError("polynomial needs at least one coefficient");
    }
    auto n = std::make_shared<Node>();
    n->op = Op::polynomial;
    n->coefficients = std::move(coefficients);
    return Expr(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
    if (terms.empty()) {
        throw DomainError("add needs at least one term");
    }
    auto n = std::make_shared<Node>();
    n->op = Op::add;
    n->children = std::move(terms);
    return Expr(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
    if (factors.empty()) {
        throw DomainError("mul needs at least one factor");
    }
    auto n = std::make_shared<Node>();
    n->op = Op::mul;
    n->children = std::move(factors);
    return Expr(std::move(n));
}

Expr Expr::pow(Expr base, double exponent) {
    auto n = std::make_shared<Node>();
    n->op = Op::pow;
    n->value = exponent;
    n->children.push_back(std::move(base));
    return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
    switch (op) {
    case Op::neg:
    case Op::exp:
    case Op::log:
    case Op::sqrt:
    case Op::sin:
    case Op::cos:
    case Op::tan:
        break;
    default:
        throw DomainError("Expr::unary: not a unary operator");
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    n->children.push_back(std::move(arg));
    return Expr(std::move(n));
}

double Expr::operator()(double x) const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::constant:
        return n.value;
    case Op::variable:
        return x;
    case Op::polynomial: {
        double acc = 0.0;
        for (auto it = n.coefficients.rbegin(); it != n.coefficients.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }
    case Op::add: {
        double acc = 0.0;
        for (const auto& c : n.children) acc += c(x);
        return acc;
    }
    case Op::mul: {
        double acc = 1.0;
        for (const auto& c : n.children) acc *= c(x);
        return acc;
    }
    case Op::pow:
        return std::pow(n.children[0](x), n.value);
    case Op::neg:
        return -n.children[0](x);
    case Op::exp:
        return std::exp(n.children[0](x));
    case Op::log:
        return std::log(n.children[0](x));
    case Op::sqrt:
        return std::sqrt(n.children[0](x));
    case Op::sin:
        return std::sin(n.children[0](x));
    case Op::cos:
        return std::cos(n.children[0](x));
    case Op::tan:
        return std::tan(n.children[0](x));
    }
    return std::nan("");
}

namespace {

constexpr std::pair<const char*, Expr::Op> kUnary[] = {
    {"neg", Expr::Op::neg}, {"exp", Expr::Op::exp}, {"log", Expr::Op::log},
    {"sqrt", Expr::Op::sqrt}, {"sin", Expr::Op::sin}, {"cos", Expr::Op::cos},
    {"tan", Expr::Op::tan},
};

std::vector<Expr> children_from(const nlohmann::json& arr, const std::string& key) {
    if (!arr.is_array() || arr.empty()) {
        throw DomainError("expression '" + key + "' expects a non-empty array");
    }
    std::vector<Expr> out;
    out.reserve(arr.size());
    for (const auto& e : arr) out.push_back(Expr::from_json(e));
    return out;
}

} // namespace

Expr Expr::from_json(const nlohmann::json& j) {
    if (j.is_number()) {
        return constant(j.get<double>());
    }
    if (j.is_string()) {
        if (j.get<std::string>() == "x") return variable();
        throw DomainError("unknown expression symbol '" + j.get<std::string>() + "'");
    }
    if (!j.is_object() || j.size() != 1) {
        throw DomainError("expression object must have exactly one operator key");
    }
    const auto it = j.begin();
    const std::string key = it.key();
    const nlohmann::json& arg = it.value();
    if (key == "poly") {
        if (!arg.is_array()) throw DomainError("'poly' expects an array of coefficients");
        return polynomial(arg.get<std::vector<double>>());
    }
    if (key == "add") return add(children_from(arg, key));
    if (key == "mul") return mul(children_from(arg, key));
    if (key == "pow") {
        if (!arg.is_array() || arg.size() != 2 || !arg[1].is_number()) {
            throw DomainError("'pow' expects [expression, number]");
        }
        return pow(from_json(arg[0]), arg[1].get<double>());
    }
    for (const auto& [name, op] : kUnary) {
        if (key == name) return unary(op, from_json(arg));
    }
    throw DomainError("unknown expression operator '" + key + "'");
}

nlohmann::json Expr::to_json() const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::constant:
        return n.value;
    case Op::variable:
        return "x";
    case Op::polynomial:
        return {{"poly", n.coefficients}};
    case Op::add:
    case Op::mul: {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : n.children) arr.push_back(c.to_json());
        return {{n.op == Op::add ? "add" : "mul", arr}};
    }
    case Op::pow:
        return {{"pow", nlohmann::json::array({n.children[0].to_json(), n.value})}};
    default:
        break;
    }
    for (const auto& [name, op] : kUnary) {
        if (op == n.op) return {{name, n.children[0].to_json()}};
    }
    return nullptr;
}

} // namespace ergobound
