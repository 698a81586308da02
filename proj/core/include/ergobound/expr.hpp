#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <vector>

namespace ergobound {

/// A scalar expression in one variable built from a closed set of
/// primitives: constants, x, polynomials, sums, products, real powers and
/// exp/log/sqrt/sin/cos/tan. Used for custom model coefficients read from
/// model files; there is no string evaluation.
///
/// JSON grammar:
///   number                     constant
///   "x"                        the state variable
///   {"poly": [c0, c1, ...]}    c0 + c1 x + ...
///   {"add": [e, ...]}          sum
///   {"mul": [e, ...]}          product
///   {"pow": [e, p]}            e^p, p a number
///   {"neg": e}
///   {"exp": e} {"log": e} {"sqrt": e} {"sin": e} {"cos": e} {"tan": e}
class Expr {
public:
    enum class Op { constant, variable, polynomial, add, mul, pow, neg, exp, log, sqrt, sin, cos, tan };

    static Expr constant(double c);
    static Expr variable();
    static Expr polynomial(std::vector<double> coefficients);
    static Expr add(std::vector<Expr> terms);
    static Expr mul(std::vector<Expr> factors);
    static Expr pow(Expr base, double exponent);
    static Expr unary(Op op, Expr arg);

    static Expr from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    double operator()(double x) const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

} // namespace ergobound
