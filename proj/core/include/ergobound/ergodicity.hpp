#pragma once

#include "ergobound/models.hpp"
#include "ergobound/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

namespace ergobound {

/// Nonzero eigenvalues lambda_1 <= lambda_2 <= ... of -A with a rigorous
/// envelope on the reciprocal tail sum.
struct EigenSequence {
    /// i -> lambda_i for i >= 1.
    std::function<double(std::size_t)> eval;
    /// N -> upper bound on sum_{i > N} 1 / lambda_i.
    std::function<double(std::size_t)> tail_envelope;
    /// Optional N -> lower bound on the same tail. When present the
    /// reported eigentime includes it.
    std::function<double(std::size_t)> tail_lower{};

    /// lambda_i = (sigma2 / 2) i (i - 1 + 2 b / sigma2).
    static EigenSequence jacobi(double b, double sigma2);
    /// lambda_i = i (rho + i / 2).
    static EigenSequence tan_ou(double rho);
};

/// Eigen sequence of a built-in with known spectrum; empty otherwise.
std::optional<EigenSequence> eigen_sequence_for(const DiffusionSpec& spec);

struct EigentimeResult {
    /// Partial sum plus the lower tail bound when available.
    double value = 0.0;
    /// The true sum lies in [value, value + uncertainty].
    double uncertainty = 0.0;
    std::size_t terms = 0;
};

constexpr double kDefaultEigentimeTol = 1e-9;
constexpr std::size_t kEigentimeTermCap = 10'000'000;

/// t_av = sum_i 1 / lambda_i, truncated once the tail bracket is below tol.
/// Throws NumericalError (divergence suspected) if that needs more than
/// kEigentimeTermCap terms.
EigentimeResult eigentime(const EigenSequence& seq, double tol = kDefaultEigentimeTol);

/// Upper bound 2 t_av on the induced sup-norm of the deviation kernel.
double q_sharp_norm_bound(double t_av);

/// int_S m([x, u]) s(x) dx, evaluated in the equivalent form
/// int_l^u m(y) (S(y) - S(l)) dy. Requires a reflecting lower boundary;
/// throws InapplicableError otherwise.
quad::ImproperResult integral_condition(const DiffusionSpec& spec);

enum class Verdict { uniformly_ergodic, not_uniformly_ergodic, inconclusive };
enum class Method { none, integral_test, spectral_test, both };

const char* to_string(Verdict v);
const char* to_string(Method m);

struct ErgodicityReport {
    /// Value of the integral test; divergent flag set when it diverges.
    std::optional<quad::ImproperResult> integral;
    std::string integral_note;
    std::optional<EigentimeResult> t_av;
    bool t_av_divergent = false;
    std::string t_av_note;
    std::optional<double> q_sharp_norm_bound;
    Verdict verdict = Verdict::inconclusive;
    /// Which criteria certified finiteness.
    Method method = Method::none;
};

/// Runs the integral test when applicable and the spectral test when an
/// eigen sequence is given. Sub-criterion failures are recorded in the
/// report rather than thrown.
ErgodicityReport assess(const DiffusionSpec& spec, const std::optional<EigenSequence>& seq,
                        double tol = kDefaultEigentimeTol);

nlohmann::json to_json(const ErgodicityReport& report);

} // namespace ergobound
