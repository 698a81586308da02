#include "ergobound/ergodicity.hpp"

#include "ergobound/errors.hpp"

#include <cmath>
#include <sstream>

namespace ergobound {

namespace {

// Neumaier-compensated left-to-right accumulator.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// int_N^inf dx / (x (x + c)) for N >= 1, c > -1.
double reciprocal_quadratic_tail(double n, double c) {
    if (std::fabs(c) < 1e-12) return 1.0 / n;
    return std::log1p(c / n) / c;
}

} // namespace

EigenSequence EigenSequence::jacobi(double b, double sigma2) {
    if (!(b > 0.0) || !(sigma2 > 0.0)) throw DomainError("Jacobi spectrum needs b > 0, sigma2 > 0");
    const double c = 2.0 * b / sigma2 - 1.0;
    const double k = 2.0 / sigma2;
    EigenSequence seq;
    seq.eval = [sigma2, c](std::size_t i) {
        const double x = static_cast<double>(i);
        return 0.5 * sigma2 * x * (x + c);
    };
    // 1/lambda is decreasing in i, so the integral from N bounds the tail
    // above and the integral from N + 1 bounds it below.
    seq.tail_envelope = [k, c](std::size_t n) { return k * reciprocal_quadratic_tail(static_cast<double>(n), c); };
    seq.tail_lower = [k, c](std::size_t n) { return k * reciprocal_quadratic_tail(static_cast<double>(n + 1), c); };
    return seq;
}

EigenSequence EigenSequence::tan_ou(double rho) {
    if (!(rho > 0.0)) throw DomainError("tan-OU spectrum needs rho > 0");
    EigenSequence seq;
    seq.eval = [rho](std::size_t i) {
        const double x = static_cast<double>(i);
        return x * (rho + 0.5 * x);
    };
    // 1/(i (rho + i/2)) = 2/(i (i + 2 rho)) <= 2/i^2.
    seq.tail_envelope = [](std::size_t n) { return 2.0 / static_cast<double>(n); };
    seq.tail_lower = [rho](std::size_t n) {
        return 2.0 * reciprocal_quadratic_tail(static_cast<double>(n + 1), 2.0 * rho);
    };
    return seq;
}

std::optional<EigenSequence> eigen_sequence_for(const DiffusionSpec& spec) {
    if (const auto* j = std::get_if<JacobiParams>(&spec.closed_form())) {
        return EigenSequence::jacobi(j->b, j->sigma2);
    }
    if (const auto* t = std::get_if<TanOUParams>(&spec.closed_form())) {
        return EigenSequence::tan_ou(t->rho);
    }
    return std::nullopt;
}

EigentimeResult eigentime(const EigenSequence& seq, double tol) {
    if (!(tol > 0.0)) throw DomainError("eigentime tolerance must be positive");
    if (!seq.eval || !seq.tail_envelope) throw DomainError("eigen sequence is incomplete");

    const bool bracketed = static_cast<bool>(seq.tail_lower);
    auto gap = [&](std::size_t n) {
        return bracketed ? seq.tail_envelope(n) - seq.tail_lower(n) : seq.tail_envelope(n);
    };

    CompensatedSum partial;
    double prev_lambda = 0.0;
    for (std::size_t i = 1; i <= kEigentimeTermCap; ++i) {
        const double lambda = seq.eval(i);
        if (!(lambda > 0.0) || lambda < prev_lambda) {
            std::ostringstream msg;
            msg << "eigenvalues must be positive and nondecreasing; lambda_" << i << " = " << lambda;
            throw DomainError(msg.str());
        }
        prev_lambda = lambda;
        partial.add(1.0 / lambda);
        const double g = gap(i);
        if (g < tol) {
            EigentimeResult out;
            out.terms = i;
            out.uncertainty = g;
            out.value = partial.value() + (bracketed ? seq.tail_lower(i) : 0.0);
            return out;
        }
    }
    std::ostringstream msg;
    msg << "eigentime: tail envelope still above " << tol << " after " << kEigentimeTermCap
        << " terms; divergence suspected";
    throw NumericalError(msg.str());
}

double q_sharp_norm_bound(double t_av) {
    if (!(t_av > 0.0) || !std::isfinite(t_av)) throw DomainError("t_av must be positive and finite");
    return 2.0 * t_av;
}

quad::ImproperResult integral_condition(const DiffusionSpec& spec) {
    const StateInterval& iv = spec.interval();
    if (iv.lower_boundary != Boundary::reflecting || !std::isfinite(iv.lower)) {
        throw InapplicableError("integral criterion inapplicable: it requires a reflecting lower boundary");
    }
    const double l = iv.lower;

    // m(y) * int_l^y s(z) dz = (2 / sigma^2(y)) int_l^y exp(log s(z) - log s(y)) dz
    auto integrand = [&](double y) {
        const double log_sy = log_scale_density(spec, y);
        const double inner = quad::integrate(
            [&](double z) { return std::exp(log_scale_density(spec, z) - log_sy); }, l, y,
            quad::Tolerance{1e-14, 1e-11}, 8000);
        return 2.0 / spec.diffusion_sq(y) * inner;
    };
    quad::ExhaustionOptions opts;
    opts.scale = std::isfinite(iv.upper) ? 1.0 : std::max(1.0, spec.reference_point() - l);
    return quad::integrate_improper(integrand, l, iv.upper, opts, quad::Ends::both);
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::uniformly_ergodic: return "uniformly_ergodic";
    case Verdict::not_uniformly_ergodic: return "not_uniformly_ergodic";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

const char* to_string(Method m) {
    switch (m) {
    case Method::none: return "none";
    case Method::integral_test: return "integral_test";
    case Method::spectral_test: return "spectral_test";
    case Method::both: return "both";
    }
    return "none";
}

ErgodicityReport assess(const DiffusionSpec& spec, const std::optional<EigenSequence>& seq, double tol) {
    ErgodicityReport report;
    bool integral_finite = false;
    bool integral_divergent = false;
    try {
        report.integral = integral_condition(spec);
        integral_divergent = report.integral->divergent;
        integral_finite = !integral_divergent;
    } catch (const InapplicableError& e) {
        report.integral_note = e.what();
    } catch (const std::exception& e) {
        report.integral_note = std::string("integral criterion failed: ") + e.what();
    }

    bool spectral_finite = false;
    if (seq) {
        try {
            report.t_av = eigentime(*seq, tol);
            spectral_finite = true;
            report.q_sharp_norm_bound = q_sharp_norm_bound(report.t_av->value);
        } catch (const NumericalError& e) {
            report.t_av_divergent = true;
            report.t_av_note = e.what();
        } catch (const std::exception& e) {
            report.t_av_note = std::string("spectral criterion failed: ") + e.what();
        }
    } else {
        report.t_av_note = "no eigenvalue sequence supplied";
    }

    if (integral_finite && spectral_finite) {
        report.method = Method::both;
    } else if (integral_finite) {
        report.method = Method::integral_test;
    } else if (spectral_finite) {
        report.method = Method::spectral_test;
    }

    if (integral_finite || spectral_finite) {
        report.verdict = Verdict::uniformly_ergodic;
    } else if (integral_divergent || report.t_av_divergent) {
        report.verdict = Verdict::not_uniformly_ergodic;
    } else {
        report.verdict = Verdict::inconclusive;
    }
    return report;
}

nlohmann::json to_json(const ErgodicityReport& report) {
    nlohmann::json j;
    if (report.integral) {
        if (report.integral->divergent) {
            j["integral_value"] = {{"divergent", true}, {"rounds", report.integral->rounds}};
        } else {
            j["integral_value"] = report.integral->value;
            j["integral_error"] = report.integral->abs_error;
        }
    } else {
        j["integral_value"] = nullptr;
    }
    if (!report.integral_note.empty()) j["integral_note"] = report.integral_note;

    if (report.t_av) {
        j["t_av"] = report.t_av->value;
        j["t_av_uncertainty"] = report.t_av->uncertainty;
        j["t_av_terms"] = report.t_av->terms;
    } else if (report.t_av_divergent) {
        j["t_av"] = {{"divergent", true}, {"rounds", kEigentimeTermCap}};
    } else {
        j["t_av"] = nullptr;
    }
    if (!report.t_av_note.empty()) j["t_av_note"] = report.t_av_note;

    j["q_sharp_norm_bound"] = report.q_sharp_norm_bound ? nlohmann::json(*report.q_sharp_norm_bound)
                                                        : nlohmann::json(nullptr);
    j["verdict"] = to_string(report.verdict);
    j["method"] = to_string(report.method);
    return j;
}

} // namespace ergobound
