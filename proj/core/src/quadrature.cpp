#include "ergobound/quadrature.hpp"

#include "ergobound/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace ergobound::quad {

namespace {

// Kronrod abscissae; odd indices are shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

bool operator<(const Segment& lhs, const Segment& rhs) { return lhs.error < rhs.error; }

Segment gk15(const Integrand& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::fabs(half);

    const double fc = f(center);
    double gauss = fc * kWg[3];
    double kronrod = fc * kWgk[7];
    double abs_sum = std::fabs(kronrod);

    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double v1 = f(center - dx);
        const double v2 = f(center + dx);
        f1[j] = v1;
        f2[j] = v2;
        kronrod += kWgk[j] * (v1 + v2);
        abs_sum += kWgk[j] * (std::fabs(v1) + std::fabs(v2));
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (v1 + v2);
        }
    }

    const double mean = kronrod * 0.5;
    double asc = kWgk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }

    const double result = kronrod * half;
    abs_sum *= abs_half;
    asc *= abs_half;
    double err = std::fabs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    if (abs_sum > tiny / (50.0 * eps)) {
        err = std::max(50.0 * eps * abs_sum, err);
    }
    return {a, b, result, err};
}

double allowed(const Tolerance& tol, double value) {
    return std::max(tol.abs, tol.rel * std::fabs(value));
}

} // namespace

Result gauss_kronrod(const Integrand& f, double a, double b, Tolerance tol, int max_intervals) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("gauss_kronrod: limits must be finite");
    }
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    const double sign = a < b ? 1.0 : -1.0;
    if (a > b) {
        std::swap(a, b);
    }

    std::vector<Segment> heap;
    heap.reserve(static_cast<std::size_t>(std::max(16, max_intervals)));
    heap.push_back(gk15(f, a, b));
    out.evaluations = 15;

    double total = heap.front().value;
    double total_err = heap.front().error;

    while (total_err > allowed(tol, total) && static_cast<int>(heap.size()) < max_intervals) {
        std::pop_heap(heap.begin(), heap.end());
        const Segment worst = heap.back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        heap.pop_back();
        const Segment left = gk15(f, worst.a, mid);
        const Segment right = gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }

    // Re-sum to shed drift from the incremental updates.
    double sum = 0.0;
    double comp = 0.0;
    double err = 0.0;
    for (const auto& s : heap) {
        const double y = s.value - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        err += s.error;
    }
    out.value = sign * sum;
    out.abs_error = err;
    out.intervals = static_cast<int>(heap.size());
    out.converged = std::isfinite(sum) && err <= allowed(tol, sum);
    return out;
}

double integrate(const Integrand& f, double a, double b, Tolerance tol, int max_intervals) {
    const Result r = gauss_kronrod(f, a, b, tol, max_intervals);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b << "]: value " << r.value
            << ", error estimate " << r.abs_error << " after " << r.intervals << " intervals";
        throw NumericalError(msg.str());
    }
    return r.value;
}

namespace {

struct SideResult {
    double sum = 0.0;
    double error = 0.0;
    double tail = 0.0;
    int rounds = 0;
    bool divergent = false;
};

// Piece k of an exhaustion sequence; returns false once the pieces can no
// longer be resolved in floating point.
using PieceFn = std::function<bool(int, double&, double&)>;

SideResult exhaust(const Integrand& f, const PieceFn& piece, int max_rounds, double base,
                   const ExhaustionOptions& opts) {
    SideResult side;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double prev = nan;
    double ratio = nan;
    double prev_ratio = nan;
    double prev_prev_ratio = nan;
    int nonshrinking = 0;
    double last = nan;

    auto target = [&] { return 0.5 * allowed(opts.tol, base + side.sum); };

    for (int k = 0; k < max_rounds; ++k) {
        double a = 0.0;
        double b = 0.0;
        if (!piece(k, a, b)) {
            break;
        }
        const Result r = gauss_kronrod(f, a, b, opts.piece_tol);
        if (!std::isfinite(r.value)) {
            side.divergent = true;
            side.rounds = k + 1;
            return side;
        }
        const double delta = r.value;
        side.sum += delta;
        side.error += r.abs_error;
        side.rounds = k + 1;
        last = delta;

        if (k == 0) {
            prev = delta;
            continue;
        }
        const double tgt = target();
        if (delta == 0.0 && prev == 0.0) {
            return side;
        }
        if (std::fabs(delta) <= 1e-3 * tgt && std::fabs(prev) <= 1e-3 * tgt) {
            return side;
        }
        if (prev != 0.0) {
            prev_prev_ratio = prev_ratio;
            prev_ratio = ratio;
            ratio = delta / prev;
            if (!std::isfinite(ratio) || ratio >= opts.divergence_ratio) {
                ++nonshrinking;
            } else {
                nonshrinking = 0;
            }
            if (nonshrinking >= opts.divergence_rounds) {
                side.divergent = true;
                return side;
            }
            if (ratio > -1.0 && ratio < opts.divergence_ratio) {
                const double tail = delta * ratio / (1.0 - ratio);
                if (std::fabs(tail) <= 1e-2 * tgt) {
                    side.sum += tail;
                    side.tail = tail;
                    side.error += std::fabs(tail);
                    return side;
                }
                if (std::isfinite(prev_prev_ratio) &&
                    std::fabs(ratio - prev_ratio) <= opts.ratio_stability &&
                    std::fabs(prev_ratio - prev_prev_ratio) <= opts.ratio_stability) {
                    side.sum += tail;
                    side.tail = tail;
                    side.error += std::fabs(delta) * std::fabs(ratio - prev_ratio) /
                                  ((1.0 - ratio) * (1.0 - ratio));
                    return side;
                }
            }
        } else {
            ratio = nan;
        }
        prev = delta;
    }

    // Out of rounds or out of floating-point resolution.
    if (std::isfinite(ratio) && ratio > -1.0 && ratio < opts.divergence_ratio) {
        const double tail = last * ratio / (1.0 - ratio);
        side.sum += tail;
        side.tail = tail;
        side.error += std::fabs(tail);
        return side;
    }
    if (std::isfinite(last) && std::fabs(last) <= 1e-3 * target()) {
        return side;
    }
    side.divergent = true;
    return side;
}

} // namespace

ImproperResult integrate_improper(const Integrand& f, double lower, double upper,
                                  const ExhaustionOptions& opts, Ends ends) {
    if (!(lower < upper)) {
        throw DomainError("integrate_improper: require lower < upper");
    }
    const bool lower_open = ends == Ends::lower || ends == Ends::both;
    const bool upper_open = ends == Ends::upper || ends == Ends::both;
    const bool lower_inf = std::isinf(lower);
    const bool upper_inf = std::isinf(upper);
    if ((lower_inf && !lower_open) || (upper_inf && !upper_open)) {
        throw DomainError("integrate_improper: an infinite endpoint must be flagged for exhaustion");
    }
    // With one infinite end, pieces double their distance from the finite
    // end. Starting below |finite end| would put the first rounds where the
    // integrand is nearly flat, which looks like linear growth.
    double scale = opts.scale;
    if (lower_inf != upper_inf) scale = std::max(scale, std::fabs(lower_inf ? upper : lower));

    // Core segment [c0, c1].
    double c0 = lower;
    double c1 = upper;
    if (!lower_inf && !upper_inf) {
        const double w = upper - lower;
        if (lower_open) c0 = lower + 0.25 * w;
        if (upper_open) c1 = upper - 0.25 * w;
    } else if (!lower_inf) {
        c0 = lower_open ? lower + 0.25 * scale : lower;
        c1 = lower + scale;
    } else if (!upper_inf) {
        c1 = upper_open ? upper - 0.25 * scale : upper;
        c0 = upper - scale;
    } else {
        c0 = -scale;
        c1 = scale;
    }

    ImproperResult out;
    const Result core = gauss_kronrod(f, c0, c1, opts.piece_tol);
    if (!std::isfinite(core.value)) {
        out.divergent = true;
        return out;
    }
    double total = core.value;
    double error = core.abs_error;

    auto run_side = [&](bool at_lower) {
        PieceFn piece;
        int rounds = opts.max_rounds_finite;
        if (at_lower && !lower_inf) {
            const double d0 = c0 - lower;
            piece = [=](int k, double& a, double& b) {
                const double hi = lower + std::ldexp(d0, -k);
                const double lo = lower + std::ldexp(d0, -k - 1);
                a = lo;
                b = hi;
                return lo > lower && lo < hi;
            };
        } else if (at_lower) {
            rounds = opts.max_rounds_infinite;
            const double anchor = c1;
            const double d0 = c1 - c0;
            piece = [=](int k, double& a, double& b) {
                a = anchor - std::ldexp(d0, k + 1);
                b = anchor - std::ldexp(d0, k);
                return std::isfinite(a) && a < b;
            };
        } else if (!upper_inf) {
            const double d0 = upper - c1;
            piece = [=](int k, double& a, double& b) {
                const double lo = upper - std::ldexp(d0, -k);
                const double hi = upper - std::ldexp(d0, -k - 1);
                a = lo;
                b = hi;
                return hi < upper && lo < hi;
            };
        } else {
            rounds = opts.max_rounds_infinite;
            const double anchor = c0;
            const double d0 = c1 - c0;
            piece = [=](int k, double& a, double& b) {
                a = anchor + std::ldexp(d0, k);
                b = anchor + std::ldexp(d0, k + 1);
                return std::isfinite(b) && a < b;
            };
        }
        return exhaust(f, piece, rounds, total, opts);
    };

    if (lower_open) {
        const SideResult side = run_side(true);
        out.rounds = std::max(out.rounds, side.rounds);
        if (side.divergent) {
            out.divergent = true;
            return out;
        }
        total += side.sum;
        error += side.error;
        out.extrapolated_tail += side.tail;
    }
    if (upper_open) {
        const SideResult side = run_side(false);
        out.rounds = std::max(out.rounds, side.rounds);
        if (side.divergent) {
            out.divergent = true;
            return out;
        }
        total += side.sum;
        error += side.error;
        out.extrapolated_tail += side.tail;
    }
    out.value = total;
    out.abs_error = error;
    return out;
}

double integrate_improper_value(const Integrand& f, double lower, double upper,
                                const ExhaustionOptions& opts, Ends ends) {
    const ImproperResult r = integrate_improper(f, lower, upper, opts, ends);
    if (r.divergent) {
        std::ostringstream msg;
        msg << "improper integral over (" << lower << ", " << upper << ") diverges after "
            << r.rounds << " exhaustion rounds";
        throw NumericalError(msg.str());
    }
    return r.value;
}

} // namespace ergobound::quad
