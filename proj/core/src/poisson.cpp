#include "ergobound/poisson.hpp"

#include "ergobound/errors.hpp"
#include "ergobound/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ergobound {

namespace {

constexpr double kPi = std::numbers::pi;
// Weight of the Chebyshev component in the bounded-interval grid map. The
// uniform component keeps the smallest spacing near h / n so that
// finite-difference residuals stay above rounding noise.
constexpr double kClustering = 0.5;

const quad::Tolerance kCellTol{1e-15, 1e-12};

// Integral over [a, b] split at breakpoints inside; flagged ends are improper.
double segment_integral(const quad::Integrand& g, double a, double b, quad::Ends ends,
                        const std::vector<double>& breakpoints) {
    std::vector<double> cuts;
    for (double p : breakpoints) {
        if (p > a && p < b) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const bool lo_open = ends == quad::Ends::lower || ends == quad::Ends::both;
    const bool hi_open = ends == quad::Ends::upper || ends == quad::Ends::both;
    std::vector<double> pts;
    pts.push_back(a);
    pts.insert(pts.end(), cuts.begin(), cuts.end());
    pts.push_back(b);

    quad::ExhaustionOptions opts;
    opts.piece_tol = kCellTol;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const bool first = i == 0;
        const bool last = i + 2 == pts.size();
        quad::Ends e = quad::Ends::none;
        if (first && lo_open && last && hi_open) {
            e = quad::Ends::both;
        } else if (first && lo_open) {
            e = quad::Ends::lower;
        } else if (last && hi_open) {
            e = quad::Ends::upper;
        }
        if (e == quad::Ends::none) {
            total += quad::integrate(g, pts[i], pts[i + 1], kCellTol, 8000);
        } else {
            total += quad::integrate_improper_value(g, pts[i], pts[i + 1], opts, e);
        }
    }
    return total;
}

// Fornberg finite-difference weights for derivatives 0..2 at z.
template <std::size_t N>
std::array<std::array<double, N>, 3> fd_weights(double z, const std::array<double, N>& x) {
    std::array<std::array<double, N>, 3> c{};
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 2);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

void check_grid(const StateInterval& iv, const GridFunction& gf) {
    if (gf.grid.size() != gf.values.size()) throw DomainError("grid function: size mismatch");
    if (gf.grid.size() < kMinGridSize) throw DomainError("grid function needs at least 16 points");
    for (std::size_t i = 0; i < gf.grid.size(); ++i) {
        if (!iv.contains(gf.grid[i])) throw DomainError("grid points must lie inside the open interval");
        if (i > 0 && !(gf.grid[i] > gf.grid[i - 1])) throw DomainError("grid must be strictly increasing");
    }
}

} // namespace

PoissonGrid make_grid(const StateInterval& iv, std::size_t n) {
    if (n < kMinGridSize) throw DomainError("Poisson grid needs at least 16 points");
    PoissonGrid g;
    g.nodes.reserve(n);
    g.weights.reserve(n);
    const double dxi = 2.0 / static_cast<double>(n);
    const bool lo_fin = std::isfinite(iv.lower);
    const bool hi_fin = std::isfinite(iv.upper);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = -1.0 + (static_cast<double>(i) + 0.5) * dxi;
        double x = 0.0;
        double dx = 0.0;
        if (lo_fin && hi_fin) {
            const double c = 0.5 * (iv.lower + iv.upper);
            const double h = 0.5 * (iv.upper - iv.lower);
            x = c + h * ((1.0 - kClustering) * xi + kClustering * std::sin(0.5 * kPi * xi));
            dx = h * ((1.0 - kClustering) + kClustering * 0.5 * kPi * std::cos(0.5 * kPi * xi));
        } else if (lo_fin) {
            const double v = 0.25 * kPi * (xi + 1.0);
            x = iv.lower + std::tan(v);
            dx = 0.25 * kPi / (std::cos(v) * std::cos(v));
        } else if (hi_fin) {
            const double v = 0.25 * kPi * (1.0 - xi);
            x = iv.upper - std::tan(v);
            dx = 0.25 * kPi / (std::cos(v) * std::cos(v));
        } else {
            const double v = 0.5 * kPi * xi;
            x = std::tan(v);
            dx = 0.5 * kPi / (std::cos(v) * std::cos(v));
        }
        g.nodes.push_back(x);
        g.weights.push_back(dx * dxi);
    }
    return g;
}

GridFunction solve_poisson(const DiffusionSpec& spec, const Observable& f, std::size_t n) {
    const StateInterval& iv = spec.interval();
    const PoissonGrid pg = make_grid(iv, n);
    const std::vector<double>& x = pg.nodes;

    const StationaryLaw law(spec);
    const double pi_f = pi_integral(law, f);

    auto gm = [&](double z) { return (f(z) - pi_f) * speed_density(spec, z); };
    const auto& breaks = f.breakpoints;

    std::vector<double> cell_gm(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cell_gm[i] = segment_integral(gm, x[i], x[i + 1], quad::Ends::none, breaks);
    }

    // G is accumulated from the nearer endpoint so that both halves carry
    // only local rounding.
    const std::size_t half = n / 2;
    std::vector<double> g_node(n);
    g_node[0] = segment_integral(gm, iv.lower, x[0], quad::Ends::lower, breaks);
    for (std::size_t i = 0; i < half; ++i) g_node[i + 1] = g_node[i] + cell_gm[i];
    g_node[n - 1] = -segment_integral(gm, x[n - 1], iv.upper, quad::Ends::upper, breaks);
    for (std::size_t i = n - 1; i > half + 1; --i) g_node[i - 1] = g_node[i] - cell_gm[i - 1];

    std::vector<double> values(n);
    values[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = x[i];
        const double b = x[i + 1];
        quad::Integrand sg;
        if (i < half) {
            const double g0 = g_node[i];
            sg = [&, g0, a](double y) {
                const double inner = segment_integral(gm, a, y, quad::Ends::none, breaks);
                return scale_density(spec, y) * (g0 + inner);
            };
        } else {
            const double g1 = g_node[i + 1];
            sg = [&, g1, b](double y) {
                const double inner = segment_integral(gm, y, b, quad::Ends::none, breaks);
                return scale_density(spec, y) * (g1 - inner);
            };
        }
        values[i + 1] = values[i] - segment_integral(sg, a, b, quad::Ends::none, breaks);
    }

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wp = pg.weights[i] * law.density(x[i]);
        num += wp * values[i];
        den += wp;
    }
    const double shift = num / den;
    for (double& v : values) v -= shift;

    return GridFunction{x, std::move(values), spec.name()};
}

GeneratorResult apply_generator(const DiffusionSpec& spec, const GridFunction& gf) {
    check_grid(spec.interval(), gf);
    const std::size_t n = gf.size();
    const auto& x = gf.grid;
    const auto& v = gf.values;

    GeneratorResult out;
    out.values.grid = x;
    out.values.spec_id = gf.spec_id;
    out.values.values.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        double d1 = 0.0;
        double d2 = 0.0;
        if (i == 0 || i + 1 == n) {
            const std::size_t s = i == 0 ? 0 : n - 4;
            const std::array<double, 4> nodes{x[s], x[s + 1], x[s + 2], x[s + 3]};
            const auto w = fd_weights(x[i], nodes);
            for (std::size_t k = 0; k < 4; ++k) {
                d1 += w[1][k] * v[s + k];
                d2 += w[2][k] * v[s + k];
            }
        } else {
            const std::array<double, 3> nodes{x[i - 1], x[i], x[i + 1]};
            const auto w = fd_weights(x[i], nodes);
            for (std::size_t k = 0; k < 3; ++k) {
                d1 += w[1][k] * v[i - 1 + k];
                d2 += w[2][k] * v[i - 1 + k];
            }
        }
        out.values.values[i] = spec.drift(x[i]) * d1 + 0.5 * spec.diffusion_sq(x[i]) * d2;
    }

    std::size_t rough = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double s0 = spec.diffusion_sq(x[i]);
        const double s1 = spec.diffusion_sq(x[i + 1]);
        const double m0 = spec.drift(x[i]);
        const double m1 = spec.drift(x[i + 1]);
        if (std::fabs(s1 - s0) > 0.5 * std::max(s0, s1) ||
            std::fabs(m1 - m0) > 0.5 * (std::fabs(m0) + std::fabs(m1)) + 1.0) {
            ++rough;
        }
    }
    if (rough > 0) {
        std::ostringstream msg;
        msg << rough << " grid cell(s) are coarse relative to coefficient variation";
        out.warnings.push_back(msg.str());
    }
    return out;
}

double sup_norm(const GridFunction& gf) {
    double m = 0.0;
    for (double v : gf.values) m = std::max(m, std::fabs(v));
    return m;
}

void write_csv(std::ostream& os, const GridFunction& gf) {
    os << "x,value\n";
    for (std::size_t i = 0; i < gf.size(); ++i) {
        os << format_double(gf.grid[i]) << ',' << format_double(gf.values[i]) << '\n';
    }
}

} // namespace ergobound
