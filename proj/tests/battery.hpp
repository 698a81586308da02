#pragma once

// Twenty bounded observables on a bounded interval, written in the unit
// coordinate s = (x - l) / (u - l). Declared sup norms are exact.

#include "ergobound/models.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

inline std::vector<ergobound::Observable> test_battery(const ergobound::StateInterval& iv) {
    using ergobound::Observable;
    const double l = iv.lower;
    const double w = iv.upper - iv.lower;
    const double pi = std::numbers::pi;
    std::vector<Observable> out;
    auto add = [&](std::string label, double sup, auto g, std::vector<double> cuts = {}) {
        Observable f;
        f.fn = [=](double x) { return g((x - l) / w); };
        f.sup_norm = sup;
        f.label = std::move(label);
        for (double c : cuts) f.breakpoints.push_back(l + c * w);
        out.push_back(std::move(f));
    };
    auto step = [](double c) { return [c](double s) { return s < c ? 1.0 : 0.0; }; };

    add("step(0.1)", 1.0, step(0.1), {0.1});
    add("step(0.5)", 1.0, step(0.5), {0.5});
    add("step(0.9)", 1.0, step(0.9), {0.9});
    add("band(0.3,0.6)", 1.0, [](double s) { return s > 0.3 && s < 0.6 ? 1.0 : 0.0; }, {0.3, 0.6});
    add("sign", 1.0, [](double s) { return s < 0.5 ? -1.0 : 1.0; }, {0.5});
    add("cos(2 pi s)", 1.0, [pi](double s) { return std::cos(2 * pi * s); });
    add("sin(2 pi s)", 1.0, [pi](double s) { return std::sin(2 * pi * s); });
    add("cos(pi s)", 1.0, [pi](double s) { return std::cos(pi * s); });
    add("sin(6 pi s)", 1.0, [pi](double s) { return std::sin(6 * pi * s); });
    add("s", 1.0, [](double s) { return s; });
    add("s^2", 1.0, [](double s) { return s * s; });
    add("s^5", 1.0, [](double s) { return std::pow(s, 5); });
    add("2s-1", 1.0, [](double s) { return 2 * s - 1; });
    add("4s(1-s)", 1.0, [](double s) { return 4 * s * (1 - s); });
    add("exp(-s)", 1.0, [](double s) { return std::exp(-s); });
    add("exp(3s)", std::exp(3.0), [](double s) { return std::exp(3 * s); });
    add("tanh(10(s-0.5))", 1.0, [](double s) { return std::tanh(10 * (s - 0.5)); });
    add("|s-0.3|", 0.7, [](double s) { return std::fabs(s - 0.3); });
    add("5 step(0.2)", 5.0, [](double s) { return s < 0.2 ? 5.0 : 0.0; }, {0.2});
    add("0.5 + 0.5 cos(4 pi s)", 1.0, [pi](double s) { return 0.5 + 0.5 * std::cos(4 * pi * s); });
    return out;
}
