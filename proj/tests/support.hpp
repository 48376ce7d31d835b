#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bubblepair/integrator.hpp"
#include "bubblepair/model.hpp"

namespace support {

using namespace bubblepair;

inline PhysicalParams params(double pac, double d_ratio, double eps) {
    PhysicalParams p;
    p.p_ac = pac;
    p.eps = eps;
    p.set_d_ratio(d_ratio);
    return p;
}

/// Fixed-step Cash-Karp integration of the model flow over `span` in `n` steps.
inline State fixed_steps(const Model& m, const State& x0, double span, int n) {
    auto rhs = [&](const Vec<5>& a, Vec<5>& out) { out = m.vector_field(State::from_array(a)).to_array(); };
    Vec<5> x = x0.to_array(), k1, y, err;
    const double h = span / n;
    for (int i = 0; i < n; ++i) {
        rhs(x, k1);
        cash_karp_step<5>(rhs, x, k1, h, y, err);
        x = y;
    }
    return State::from_array(x);
}

inline double max_diff(const State& a, const State& b) {
    const auto x = a.to_array(), y = b.to_array();
    double e = 0;
    for (int i = 0; i < 5; ++i) e = std::max(e, std::abs(x[i] - y[i]));
    return e;
}

/// Least-squares slope of log2(error) against log2(n) for the step counts
/// `ns`, measured against a run with 32 times the largest count.
inline double observed_order(const Model& m, const State& x0, double span, const std::vector<int>& ns) {
    const State ref = fixed_steps(m, x0, span, 32 * ns.back());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n : ns) {
        const double lx = std::log2(double(n));
        const double ly = std::log2(max_diff(fixed_steps(m, x0, span, n), ref));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double k = double(ns.size());
    return -(k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// The undriven single-bubble relaxation: a distant, resting partner and a
/// displaced bubble 1.
inline Model relaxation_model() { return Model(params(0.0, 1e6, 1.0)); }
inline State relaxation_start() { return {1.3, 0.0, 1.0, 0.0, 0.0}; }

}  // namespace support
