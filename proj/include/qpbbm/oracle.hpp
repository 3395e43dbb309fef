#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qpbbm/lattice.hpp"
#include "qpbbm/spectral.hpp"
#include "qpbbm/time_grid.hpp"

namespace qpbbm {

/// Right-hand side of the truncated coupled ODE system:
/// n |-> lambda(n) c(n) + (lambda(n)/p) (c^{*p})(n).
inline CoeffField ode_rhs(const CoeffField& state, const FrequencyVector& omega, int p,
                          const Truncation& trunc) {
    const CoeffField conv = convolve_power(state, p, trunc);
    CoeffField out(trunc);
    for (const MultiIndex& n : enumerate_lattice(trunc)) {
        const Complex lam = multiplier(n, omega);
        if (lam == Complex{0.0, 0.0}) continue;
        const Complex v = lam * state.at(n) + (lam / static_cast<double>(p)) * conv.at(n);
        if (v != Complex{0.0, 0.0}) out.set(n, v);
    }
    return out;
}

/// Classical fixed-step RK4 on the truncated ODE system; the independent
/// cross-validation solver. Frames are sampled at every step.
inline TimeGridField rk4_integrate(const CoeffField& init, double T, int steps,
                                   const FrequencyVector& omega, int p, const Truncation& trunc) {
    if (steps < 1) throw std::invalid_argument("rk4_integrate: steps >= 1 required");
    TimeGridField out = TimeGridField::uniform(T, steps, trunc);
    out.frames[0] = init;
    const double h = T / steps;
    CoeffField y = init;
    for (int m = 1; m <= steps; ++m) {
        const CoeffField k1 = ode_rhs(y, omega, p, trunc);
        const CoeffField k2 = ode_rhs(y + Complex{0.5 * h, 0.0} * k1, omega, p, trunc);
        const CoeffField k3 = ode_rhs(y + Complex{0.5 * h, 0.0} * k2, omega, p, trunc);
        const CoeffField k4 = ode_rhs(y + Complex{h, 0.0} * k3, omega, p, trunc);
        y = y + Complex{h / 6.0, 0.0} * (k1 + Complex{2.0, 0.0} * k2 + Complex{2.0, 0.0} * k3 + k4);
        for (const auto& [n, v] : y.values()) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::runtime_error("rk4_integrate: non-finite value at step " + std::to_string(m) +
                                         ", n = " + n.to_string());
        }
        out.frames[static_cast<size_t>(m)] = y;
    }
    return out;
}

} // namespace qpbbm
