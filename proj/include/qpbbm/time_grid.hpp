#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qpbbm/spectral.hpp"

namespace qpbbm {

/// A Fourier-coefficient field sampled on the uniform grid 0 = t_0 < ... <
/// t_M = T; frame 0 is the initial field.
struct TimeGridField {
    std::vector<double> times;
    std::vector<CoeffField> frames;

    int steps() const { return static_cast<int>(times.size()) - 1; }

    static TimeGridField uniform(double T, int steps, const Truncation& trunc) {
        if (steps < 1) throw std::invalid_argument("TimeGridField: steps >= 1 required");
        TimeGridField g;
        g.times.resize(static_cast<size_t>(steps) + 1);
        for (int m = 0; m <= steps; ++m) g.times[static_cast<size_t>(m)] = T * m / steps;
        g.times.back() = T;
        g.frames.assign(static_cast<size_t>(steps) + 1, CoeffField(trunc));
        return g;
    }

    /// Largest frame-wise coefficient deviation from another grid field.
    friend double sup_distance(const TimeGridField& a, const TimeGridField& b) {
        if (a.frames.size() != b.frames.size())
            throw std::invalid_argument("sup_distance: grids differ in length");
        double worst = 0.0;
        for (size_t m = 0; m < a.frames.size(); ++m)
            worst = std::max(worst, sup_distance(a.frames[m], b.frames[m]));
        return worst;
    }
};

} // namespace qpbbm
