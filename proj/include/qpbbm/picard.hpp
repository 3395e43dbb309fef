#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpbbm/bounds.hpp"
#include "qpbbm/lattice.hpp"
#include "qpbbm/oracle.hpp"
#include "qpbbm/parallel.hpp"
#include "qpbbm/spectral.hpp"
#include "qpbbm/time_grid.hpp"

namespace qpbbm {

enum class QuadRule { Trapezoid, Simpson };

struct SolverConfig {
    int p = 2;
    int nu = 1;
    int trunc_radius = 3;
    FrequencyVector omega{1.0};
    double time_horizon = -1.0; // < 0 means "use the guaranteed horizon"
    int time_steps = 128;
    int max_iters = 25;
    QuadRule quad_rule = QuadRule::Trapezoid;
    double tol_fixed_point = 1e-10;
    DecayProfile profile;
    bool override_horizon = false;

    Truncation trunc() const { return Truncation(trunc_radius, nu); }

    HorizonReport guaranteed() const { return horizon(p, profile, nu); }

    /// Validates all invariants; fills in the default horizon when unset.
    void validate() {
        if (p < 2) throw std::invalid_argument("SolverConfig: p >= 2 required");
        if (nu < 1) throw std::invalid_argument("SolverConfig: nu >= 1 required");
        if (trunc_radius < 0) throw std::invalid_argument("SolverConfig: radius >= 0 required");
        if (omega.nu() != nu) throw std::invalid_argument("SolverConfig: omega dimension must equal nu");
        omega.validate();
        profile.validate(nu);
        if (time_steps < 1) throw std::invalid_argument("SolverConfig: time_steps >= 1 required");
        if (quad_rule == QuadRule::Simpson && time_steps % 2 != 0)
            throw std::invalid_argument("SolverConfig: time_steps must be even for the Simpson rule");
        if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters >= 1 required");
        if (!(tol_fixed_point > 0.0)) throw std::invalid_argument("SolverConfig: tol_fixed_point > 0 required");
        const double guaranteed_T = guaranteed().horizon;
        if (time_horizon < 0.0) time_horizon = guaranteed_T;
        if (time_horizon > guaranteed_T * (1.0 + 1e-12) && !override_horizon)
            throw std::invalid_argument("SolverConfig: T = " + std::to_string(time_horizon) +
                                        " exceeds the guaranteed horizon " + std::to_string(guaranteed_T) +
                                        "; pass the override flag to explore beyond it");
    }
};

namespace detail {

/// Composite quadrature weights for the grid prefix tau_0..tau_m (spacing h).
/// Simpson degrades to 3/8 on the last three intervals when m is odd, and to
/// the trapezoid rule when m = 1.
/// Weights for the prefix integral over [t_0, t_m] on a uniform grid of size
/// grid_steps + 1.  The returned vector may be longer than m + 1: the Simpson
/// m = 1 start formula interpolates through the first four grid nodes to keep
/// the single-panel error at O(h^5); consumers must loop over w.size().
/// grid_steps < 0 means "the grid has at least four nodes".
inline std::vector<double> prefix_weights(QuadRule rule, int m, double h, int grid_steps = -1) {
    std::vector<double> w(static_cast<size_t>(m) + 1, 0.0);
    if (m == 0) return w;
    auto trapezoid = [&] {
        w[0] = w[static_cast<size_t>(m)] = 0.5 * h;
        for (int j = 1; j < m; ++j) w[static_cast<size_t>(j)] = h;
    };
    if (rule == QuadRule::Trapezoid) {
        trapezoid();
        return w;
    }
    if (m == 1) {
        if (grid_steps >= 0 && grid_steps < 3) {
            trapezoid();
            return w;
        }
        w.assign(4, 0.0);
        w[0] = 9.0 * h / 24.0;
        w[1] = 19.0 * h / 24.0;
        w[2] = -5.0 * h / 24.0;
        w[3] = h / 24.0;
        return w;
    }
    const int simpson_end = (m % 2 == 0) ? m : m - 3;
    for (int j = 0; j < simpson_end; j += 2) {
        w[static_cast<size_t>(j)] += h / 3.0;
        w[static_cast<size_t>(j) + 1] += 4.0 * h / 3.0;
        w[static_cast<size_t>(j) + 2] += h / 3.0;
    }
    if (m % 2 != 0) {
        w[static_cast<size_t>(m - 3)] += 3.0 * h / 8.0;
        w[static_cast<size_t>(m - 2)] += 9.0 * h / 8.0;
        w[static_cast<size_t>(m - 1)] += 9.0 * h / 8.0;
        w[static_cast<size_t>(m)] += 3.0 * h / 8.0;
    }
    return w;
}

} // namespace detail

/// c_0(t, n) = e^{lambda(n) t} init(n), the Picard starting guess.
inline TimeGridField picard_initial_guess(const CoeffField& init, const SolverConfig& cfg) {
    TimeGridField g = TimeGridField::uniform(cfg.time_horizon, cfg.time_steps, cfg.trunc());
    g.frames[0] = init;
    for (int m = 1; m <= cfg.time_steps; ++m) {
        CoeffField f(cfg.trunc());
        for (const auto& [n, v] : init.values())
            f.set(n, v * std::exp(multiplier(n, cfg.omega) * g.times[static_cast<size_t>(m)]));
        g.frames[static_cast<size_t>(m)] = f;
    }
    return g;
}

/// One Duhamel application: new(t_m, n) = e^{lambda t_m} init(n) +
/// (lambda/p) int_0^{t_m} e^{lambda(t_m - tau)} (prev^{*p})(tau, n) dtau,
/// with the integral evaluated by composite quadrature on the grid prefix.
/// The convolution of each frame is computed once and reused across n and m.
inline TimeGridField picard_step(const TimeGridField& prev, const CoeffField& init, const SolverConfig& cfg,
                                 double* discarded_mass = nullptr) {
    const int M = prev.steps();
    const Truncation trunc = cfg.trunc();
    const double h = prev.times.back() / M;

    std::vector<CoeffField> convs(static_cast<size_t>(M) + 1, CoeffField(trunc));
    double lost_total = 0.0;
    for (int m = 0; m <= M; ++m) {
        double lost = 0.0;
        convs[static_cast<size_t>(m)] = convolve_power(prev.frames[static_cast<size_t>(m)], cfg.p, trunc, &lost);
        lost_total += lost;
    }
    if (discarded_mass) *discarded_mass = lost_total;

    std::vector<std::vector<double>> weights(static_cast<size_t>(M) + 1);
    for (int m = 0; m <= M; ++m)
        weights[static_cast<size_t>(m)] = detail::prefix_weights(cfg.quad_rule, m, h, M);

    const std::vector<MultiIndex> lattice = enumerate_lattice(trunc);
    // out_vals[i][m]: coefficient at lattice[i], frame m.
    std::vector<std::vector<Complex>> out_vals(lattice.size());
    parallel_for(lattice.size(), [&](size_t i) {
        const MultiIndex& n = lattice[i];
        const Complex lam = multiplier(n, cfg.omega);
        const Complex c0 = init.at(n);
        std::vector<Complex>& col = out_vals[i];
        col.assign(static_cast<size_t>(M) + 1, Complex{0.0, 0.0});
        std::vector<Complex> g(static_cast<size_t>(M) + 1);
        for (int m = 0; m <= M; ++m) g[static_cast<size_t>(m)] = convs[static_cast<size_t>(m)].at(n);
        for (int m = 0; m <= M; ++m) {
            const double tm = prev.times[static_cast<size_t>(m)];
            Complex value = c0 * std::exp(lam * tm);
            if (lam != Complex{0.0, 0.0} && m > 0) {
                Complex q{0.0, 0.0};
                const std::vector<double>& w = weights[static_cast<size_t>(m)];
                for (size_t j = 0; j < w.size(); ++j)
                    q += w[j] * std::exp(lam * (tm - prev.times[j])) * g[j];
                value += (lam / static_cast<double>(cfg.p)) * q;
            }
            col[static_cast<size_t>(m)] = value;
        }
    });

    TimeGridField out = TimeGridField::uniform(prev.times.back(), M, trunc);
    out.frames[0] = init;
    for (int m = 1; m <= M; ++m) {
        CoeffField f(trunc);
        for (size_t i = 0; i < lattice.size(); ++i)
            if (out_vals[i][static_cast<size_t>(m)] != Complex{0.0, 0.0})
                f.set(lattice[i], out_vals[i][static_cast<size_t>(m)]);
        out.frames[static_cast<size_t>(m)] = f;
    }
    return out;
}

/// The factorial difference bound for |c_k - c_{k-1}| at time T,
/// logged as the theoretical companion of the measured contraction.
inline double contraction_bound(const SolverConfig& cfg, int k, double T) {
    const HorizonReport rep = horizon(cfg.p, cfg.profile, cfg.nu);
    double lead, base;
    if (cfg.profile.kind == DecayProfile::Kind::Exponential) {
        const double twelve = std::pow(12.0 / cfg.profile.rate, cfg.nu);
        lead = rep.constant_B * twelve / cfg.p;
        base = 0.5 * std::pow(rep.constant_B, cfg.p - 1) * std::pow(twelve, cfg.p - 1);
    } else {
        const double b4 = b_frak(cfg.profile.rate / 4.0, cfg.nu);
        lead = rep.constant_B * b4 / cfg.p;
        base = 0.5 * std::pow(rep.constant_B * b4, cfg.p - 1);
    }
    double bound = lead;
    for (int j = 1; j <= k; ++j) bound *= base * T / j;
    return bound;
}

/// Decay envelope the iterates must obey on [0, L_p] (amplitude, rate, kind).
inline EnvelopeReport iterate_envelope_check(const CoeffField& frame, const SolverConfig& cfg, double tol = 1e-9) {
    const HorizonReport rep = horizon(cfg.p, cfg.profile, cfg.nu);
    return check_envelope(frame, rep.constant_B, cfg.profile.rate / 2.0, cfg.profile.kind, tol);
}

struct IterateDiagnostics {
    int k = 0;
    double sup_diff = 0.0;
    double theory_bound = 0.0;
    double envelope_ratio = 0.0;
    double truncation_mass = 0.0;
};

struct SolveResult {
    TimeGridField solution;
    std::vector<IterateDiagnostics> iterates;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    double truncation_mass = 0.0;
    bool init_within_envelope = true;
    bool envelope_ok = true; // iterate decay bound (within tol) on every frame
};

/// Sup-residual of the fixed-point equation: |c - Duhamel(c)| over grid and
/// lattice.
inline double residual(const TimeGridField& solution, const CoeffField& init, const SolverConfig& cfg) {
    const TimeGridField rhs = picard_step(solution, init, cfg);
    return sup_distance(solution, rhs);
}

/// Picard iteration from c_0 until the sup-difference drops below the fixed
/// point tolerance or max_iters is reached.
inline SolveResult solve(SolverConfig cfg, const CoeffField& init, double envelope_tol = 1e-9) {
    cfg.validate();
    SolveResult res;
    res.init_within_envelope = true;
    for (const auto& [n, v] : init.values())
        if (std::abs(v) > cfg.profile.envelope(n.l1(), cfg.p) * (1.0 + 1e-12)) res.init_within_envelope = false;

    TimeGridField cur = picard_initial_guess(init, cfg);
    const bool beyond_horizon = cfg.time_horizon > cfg.guaranteed().horizon * (1.0 + 1e-12);
    for (int k = 1; k <= cfg.max_iters; ++k) {
        double lost = 0.0;
        TimeGridField next = picard_step(cur, init, cfg, &lost);
        IterateDiagnostics diag;
        diag.k = k;
        diag.sup_diff = sup_distance(next, cur);
        diag.theory_bound = contraction_bound(cfg, k, cfg.time_horizon);
        diag.truncation_mass = lost;
        for (const CoeffField& frame : next.frames)
            diag.envelope_ratio = std::max(diag.envelope_ratio,
                                           iterate_envelope_check(frame, cfg, envelope_tol).worst_ratio);
        res.truncation_mass += lost;
        res.iterates.push_back(diag);
        cur = std::move(next);
        res.iterations = k;
        if (diag.envelope_ratio > 1.0 + envelope_tol && !beyond_horizon) res.envelope_ok = false;
        if (diag.sup_diff <= cfg.tol_fixed_point) {
            res.converged = true;
            break;
        }
    }
    res.solution = std::move(cur);
    if (!res.converged) {
        std::string hist;
        for (const IterateDiagnostics& d : res.iterates) hist += " " + std::to_string(d.sup_diff);
        throw std::runtime_error("picard::solve: no fixed point after " + std::to_string(cfg.max_iters) +
                                 " iterations; sup-difference history:" + hist);
    }
    res.residual = residual(res.solution, init, cfg);
    return res;
}

/// Sup-distance between the Picard solution and the RK4 oracle run on the
/// same configuration (same grid, same truncation).
inline double uniqueness_probe(const SolverConfig& cfg_in, const CoeffField& init) {
    SolverConfig cfg = cfg_in;
    cfg.validate();
    const SolveResult picard = solve(cfg, init);
    const TimeGridField rk = rk4_integrate(init, cfg.time_horizon, cfg.time_steps, cfg.omega, cfg.p, cfg.trunc());
    return sup_distance(picard.solution, rk);
}

} // namespace qpbbm
