#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "qpbbm/lattice.hpp"
#include "qpbbm/spectral.hpp"

namespace qpbbm {

/// Partial sum of zeta(s) with an integral-test midpoint remainder; M grows
/// until the remainder bracket is narrower than tol. Self-contained, no
/// special-function dependency.
inline double zeta_partial(double s, double tol = 1e-12) {
    if (!(s > 1.0)) throw std::invalid_argument("zeta_partial: s > 1 required");
    std::uint64_t M = 16;
    auto bracket_width = [&](std::uint64_t m) {
        return (std::pow(static_cast<double>(m), 1.0 - s) -
                std::pow(static_cast<double>(m + 1), 1.0 - s)) /
               (s - 1.0);
    };
    constexpr std::uint64_t M_cap = 50'000'000;
    while (bracket_width(M) >= tol && M < M_cap) M *= 2;
    double sum = 0.0;
    for (std::uint64_t n = M; n >= 1; --n) sum += std::pow(static_cast<double>(n), -s);
    // Remainder lies between the integrals from M+1 and from M; take the midpoint.
    const double lo = std::pow(static_cast<double>(M + 1), 1.0 - s) / (s - 1.0);
    const double hi = std::pow(static_cast<double>(M), 1.0 - s) / (s - 1.0);
    return sum + 0.5 * (lo + hi);
}

/// b(s; nu) = 1 + sum_{j=1}^{nu} C(nu,j) 2^j j^{-s} zeta(s/j)^j.
inline double b_frak(double s, int nu, double zeta_tol = 1e-12) {
    if (nu < 1) throw std::invalid_argument("b_frak: nu >= 1 required");
    for (int j = 1; j <= nu; ++j)
        if (!(s / j > 1.0))
            throw std::invalid_argument("b_frak: requires s/j > 1 for every j <= nu; fails at j = " +
                                        std::to_string(j));
    double total = 1.0;
    for (int j = 1; j <= nu; ++j)
        total += static_cast<double>(binomial(nu, j)) * std::pow(2.0, j) * std::pow(static_cast<double>(j), -s) *
                 std::pow(zeta_partial(s / j, zeta_tol), j);
    return total;
}

/// Finite lattice sum H(s; nu) over the l1 ball of radius N, via shell counts.
inline double H_partial(double s, int nu, int N) {
    if (!(s > nu)) throw std::invalid_argument("H_partial: s > nu required");
    double total = 0.0;
    for (int m = N; m >= 0; --m)
        total += static_cast<double>(lattice_shell_count(nu, m)) * std::pow(1.0 + m, -s);
    return total;
}

/// Closed form of sum_{n in Z} e^{-rho|n|} = (e^rho + 1)/(e^rho - 1),
/// bounded by 3/rho on (0, 1].
inline double exp_sum_1d(double rho) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("exp_sum_1d: the bound is only proved for 0 < rho <= 1");
    return (std::exp(rho) + 1.0) / (std::exp(rho) - 1.0);
}

/// Guaranteed existence-and-uniqueness horizon and the matching decay
/// amplitude for the Picard iterates.
struct HorizonReport {
    int p = 2;
    DecayProfile profile;
    int nu = 1;
    double horizon = 0.0;    // L_p or L_p'
    double constant_B = 0.0; // B_p (exponential) or B (polynomial)
};

inline HorizonReport horizon(int p, const DecayProfile& profile, int nu) {
    if (p < 2) throw std::invalid_argument("horizon: p >= 2 required");
    profile.validate(nu);
    HorizonReport rep;
    rep.p = p;
    rep.profile = profile;
    rep.nu = nu;
    // (1 - 1/p)^{p-1} as an exact-integer quotient: pow of small integers is
    // exact, so the only rounding is the final division.
    const double shape = std::pow(p - 1.0, p - 1) / std::pow(static_cast<double>(p), p - 1);
    if (profile.kind == DecayProfile::Kind::Exponential) {
        rep.horizon = shape * std::pow(profile.rate, (p - 1) * nu) /
                      (profile.amp * std::pow(6.0, (p - 1) * nu));
        rep.constant_B = (static_cast<double>(p) / (p - 1)) * profile.amp * std::pow(6.0 / profile.rate, nu);
    } else {
        const double b = b_frak(profile.rate / 2.0, nu);
        rep.horizon = shape / (profile.amp * b);
        rep.constant_B = (static_cast<double>(p) / (p - 1)) * profile.amp * b;
    }
    return rep;
}

/// Largest amplitude A for which horizon(p, profile with that A, nu) >= T.
inline double max_amp_for_horizon(int p, DecayProfile profile, int nu, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("max_amp_for_horizon: T > 0 required");
    profile.amp = 1.0;
    return horizon(p, profile, nu).horizon / T;
}

struct ProbeReport {
    int samples = 0;
    double max_mie_violation = 0.0; // prod a_j - ((1/n) sum a_j)^n, relative
    double max_gbi_violation = 0.0; // (1 + sum x_j) - prod(1 + x_j), relative
};

/// Randomized sanity checks of the mean-value and generalized Bernoulli
/// inequalities; violations must stay <= 0 up to rounding. The Bernoulli
/// probe draws same-sign tuples (all >= 0 or all in (-1, 0]) -- the
/// inequality fails for mixed signs, and it is only ever applied to
/// nonnegative arguments here.
inline ProbeReport inequality_probes(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(1, 6);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> pos(1e-3, 10.0);
    std::uniform_real_distribution<double> nonneg(0.0, 4.0);
    std::uniform_real_distribution<double> neg(-0.999, 0.0);
    ProbeReport rep;
    rep.samples = samples;
    for (int s = 0; s < samples; ++s) {
        {
            const int n = len(rng);
            double prod = 1.0, sum = 0.0;
            for (int j = 0; j < n; ++j) {
                const double a = pos(rng);
                prod *= a;
                sum += a;
            }
            const double rhs = std::pow(sum / n, n);
            rep.max_mie_violation = std::max(rep.max_mie_violation, (prod - rhs) / std::max(1.0, std::abs(rhs)));
        }
        {
            const int m = len(rng);
            const bool negative = coin(rng) == 1;
            double prod = 1.0, sum = 0.0;
            for (int j = 0; j < m; ++j) {
                const double x = negative ? neg(rng) : nonneg(rng);
                prod *= 1.0 + x;
                sum += x;
            }
            const double rhs = 1.0 + sum;
            rep.max_gbi_violation = std::max(rep.max_gbi_violation, (rhs - prod) / std::max(1.0, std::abs(prod)));
        }
    }
    return rep;
}

} // namespace qpbbm
