#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qpbbm/lattice.hpp"
#include "qpbbm/parallel.hpp"

namespace qpbbm {

using Complex = std::complex<double>;

/// Decay envelope classifying initial data: A^{1/(p-1)} e^{-rho|n|} or
/// A^{1/(p-1)} (1+|n|)^{-r}.
struct DecayProfile {
    enum class Kind { Exponential, Polynomial };

    Kind kind = Kind::Exponential;
    double amp = 1.0;  // A
    double rate = 1.0; // rho or r

    void validate(int nu) const {
        if (amp <= 0.0) throw std::invalid_argument("DecayProfile: amplitude must be positive");
        if (kind == Kind::Exponential) {
            if (!(rate > 0.0 && rate <= 1.0))
                throw std::invalid_argument("DecayProfile: exponential rate must satisfy 0 < rho <= 1");
        } else {
            if (!(nu >= 1 && nu < rate / 4.0 - 2.0))
                throw std::invalid_argument("DecayProfile: polynomial decay requires nu < r/4 - 2 (got nu=" +
                                            std::to_string(nu) + ", r=" + std::to_string(rate) + ")");
        }
    }

    /// Modulus bound for an initial coefficient at l1 norm m.
    double envelope(int m, int p) const {
        const double a = std::pow(amp, 1.0 / (p - 1));
        if (kind == Kind::Exponential) return a * std::exp(-rate * m);
        return a * std::pow(1.0 + m, -rate);
    }
};

/// Finitely supported map MultiIndex -> complex amplitude; support is kept
/// inside the truncation ball. Immutable by convention once built.
class CoeffField {
public:
    CoeffField() = default;
    explicit CoeffField(Truncation t) : trunc_(t) {}

    const Truncation& trunc() const { return trunc_; }
    int nu() const { return trunc_.nu; }
    const std::map<MultiIndex, Complex>& values() const { return values_; }
    bool empty() const { return values_.empty(); }
    size_t support_size() const { return values_.size(); }

    Complex at(const MultiIndex& n) const {
        auto it = values_.find(n);
        return it == values_.end() ? Complex{0.0, 0.0} : it->second;
    }

    void set(const MultiIndex& n, Complex v) {
        if (!trunc_.contains(n))
            throw std::out_of_range("CoeffField::set: index " + n.to_string() + " outside truncation ball");
        if (v == Complex{0.0, 0.0})
            values_.erase(n);
        else
            values_[n] = v;
    }

    void add(const MultiIndex& n, Complex v) { set(n, at(n) + v); }

    double l1_mass() const {
        double s = 0.0;
        for (const auto& [n, v] : values_) s += std::abs(v);
        return s;
    }

    /// Largest |f(-n) - conj(f(n))| over the support.
    double conjugate_asymmetry() const {
        double worst = 0.0;
        for (const auto& [n, v] : values_)
            worst = std::max(worst, std::abs(at(-n) - std::conj(v)));
        return worst;
    }

    bool is_real_field(double tol = 1e-14) const { return conjugate_asymmetry() <= tol; }

    /// Restrict support to t, returning the discarded l1 mass.
    CoeffField restricted(const Truncation& t, double* discarded_mass = nullptr) const {
        CoeffField out(t);
        double lost = 0.0;
        for (const auto& [n, v] : values_) {
            if (t.contains(n))
                out.set(n, v);
            else
                lost += std::abs(v);
        }
        if (discarded_mass) *discarded_mass = lost;
        return out;
    }

    friend CoeffField operator+(const CoeffField& a, const CoeffField& b) {
        CoeffField out = a;
        for (const auto& [n, v] : b.values_) out.add(n, v);
        return out;
    }

    friend CoeffField operator-(const CoeffField& a, const CoeffField& b) {
        CoeffField out = a;
        for (const auto& [n, v] : b.values_) out.add(n, -v);
        return out;
    }

    friend CoeffField operator*(Complex s, const CoeffField& f) {
        CoeffField out(f.trunc_);
        if (s == Complex{0.0, 0.0}) return out;
        for (const auto& [n, v] : f.values_) out.values_[n] = s * v;
        return out;
    }

    /// Sup norm of the pointwise difference (over the union of supports).
    friend double sup_distance(const CoeffField& a, const CoeffField& b) {
        double worst = 0.0;
        for (const auto& [n, v] : a.values_) worst = std::max(worst, std::abs(v - b.at(n)));
        for (const auto& [n, v] : b.values_) worst = std::max(worst, std::abs(a.at(n) - v));
        return worst;
    }

private:
    Truncation trunc_;
    std::map<MultiIndex, Complex> values_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic phase in [0, 2pi), a pure function of seed and coords.
inline double phase_hash(std::uint64_t seed, const MultiIndex& n) {
    std::uint64_t h = splitmix64(seed ^ 0x7c0ffee123456789ULL);
    for (int j = 0; j < n.nu(); ++j)
        h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(n[j])));
    return (static_cast<double>(h >> 11) * 0x1.0p-53) * 2.0 * std::numbers::pi;
}

/// True if the first nonzero coordinate is positive.
inline bool is_positive_rep(const MultiIndex& n) {
    for (int j = 0; j < n.nu(); ++j) {
        if (n[j] > 0) return true;
        if (n[j] < 0) return false;
    }
    return false; // zero
}

} // namespace detail

/// Worst-case initial data: |c(n)| saturates the decay envelope exactly, with
/// deterministic pseudo-random phases obeying theta(-n) = -theta(n) so the
/// field is real-valued in x.
inline CoeffField make_initial(const DecayProfile& profile, int p, const Truncation& trunc,
                               std::uint64_t phase_seed) {
    if (p < 2) throw std::invalid_argument("make_initial: p >= 2 required");
    profile.validate(trunc.nu);
    CoeffField out(trunc);
    for (const MultiIndex& n : enumerate_lattice(trunc)) {
        double theta = 0.0;
        if (!n.is_zero()) {
            const bool pos = detail::is_positive_rep(n);
            const MultiIndex rep = pos ? n : -n;
            theta = detail::phase_hash(phase_seed, rep);
            if (!pos) theta = -theta;
        }
        out.set(n, std::polar(profile.envelope(n.l1(), p), theta));
    }
    return out;
}

/// Pairwise discrete convolution on the full Minkowski-sum support.
inline CoeffField convolve_pair_full(const CoeffField& f, const CoeffField& g) {
    if (f.nu() != g.nu()) throw std::invalid_argument("convolve: dimension mismatch");
    const Truncation out_trunc(f.trunc().radius + g.trunc().radius, f.nu());
    const std::vector<MultiIndex> targets = enumerate_lattice(out_trunc);
    std::vector<Complex> acc(targets.size(), Complex{0.0, 0.0});
    parallel_for(targets.size(), [&](size_t i) {
        Complex s{0.0, 0.0};
        for (const auto& [a, va] : f.values()) s += va * g.at(targets[i] - a);
        acc[i] = s;
    });
    CoeffField out(out_trunc);
    for (size_t i = 0; i < targets.size(); ++i)
        if (acc[i] != Complex{0.0, 0.0}) out.set(targets[i], acc[i]);
    return out;
}

/// p-fold convolution via iterated pairwise products, computed exactly on the
/// full support and only then restricted to out_trunc; the discarded l1 mass
/// is reported so truncation error stays observable.
inline CoeffField convolve_p(std::span<const CoeffField> fields, const Truncation& out_trunc,
                             double* discarded_mass = nullptr) {
    if (fields.size() < 2) throw std::invalid_argument("convolve_p: p >= 2 required");
    for (const CoeffField& f : fields)
        if (f.nu() != out_trunc.nu) throw std::invalid_argument("convolve_p: dimension mismatch");
    CoeffField acc = fields[0];
    for (size_t j = 1; j < fields.size(); ++j) acc = convolve_pair_full(acc, fields[j]);
    return acc.restricted(out_trunc, discarded_mass);
}

/// p-th convolution power of a single field.
inline CoeffField convolve_power(const CoeffField& f, int p, const Truncation& out_trunc,
                                 double* discarded_mass = nullptr) {
    std::vector<CoeffField> fields(static_cast<size_t>(p), f);
    return convolve_p(fields, out_trunc, discarded_mass);
}

/// Direct p-nested-loop convolution; the independent oracle for convolve_p.
inline CoeffField convolve_p_naive(std::span<const CoeffField> fields, const Truncation& out_trunc) {
    if (fields.size() < 2) throw std::invalid_argument("convolve_p_naive: p >= 2 required");
    for (const CoeffField& f : fields)
        if (f.nu() != out_trunc.nu) throw std::invalid_argument("convolve_p_naive: dimension mismatch");
    CoeffField out(out_trunc);
    std::vector<std::map<MultiIndex, Complex>::const_iterator> its;
    // Recursive walk over the cartesian product of supports.
    auto rec = [&](auto&& self, size_t depth, MultiIndex sum, Complex prod) -> void {
        if (depth == fields.size()) {
            if (out_trunc.contains(sum)) out.add(sum, prod);
            return;
        }
        for (const auto& [q, v] : fields[depth].values())
            self(self, depth + 1, depth == 0 ? q : sum + q, prod * v);
    };
    rec(rec, 0, MultiIndex::zero(out_trunc.nu), Complex{1.0, 0.0});
    return out;
}

struct EnvelopeReport {
    double worst_ratio = 0.0;
    MultiIndex worst_n;
    bool pass = true;
};

/// Worst-case ratio |field(n)| / envelope(n) over the support.
inline EnvelopeReport check_envelope(const CoeffField& field, double bound_amp, double bound_rate,
                                     DecayProfile::Kind kind, double tol = 1e-9) {
    EnvelopeReport rep;
    rep.worst_n = MultiIndex::zero(field.nu());
    for (const auto& [n, v] : field.values()) {
        const int m = n.l1();
        const double env = kind == DecayProfile::Kind::Exponential
                               ? bound_amp * std::exp(-bound_rate * m)
                               : bound_amp * std::pow(1.0 + m, -bound_rate);
        const double ratio = std::abs(v) / env;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_n = n;
        }
    }
    rep.pass = rep.worst_ratio <= 1.0 + tol;
    return rep;
}

/// u(x) = sum_n field(n) e^{i<n>x}.
inline Complex evaluate_u(const CoeffField& field, const FrequencyVector& omega, double x) {
    Complex s{0.0, 0.0};
    for (const auto& [n, v] : field.values()) s += v * std::polar(1.0, inner(n, omega) * x);
    return s;
}

/// Envelope mass beyond the truncation radius, sum_{|n|>N} envelope(n),
/// via shell counts and partial sums. Used to budget the truncation error.
inline double tail_mass(const DecayProfile& profile, int p, int nu, int N) {
    if (profile.kind == DecayProfile::Kind::Exponential) {
        // Full mass factors into nu one-dimensional geometric sums.
        const double one_d = (std::exp(profile.rate) + 1.0) / (std::exp(profile.rate) - 1.0);
        double full = std::pow(one_d, nu);
        double partial = 0.0;
        for (int m = 0; m <= N; ++m)
            partial += static_cast<double>(lattice_shell_count(nu, m)) * std::exp(-profile.rate * m);
        return std::pow(profile.amp, 1.0 / (p - 1)) * std::max(0.0, full - partial);
    }
    // Polynomial: shell sums until the terms are negligible.
    const double a = std::pow(profile.amp, 1.0 / (p - 1));
    double tail = 0.0;
    for (int m = N + 1; m < N + 100000; ++m) {
        const double term = static_cast<double>(lattice_shell_count(nu, m)) * std::pow(1.0 + m, -profile.rate);
        tail += term;
        if (term < 1e-18 * (tail + 1e-300) && m > N + 8) break;
    }
    return a * tail;
}

} // namespace qpbbm
