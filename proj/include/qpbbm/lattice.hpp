#pragma once

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpbbm {

/// A point n on the integer frequency lattice Z^nu. |n| always means the
/// l1 norm sum_j |n_j|; ordering is lexicographic on the coordinates.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> coords) : coords_(std::move(coords)) {}
    MultiIndex(std::initializer_list<int> coords) : coords_(coords) {}

    static MultiIndex zero(int nu) { return MultiIndex(std::vector<int>(static_cast<size_t>(nu), 0)); }

    int nu() const { return static_cast<int>(coords_.size()); }
    int operator[](int j) const { return coords_[static_cast<size_t>(j)]; }
    const std::vector<int>& coords() const { return coords_; }

    int l1() const {
        int s = 0;
        for (int c : coords_) s += std::abs(c);
        return s;
    }

    bool is_zero() const {
        for (int c : coords_) if (c != 0) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        require_same_nu(o);
        std::vector<int> c(coords_);
        for (size_t j = 0; j < c.size(); ++j) c[j] += o.coords_[j];
        return MultiIndex(std::move(c));
    }

    MultiIndex operator-(const MultiIndex& o) const {
        require_same_nu(o);
        std::vector<int> c(coords_);
        for (size_t j = 0; j < c.size(); ++j) c[j] -= o.coords_[j];
        return MultiIndex(std::move(c));
    }

    MultiIndex operator-() const {
        std::vector<int> c(coords_);
        for (int& v : c) v = -v;
        return MultiIndex(std::move(c));
    }

    auto operator<=>(const MultiIndex&) const = default;

    std::string to_string() const {
        std::string s = "(";
        for (size_t j = 0; j < coords_.size(); ++j) {
            if (j) s += ",";
            s += std::to_string(coords_[j]);
        }
        return s + ")";
    }

private:
    void require_same_nu(const MultiIndex& o) const {
        if (coords_.size() != o.coords_.size())
            throw std::invalid_argument("MultiIndex dimension mismatch: " + std::to_string(coords_.size()) +
                                        " vs " + std::to_string(o.coords_.size()));
    }

    std::vector<int> coords_;
};

/// Wave vector omega; rational independence is assumed, not verified.
struct FrequencyVector {
    std::vector<double> omega;

    FrequencyVector() = default;
    explicit FrequencyVector(std::vector<double> w) : omega(std::move(w)) { validate(); }
    FrequencyVector(std::initializer_list<double> w) : omega(w) { validate(); }

    int nu() const { return static_cast<int>(omega.size()); }

    void validate() const {
        if (omega.empty()) throw std::invalid_argument("FrequencyVector: nu >= 1 required");
        bool all_zero = true;
        for (double w : omega) {
            if (!std::isfinite(w)) throw std::invalid_argument("FrequencyVector: entries must be finite");
            if (w != 0.0) all_zero = false;
        }
        if (all_zero) throw std::invalid_argument("FrequencyVector: omega must be nonzero");
    }
};

/// The l1 ball { n in Z^nu : |n| <= radius }, the artifact's lattice truncation.
struct Truncation {
    int radius = 0;
    int nu = 1;

    Truncation() = default;
    Truncation(int radius_, int nu_) : radius(radius_), nu(nu_) {
        if (nu < 1) throw std::invalid_argument("Truncation: nu >= 1 required");
        if (radius < 0) throw std::invalid_argument("Truncation: radius >= 0 required");
    }

    bool contains(const MultiIndex& n) const { return n.nu() == nu && n.l1() <= radius; }
};

/// <n> = <n,omega> = sum_j n_j omega_j.
inline double inner(const MultiIndex& n, const FrequencyVector& w) {
    if (n.nu() != w.nu())
        throw std::invalid_argument("inner: dimension mismatch (" + std::to_string(n.nu()) + " vs " +
                                    std::to_string(w.nu()) + ")");
    double s = 0.0;
    for (int j = 0; j < n.nu(); ++j) s += n[j] * w.omega[static_cast<size_t>(j)];
    return s;
}

/// lambda(n) = -i<n>/(1+<n>^2); purely imaginary with |lambda| <= 1/2.
inline std::complex<double> multiplier(const MultiIndex& n, const FrequencyVector& w) {
    const double x = inner(n, w);
    return {0.0, -x / (1.0 + x * x)};
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
    return r;
}

/// Closed-form cardinality of the l1 ball of radius N in Z^nu.
inline std::uint64_t lattice_ball_count(int nu, int N) {
    std::uint64_t total = 0;
    for (int k = 0; k <= std::min(nu, N); ++k)
        total += (std::uint64_t{1} << k) * binomial(nu, k) * binomial(N, k);
    return total;
}

/// Number of lattice points with l1 norm exactly m.
inline std::uint64_t lattice_shell_count(int nu, int m) {
    if (m == 0) return 1;
    std::uint64_t total = 0;
    for (int j = 1; j <= std::min(nu, m); ++j)
        total += binomial(nu, j) * (std::uint64_t{1} << j) * binomial(m - 1, j - 1);
    return total;
}

namespace detail {
inline void enumerate_rec(int nu, int rem, std::vector<int>& cur, std::vector<MultiIndex>& out) {
    const int j = static_cast<int>(cur.size());
    if (j == nu) {
        out.emplace_back(cur);
        return;
    }
    for (int v = -rem; v <= rem; ++v) {
        cur.push_back(v);
        enumerate_rec(nu, rem - std::abs(v), cur, out);
        cur.pop_back();
    }
}
} // namespace detail

/// All n with |n| <= t.radius, exactly once, in lexicographic order.
inline std::vector<MultiIndex> enumerate_lattice(const Truncation& t) {
    std::vector<MultiIndex> out;
    out.reserve(lattice_ball_count(t.nu, t.radius));
    std::vector<int> cur;
    detail::enumerate_rec(t.nu, t.radius, cur, out);
    return out;
}

/// Heuristic non-resonance probe: true if some nonzero n in the truncation has
/// <n> vanishing to machine precision. The condition itself is undecidable.
inline bool has_numerical_resonance(const Truncation& t, const FrequencyVector& w, double tol = 1e-12) {
    for (const MultiIndex& n : enumerate_lattice(t)) {
        if (n.is_zero()) continue;
        if (std::abs(inner(n, w)) <= tol) return true;
    }
    return false;
}

} // namespace qpbbm
