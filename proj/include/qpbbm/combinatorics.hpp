#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpbbm/lattice.hpp"
#include "qpbbm/spectral.hpp"

namespace qpbbm {

/// Exact rational on 64-bit integers; alpha is fractional for p >= 3.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    Rational operator+(const Rational& o) const { return {num * o.den + o.num * den, den * o.den}; }
    bool operator==(const Rational&) const = default;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// A node gamma^{(k)} of the expansion tree spade^{(k)} (p=2) or its general-p
/// analog: the zero leaf, the depth-1 product leaf, or a p-way branch over
/// depth k-1 subtrees. Nodes are immutable and shared.
struct TreeNode {
    enum class Kind { Leaf0, Leaf1, Branch };

    Kind kind;
    int depth;
    std::vector<std::shared_ptr<const TreeNode>> children; // size p for Branch

    TreeNode(Kind k, int d, std::vector<std::shared_ptr<const TreeNode>> ch = {})
        : kind(k), depth(d), children(std::move(ch)) {}
};

using TreeNodePtr = std::shared_ptr<const TreeNode>;

/// Per-node statistics: sigma/alpha (coefficient factors), ell/beta (nested
/// integrals) and the factorial-type denominator D.
struct TreeStats {
    Rational sigma;        // sigma (p=2) or alpha (general p)
    long long ell = 0;     // ell or beta
    unsigned long long D = 1;
};

/// Node count N_k: N_1 = 2, N_k = 1 + N_{k-1}^p. Saturates at ~1e18.
inline std::uint64_t node_count(int k, int p, bool* overflow = nullptr) {
    if (k < 1 || p < 2) throw std::invalid_argument("node_count: k >= 1 and p >= 2 required");
    constexpr std::uint64_t cap = 1'000'000'000'000'000'000ULL;
    std::uint64_t n = 2;
    bool sat = false;
    for (int j = 2; j <= k; ++j) {
        std::uint64_t pw = 1;
        for (int q = 0; q < p && !sat; ++q) {
            if (n != 0 && pw > cap / n) { sat = true; break; }
            pw *= n;
        }
        if (sat || pw >= cap) { sat = true; n = cap; } else { n = 1 + pw; }
    }
    if (overflow) *overflow = sat;
    return n;
}

/// All of spade^{(k)} / P^{(k)}, exactly once. Refuses when N_k > budget.
inline std::vector<TreeNodePtr> enumerate_tree(int k, int p, std::uint64_t budget = 1'000'000) {
    if (k < 1 || p < 2) throw std::invalid_argument("enumerate_tree: k >= 1 and p >= 2 required");
    bool overflow = false;
    const std::uint64_t count = node_count(k, p, &overflow);
    if (overflow || count > budget)
        throw std::runtime_error("enumerate_tree: tree too large (N_" + std::to_string(k) + " = " +
                                 (overflow ? std::string(">= 1e18") : std::to_string(count)) +
                                 " exceeds budget " + std::to_string(budget) + ")");

    std::vector<TreeNodePtr> level = {std::make_shared<TreeNode>(TreeNode::Kind::Leaf0, 1),
                                      std::make_shared<TreeNode>(TreeNode::Kind::Leaf1, 1)};
    for (int d = 2; d <= k; ++d) {
        std::vector<TreeNodePtr> next = {std::make_shared<TreeNode>(TreeNode::Kind::Leaf0, d)};
        // Cartesian product (level)^p, children in odometer order.
        std::vector<size_t> idx(static_cast<size_t>(p), 0);
        while (true) {
            std::vector<TreeNodePtr> ch;
            ch.reserve(static_cast<size_t>(p));
            for (size_t j : idx) ch.push_back(level[j]);
            next.push_back(std::make_shared<TreeNode>(TreeNode::Kind::Branch, d, std::move(ch)));
            int pos = p - 1;
            while (pos >= 0 && ++idx[static_cast<size_t>(pos)] == level.size()) {
                idx[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        level = std::move(next);
    }
    return level;
}

/// sigma/alpha, ell/beta, D by structural recursion.
inline TreeStats stats(const TreeNode& node, int p) {
    TreeStats s;
    switch (node.kind) {
    case TreeNode::Kind::Leaf0:
        s.sigma = Rational(1, p - 1);
        s.ell = 0;
        s.D = 1;
        return s;
    case TreeNode::Kind::Leaf1:
        s.sigma = Rational(p, p - 1);
        s.ell = 1;
        s.D = 1;
        return s;
    case TreeNode::Kind::Branch: {
        s.sigma = Rational(0, 1);
        s.ell = 1;
        s.D = 1;
        for (const TreeNodePtr& ch : node.children) {
            const TreeStats cs = stats(*ch, p);
            s.sigma = s.sigma + cs.sigma;
            s.ell += cs.ell;
            s.D *= cs.D;
        }
        s.D *= static_cast<unsigned long long>(s.ell);
        return s;
    }
    }
    throw std::logic_error("stats: unreachable");
}

/// Number of initial-coefficient slots of the node, (p-1)*alpha, an integer.
inline int leaf_slot_count(const TreeNode& node, int p) {
    const Rational a = stats(node, p).sigma;
    return static_cast<int>(a.num * ((p - 1) / a.den));
}

/// diamond_k(flat) = sum_{gamma} flat^{ell(gamma)} / D(gamma), computed
/// exactly from the recursive structure via the distribution of (ell, 1/D)
/// rather than node enumeration, so large k stays cheap.
inline double diamond_sum(int k, int p, double flat) {
    if (k < 1 || p < 2) throw std::invalid_argument("diamond_sum: k >= 1 and p >= 2 required");
    if (!(flat >= 0.0)) throw std::invalid_argument("diamond_sum: flat must be nonnegative");
    // f[l] = sum over depth-d nodes with ell = l of 1/D.
    std::vector<double> f = {1.0, 1.0}; // depth 1: Leaf0, Leaf1
    for (int d = 2; d <= k; ++d) {
        std::vector<double> g = {1.0}; // p-fold convolution of f, starts as delta
        for (int j = 0; j < p; ++j) {
            std::vector<double> h(g.size() + f.size() - 1, 0.0);
            for (size_t a = 0; a < g.size(); ++a)
                for (size_t b = 0; b < f.size(); ++b) h[a + b] += g[a] * f[b];
            g = std::move(h);
        }
        std::vector<double> next(g.size() + 1, 0.0);
        next[0] = 1.0; // Leaf0
        for (size_t l = 1; l < next.size(); ++l) next[l] += g[l - 1] / static_cast<double>(l);
        f = std::move(next);
    }
    double total = 0.0;
    for (size_t l = f.size(); l-- > 0;) total += f[l] * std::pow(flat, static_cast<double>(l));
    return total;
}

// ---------------------------------------------------------------------------
// Exact nested-exponential integration for the tree formula.
// ---------------------------------------------------------------------------

/// Finite sum of terms coef * t^pow * e^{rate t}. Closed under products and
/// the Duhamel map f |-> int_0^t e^{b(t-tau)} f(tau) dtau; rates within
/// 1e-12 of each other are merged (resonant collisions must not crash).
class ExpPoly {
public:
    struct Term {
        int pow;
        Complex rate;
        Complex coef;
    };

    static constexpr double rate_merge_tol = 1e-12;

    ExpPoly() = default;

    static ExpPoly exponential(Complex rate, Complex coef = {1.0, 0.0}) {
        ExpPoly e;
        if (coef != Complex{0.0, 0.0}) e.terms_.push_back({0, rate, coef});
        return e;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add_term(int pow, Complex rate, Complex coef) {
        if (coef == Complex{0.0, 0.0}) return;
        for (Term& t : terms_) {
            if (t.pow == pow && std::abs(t.rate - rate) <= rate_merge_tol) {
                t.coef += coef;
                return;
            }
        }
        terms_.push_back({pow, rate, coef});
    }

    void add(const ExpPoly& o) {
        for (const Term& t : o.terms_) add_term(t.pow, t.rate, t.coef);
    }

    void scale(Complex s) {
        for (Term& t : terms_) t.coef *= s;
    }

    ExpPoly operator*(const ExpPoly& o) const {
        ExpPoly out;
        for (const Term& a : terms_)
            for (const Term& b : o.terms_) out.add_term(a.pow + b.pow, a.rate + b.rate, a.coef * b.coef);
        return out;
    }

    /// int_0^t e^{b(t-tau)} this(tau) dtau, term by term in closed form. The
    /// resonant case rate == b yields t^{m+1}/(m+1) e^{bt} terms.
    ExpPoly duhamel(Complex b) const {
        ExpPoly out;
        for (const Term& t : terms_) {
            const Complex c = t.rate - b;
            const int m = t.pow;
            if (std::abs(c) <= rate_merge_tol) {
                out.add_term(m + 1, b, t.coef / static_cast<double>(m + 1));
                continue;
            }
            // int_0^t tau^m e^{c tau} dtau = F(t) - F(0),
            // F(tau) = e^{c tau} sum_j (-1)^{m-j} (m!/j!) tau^j / c^{m-j+1}.
            double mfact_over_jfact = 1.0; // m!/m! at j = m
            Complex cpow = c;              // c^{m-j+1} at j = m
            double sign = 1.0;             // (-1)^{m-j} at j = m
            Complex f0{0.0, 0.0};
            for (int j = m; j >= 0; --j) {
                const Complex coeff = sign * mfact_over_jfact / cpow * t.coef;
                out.add_term(j, t.rate, coeff); // e^{bt} * e^{c tau}|_{tau=t} = e^{rate t}
                if (j == 0) f0 = coeff;
                mfact_over_jfact *= j; // (m!/ (j-1)!) = (m!/j!) * j
                cpow *= c;
                sign = -sign;
            }
            out.add_term(0, b, -f0);
        }
        return out;
    }

    Complex eval(double t) const {
        Complex s{0.0, 0.0};
        for (const Term& term : terms_)
            s += term.coef * std::pow(t, term.pow) * std::exp(term.rate * t);
        return s;
    }

private:
    std::vector<Term> terms_;
};

namespace detail {

struct TreeEvalContext {
    const CoeffField* init;
    const FrequencyVector* omega;
    int p;
    Truncation trunc; // every subtree index is confined to this ball
    std::map<std::pair<const TreeNode*, MultiIndex>, ExpPoly> memo;

    /// Sum over leaf assignments of the subtree with total index m of
    /// C * F * I, as a function of t. Indices outside the truncation ball
    /// contribute nothing: the tree mirrors the truncated dynamics.
    const ExpPoly& eval(const TreeNode* node, const MultiIndex& m) {
        auto key = std::make_pair(node, m);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        ExpPoly result;
        if (!trunc.contains(m)) {
            // empty
        } else if (node->kind == TreeNode::Kind::Leaf0) {
            const Complex c = init->at(m);
            if (c != Complex{0.0, 0.0}) result = ExpPoly::exponential(multiplier(m, *omega), c);
        } else {
            const Complex lam = multiplier(m, *omega);
            if (lam != Complex{0.0, 0.0}) {
                // Leaf1 branches over p copies of the initial data.
                std::vector<const TreeNode*> ch;
                static const TreeNode init_leaf(TreeNode::Kind::Leaf0, 0);
                if (node->kind == TreeNode::Kind::Leaf1) {
                    ch.assign(static_cast<size_t>(p), &init_leaf);
                } else {
                    for (const TreeNodePtr& c : node->children) ch.push_back(c.get());
                }
                ExpPoly sum;
                split_rec(ch, 0, m, ExpPoly::exponential({0.0, 0.0}), sum);
                sum = sum.duhamel(lam);
                sum.scale(lam / static_cast<double>(p));
                result = std::move(sum);
            }
        }
        return memo.emplace(key, std::move(result)).first->second;
    }

private:
    void split_rec(const std::vector<const TreeNode*>& ch, size_t j, const MultiIndex& rem,
                   const ExpPoly& prod, ExpPoly& sum) {
        if (prod.empty()) return;
        if (j + 1 == ch.size()) {
            if (!trunc.contains(rem)) return;
            sum.add(prod * eval(ch[j], rem));
            return;
        }
        for (const MultiIndex& mj : enumerate_lattice(trunc)) {
            const ExpPoly& part = eval(ch[j], mj);
            if (part.empty()) continue;
            split_rec(ch, j + 1, rem - mj, prod * part, sum);
        }
    }
};

} // namespace detail

/// The time dependence of c_k(t, n) as an exact sum of t^m e^{at} terms,
/// assembled directly from the tree formula on the truncated lattice.
/// Quadrature-free oracle for the Picard engine.
inline ExpPoly tree_expansion(int k, const MultiIndex& n, const CoeffField& init,
                              const FrequencyVector& omega, int p, const Truncation& trunc,
                              std::uint64_t budget = 1'000'000) {
    const std::vector<TreeNodePtr> nodes = enumerate_tree(k, p, budget);
    detail::TreeEvalContext ctx{&init, &omega, p, trunc, {}};
    ExpPoly total;
    for (const TreeNodePtr& gamma : nodes) total.add(ctx.eval(gamma.get(), n));
    return total;
}

inline Complex tree_eval(int k, const MultiIndex& n, double t, const CoeffField& init,
                         const FrequencyVector& omega, int p, const Truncation& trunc,
                         std::uint64_t budget = 1'000'000) {
    return tree_expansion(k, n, init, omega, p, trunc, budget).eval(t);
}

} // namespace qpbbm
