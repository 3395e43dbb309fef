#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qpbbm/lattice.hpp"

using namespace qpbbm;

TEST_CASE("inner product") {
    const FrequencyVector w{1.0, std::sqrt(2.0)};
    CHECK(inner(MultiIndex{0, 0}, w) == 0.0);
    CHECK(inner(MultiIndex{1, 0}, w) == 1.0);
    CHECK(inner(MultiIndex{1, 1}, w) == Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(inner(MultiIndex{1}, w), std::invalid_argument);
}

TEST_CASE("multiplier values and bound") {
    const FrequencyVector w{1.0};
    CHECK(multiplier(MultiIndex{0}, w) == std::complex<double>(0.0, 0.0));
    CHECK(multiplier(MultiIndex{1}, w) == std::complex<double>(0.0, -0.5));
    CHECK(multiplier(MultiIndex{2}, w).imag() == Catch::Approx(-0.4).epsilon(1e-15));
    CHECK(multiplier(MultiIndex{2}, w).real() == 0.0);

    // lambda is odd, purely imaginary, |lambda| <= 1/2 on a whole ball.
    const FrequencyVector w2{1.0, std::sqrt(2.0)};
    for (const MultiIndex& n : enumerate_lattice(Truncation(6, 2))) {
        const auto lam = multiplier(n, w2);
        CHECK(lam.real() == 0.0);
        CHECK(multiplier(-n, w2) == std::conj(lam));
        CHECK(multiplier(-n, w2) == -lam);
        CHECK(std::abs(lam) <= 0.5 + 1e-15);
    }
}

TEST_CASE("lattice enumeration") {
    const auto pts0 = enumerate_lattice(Truncation(0, 1));
    REQUIRE(pts0.size() == 1);
    CHECK(pts0[0] == MultiIndex{0});

    const auto pts = enumerate_lattice(Truncation(2, 1));
    REQUIRE(pts.size() == 5);
    CHECK(pts.front() == MultiIndex{-2});
    CHECK(pts.back() == MultiIndex{2});

    const auto pts2 = enumerate_lattice(Truncation(1, 2));
    REQUIRE(pts2.size() == 5);
    // Lexicographic order and uniqueness.
    for (size_t i = 1; i < pts2.size(); ++i) CHECK(pts2[i - 1] < pts2[i]);
}

TEST_CASE("ball count closed form matches enumeration") {
    for (int nu = 1; nu <= 4; ++nu)
        for (int N = 0; N <= 10; ++N)
            CHECK(enumerate_lattice(Truncation(N, nu)).size() == lattice_ball_count(nu, N));
}

TEST_CASE("shell counts sum to ball counts") {
    for (int nu = 1; nu <= 4; ++nu) {
        std::uint64_t acc = 0;
        for (int m = 0; m <= 9; ++m) {
            acc += lattice_shell_count(nu, m);
            CHECK(acc == lattice_ball_count(nu, m));
        }
    }
}

TEST_CASE("frequency vector validation") {
    CHECK_THROWS_AS(FrequencyVector(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyVector({0.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(FrequencyVector({1.0, 0.0}));
}

TEST_CASE("resonance heuristic") {
    CHECK_FALSE(has_numerical_resonance(Truncation(4, 2), FrequencyVector{1.0, std::sqrt(2.0)}));
    CHECK(has_numerical_resonance(Truncation(2, 2), FrequencyVector{1.0, -1.0}));
}
