#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpbbm/picard.hpp"

namespace qpbbm {

inline constexpr const char* kVersion = "0.1.0";

/// One omega token: a numeric literal, "sqrtK", or "piOverK".
inline double parse_omega_token(const std::string& tok) {
    if (tok.rfind("sqrt", 0) == 0) {
        const double k = std::stod(tok.substr(4));
        if (k < 0.0) throw std::invalid_argument("omega token '" + tok + "': negative radicand");
        return std::sqrt(k);
    }
    if (tok.rfind("piOver", 0) == 0) {
        const double k = std::stod(tok.substr(6));
        if (k == 0.0) throw std::invalid_argument("omega token '" + tok + "': division by zero");
        return std::numbers::pi / k;
    }
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("omega token '" + tok + "': not a number");
    return v;
}

inline std::vector<double> parse_omega_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_omega_token(tok));
    if (out.empty()) throw std::invalid_argument("omega list is empty");
    return out;
}

/// Rationally independent default wave vector: (1), (1, sqrt 2), (1, sqrt 2,
/// sqrt 3), ... built from square roots of the first primes.
inline FrequencyVector default_omega(int nu) {
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<double> w = {1.0};
    for (int j = 1; j < nu; ++j) w.push_back(std::sqrt(primes[(j - 1) % 8]));
    return FrequencyVector(std::move(w));
}

inline DecayProfile::Kind parse_profile_kind(const std::string& s) {
    if (s == "exp") return DecayProfile::Kind::Exponential;
    if (s == "poly") return DecayProfile::Kind::Polynomial;
    throw std::invalid_argument("profile must be 'exp' or 'poly', got '" + s + "'");
}

inline QuadRule parse_quad_rule(const std::string& s) {
    if (s == "trapezoid") return QuadRule::Trapezoid;
    if (s == "simpson") return QuadRule::Simpson;
    throw std::invalid_argument("quad rule must be 'trapezoid' or 'simpson', got '" + s + "'");
}

inline nlohmann::json config_to_json(const SolverConfig& cfg, std::uint64_t seed) {
    return {{"p", cfg.p},
            {"nu", cfg.nu},
            {"radius", cfg.trunc_radius},
            {"omega", cfg.omega.omega},
            {"profile", cfg.profile.kind == DecayProfile::Kind::Exponential ? "exp" : "poly"},
            {"amp", cfg.profile.amp},
            {"rate", cfg.profile.rate},
            {"T", cfg.time_horizon},
            {"steps", cfg.time_steps},
            {"max_iters", cfg.max_iters},
            {"quad", cfg.quad_rule == QuadRule::Trapezoid ? "trapezoid" : "simpson"},
            {"tol", cfg.tol_fixed_point},
            {"override_horizon", cfg.override_horizon},
            {"seed", seed}};
}

/// Overlays JSON config-file values onto cfg; command-line flags are applied
/// afterwards by the CLI, so precedence is defaults < file < flags.
inline void apply_config_json(SolverConfig& cfg, std::uint64_t& seed, const nlohmann::json& j) {
    if (j.contains("p")) cfg.p = j["p"].get<int>();
    if (j.contains("nu")) cfg.nu = j["nu"].get<int>();
    if (j.contains("radius")) cfg.trunc_radius = j["radius"].get<int>();
    if (j.contains("omega")) {
        if (j["omega"].is_string())
            cfg.omega = FrequencyVector(parse_omega_list(j["omega"].get<std::string>()));
        else
            cfg.omega = FrequencyVector(j["omega"].get<std::vector<double>>());
    }
    if (j.contains("profile")) cfg.profile.kind = parse_profile_kind(j["profile"].get<std::string>());
    if (j.contains("amp")) cfg.profile.amp = j["amp"].get<double>();
    if (j.contains("rate")) cfg.profile.rate = j["rate"].get<double>();
    if (j.contains("T")) cfg.time_horizon = j["T"].get<double>();
    if (j.contains("steps")) cfg.time_steps = j["steps"].get<int>();
    if (j.contains("max_iters")) cfg.max_iters = j["max_iters"].get<int>();
    if (j.contains("quad")) cfg.quad_rule = parse_quad_rule(j["quad"].get<std::string>());
    if (j.contains("tol")) cfg.tol_fixed_point = j["tol"].get<double>();
    if (j.contains("override_horizon")) cfg.override_horizon = j["override_horizon"].get<bool>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
}

} // namespace qpbbm
