#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpbbm/spectral.hpp"
#include "qpbbm/time_grid.hpp"

namespace qpbbm {

/// 17 significant digits: round-trips doubles exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Field CSV: n_1..n_nu, re, im; one row per support point, lexicographic.
inline void write_field_csv(std::ostream& os, const CoeffField& field) {
    for (int j = 1; j <= field.nu(); ++j) os << "n_" << j << ",";
    os << "re,im\n";
    for (const auto& [n, v] : field.values()) {
        for (int j = 0; j < field.nu(); ++j) os << n[j] << ",";
        os << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
    }
}

/// Solution CSV: t, n_1..n_nu, re, im; frames in time order.
inline void write_solution_csv(std::ostream& os, const TimeGridField& grid) {
    const int nu = grid.frames.front().nu();
    os << "t,";
    for (int j = 1; j <= nu; ++j) os << "n_" << j << ",";
    os << "re,im\n";
    for (size_t m = 0; m < grid.frames.size(); ++m) {
        for (const auto& [n, v] : grid.frames[m].values()) {
            os << format_double(grid.times[m]) << ",";
            for (int j = 0; j < nu; ++j) os << n[j] << ",";
            os << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
        }
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

} // namespace detail

/// Reads a solution CSV back. Errors carry the 1-based line number.
inline TimeGridField read_solution_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("solution CSV parse error at line 1: empty file");
    const std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() < 4 || header[0] != "t")
        throw std::runtime_error("solution CSV parse error at line 1: expected header t,n_1..n_nu,re,im");
    const int nu = static_cast<int>(header.size()) - 3;

    struct Row {
        double t;
        MultiIndex n;
        Complex v;
    };
    std::vector<Row> rows;
    int radius = 0;
    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> tok = detail::split_csv_line(line);
        if (tok.size() != header.size())
            throw std::runtime_error("solution CSV parse error at line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(header.size()) + " columns");
        try {
            Row r;
            r.t = std::stod(tok[0]);
            std::vector<int> coords(static_cast<size_t>(nu));
            for (int j = 0; j < nu; ++j) coords[static_cast<size_t>(j)] = std::stoi(tok[static_cast<size_t>(j) + 1]);
            r.n = MultiIndex(std::move(coords));
            r.v = Complex{std::stod(tok[static_cast<size_t>(nu) + 1]), std::stod(tok[static_cast<size_t>(nu) + 2])};
            radius = std::max(radius, r.n.l1());
            rows.push_back(std::move(r));
        } catch (const std::exception&) {
            throw std::runtime_error("solution CSV parse error at line " + std::to_string(lineno));
        }
    }
    if (rows.empty()) throw std::runtime_error("solution CSV parse error: no data rows");

    TimeGridField grid;
    const Truncation trunc(radius, nu);
    for (const Row& r : rows) {
        if (grid.times.empty() || r.t != grid.times.back()) {
            grid.times.push_back(r.t);
            grid.frames.emplace_back(trunc);
        }
        grid.frames.back().set(r.n, r.v);
    }
    return grid;
}

inline nlohmann::json field_to_json(const CoeffField& field) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [n, v] : field.values())
        entries.push_back({{"n", n.coords()}, {"re", v.real()}, {"im", v.imag()}});
    return {{"nu", field.nu()}, {"radius", field.trunc().radius}, {"entries", entries}};
}

inline CoeffField field_from_json(const nlohmann::json& j) {
    CoeffField out(Truncation(j.at("radius").get<int>(), j.at("nu").get<int>()));
    for (const nlohmann::json& e : j.at("entries"))
        out.set(MultiIndex(e.at("n").get<std::vector<int>>()),
                Complex{e.at("re").get<double>(), e.at("im").get<double>()});
    return out;
}

/// FNV-1a digest of a file's bytes, for the run manifest.
inline std::string file_digest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("file_digest: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (is.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qpbbm
