#pragma once

// Run configuration: line-oriented `key = value` files, with CLI flags
// overriding file values overriding defaults.  Unknown keys are errors.
// Section literals use the grammar  c*z0^j*z1^k  joined by + and -.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "form.hpp"

namespace p1lab {

struct RunConfig {
    std::uint64_t grid_size = 100000;
    double epsilon = 0.0;     // twist of the primary bundle L
    double n_epsilon = 0.0;   // twist of the second bundle N
    std::vector<double> perturbation;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string format = "csv";
    // subcommand-specific numerics
    std::vector<int> degrees;
    int degree = 1;
    std::uint64_t prime = 3;
    double radius = 1.0;
    double delta = 0.0;
    std::vector<double> tols{0.2, 0.1, 0.05};
    int nmax = 64;
    int ellmax = 64;
    int window = 3;
    double threshold = -1.0; // < 0: subcommand default
    int l_degree = 1;
    int n_degree = 1;
    std::string section;
    std::string point;
    std::string center;
    std::string avoid;
    std::string constraint;
    std::uint64_t samples = 1000000;
    double expect = std::nan("");

    void validate() const {
        if (grid_size < 1000) throw std::runtime_error("grid_size must be >= 1000");
        if (epsilon < 0.0 || n_epsilon < 0.0)
            throw std::runtime_error("epsilon must be >= 0");
    }
};

namespace cfg_detail {

inline std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

inline std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace cfg_detail

// apply one key = value assignment; unknown keys raise
inline void apply_config_kv(RunConfig& c, const std::string& key,
                            const std::string& value) {
    using namespace cfg_detail;
    if (key == "grid_size") c.grid_size = std::stoull(value);
    else if (key == "epsilon") c.epsilon = std::stod(value);
    else if (key == "n_epsilon") c.n_epsilon = std::stod(value);
    else if (key == "perturbation") c.perturbation = parse_doubles(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "format") {
        if (value != "csv" && value != "json")
            throw std::runtime_error("format must be csv or json");
        c.format = value;
    } else if (key == "degrees") c.degrees = parse_ints(value);
    else if (key == "degree") c.degree = std::stoi(value);
    else if (key == "prime") c.prime = std::stoull(value);
    else if (key == "radius") c.radius = std::stod(value);
    else if (key == "delta") c.delta = std::stod(value);
    else if (key == "tols") c.tols = parse_doubles(value);
    else if (key == "nmax") c.nmax = std::stoi(value);
    else if (key == "ellmax") c.ellmax = std::stoi(value);
    else if (key == "window") c.window = std::stoi(value);
    else if (key == "threshold") c.threshold = std::stod(value);
    else if (key == "l_degree") c.l_degree = std::stoi(value);
    else if (key == "n_degree") c.n_degree = std::stoi(value);
    else if (key == "section") c.section = value;
    else if (key == "point") c.point = value;
    else if (key == "center") c.center = value;
    else if (key == "avoid") c.avoid = value;
    else if (key == "constraint") c.constraint = value;
    else if (key == "samples") c.samples = std::stoull(value);
    else if (key == "expect") c.expect = std::stod(value);
    else throw std::runtime_error("unknown config key: " + key);
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = cfg_detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = cfg_detail::trim(t.substr(0, eq));
        const std::string value = cfg_detail::trim(t.substr(eq + 1));
        try {
            apply_config_kv(base, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
    return base;
}

// section literal:  c*z0^j*z1^k  terms joined by + / -; integer or
// decimal coefficients
struct SectionTerm {
    std::string coef; // signed literal, may contain '.'
    int j = 0, k = 0;
};

inline std::vector<SectionTerm> parse_section_terms(const std::string& text) {
    std::vector<SectionTerm> terms;
    std::string s;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') s += ch;
    if (s.empty()) throw std::runtime_error("empty section literal");

    std::size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = (s[pos] == '-') ? -1 : 1;
            ++pos;
        }
        std::string digits;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
            digits += s[pos++];
        SectionTerm t;
        t.coef = (sign < 0 ? "-" : "") + (digits.empty() ? std::string("1") : digits);
        auto read_var = [&](char idx) -> int {
            if (pos < s.size() && s[pos] == '*' && pos + 2 < s.size() &&
                s[pos + 1] == 'z' && s[pos + 2] == idx)
                ++pos;
            if (pos + 1 < s.size() && s[pos] == 'z' && s[pos + 1] == idx) {
                pos += 2;
                int e = 1;
                if (pos < s.size() && s[pos] == '^') {
                    ++pos;
                    std::string ed;
                    while (pos < s.size() &&
                           std::isdigit(static_cast<unsigned char>(s[pos])))
                        ed += s[pos++];
                    if (ed.empty()) throw std::runtime_error("bad exponent");
                    e = std::stoi(ed);
                }
                return e;
            }
            return 0;
        };
        t.j = read_var('0');
        t.k = read_var('1');
        if (t.j == 0 && t.k == 0 && digits.empty())
            throw std::runtime_error("cannot parse section literal near '" +
                                     s.substr(pos, 4) + "'");
        terms.push_back(std::move(t));
        if (pos < s.size() && s[pos] != '+' && s[pos] != '-')
            throw std::runtime_error("cannot parse section literal near '" +
                                     s.substr(pos, 4) + "'");
    }
    return terms;
}

inline IntForm parse_section(const std::string& text) {
    auto terms = parse_section_terms(text);
    int n = 0;
    for (const auto& t : terms) n = std::max(n, t.j + t.k);
    IntForm f = IntForm::zero(n);
    for (const auto& t : terms) {
        if (t.coef.find('.') != std::string::npos)
            throw std::runtime_error("integral section needs integer coefficients");
        if (t.j + t.k != n)
            throw std::runtime_error("section literal is not homogeneous");
        f.coeff(t.j) += mpz_class(t.coef);
    }
    return f;
}

inline RealForm parse_real_section(const std::string& text) {
    auto terms = parse_section_terms(text);
    int n = 0;
    for (const auto& t : terms) n = std::max(n, t.j + t.k);
    RealForm f = RealForm::zero(n);
    for (const auto& t : terms) {
        if (t.j + t.k != n)
            throw std::runtime_error("section literal is not homogeneous");
        f.coeff(t.j) += std::stod(t.coef);
    }
    return f;
}

// point literal [a:b]
inline std::pair<mpz_class, mpz_class> parse_point(const std::string& text) {
    std::string s = cfg_detail::trim(text);
    if (s.size() < 5 || s.front() != '[' || s.back() != ']')
        throw std::runtime_error("point literal must look like [a:b]");
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("point literal must look like [a:b]");
    return {mpz_class(cfg_detail::trim(s.substr(1, colon - 1))),
            mpz_class(cfg_detail::trim(s.substr(colon + 1, s.size() - colon - 2)))};
}

} // namespace p1lab
