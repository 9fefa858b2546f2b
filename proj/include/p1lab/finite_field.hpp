#pragma once

// Density machinery over F_p: binary forms over the prime field,
// squarefreeness of divisors (the char-p subtleties handled via the
// bivariate gcd criterion plus p-th-power detection), exhaustive densities
// with the closed-form zeta reference of the projective line, and
// content/reduction of integral sections.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "form.hpp"
#include "fppoly.hpp"
#include "rng.hpp"

namespace p1lab {

struct PrimeField {
    explicit PrimeField(std::uint64_t prime) : p(prime) {
        if (p < 2 || p > 10000) throw std::invalid_argument("prime out of range");
        for (std::uint64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) throw std::invalid_argument("p is not prime");
    }
    std::uint64_t p;
};

// binary form over F_p; c[k] multiplies z0^k z1^(n-k)
struct FpForm {
    std::uint64_t p = 2;
    std::vector<std::uint64_t> c; // size degree+1

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const {
        for (auto v : c)
            if (v) return false;
        return true;
    }
};

namespace fpform {

// dehomogenization at z1 = 1 is the coefficient vector itself:
// P(t) = f(t,1) = sum c_k t^k
struct Split {
    int v0 = 0;      // multiplicity of z0
    int v1 = 0;      // multiplicity of z1
    fp::Poly core;   // P / t^{v0}, nonzero constant term
};

inline Split split(const FpForm& f) {
    Split s;
    fp::Poly P(f.c);
    fp::trim(P);
    if (P.empty()) throw std::invalid_argument("zero form");
    s.v1 = f.degree() - fp::deg(P);
    std::size_t lo = 0;
    while (P[lo] == 0) ++lo;
    s.v0 = static_cast<int>(lo);
    s.core = fp::Poly(P.begin() + static_cast<std::ptrdiff_t>(lo), P.end());
    return s;
}

// gcd of binary forms (zero arguments absorbed)
inline bool gcd_is_unit(const FpForm& f, const std::vector<FpForm>& others) {
    Split sf = split(f);
    int v0 = sf.v0, v1 = sf.v1;
    fp::Poly core = sf.core;
    for (const FpForm& g : others) {
        if (g.is_zero()) continue; // gcd(a, 0) = a
        Split sg = split(g);
        v0 = std::min(v0, sg.v0);
        v1 = std::min(v1, sg.v1);
        core = fp::gcd(core, sg.core, f.p);
    }
    return v0 == 0 && v1 == 0 && fp::deg(core) == 0;
}

} // namespace fpform

inline FpForm derivative_z0(const FpForm& f) {
    const int n = f.degree();
    FpForm r;
    r.p = f.p;
    r.c.assign(static_cast<std::size_t>(std::max(n, 1)), 0);
    for (int k = 1; k <= n; ++k)
        r.c[static_cast<std::size_t>(k - 1)] =
            (f.c[static_cast<std::size_t>(k)] * (static_cast<std::uint64_t>(k) % f.p)) % f.p;
    return r;
}

inline FpForm derivative_z1(const FpForm& f) {
    const int n = f.degree();
    FpForm r;
    r.p = f.p;
    r.c.assign(static_cast<std::size_t>(std::max(n, 1)), 0);
    for (int k = 0; k < n; ++k)
        r.c[static_cast<std::size_t>(k)] =
            (f.c[static_cast<std::size_t>(k)] * (static_cast<std::uint64_t>(n - k) % f.p)) % f.p;
    return r;
}

// div(f) smooth over the algebraic closure <=> f squarefree
// <=> gcd(f, df/dz0, df/dz1) is a unit; both partials vanishing identically
// means f is a p-th power (not squarefree unless degree 0).
inline bool is_smooth_divisor(const FpForm& f) {
    if (f.is_zero()) throw std::invalid_argument("zero form has no divisor");
    if (f.degree() == 0) return true;
    FpForm d0 = derivative_z0(f);
    FpForm d1 = derivative_z1(f);
    if (d0.is_zero() && d1.is_zero()) return false; // p-th power
    return fpform::gcd_is_unit(f, {d0, d1});
}

// zeta_{P^1/F_p}(s)^{-1} = (1 - p^{-s})(1 - p^{1-s}), s >= 2
inline double zeta_inverse(std::uint64_t p, int s) {
    if (s <= 1) throw std::invalid_argument("zeta_inverse: pole at s <= 1");
    const double pd = static_cast<double>(p);
    return (1.0 - std::pow(pd, -s)) * (1.0 - std::pow(pd, 1 - s));
}

struct DensityReport {
    std::uint64_t p = 2;
    int n = 0;
    std::uint64_t total = 0;
    std::uint64_t hits = 0;
    double density = 0.0;   // hits/total (exact rational is hits, total)
    double reference = 0.0; // zeta_inverse(p, 2)
    bool exhaustive = true;
    std::uint64_t seed = 0;
    double ci_halfwidth = 0.0; // binomial 95% halfwidth in sampled mode
};

// exhaustive density of squarefree divisors among nonzero degree-n forms
inline DensityReport smooth_divisor_density(std::uint64_t p, int n,
                                            std::uint64_t budget = 100000000ULL) {
    PrimeField field(p);
    if (n < 1) throw std::invalid_argument("degree >= 1");
    double sz = std::pow(static_cast<double>(p), n + 1);
    DensityReport rep;
    rep.p = p;
    rep.n = n;
    rep.reference = zeta_inverse(p, 2);
    if (sz <= static_cast<double>(budget)) {
        FpForm f;
        f.p = p;
        f.c.assign(static_cast<std::size_t>(n) + 1, 0);
        std::uint64_t count = 0, hits = 0;
        while (true) {
            // odometer increment
            std::size_t i = 0;
            while (i < f.c.size() && ++f.c[i] == p) f.c[i++] = 0;
            if (i == f.c.size()) break;
            ++count;
            if (is_smooth_divisor(f)) ++hits;
        }
        rep.total = count;
        rep.hits = hits;
        rep.exhaustive = true;
    } else {
        throw std::runtime_error(
            "smooth_divisor_density: enumeration budget exceeded (use sampled mode)");
    }
    rep.density = static_cast<double>(rep.hits) / static_cast<double>(rep.total);
    return rep;
}

// sampled variant for budgets past exhaustion; seed recorded in the report
inline DensityReport smooth_divisor_density_sampled(std::uint64_t p, int n,
                                                    std::uint64_t samples,
                                                    std::uint64_t seed) {
    PrimeField field(p);
    if (n < 1) throw std::invalid_argument("degree >= 1");
    CounterRng rng(seed);
    std::uint64_t hits = 0, total = 0;
    FpForm f;
    f.p = p;
    f.c.assign(static_cast<std::size_t>(n) + 1, 0);
    while (total < samples) {
        bool nonzero = false;
        for (auto& c : f.c) {
            c = rng.next_below(p);
            nonzero = nonzero || c != 0;
        }
        if (!nonzero) continue;
        ++total;
        if (is_smooth_divisor(f)) ++hits;
    }
    DensityReport rep;
    rep.p = p;
    rep.n = n;
    rep.total = total;
    rep.hits = hits;
    rep.density = static_cast<double>(hits) / static_cast<double>(total);
    rep.reference = zeta_inverse(p, 2);
    rep.exhaustive = false;
    rep.seed = seed;
    rep.ci_halfwidth = 1.959964 *
                       std::sqrt(rep.density * (1.0 - rep.density) /
                                 static_cast<double>(total));
    return rep;
}

// content exponent (p-adic valuation of the coefficient gcd) and the
// reduction of f / p^e mod p; div(f) has a vertical component over p
// exactly when the exponent is >= 1
inline std::pair<int, FpForm> content_and_reduction(const IntForm& f, std::uint64_t p) {
    if (f.is_zero()) throw std::invalid_argument("zero form");
    PrimeField field(p);
    int e = -1;
    for (int k = 0; k <= f.degree(); ++k) {
        if (f.coeff(k) == 0) continue;
        int v = 0;
        mpz_class c = f.coeff(k);
        while (mpz_divisible_ui_p(c.get_mpz_t(), static_cast<unsigned long>(p))) {
            c /= static_cast<unsigned long>(p);
            ++v;
        }
        e = (e < 0) ? v : std::min(e, v);
        if (e == 0) break;
    }
    mpz_class pe;
    mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(e));
    FpForm r;
    r.p = p;
    r.c.resize(static_cast<std::size_t>(f.degree()) + 1);
    for (int k = 0; k <= f.degree(); ++k) {
        mpz_class c = f.coeff(k) / pe;
        mpz_class m = c % static_cast<unsigned long>(p);
        if (m < 0) m += static_cast<unsigned long>(p);
        r.c[static_cast<std::size_t>(k)] = m.get_ui();
    }
    return {e, r};
}

// reduction mod p without content handling (may be the zero form)
inline FpForm reduce_form(const IntForm& f, std::uint64_t p) {
    FpForm r;
    r.p = p;
    r.c.resize(static_cast<std::size_t>(f.degree()) + 1);
    for (int k = 0; k <= f.degree(); ++k) {
        mpz_class m = f.coeff(k) % static_cast<unsigned long>(p);
        if (m < 0) m += static_cast<unsigned long>(p);
        r.c[static_cast<std::size_t>(k)] = m.get_ui();
    }
    return r;
}

} // namespace p1lab
