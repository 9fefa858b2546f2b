#pragma once

// Certified factorization of integer polynomials into irreducibles:
// squarefree decomposition, then per squarefree part a modular stage
// (distinct/equal-degree factorization at a prime chosen to minimize the
// factor count), quadratic Hensel lifting past the Mignotte bound, and
// subset recombination verified by exact division.  A substitution split
// f(t) = g(t^m) is peeled off first when present, which is the shape the
// power-sum pipeline produces.
//
// Every emitted factor list is certified at the end by exact
// multiplication against the input; any shortfall raises
// "factorization unverified".

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "fppoly.hpp"
#include "intpoly.hpp"
#include "rng.hpp"

namespace p1lab::zx {

struct FactorOptions {
    int prime_budget = 40;          // modular candidates scanned
    int good_enough_factors = 5;    // stop the scan at this count
    std::uint64_t subset_budget = 1u << 22;
    int degree_cap = 1024;
};

namespace detail {

inline const std::vector<std::uint64_t>& factor_primes() {
    // mid-size primes keep modular factor counts low
    static const std::vector<std::uint64_t> ps = [] {
        std::vector<std::uint64_t> v;
        for (std::uint64_t c = 1009; v.size() < 400; c += 2) {
            bool prime = true;
            for (std::uint64_t d = 3; d * d <= c; d += 2)
                if (c % d == 0) {
                    prime = false;
                    break;
                }
            if (prime) v.push_back(c);
        }
        return v;
    }();
    return ps;
}

// factor coefficient bound: sqrt(d+1) 2^d maxcoef(f) |lc(f)|
inline mpz_class mignotte_bound(const ZPoly& f) {
    const int d = deg(f);
    mpz_class b = max_abs_coeff(f);
    mpz_class two_d;
    mpz_ui_pow_ui(two_d.get_mpz_t(), 2, static_cast<unsigned long>(d + 2));
    return b * two_d * abs(f.back()) * (mpz_class(d) + 1);
}

inline ZPoly centered(const ZPoly& a, const mpz_class& modulus) {
    ZPoly r = a;
    const mpz_class half = modulus / 2;
    for (auto& c : r) {
        c %= modulus;
        if (c < 0) c += modulus;
        if (c > half) c -= modulus;
    }
    trim(r);
    return r;
}

inline ZPoly from_fp(const fp::Poly& a) {
    ZPoly r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mpz_class(static_cast<unsigned long>(a[i]));
    return r;
}

inline ZPoly mul_mod(const ZPoly& a, const ZPoly& b, const mpz_class& m) {
    ZPoly r = mul(a, b);
    for (auto& c : r) {
        c %= m;
        if (c < 0) c += m;
    }
    trim(r);
    return r;
}

inline ZPoly add_mod(const ZPoly& a, const ZPoly& b, const mpz_class& m) {
    ZPoly r(std::max(a.size(), b.size()), mpz_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    for (auto& c : r) {
        c %= m;
        if (c < 0) c += m;
    }
    trim(r);
    return r;
}

inline ZPoly sub_mod(const ZPoly& a, const ZPoly& b, const mpz_class& m) {
    ZPoly r(std::max(a.size(), b.size()), mpz_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    for (auto& c : r) {
        c %= m;
        if (c < 0) c += m;
    }
    trim(r);
    return r;
}

// division with remainder modulo m; divisor monic
inline void divmod_monic(const ZPoly& a, const ZPoly& b, const mpz_class& m,
                         ZPoly& q, ZPoly& r) {
    r = a;
    trim(r);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 1, mpz_class(0));
    while (!r.empty() && r.size() >= b.size()) {
        mpz_class c = r.back() % m;
        if (c < 0) c += m;
        const std::size_t sh = r.size() - b.size();
        q[sh] = c;
        for (std::size_t i = 0; i < b.size(); ++i) {
            r[sh + i] -= c * b[i];
            r[sh + i] %= m;
        }
        trim(r);
    }
    for (auto& c : r) {
        c %= m;
        if (c < 0) c += m;
    }
    for (auto& c : q) {
        c %= m;
        if (c < 0) c += m;
    }
    trim(r);
    trim(q);
}

inline ZPoly rem_monic(const ZPoly& a, const ZPoly& b, const mpz_class& m) {
    ZPoly q, r;
    divmod_monic(a, b, m, q, r);
    return r;
}

// quadratic Hensel step: f ≡ g h (mod m), s g + t h ≡ 1 (mod m), g,h monic;
// lifts to the same congruences mod m^2 (Zassenhaus / von zur Gathen 15.10)
inline void hensel_step(const ZPoly& f, ZPoly& g, ZPoly& h, ZPoly& s, ZPoly& t,
                        const mpz_class& m) {
    const mpz_class m2 = m * m;
    ZPoly e = sub_mod(f, mul(g, h), m2);
    ZPoly q, r;
    divmod_monic(mul_mod(s, e, m2), h, m2, q, r);
    ZPoly g1 = add_mod(g, add_mod(mul_mod(t, e, m2), mul_mod(q, g, m2), m2), m2);
    ZPoly h1 = add_mod(h, r, m2);
    ZPoly b = sub_mod(add_mod(mul_mod(s, g1, m2), mul_mod(t, h1, m2), m2),
                      ZPoly{mpz_class(1)}, m2);
    ZPoly c, d;
    divmod_monic(mul_mod(s, b, m2), h1, m2, c, d);
    ZPoly s1 = sub_mod(s, d, m2);
    ZPoly t1 = sub_mod(t, add_mod(mul_mod(t, b, m2), mul_mod(c, g1, m2), m2), m2);
    g = std::move(g1);
    h = std::move(h1);
    s = std::move(s1);
    t = std::move(t1);
}

// lift the modular factorization of a monic f from p to p^(2^k) >= bound
// by a factor tree
struct HenselNode {
    ZPoly poly;                 // product of the leaves, lifted
    ZPoly s, t;                 // Bezout pair for the two children
    int lo = 0, hi = 0;         // leaf range
    std::vector<HenselNode> kid;
};

inline void build_tree(HenselNode& node, const std::vector<fp::Poly>& leaves,
                       int lo, int hi, std::uint64_t p) {
    node.lo = lo;
    node.hi = hi;
    if (hi - lo == 1) {
        node.poly = from_fp(leaves[static_cast<std::size_t>(lo)]);
        return;
    }
    const int mid = (lo + hi) / 2;
    node.kid.resize(2);
    build_tree(node.kid[0], leaves, lo, mid, p);
    build_tree(node.kid[1], leaves, mid, hi, p);
    fp::Poly g, h;
    g = fp::one();
    for (int i = lo; i < mid; ++i) g = fp::mul(g, leaves[static_cast<std::size_t>(i)], p);
    h = fp::one();
    for (int i = mid; i < hi; ++i) h = fp::mul(h, leaves[static_cast<std::size_t>(i)], p);
    node.poly = from_fp(fp::mul(g, h, p));
    // extended euclid for s g + t h = 1 over F_p
    fp::Poly r0 = g, r1 = h, s0 = fp::one(), s1 = {}, t0 = {}, t1 = fp::one();
    while (!r1.empty()) {
        fp::Poly q, r;
        fp::divmod(r0, r1, p, q, r);
        fp::Poly s2 = fp::sub(s0, fp::mul(q, s1, p), p);
        fp::Poly t2 = fp::sub(t0, fp::mul(q, t1, p), p);
        r0 = std::move(r1); r1 = std::move(r);
        s0 = std::move(s1); s1 = std::move(s2);
        t0 = std::move(t1); t1 = std::move(t2);
    }
    if (fp::deg(r0) != 0) throw std::runtime_error("hensel: factors not coprime");
    const std::uint64_t inv = fp::inv_mod(r0[0], p);
    for (auto& c : s0) c = (c * inv) % p;
    for (auto& c : t0) c = (c * inv) % p;
    node.s = from_fp(s0);
    node.t = from_fp(t0);
}

// one global lift round: node data correct mod m on entry, target given
// mod m^2; on exit the whole subtree is correct mod m^2
inline void lift_tree(HenselNode& node, const ZPoly& target, const mpz_class& m) {
    if (node.kid.empty()) {
        node.poly = target;
        return;
    }
    ZPoly g = node.kid[0].poly, h = node.kid[1].poly, s = node.s, t = node.t;
    hensel_step(target, g, h, s, t, m);
    node.s = s;
    node.t = t;
    lift_tree(node.kid[0], g, m);
    lift_tree(node.kid[1], h, m);
    node.poly = target;
}

inline void collect_leaves(const HenselNode& node, std::vector<ZPoly>& out) {
    if (node.kid.empty()) {
        out.push_back(node.poly);
        return;
    }
    collect_leaves(node.kid[0], out);
    collect_leaves(node.kid[1], out);
}

// largest m >= 1 with f(t) = g(t^m); exponent-gap gcd
inline int substitution_order(const ZPoly& f) {
    int m = 0;
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i] != 0) m = std::gcd(m, static_cast<int>(i));
    return m == 0 ? 1 : m;
}

inline ZPoly compress(const ZPoly& f, int m) {
    ZPoly g(f.size() / static_cast<std::size_t>(m) + 1, mpz_class(0));
    for (std::size_t i = 0; i < f.size(); i += static_cast<std::size_t>(m))
        g[i / static_cast<std::size_t>(m)] = f[i];
    trim(g);
    return g;
}

inline ZPoly expand(const ZPoly& g, int m) {
    if (g.empty()) return {};
    ZPoly f((g.size() - 1) * static_cast<std::size_t>(m) + 1, mpz_class(0));
    for (std::size_t i = 0; i < g.size(); ++i) f[i * static_cast<std::size_t>(m)] = g[i];
    return f;
}

// factor a primitive squarefree polynomial (deg >= 1) into irreducibles
inline std::vector<ZPoly> factor_squarefree_primitive(const ZPoly& f,
                                                      const FactorOptions& opt);

// the modular+Hensel+recombination core; f primitive squarefree, deg >= 2
inline std::vector<ZPoly> zassenhaus(const ZPoly& f, const FactorOptions& opt) {
    const int d = deg(f);
    // choose the prime with fewest modular factors
    std::uint64_t best_p = 0;
    std::vector<fp::Poly> best_factors;
    int scanned = 0;
    for (std::uint64_t p : factor_primes()) {
        if (scanned >= opt.prime_budget) break;
        if (f.back() % static_cast<unsigned long>(p) == 0) continue;
        fp::Poly fp_ = reduce_mod(f, p);
        if (fp::deg(fp_) != d || !fp::is_squarefree(fp_, p)) continue;
        ++scanned;
        CounterRng rng(0xfac70u + p);
        std::vector<fp::Poly> fac = fp::factor_squarefree(fp::monic(fp_, p), p, rng);
        if (best_p == 0 || fac.size() < best_factors.size()) {
            best_p = p;
            best_factors = std::move(fac);
            if (static_cast<int>(best_factors.size()) <= opt.good_enough_factors) break;
        }
    }
    if (best_p == 0) throw std::runtime_error("factorization unverified: no usable prime");
    if (best_factors.size() == 1) return {sign_normalized(f)};

    std::sort(best_factors.begin(), best_factors.end(),
              [](const fp::Poly& a, const fp::Poly& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });

    // lift the monic factorization of lc^-1 f past 2*Mignotte
    const mpz_class bound = mignotte_bound(f);
    mpz_class modulus(static_cast<unsigned long>(best_p));
    HenselNode root;
    build_tree(root, best_factors, 0, static_cast<int>(best_factors.size()), best_p);
    while (modulus <= 2 * bound) {
        const mpz_class m2 = modulus * modulus;
        // monicize f mod m2: f* = lc^{-1} f
        mpz_class lcinv;
        if (mpz_invert(lcinv.get_mpz_t(), mpz_class(f.back() % m2).get_mpz_t(),
                       m2.get_mpz_t()) == 0)
            throw std::runtime_error("factorization unverified: lc not invertible");
        ZPoly fstar = f;
        for (auto& c : fstar) {
            c = (c * lcinv) % m2;
            if (c < 0) c += m2;
        }
        lift_tree(root, fstar, modulus);
        modulus = m2;
    }
    std::vector<ZPoly> lifted;
    collect_leaves(root, lifted);

    // subset recombination with exact-division verification
    std::vector<ZPoly> out;
    std::vector<int> alive(lifted.size());
    std::iota(alive.begin(), alive.end(), 0);
    ZPoly rest = f;
    std::uint64_t tried = 0;

    auto try_subset = [&](const std::vector<int>& subset) -> bool {
        ZPoly cand{mpz_class(rest.back())};
        for (int i : subset) cand = mul_mod(cand, lifted[static_cast<std::size_t>(i)], modulus);
        cand = centered(cand, modulus);
        cand = primitive(cand);
        ZPoly q;
        if (!divide_exact(rest, cand, q)) return false;
        out.push_back(sign_normalized(cand));
        rest = primitive(q);
        std::vector<int> keep;
        for (int i : alive)
            if (std::find(subset.begin(), subset.end(), i) == subset.end())
                keep.push_back(i);
        alive = std::move(keep);
        return true;
    };

    auto next_comb = [](std::vector<std::size_t>& idx, std::size_t n) -> bool {
        const std::size_t k = idx.size();
        std::size_t i = k;
        while (i-- > 0) {
            if (idx[i] != i + n - k) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                return true;
            }
        }
        return false;
    };

    std::size_t card = 1;
    while (!alive.empty() && 2 * card <= alive.size()) {
        std::vector<std::size_t> idx(card);
        std::iota(idx.begin(), idx.end(), 0);
        bool found = false;
        do {
            if (++tried > opt.subset_budget)
                throw std::runtime_error("factorization unverified: recombination budget");
            std::vector<int> subset;
            int degsum = 0;
            for (std::size_t i : idx) {
                subset.push_back(alive[i]);
                degsum += deg(lifted[static_cast<std::size_t>(alive[i])]);
            }
            if (degsum >= 1 && degsum <= deg(rest) / 2 && try_subset(subset)) {
                found = true;
                break;
            }
        } while (next_comb(idx, alive.size()));
        if (!found) ++card;
    }
    if (deg(rest) >= 1) out.push_back(sign_normalized(rest));
    return out;
}

inline std::vector<ZPoly> factor_squarefree_primitive(const ZPoly& f,
                                                      const FactorOptions& opt) {
    const int d = deg(f);
    if (d > opt.degree_cap)
        throw std::runtime_error("factorization unverified: degree cap");
    if (d == 1) return {sign_normalized(f)};

    const int m = substitution_order(f);
    if (m >= 2) {
        // f(t) = g(t^m): factor g, then each piece h(t^m) without re-split
        std::vector<ZPoly> out;
        for (const ZPoly& h : factor_squarefree_primitive(compress(f, m), opt)) {
            ZPoly hm = expand(h, m);
            if (deg(hm) == 1) {
                out.push_back(sign_normalized(hm));
                continue;
            }
            for (ZPoly& piece : zassenhaus(hm, opt)) out.push_back(std::move(piece));
        }
        return out;
    }
    return zassenhaus(f, opt);
}

} // namespace detail

struct ZFactor {
    ZPoly poly; // primitive, irreducible, positive leading coefficient
    int mult = 1;
};

struct ZFactorization {
    mpz_class content;       // signed content: f = content * prod poly^mult
    std::vector<ZFactor> factors;
};

// Certified factorization over Z.  The result is verified by exact
// multiplication against the input before returning.
inline ZFactorization factor(const ZPoly& f0, FactorOptions opt = {}) {
    ZPoly f = f0;
    trim(f);
    if (f.empty()) throw std::invalid_argument("factor: zero polynomial");
    ZFactorization out;
    out.content = content(f);
    if (f.back() < 0) out.content = -out.content;
    ZPoly prim = f;
    for (auto& c : prim) c /= out.content;

    if (deg(prim) >= 1) {
        for (auto& [part, mult] : squarefree_decomposition(prim)) {
            for (ZPoly& irf : detail::factor_squarefree_primitive(part, opt)) {
                ZFactor zf;
                zf.poly = std::move(irf);
                zf.mult = mult;
                out.factors.push_back(std::move(zf));
            }
        }
    }
    std::sort(out.factors.begin(), out.factors.end(),
              [](const ZFactor& a, const ZFactor& b) {
                  if (deg(a.poly) != deg(b.poly)) return deg(a.poly) < deg(b.poly);
                  return a.poly < b.poly;
              });

    // certificate: multiply everything back
    ZPoly check{out.content};
    for (const auto& zf : out.factors)
        for (int i = 0; i < zf.mult; ++i) check = mul(check, zf.poly);
    trim(check);
    if (check != f) throw std::runtime_error("factorization unverified: certificate failed");
    return out;
}

} // namespace p1lab::zx
