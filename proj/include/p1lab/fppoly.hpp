#pragma once

// Univariate polynomial arithmetic over F_p, p < 2^31 (products fit in
// uint64).  Coefficients ascending, normalized so the zero polynomial is
// the empty vector.  Used by the finite-field experiments and by the
// modular stage of integer factorization.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "rng.hpp"

namespace p1lab::fp {

using Poly = std::vector<std::uint64_t>;

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }
inline bool is_zero(const Poly& a) { return a.empty(); }
inline Poly one() { return Poly{1}; }

inline Poly add(const Poly& a, const Poly& b, std::uint64_t p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::uint64_t v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = v >= p ? v - p : v;
    }
    trim(r);
    return r;
}

inline Poly sub(const Poly& a, const Poly& b, std::uint64_t p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::uint64_t av = i < a.size() ? a[i] : 0;
        std::uint64_t bv = i < b.size() ? b[i] : 0;
        r[i] = av >= bv ? av - bv : av + p - bv;
    }
    trim(r);
    return r;
}

inline Poly mul(const Poly& a, const Poly& b, std::uint64_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    trim(r);
    return r;
}

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    // extended euclid
    std::int64_t t = 0, nt = 1, r = static_cast<std::int64_t>(p),
                 nr = static_cast<std::int64_t>(a % p);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::int64_t tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::runtime_error("inv_mod: not invertible");
    return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(p) : t);
}

// division with remainder; b != 0
inline void divmod(const Poly& a, const Poly& b, std::uint64_t p, Poly& q, Poly& r) {
    if (b.empty()) throw std::invalid_argument("fp::divmod by zero");
    r = a;
    trim(r);
    q.assign(r.size() > b.size() ? r.size() - b.size() + 1 : 1, 0);
    const std::uint64_t binv = inv_mod(b.back(), p);
    while (r.size() >= b.size() && !r.empty()) {
        const std::uint64_t c = (r.back() * binv) % p;
        const std::size_t sh = r.size() - b.size();
        q[sh] = c;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::uint64_t sub_ = (c * b[i]) % p;
            std::uint64_t& dst = r[sh + i];
            dst = dst >= sub_ ? dst - sub_ : dst + p - sub_;
        }
        trim(r);
    }
    trim(q);
}

inline Poly rem(const Poly& a, const Poly& b, std::uint64_t p) {
    Poly q, r;
    divmod(a, b, p, q, r);
    return r;
}

inline Poly quot(const Poly& a, const Poly& b, std::uint64_t p) {
    Poly q, r;
    divmod(a, b, p, q, r);
    return q;
}

inline Poly monic(const Poly& a, std::uint64_t p) {
    if (a.empty()) return a;
    Poly r = a;
    const std::uint64_t s = inv_mod(a.back(), p);
    for (auto& c : r) c = (c * s) % p;
    return r;
}

inline Poly gcd(Poly a, Poly b, std::uint64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a.empty() ? a : monic(a, p);
}

inline Poly derivative(const Poly& a, std::uint64_t p) {
    if (a.size() <= 1) return {};
    Poly r(a.size() - 1, 0);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = (a[i] * (i % p)) % p;
    trim(r);
    return r;
}

inline Poly pow_mod(Poly base, mpz_class e, const Poly& f, std::uint64_t p) {
    Poly r = one();
    base = rem(base, f, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = rem(mul(r, base, p), f, p);
        e >>= 1;
        if (e > 0) base = rem(mul(base, base, p), f, p);
    }
    return r;
}

// gcd(f, f') == 1; handles f' == 0 (p-th powers) as non-squarefree
inline bool is_squarefree(const Poly& f, std::uint64_t p) {
    if (deg(f) <= 0) return true;
    Poly d = derivative(f, p);
    if (d.empty()) return false;
    return deg(gcd(f, d, p)) == 0;
}

// distinct-degree factorization of a squarefree monic f:
// returns pairs (d, product of all irreducible factors of degree d)
inline std::vector<std::pair<int, Poly>> ddf(const Poly& fin, std::uint64_t p) {
    Poly f = monic(fin, p);
    std::vector<std::pair<int, Poly>> out;
    Poly x{0, 1};
    Poly h = x; // x^{p^i} mod f, starting at i=0
    int i = 0;
    while (deg(f) >= 1) {
        ++i;
        if (2 * i > deg(f)) {
            out.emplace_back(deg(f), f);
            break;
        }
        h = pow_mod(h, mpz_class(static_cast<unsigned long>(p)), f, p);
        Poly g = gcd(sub(h, x, p), f, p);
        if (deg(g) >= 1) {
            out.emplace_back(i, g);
            f = quot(f, g, p);
            h = rem(h, f, p);
        }
    }
    return out;
}

// Cantor-Zassenhaus equal-degree splitting, p odd; deterministic given rng
inline void edf(const Poly& f, int d, std::uint64_t p, CounterRng& rng,
                std::vector<Poly>& out) {
    if (deg(f) == d) {
        out.push_back(monic(f, p));
        return;
    }
    mpz_class pd;
    mpz_ui_pow_ui(pd.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(d));
    mpz_class e = (pd - 1) / 2;
    while (true) {
        Poly t(static_cast<std::size_t>(deg(f)), 0);
        for (auto& c : t) c = rng.next_below(p);
        trim(t);
        if (deg(t) < 1) continue;
        Poly s = pow_mod(t, e, f, p);
        s = sub(s, one(), p);
        Poly g = gcd(s, f, p);
        if (deg(g) >= 1 && deg(g) < deg(f)) {
            edf(g, d, p, rng, out);
            edf(quot(f, g, p), d, p, rng, out);
            return;
        }
    }
}

// full factorization of a squarefree monic f over F_p, p odd
inline std::vector<Poly> factor_squarefree(const Poly& f, std::uint64_t p,
                                           CounterRng& rng) {
    std::vector<Poly> out;
    for (auto& [d, g] : ddf(f, p)) edf(g, d, p, rng, out);
    return out;
}

} // namespace p1lab::fp
