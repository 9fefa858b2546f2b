#pragma once

// Exact univariate integer-polynomial arithmetic (GMP coefficients):
// pseudo-division, primitive-PRS gcd, Yun squarefree decomposition, exact
// division.  Everything downstream that claims exactness routes through
// the exact division check here.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "fppoly.hpp"

namespace p1lab::zx {

using ZPoly = std::vector<mpz_class>; // ascending, normalized (empty = zero)

inline void trim(ZPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const ZPoly& a) { return static_cast<int>(a.size()) - 1; }
inline bool is_zero(const ZPoly& a) { return a.empty(); }

inline ZPoly mul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline ZPoly sub(const ZPoly& a, const ZPoly& b) {
    ZPoly r(std::max(a.size(), b.size()), mpz_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

inline ZPoly scale(const ZPoly& a, const mpz_class& s) {
    ZPoly r = a;
    for (auto& c : r) c *= s;
    trim(r);
    return r;
}

inline ZPoly derivative(const ZPoly& a) {
    if (a.size() <= 1) return {};
    ZPoly r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = mpz_class(i) * a[i];
    trim(r);
    return r;
}

inline mpz_class content(const ZPoly& a) {
    mpz_class g = 0;
    for (const auto& c : a) {
        mpz_class t = abs(c);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

inline ZPoly primitive(const ZPoly& a) {
    mpz_class g = content(a);
    if (g == 0 || g == 1) return a;
    ZPoly r = a;
    for (auto& c : r) c /= g;
    return r;
}

// sign convention: positive leading coefficient
inline ZPoly sign_normalized(const ZPoly& a) {
    if (a.empty() || a.back() > 0) return a;
    ZPoly r = a;
    for (auto& c : r) c = -c;
    return r;
}

// pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, exact over Z
inline ZPoly prem(ZPoly a, const ZPoly& b) {
    if (b.empty()) throw std::invalid_argument("prem by zero");
    trim(a);
    const int db = deg(b);
    const mpz_class& lb = b.back();
    int k = deg(a) - db + 1;
    while (deg(a) >= db && !a.empty()) {
        const mpz_class c = a.back();
        const std::size_t sh = a.size() - b.size();
        for (auto& coef : a) coef *= lb;
        for (std::size_t i = 0; i < b.size(); ++i) a[sh + i] -= c * b[i];
        trim(a);
        --k;
    }
    // keep the classical normalization lb^k残 for the remaining defect
    while (k-- > 0)
        for (auto& coef : a) coef *= lb;
    return a;
}

// exact quotient; returns false when b does not divide a
inline bool divide_exact(const ZPoly& a, const ZPoly& b, ZPoly& q) {
    if (b.empty()) return false;
    ZPoly r = a;
    trim(r);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 1, mpz_class(0));
    const mpz_class& lb = b.back();
    while (!r.empty() && r.size() >= b.size()) {
        mpz_class c, rem_;
        mpz_fdiv_qr(c.get_mpz_t(), rem_.get_mpz_t(), r.back().get_mpz_t(),
                    lb.get_mpz_t());
        if (rem_ != 0) return false;
        const std::size_t sh = r.size() - b.size();
        q[sh] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[sh + i] -= c * b[i];
        trim(r);
    }
    if (!r.empty()) return false;
    trim(q);
    return true;
}

// primitive-PRS gcd of primitive parts, sign-normalized and primitive
inline ZPoly gcd(ZPoly a, ZPoly b) {
    trim(a);
    trim(b);
    if (a.empty()) return sign_normalized(primitive(b));
    if (b.empty()) return sign_normalized(primitive(a));
    a = primitive(a);
    b = primitive(b);
    if (deg(a) < deg(b)) std::swap(a, b);
    while (!b.empty()) {
        ZPoly r = primitive(prem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return sign_normalized(a);
}

// Yun squarefree decomposition of a primitive polynomial:
// f = prod_i out[i].first ^ out[i].second with squarefree coprime parts.
inline std::vector<std::pair<ZPoly, int>> squarefree_decomposition(const ZPoly& f0) {
    ZPoly f = primitive(f0);
    std::vector<std::pair<ZPoly, int>> out;
    if (deg(f) < 1) return out;
    ZPoly fp_ = derivative(f);
    ZPoly a0 = gcd(f, fp_);
    if (deg(a0) == 0) {
        out.emplace_back(sign_normalized(f), 1);
        return out;
    }
    ZPoly b, c, d;
    if (!divide_exact(f, a0, b) || !divide_exact(fp_, a0, c))
        throw std::runtime_error("squarefree decomposition: inexact division");
    d = sub(c, derivative(b));
    int i = 1;
    while (true) {
        ZPoly a = gcd(b, d);
        if (deg(b) == 0) break;
        if (deg(a) >= 1) out.emplace_back(sign_normalized(a), i);
        ZPoly b1, c1;
        if (!divide_exact(b, a, b1) || !divide_exact(d, a, c1))
            throw std::runtime_error("squarefree decomposition: inexact division");
        b = std::move(b1);
        d = sub(c1, derivative(b));
        ++i;
        if (i > 1000) throw std::runtime_error("squarefree decomposition diverged");
    }
    return out;
}

inline fp::Poly reduce_mod(const ZPoly& a, std::uint64_t p) {
    fp::Poly r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        mpz_class m = a[i] % static_cast<unsigned long>(p);
        if (m < 0) m += static_cast<unsigned long>(p);
        r[i] = m.get_ui();
    }
    fp::trim(r);
    return r;
}

// squarefree over Q certified through a single good prime: if f mod p keeps
// the degree and is squarefree, disc(f) != 0.  Falls back to the exact gcd.
inline bool is_squarefree(const ZPoly& f) {
    if (deg(f) <= 0) return true;
    static const std::uint64_t probes[] = {10007, 10009, 10037, 10039, 10061};
    for (std::uint64_t p : probes) {
        if (f.back() % static_cast<unsigned long>(p) == 0) continue;
        if (fp::is_squarefree(reduce_mod(f, p), p)) return true;
    }
    return deg(gcd(f, derivative(f))) == 0;
}

inline double log_abs(const mpz_class& a) {
    if (a == 0) throw std::invalid_argument("log of zero");
    signed long e2;
    const double mant = mpz_get_d_2exp(&e2, a.get_mpz_t());
    return std::log(std::abs(mant)) + static_cast<double>(e2) * 0.6931471805599453;
}

inline mpz_class eval(const ZPoly& a, const mpz_class& x) {
    mpz_class r = 0;
    for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
    return r;
}

inline mpz_class max_abs_coeff(const ZPoly& a) {
    mpz_class m = 0;
    for (const auto& c : a) {
        mpz_class t = abs(c);
        if (t > m) m = t;
    }
    return m;
}

} // namespace p1lab::zx
