#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "p1lab/factorize.hpp"
#include "p1lab/intpoly.hpp"
#include "p1lab/roots.hpp"
#include "p1lab/rng.hpp"

using namespace p1lab;
using namespace p1lab::zx;
using Catch::Approx;

namespace {

ZPoly zp(std::initializer_list<long> v) {
    ZPoly r;
    for (long x : v) r.emplace_back(x);
    trim(r);
    return r;
}

ZPoly product(const ZFactorization& f) {
    ZPoly r{f.content};
    for (const auto& zf : f.factors)
        for (int i = 0; i < zf.mult; ++i) r = mul(r, zf.poly);
    trim(r);
    return r;
}

} // namespace

TEST_CASE("intpoly gcd and exact division basics") {
    ZPoly a = mul(zp({-1, 1}), zp({2, 3}));  // (t-1)(3t+2)
    ZPoly b = mul(zp({-1, 1}), zp({5, 0, 1})); // (t-1)(t^2+5)
    ZPoly g = gcd(a, b);
    REQUIRE(g == zp({-1, 1}));

    ZPoly q;
    REQUIRE(divide_exact(a, zp({-1, 1}), q));
    REQUIRE(q == zp({2, 3}));
    REQUIRE_FALSE(divide_exact(a, zp({1, 1}), q));

    REQUIRE(content(zp({6, -9, 12})) == 3);
    REQUIRE(is_squarefree(zp({-1, 0, 1})));
    REQUIRE_FALSE(is_squarefree(mul(zp({-1, 1}), zp({-1, 1}))));
}

TEST_CASE("squarefree decomposition") {
    // (t-1)^1 (t+2)^3
    ZPoly f = mul(zp({-1, 1}), mul(zp({2, 1}), mul(zp({2, 1}), zp({2, 1}))));
    auto dec = squarefree_decomposition(f);
    REQUIRE(dec.size() == 2);
    REQUIRE(dec[0].first == zp({-1, 1}));
    REQUIRE(dec[0].second == 1);
    REQUIRE(dec[1].first == zp({2, 1}));
    REQUIRE(dec[1].second == 3);
}

TEST_CASE("factor fixtures") {
    // 6 t (t-1)
    ZFactorization f1 = factor(zp({0, -6, 6}));
    REQUIRE(f1.content == 6);
    REQUIRE(f1.factors.size() == 2);
    REQUIRE(f1.factors[0].poly == zp({-1, 1}));
    REQUIRE(f1.factors[1].poly == zp({0, 1}));

    // t^2 + 1 irreducible
    ZFactorization f2 = factor(zp({1, 0, 1}));
    REQUIRE(f2.factors.size() == 1);
    REQUIRE(f2.factors[0].poly == zp({1, 0, 1}));

    // (t^2+1)^2 (t-2)^3, negated
    ZPoly big{mpz_class(-1)};
    for (int i = 0; i < 2; ++i) big = mul(big, zp({1, 0, 1}));
    for (int i = 0; i < 3; ++i) big = mul(big, zp({-2, 1}));
    ZFactorization f3 = factor(big);
    REQUIRE(f3.content == -1);
    REQUIRE(f3.factors.size() == 2);
    REQUIRE(product(f3) == big);

    // t^8 - 1 through the substitution split
    ZPoly c8 = zp({-1, 0, 0, 0, 0, 0, 0, 0, 1});
    ZFactorization f4 = factor(c8);
    REQUIRE(f4.factors.size() == 4); // (t-1)(t+1)(t^2+1)(t^4+1)
    REQUIRE(product(f4) == c8);
}

TEST_CASE("factor random products round-trip") {
    CounterRng rng(1234);
    for (int trial = 0; trial < 6; ++trial) {
        ZPoly f{mpz_class(1)};
        const int pieces = 2 + static_cast<int>(rng.next_below(3));
        for (int i = 0; i < pieces; ++i) {
            const int d = 1 + static_cast<int>(rng.next_below(4));
            ZPoly g(static_cast<std::size_t>(d) + 1);
            for (auto& c : g)
                c = mpz_class(static_cast<long>(rng.next_below(19)) - 9);
            if (g.back() == 0) g.back() = 1;
            trim(g);
            if (deg(g) < 1) g = zp({3, 1});
            f = mul(f, g);
        }
        if (deg(f) < 1) continue;
        ZFactorization ff = factor(f);
        REQUIRE(product(ff) == f);
        for (const auto& zf : ff.factors) {
            REQUIRE(zf.poly.back() > 0);
            REQUIRE(content(zf.poly) == 1);
        }
    }
}

TEST_CASE("factor the power-sum shaped degree-320 section") {
    // mimics the rounded stage section: inner degree-40 coefficients
    // binom(40,k)^4 * scale, substituted t -> t^8
    const int n = 40, ell = 8;
    const double eps = 0.2;
    ZPoly inner(static_cast<std::size_t>(n) + 1);
    const double lsup = 0.5 * ell * std::log(n + 1.0); // endpoint value
    for (int k = 0; k <= n; ++k) {
        double lb = 0.0;
        for (int i = 0; i < k; ++i)
            lb += std::log(double(n - i)) - std::log(double(i + 1));
        const double lc = 0.5 * ell * (std::log(n + 1.0) + lb) + eps * n * ell - lsup;
        mpz_class c;
        mpz_set_d(c.get_mpz_t(), std::round(std::exp(lc)));
        inner[static_cast<std::size_t>(k)] = c;
    }
    ZPoly f = detail::expand(inner, ell);
    REQUIRE(deg(f) == 320);
    ZFactorization ff = factor(f); // certificate is checked internally
    int degsum = 0;
    for (const auto& zf : ff.factors) degsum += deg(zf.poly) * zf.mult;
    REQUIRE(degsum == 320);
    REQUIRE(product(ff) == f);
}

TEST_CASE("roots with certificates") {
    // (t^2+1)(t-3)(2t+5)
    ZPoly f = mul(zp({1, 0, 1}), mul(zp({-3, 1}), zp({5, 2})));
    auto rs = roots(f);
    REQUIRE(rs.size() == 4);
    for (const auto& r : rs) REQUIRE(residual(f, r) < 1e-12);
    double found3 = 0.0, foundi = 0.0;
    for (const auto& r : rs) {
        if (std::abs(r - std::complex<double>(3, 0)) < 1e-9) found3 = 1;
        if (std::abs(r - std::complex<double>(0, 1)) < 1e-9) foundi = 1;
    }
    REQUIRE(found3 == 1.0);
    REQUIRE(foundi == 1.0);
}
