#include <catch2/catch_amalgamated.hpp>

#include "p1lab/finite_field.hpp"
#include "p1lab/form.hpp"

using namespace p1lab;
using Catch::Approx;

namespace {

FpForm ff(std::uint64_t p, std::initializer_list<std::uint64_t> c) {
    FpForm f;
    f.p = p;
    f.c = c;
    return f;
}

// naive oracle: f has a repeated factor iff g^2 | f for some form g of
// degree >= 1; checked by exhaustive trial division over all candidates
bool naive_smooth(const FpForm& f) {
    const int n = f.degree();
    const std::uint64_t p = f.p;
    auto split_f = fpform::split(f);
    if (split_f.v0 >= 2 || split_f.v1 >= 2) return false;
    // univariate core: test all monic g with 2 deg g <= deg core
    const int dc = fp::deg(split_f.core);
    for (int d = 1; 2 * d <= dc; ++d) {
        // enumerate monic univariate of degree d with nonzero constant term
        std::vector<std::uint64_t> g(static_cast<std::size_t>(d) + 1, 0);
        g.back() = 1;
        while (true) {
            std::size_t i = 0;
            while (i + 1 < g.size() && ++g[i] == p) g[i++] = 0;
            if (i + 1 == g.size()) break;
            if (g[0] == 0) continue;
            fp::Poly gg(g);
            fp::Poly sq = fp::mul(gg, gg, p);
            if (fp::is_zero(fp::rem(split_f.core, sq, p))) return false;
        }
    }
    (void)n;
    return true;
}

} // namespace

TEST_CASE("prime field construction") {
    REQUIRE_NOTHROW(PrimeField(2));
    REQUIRE_NOTHROW(PrimeField(9973));
    REQUIRE_THROWS_AS(PrimeField(1), std::invalid_argument);
    REQUIRE_THROWS_AS(PrimeField(9), std::invalid_argument);
    REQUIRE_THROWS_AS(PrimeField(10007), std::invalid_argument);
}

TEST_CASE("is_smooth_divisor fixtures") {
    // z0 z1 over F_3: distinct roots
    REQUIRE(is_smooth_divisor(ff(3, {0, 1, 0})));
    // z0^2 over F_3
    REQUIRE_FALSE(is_smooth_divisor(ff(3, {0, 0, 1})));
    // z0^2 + z1^2 over F_2 equals (z0+z1)^2
    REQUIRE_FALSE(is_smooth_divisor(ff(2, {1, 0, 1})));
    // z0^2 + z1^2 over F_3 is squarefree
    REQUIRE(is_smooth_divisor(ff(3, {1, 0, 1})));
    REQUIRE_THROWS_AS(is_smooth_divisor(ff(3, {0, 0, 0})), std::invalid_argument);
}

TEST_CASE("is_smooth_divisor agrees with the naive oracle") {
    for (std::uint64_t p : {2ULL, 3ULL}) {
        for (int n : {2, 3, 4}) {
            if (std::pow(double(p), n + 1) > 1e5) continue;
            FpForm f;
            f.p = p;
            f.c.assign(static_cast<std::size_t>(n) + 1, 0);
            while (true) {
                std::size_t i = 0;
                while (i < f.c.size() && ++f.c[i] == p) f.c[i++] = 0;
                if (i == f.c.size()) break;
                REQUIRE(is_smooth_divisor(f) == naive_smooth(f));
            }
        }
    }
}

TEST_CASE("smooth divisor density fixtures") {
    // p=2, n=1: every nonzero linear form is squarefree
    DensityReport r21 = smooth_divisor_density(2, 1);
    REQUIRE(r21.hits == r21.total);
    REQUIRE(r21.total == 3);

    // p=3, n=2: 18 squarefree among 26 (8 unit multiples of squares of the
    // 4 projective linear forms)
    DensityReport r32 = smooth_divisor_density(3, 2);
    REQUIRE(r32.total == 26);
    REQUIRE(r32.hits == 18);

    // p=5, n=6 against the zeta reference
    DensityReport r56 = smooth_divisor_density(5, 6);
    REQUIRE(r56.reference == Approx(0.768).margin(1e-9));
    REQUIRE(std::abs(r56.density - r56.reference) <= 0.05);

    REQUIRE_THROWS_WITH(smooth_divisor_density(97, 6),
                        Catch::Matchers::ContainsSubstring("budget"));
}

TEST_CASE("density is stable in n at fixed p") {
    double prev_gap = 1e9;
    for (int n = 3; n <= 6; ++n) {
        DensityReport r = smooth_divisor_density(3, n);
        const double gap = std::abs(r.density - smooth_divisor_density(3, n + 1).density);
        REQUIRE(gap <= prev_gap * 1.10);
        prev_gap = gap;
    }
}

TEST_CASE("smoothness is invariant under coordinate substitutions") {
    // f(z0,z1) -> f(a z0 + b z1, c z0 + d z1) with ad - bc != 0 preserves
    // squarefreeness; spot-checked over random invertible substitutions
    CounterRng rng(57);
    for (std::uint64_t p : {3ULL, 5ULL}) {
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + static_cast<int>(rng.next_below(3));
            FpForm f;
            f.p = p;
            f.c.resize(static_cast<std::size_t>(n) + 1);
            bool nz = false;
            for (auto& c : f.c) {
                c = rng.next_below(p);
                nz = nz || c != 0;
            }
            if (!nz) continue;
            std::uint64_t a, b, c, d;
            do {
                a = rng.next_below(p);
                b = rng.next_below(p);
                c = rng.next_below(p);
                d = rng.next_below(p);
            } while (a * d % p == b * c % p); // det = 0
            // substitute via repeated form multiplication
            FpForm g;
            g.p = p;
            g.c.assign(static_cast<std::size_t>(n) + 1, 0);
            for (int k = 0; k <= n; ++k) {
                if (f.c[static_cast<std::size_t>(k)] == 0) continue;
                // (a z0 + c z1)^k (b z0 + d z1)^(n-k)
                std::vector<std::uint64_t> term{1};
                auto mul_lin = [&](std::uint64_t s0, std::uint64_t s1) {
                    std::vector<std::uint64_t> r(term.size() + 1, 0);
                    for (std::size_t i = 0; i < term.size(); ++i) {
                        r[i + 1] = (r[i + 1] + term[i] * s0) % p; // z0 raises index
                        r[i] = (r[i] + term[i] * s1) % p;
                    }
                    term = std::move(r);
                };
                for (int i = 0; i < k; ++i) mul_lin(a, c);
                for (int i = 0; i < n - k; ++i) mul_lin(b, d);
                for (std::size_t i = 0; i < term.size(); ++i)
                    g.c[i] = (g.c[i] + f.c[static_cast<std::size_t>(k)] * term[i]) % p;
            }
            if (g.is_zero()) continue;
            REQUIRE(is_smooth_divisor(f) == is_smooth_divisor(g));
        }
    }
}

TEST_CASE("zeta_inverse closed forms") {
    REQUIRE(zeta_inverse(5, 2) == Approx(0.768).margin(1e-12));
    REQUIRE(zeta_inverse(2, 2) == Approx(0.375).margin(1e-12));
    REQUIRE(zeta_inverse(997, 2) >= 0.998);
    REQUIRE_THROWS_AS(zeta_inverse(5, 1), std::invalid_argument);
}

TEST_CASE("content and reduction") {
    IntForm f(std::vector<mpz_class>{mpz_class(4), mpz_class(2)}); // 2 z0 + 4 z1
    auto [e, r] = content_and_reduction(f, 2);
    REQUIRE(e == 1);
    REQUIRE(r.c == std::vector<std::uint64_t>{0, 1}); // z0

    IntForm g(std::vector<mpz_class>{mpz_class(1), mpz_class(1)});
    auto [e2, r2] = content_and_reduction(g, 7);
    REQUIRE(e2 == 0);
    REQUIRE(r2.c == std::vector<std::uint64_t>{1, 1});

    IntForm h(std::vector<mpz_class>{mpz_class(0), mpz_class(0), mpz_class(12)});
    auto [e3, r3] = content_and_reduction(h, 2);
    REQUIRE(e3 == 2);
    REQUIRE(r3.c == std::vector<std::uint64_t>{0, 0, 1});

    REQUIRE_THROWS_AS(content_and_reduction(IntForm::zero(2), 3),
                      std::invalid_argument);
}

TEST_CASE("content-divisible density approaches p^-(n+1)") {
    // among integer forms with coefficients in [-N,N], the fraction with
    // p | content tends to (1/p)^(n+1); exhaustive at N=10
    const int N = 10;
    for (std::uint64_t p : {2ULL, 3ULL}) {
        for (int n : {1, 2, 3}) {
            long total = 0, hits = 0;
            std::vector<int> c(static_cast<std::size_t>(n) + 1, -N);
            while (true) {
                bool nonzero = false;
                for (int v : c) nonzero = nonzero || v != 0;
                if (nonzero) {
                    ++total;
                    bool all = true;
                    for (int v : c) all = all && (v % static_cast<int>(p) == 0);
                    if (all) ++hits;
                }
                std::size_t i = 0;
                while (i < c.size() && ++c[i] > N) c[i++] = -N;
                if (i == c.size()) break;
            }
            const double density = double(hits) / double(total);
            const double limit = std::pow(1.0 / double(p), n + 1);
            // 0.025 covers the exact worst case (p=2, n=1): 120/440 vs 1/4
            REQUIRE(std::abs(density - limit) <= 0.025);
        }
    }
}
