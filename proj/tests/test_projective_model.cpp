#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "p1lab/form.hpp"
#include "p1lab/metric.hpp"
#include "p1lab/norms.hpp"
#include "p1lab/point.hpp"
#include "p1lab/quadrature.hpp"
#include "p1lab/rng.hpp"

using namespace p1lab;
using Catch::Approx;

namespace {

const QuadratureGrid& grid40k() {
    static QuadratureGrid g = QuadratureGrid::fibonacci(40000);
    return g;
}

ComplexForm random_form(int n, CounterRng& rng, double scale = 1.0) {
    std::vector<Complex> c;
    for (int k = 0; k <= n; ++k)
        c.emplace_back(scale * (2.0 * rng.next_double() - 1.0),
                       scale * (2.0 * rng.next_double() - 1.0));
    return ComplexForm(std::move(c));
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

TEST_CASE("projective point canonicalization") {
    ProjectivePoint p(Complex(0.0, 2.0), Complex(0.0, 2.0));
    REQUIRE(std::abs(std::norm(p.z0()) + std::norm(p.z1()) - 1.0) < 1e-14);
    REQUIRE(p.z0().imag() == 0.0);
    REQUIRE(p.z0().real() > 0.0);

    ProjectivePoint inf = ProjectivePoint::infinity();
    REQUIRE(inf.z1().real() == 1.0);
    REQUIRE(inf.u() == 1.0);

    REQUIRE_THROWS_AS(ProjectivePoint(0.0, 0.0), std::invalid_argument);

    ProjectivePoint q = ProjectivePoint::from_affine(Complex(0.3, 0.7));
    ProjectivePoint qc = q.conj();
    REQUIRE(qc.u() == Approx(q.u()).margin(1e-15));
    REQUIRE(qc.theta() == Approx(-q.theta()).margin(1e-15));
}

TEST_CASE("quadrature grid invariants") {
    const QuadratureGrid& g = grid40k();
    double total = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) total += g.weight(j);
    REQUIRE(total == Approx(1.0).margin(1e-12));
    // conjugate-adjacent pairing
    for (std::size_t j = 0; j < 64; j += 2) {
        REQUIRE(g.point(j).u() == Approx(g.point(j + 1).u()).margin(1e-15));
        REQUIRE(g.point(j).theta() == Approx(-g.point(j + 1).theta()).margin(1e-12));
        REQUIRE(g.weight(j) == g.weight(j + 1));
    }
}

TEST_CASE("point_norm fixtures") {
    MetricData fs;
    // f = z0 z1 at [1:1]/sqrt2
    ComplexForm f = ComplexForm::monomial(2, 1);
    ProjectivePoint x = ProjectivePoint::from_affine(1.0);
    REQUIRE(point_norm(f, x, fs) == Approx(0.5).epsilon(1e-12));

    ComplexForm z0 = ComplexForm::monomial(1, 1);
    ProjectivePoint pole(1.0, 0.0);
    REQUIRE(point_norm(z0, pole, fs) == Approx(1.0).epsilon(1e-12));

    MetricData twisted(0.1);
    REQUIRE(point_norm(z0, pole, twisted) == Approx(std::exp(-0.1)).epsilon(1e-12));

    // zero form is allowed and gives 0
    REQUIRE(point_norm(ComplexForm::zero(3), x, fs) == 0.0);
}

TEST_CASE("point_norm multiplicativity and conjugation symmetry") {
    MetricData m({0.0, 0.0, 0.0, 0.0, 0.3, 0.1}, 0.05);
    CounterRng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        ComplexForm f = random_form(3, rng);
        ComplexForm g = random_form(4, rng);
        ProjectivePoint x = ProjectivePoint::from_u_theta(rng.next_double(),
                                                          6.28 * rng.next_double());
        const double lhs = point_norm(f * g, x, m);
        const double rhs = point_norm(f, x, m) * point_norm(g, x, m);
        REQUIRE(lhs == Approx(rhs).epsilon(1e-12));

        const double a = point_norm(conjugate_form(f), x.conj(), m);
        const double b = point_norm(f, x, m);
        REQUIRE(a == Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("sup_norm of linear forms is the coefficient norm") {
    MetricData fs;
    const QuadratureGrid& g = grid40k();
    CounterRng rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        ComplexForm f = random_form(1, rng, 2.0);
        const double expect = std::sqrt(std::norm(f.coeff(0)) + std::norm(f.coeff(1)));
        REQUIRE(sup_norm(f, fs, g) == Approx(expect).epsilon(1e-9));
    }
    REQUIRE_THROWS_AS(sup_norm(ComplexForm::zero(2), fs, g), std::runtime_error);
}

TEST_CASE("sup_norm closed forms") {
    MetricData fs;
    const QuadratureGrid& g = grid40k();

    // z0^2 + z1^2 attains 1 at real points
    ComplexForm f = ComplexForm::monomial(2, 2) + ComplexForm::monomial(2, 0);
    REQUIRE(sup_norm(f, fs, g) == Approx(1.0).epsilon(1e-9));

    // monomials: sqrt(k^k (n-k)^(n-k) / n^n)
    for (int n : {3, 7}) {
        for (int k = 0; k <= n; ++k) {
            const double kk = (k == 0) ? 1.0 : std::pow(double(k), k);
            const double mm = (n - k == 0) ? 1.0 : std::pow(double(n - k), n - k);
            const double expect = std::sqrt(kk * mm / std::pow(double(n), n));
            REQUIRE(sup_norm(ComplexForm::monomial(n, k), fs, g)
                    == Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("l2_inner monomial norms match the beta integral") {
    MetricData fs;
    const QuadratureGrid& g = grid40k();
    for (int n : {1, 4, 9}) {
        for (int k = 0; k <= n; ++k) {
            ComplexForm mk = ComplexForm::monomial(n, k);
            const double expect = factorial(k) * factorial(n - k) / factorial(n + 1);
            const Complex v = l2_inner(mk, mk, fs, g);
            REQUIRE(v.real() == Approx(expect).epsilon(1e-6));
            REQUIRE(std::abs(v.imag()) < 1e-15);
        }
    }
}

TEST_CASE("l2_inner orthogonality, twist scaling, hermitian symmetry") {
    MetricData fs;
    const QuadratureGrid& g = grid40k();
    ComplexForm z0 = ComplexForm::monomial(1, 1), z1 = ComplexForm::monomial(1, 0);
    REQUIRE(std::abs(l2_inner(z0, z1, fs, g)) < 1e-4);

    MetricData tw(0.25);
    REQUIRE(l2_inner(z0, z0, tw, g).real()
            == Approx(std::exp(-0.5) * 0.5).epsilon(1e-6));

    CounterRng rng(3);
    ComplexForm f = random_form(5, rng), h = random_form(5, rng);
    const Complex a = l2_inner(f, h, fs, g);
    const Complex b = l2_inner(h, f, fs, g);
    REQUIRE(a == std::conj(b)); // exact, by the paired grid

    REQUIRE_THROWS_AS(l2_inner(z0, ComplexForm::monomial(2, 1), fs, g),
                      std::invalid_argument);

    // monomial orthogonality under FS at higher degree
    for (int j = 0; j <= 6; ++j)
        for (int k = j + 1; k <= 6; ++k)
            REQUIRE(std::abs(l2_inner(ComplexForm::monomial(6, j),
                                      ComplexForm::monomial(6, k), fs, g)) < 1e-4);
}

TEST_CASE("gromov lower half: L2 <= sup on random forms") {
    MetricData m({0.0, 0.0, 0.0, 0.0, 0.3}, 0.0);
    const QuadratureGrid& g = grid40k();
    CounterRng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        ComplexForm f = random_form(6, rng);
        const double l2 = l2_inner(f, f, m, g).real();
        const double sup = sup_norm(f, m, g);
        REQUIRE(l2 <= sup * sup * (1.0 + 1e-9));
    }
}

TEST_CASE("l1_log_norm fixtures") {
    MetricData fs;
    const QuadratureGrid& g = grid40k();

    // degree-0 constant
    ComplexForm c(std::vector<Complex>{Complex(3.0, 0.0)});
    REQUIRE(l1_log_norm(c, fs, g) == Approx(std::log(3.0)).epsilon(1e-12));

    // int |log ||z0|| | d omega = 1/2
    ComplexForm z0 = ComplexForm::monomial(1, 1);
    REQUIRE(l1_log_norm(z0, fs, g) == Approx(0.5).margin(2e-3));

    // doubling: ||z0^2|| has pointwise log exactly twice
    ComplexForm z0sq = ComplexForm::monomial(2, 2);
    REQUIRE(l1_log_norm(z0sq, fs, g)
            == Approx(2.0 * l1_log_norm(z0, fs, g)).epsilon(1e-9));

    REQUIRE_THROWS_AS(l1_log_norm(ComplexForm::zero(1), fs, g), std::runtime_error);
}

TEST_CASE("measure_exceed fixtures and monotonicity") {
    MetricData fs;
    const QuadratureGrid& g = grid40k();
    ComplexForm z0 = ComplexForm::monomial(1, 1);

    REQUIRE(measure_exceed(z0, fs, g, 1, 100.0) == 0.0);
    REQUIRE(measure_exceed(z0, fs, g, 1, 10.0) <= 1e-6);

    double prev = 1.1;
    for (double eps : {0.05, 0.1, 0.2, 0.5, 1.0}) {
        const double v = measure_exceed(z0, fs, g, 1, eps);
        REQUIRE(v <= prev);
        prev = v;
    }
}

TEST_CASE("curvature mass is the bundle degree") {
    const QuadratureGrid& g = grid40k();
    MetricData fs;
    REQUIRE(curvature_mass(fs, 1, g) == Approx(1.0).margin(1e-3));
    REQUIRE(curvature_mass(fs, 5, g) == Approx(5.0).margin(5e-3));

    MetricData pert({0.0, 0.0, 0.0, 0.0, 0.3, 0.1}, 0.0, g);
    REQUIRE(curvature_mass(pert, 1, g) == Approx(1.0).margin(1e-3));
    // mass is independent of the perturbation
    REQUIRE(curvature_mass(pert, 1, g) == Approx(curvature_mass(fs, 1, g)).margin(1e-3));
}

TEST_CASE("metric construction enforces curvature positivity") {
    const QuadratureGrid& g = grid40k();
    // coefficient -3 on u(1-u) makes rho = 1 - 3(1-6u+6u^2) negative at u=0
    std::vector<double> bad{0.0, 0.0, 0.0, 0.0, -3.0};
    REQUIRE_THROWS_AS(MetricData(bad, 0.0, g), std::invalid_argument);
    REQUIRE_THROWS_AS(MetricData(-0.1), std::invalid_argument);
}

TEST_CASE("metric weight is conjugation invariant") {
    MetricData m({0.1, 0.05, -0.02, 0.0, 0.2, 0.07}, 0.0);
    CounterRng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        ProjectivePoint x = ProjectivePoint::from_u_theta(rng.next_double(),
                                                          6.28 * rng.next_double());
        REQUIRE(m.weight(x) == Approx(m.weight(x.conj())).margin(1e-12));
    }
}
