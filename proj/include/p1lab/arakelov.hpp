#pragma once

// Heights and arithmetic intersection numbers on the model P^1 over the
// integers.  A closed point of the generic fiber is a primitive
// irreducible integer form; in the chart t = z0/z1 its dehomogenization
// P(t) = g(t,1) has leading coefficient a and roots alpha_j, and the
// Fubini-Study height of the point is
//     h(x) = (D/d) [ log|a| + sum_j ( (1/2) log(1+|alpha_j|^2)
//                                     + phi(x_j)/2 ) ] + eps D,
// with D the bundle degree, phi the metric perturbation evaluated at the
// root points (a dropped t-degree contributes the pole [1:0] with zero
// log-term), and eps the twist.  On rational points the formula is checked
// against the product-formula evaluation, which is exact at the finite
// places.
//
// The intersection number of two metrized bundles through a content-1
// integral section s of degree k (a multiple of deg L) is
//     L.N = (1/k) [ deg(N|_div(s)) - int log||s||_L c1(N) ].

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "factorize.hpp"
#include "finite_field.hpp"
#include "form.hpp"
#include "intpoly.hpp"
#include "metric.hpp"
#include "norms.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "roots.hpp"

namespace p1lab {

inline double log_mpz(const mpz_class& a) {
    if (a == 0) throw std::invalid_argument("log of zero");
    signed long exp2;
    const double mant = mpz_get_d_2exp(&exp2, a.get_mpz_t());
    return std::log(std::abs(mant)) + static_cast<double>(exp2) * 0.6931471805599453;
}

struct ClosedPoint {
    IntForm minimal;                  // primitive irreducible, canonical sign
    int degree = 1;
    std::vector<Complex> finite_roots; // roots of g(t,1) in t = z0/z1
    int roots_at_infinity = 0;        // t-degree drop: copies of [1:0]

    std::vector<ProjectivePoint> points() const {
        std::vector<ProjectivePoint> out;
        for (const Complex& a : finite_roots)
            out.push_back(ProjectivePoint(a, Complex(1.0, 0.0)));
        for (int i = 0; i < roots_at_infinity; ++i)
            out.push_back(ProjectivePoint(Complex(1.0, 0.0), Complex(0.0, 0.0)));
        return out;
    }
};

namespace arakelov_detail {

// dehomogenization at z1 = 1: P(t) = sum c_k t^k
inline zx::ZPoly dehom(const IntForm& f) {
    zx::ZPoly p;
    for (int k = 0; k <= f.degree(); ++k) p.push_back(f.coeff(k));
    zx::trim(p);
    return p;
}

inline IntForm homogenize(const zx::ZPoly& p, int degree) {
    std::vector<mpz_class> c(static_cast<std::size_t>(degree) + 1, mpz_class(0));
    for (std::size_t i = 0; i < p.size(); ++i) c[i] = p[i];
    return IntForm(std::move(c));
}

// certified numeric roots of an irreducible factor
inline void attach_roots(ClosedPoint& cp) {
    zx::ZPoly p = dehom(cp.minimal);
    cp.roots_at_infinity = cp.degree - zx::deg(p);
    if (zx::deg(p) >= 1) {
        cp.finite_roots = zx::roots(p);
        for (const Complex& r : cp.finite_roots) {
            if (zx::residual(p, r) > 1e-8)
                throw std::runtime_error("root certification failed");
        }
    }
}

} // namespace arakelov_detail

// closed point from a primitive irreducible form (verified)
inline ClosedPoint make_closed_point(const IntForm& g0) {
    IntForm g = sign_normalized(primitive_part(g0));
    if (g.is_zero() || g.degree() < 1)
        throw std::invalid_argument("closed point needs a nonconstant form");
    zx::ZPoly core = arakelov_detail::dehom(g);
    const int v1 = g.degree() - zx::deg(core);
    if (v1 > 1 || (v1 == 1 && zx::deg(core) > 0))
        throw std::invalid_argument("form is not irreducible (z1 factor)");
    if (v1 == 0) {
        auto fac = zx::factor(core);
        if (fac.factors.size() != 1 || fac.factors[0].mult != 1)
            throw std::invalid_argument("form is not irreducible");
    }
    ClosedPoint cp;
    cp.minimal = g;
    cp.degree = g.degree();
    arakelov_detail::attach_roots(cp);
    return cp;
}

// rational point [a:b] (coprime integers); minimal form b z0 - a z1
inline ClosedPoint rational_point(const mpz_class& a, const mpz_class& b) {
    if (a == 0 && b == 0) throw std::invalid_argument("rational point [0:0]");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return make_closed_point(IntForm(std::vector<mpz_class>{-(a / g), b / g}));
}

struct HorizontalComponent {
    ClosedPoint point;
    int multiplicity = 1;
};

struct ArithmeticDivisor {
    std::vector<std::pair<mpz_class, int>> vertical; // (prime, multiplicity)
    std::vector<HorizontalComponent> horizontal;
    int degree = 0; // degree of the defining form
};

// content primes (vertical part) plus the certified irreducible horizontal
// factors with numeric roots
inline ArithmeticDivisor decompose_divisor(const IntForm& f) {
    if (f.is_zero()) throw std::invalid_argument("zero form has no divisor");
    ArithmeticDivisor div;
    div.degree = f.degree();

    mpz_class c = content(f);
    if (c > 1) {
        mpz_class rest = c;
        for (unsigned long p = 2; p * p <= rest && p < 1000000UL; ++p) {
            if (!mpz_divisible_ui_p(rest.get_mpz_t(), p)) continue;
            int m = 0;
            while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
                rest /= p;
                ++m;
            }
            div.vertical.emplace_back(mpz_class(p), m);
        }
        if (rest > 1) {
            if (mpz_probab_prime_p(rest.get_mpz_t(), 40) == 0)
                throw std::runtime_error("content factorization failed");
            div.vertical.emplace_back(rest, 1);
        }
    }

    IntForm prim = primitive_part(f);
    zx::ZPoly core = arakelov_detail::dehom(prim);
    const int v1 = prim.degree() - zx::deg(core);
    if (v1 > 0) {
        ClosedPoint pole; // div(z1) = [1:0]
        pole.minimal = IntForm(std::vector<mpz_class>{mpz_class(1), mpz_class(0)});
        pole.degree = 1;
        pole.roots_at_infinity = 1;
        div.horizontal.push_back({std::move(pole), v1});
    }
    if (zx::deg(core) >= 1) {
        auto fac = zx::factor(core);
        for (const auto& zf : fac.factors) {
            ClosedPoint cp;
            cp.minimal = sign_normalized(
                arakelov_detail::homogenize(zf.poly, zx::deg(zf.poly)));
            cp.degree = zx::deg(zf.poly);
            arakelov_detail::attach_roots(cp);
            div.horizontal.push_back({std::move(cp), zf.mult});
        }
    }
    return div;
}

// the height formula from the header comment
inline double height_of_point(const ClosedPoint& x, const MetricData& m,
                              int bundle_degree) {
    zx::ZPoly p = arakelov_detail::dehom(x.minimal);
    double arch = (zx::deg(p) >= 0 && !p.empty()) ? log_mpz(p.back()) : 0.0;
    for (const Complex& a : x.finite_roots)
        arch += 0.5 * std::log1p(std::norm(a));
    if (!m.is_flat())
        for (const ProjectivePoint& pt : x.points()) arch += 0.5 * m.weight(pt);
    return bundle_degree * (arch / x.degree + m.twist());
}

// independent product-formula evaluation on a rational point [a:b]: the
// finite places contribute through exact integer arithmetic, the
// archimedean one through the metric norm of a non-vanishing coordinate
// section
inline double height_product_formula_oracle(const mpz_class& a, const mpz_class& b,
                                            const MetricData& m, int bundle_degree) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (g == 0) throw std::invalid_argument("rational point [0:0]");
    const mpz_class ar = a / g, br = b / g;
    // section z0 or z1, whichever does not vanish at [a:b]
    const bool use_z0 = (ar != 0);
    const mpz_class val = use_z0 ? ar : br;
    // -sum_p log ||s([a:b])||_p = log |s(a,b)| by the product formula
    double h = log_mpz(val);
    // archimedean: -log ||s(x)||
    ProjectivePoint x(Complex(ar.get_d(), 0.0), Complex(br.get_d(), 0.0));
    ComplexForm s = use_z0 ? ComplexForm::monomial(1, 1) : ComplexForm::monomial(1, 0);
    const double a2b2 = ar.get_d() * ar.get_d() + br.get_d() * br.get_d();
    h += -(std::log(std::abs(val.get_d())) - 0.5 * std::log(a2b2) -
           0.5 * m.weight(x) - m.twist());
    (void)s;
    return bundle_degree * h;
}

// sum of m_i d_i h(x_i), plus (on request) the vertical contribution
// mult_p * bundle_degree * log p per content prime
inline double degree_on_divisor(const ArithmeticDivisor& D, const MetricData& m,
                                int bundle_degree, bool include_vertical = false) {
    if (!D.vertical.empty() && !include_vertical)
        throw std::runtime_error("vertical components present");
    double s = 0.0;
    for (const auto& h : D.horizontal)
        s += h.multiplicity * h.point.degree *
             height_of_point(h.point, m, bundle_degree);
    if (include_vertical)
        for (const auto& [p, mult] : D.vertical)
            s += mult * bundle_degree * log_mpz(p);
    return s;
}

// arithmetic intersection number L.N computed through a content-1 integral
// section of k L
inline double intersection_via_section(const MetricData& l_metric, int l_degree,
                                       const MetricData& n_metric, int n_degree,
                                       const IntForm& s, const QuadratureGrid& q) {
    if (s.is_zero()) throw std::invalid_argument("zero section");
    if (content(s) != 1)
        throw std::runtime_error("section has vertical components");
    if (l_degree < 1 || s.degree() % l_degree != 0)
        throw std::invalid_argument("section degree must be a multiple of deg L");
    const int k = s.degree() / l_degree;

    ArithmeticDivisor D = decompose_divisor(s);
    const double deg_term = degree_on_divisor(D, n_metric, n_degree, false);

    ComplexForm sc = to_complex(s);
    const double arch = chunked_sum<double>(q.size(), [&](std::size_t j) {
        const ProjectivePoint& x = q.point(j);
        return q.weight(j) * n_degree * n_metric.curvature_density(x) *
               log_point_norm(sc, x, l_metric);
    });
    return (deg_term - arch) / k;
}

struct AmplenessReport {
    double min_curvature = 0.0;
    int generic_fiber_degree = 0;
    double min_sample_height = 0.0;
    bool curvature_positive = false;
    bool fiber_positive = false;
    bool horizontally_strict = false;
};

// diagnostics, never throws on negativity: flags are reported
inline AmplenessReport ampleness_diagnostics(const MetricData& m, int bundle_degree,
                                             const QuadratureGrid& q,
                                             const std::vector<ClosedPoint>& samples) {
    if (bundle_degree < 1)
        throw std::invalid_argument("ampleness: bundle degree >= 1");
    AmplenessReport rep;
    double mc = 1e300;
    for (std::size_t j = 0; j < q.size(); ++j)
        mc = std::min(mc, m.curvature_density(q.point(j)));
    rep.min_curvature = mc * bundle_degree;
    rep.curvature_positive = mc > 0.0;
    rep.generic_fiber_degree = bundle_degree;
    rep.fiber_positive = bundle_degree > 0;
    double mh = 1e300;
    for (const ClosedPoint& x : samples)
        mh = std::min(mh, height_of_point(x, m, bundle_degree));
    rep.min_sample_height = samples.empty() ? 0.0 : mh;
    rep.horizontally_strict = !samples.empty() && mh > 0.0;
    return rep;
}

// B = deg(Lbar|_C) + deg(C) log(A+1): sections with ||s||_inf <= A^n not
// vanishing on C can have vertical components only over p <= e^{nB}
inline double horizontal_curve_bound(const ClosedPoint& C, const MetricData& l_metric,
                                     double A) {
    if (A < 1.0) throw std::invalid_argument("horizontal_curve_bound: A >= 1");
    const double deg_term = C.degree * height_of_point(C, l_metric, 1);
    return deg_term + C.degree * std::log(A + 1.0);
}

// canonical comparison used by tie-breaks: smaller degree first, then
// lexicographic coefficients from the top
inline bool closed_point_less(const ClosedPoint& a, const ClosedPoint& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    for (int k = a.degree; k >= 0; --k) {
        if (a.minimal.coeff(k) != b.minimal.coeff(k))
            return a.minimal.coeff(k) < b.minimal.coeff(k);
    }
    return false;
}

} // namespace p1lab
