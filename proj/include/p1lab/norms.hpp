#pragma once

// The three norms every other module consumes: pointwise metric norm,
// sup-norm (grid maximum plus local geodesic refinement), L^2 pairing and
// L^1-of-log against the quadrature measure, plus the curvature mass check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "form.hpp"
#include "metric.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace p1lab {

constexpr double kLogFloor = -1e6; // the log singularity at zeros is integrable

// ||f(x)|| = |f(z0,z1)| e^{-n phi(x)/2} e^{-eps n} / (|z0|^2+|z1|^2)^{n/2};
// the canonical representative has |z| = 1.
inline double point_norm(const ComplexForm& f, const ProjectivePoint& x,
                         const MetricData& m) {
    const int n = f.degree();
    const double v = std::abs(f.eval(x.z0(), x.z1()));
    return v * std::exp(-0.5 * n * m.weight(x) - m.twist() * n);
}

inline double log_point_norm(const ComplexForm& f, const ProjectivePoint& x,
                             const MetricData& m) {
    const int n = f.degree();
    const double v = std::abs(f.eval(x.z0(), x.z1()));
    const double lg = std::log(v) - 0.5 * n * m.weight(x) - m.twist() * n;
    return std::max(lg, kLogFloor);
}

namespace detail {

struct Vec3 {
    double x, y, z;
};

inline Vec3 sphere_of(const ProjectivePoint& p) {
    const std::complex<double> t = p.z1() * std::conj(p.z0());
    return {2.0 * t.real(), 2.0 * t.imag(), 2.0 * p.u() - 1.0};
}

inline ProjectivePoint point_of(const Vec3& v) {
    const double u = std::clamp(0.5 * (1.0 + v.z), 0.0, 1.0);
    return ProjectivePoint::from_u_theta(u, std::atan2(v.y, v.x));
}

inline Vec3 normalize(const Vec3& v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return {v.x / n, v.y / n, v.z / n};
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// one golden-section line maximization along a geodesic through p
template <typename F>
double line_max(Vec3& p, const Vec3& dir, double halfwidth, F&& eval) {
    const double gr = 0.618033988749894848;
    auto at = [&](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return Vec3{c * p.x + s * dir.x, c * p.y + s * dir.y, c * p.z + s * dir.z};
    };
    double a = -halfwidth, b = halfwidth;
    double t1 = b - gr * (b - a), t2 = a + gr * (b - a);
    double f1 = eval(at(t1)), f2 = eval(at(t2));
    for (int it = 0; it < 40 && (b - a) > 1e-14; ++it) {
        if (f1 < f2) {
            a = t1;
            t1 = t2;
            f1 = f2;
            t2 = a + gr * (b - a);
            f2 = eval(at(t2));
        } else {
            b = t2;
            t2 = t1;
            f2 = f1;
            t1 = b - gr * (b - a);
            f1 = eval(at(t1));
        }
    }
    const double tb = (f1 > f2) ? t1 : t2;
    const double fb = std::max(f1, f2);
    p = normalize(at(tb));
    return fb;
}

} // namespace detail

// Sup-norm: maximum of the grid values followed by 50 rounds of alternating
// golden-section refinement along two tangent directions around the best
// grid point.  The result is always >= the grid maximum.
inline double sup_norm(const ComplexForm& f, const MetricData& m,
                       const QuadratureGrid& g) {
    if (f.is_zero()) throw std::runtime_error("zero section has no sup-norm");
    const int n = f.degree();
    if (n == 0) return std::abs(f.coeff(0));

    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double v = point_norm(f, g.point(j), m);
        if (v > best_v) {
            best_v = v;
            best = j;
        }
    }

    auto eval = [&](const detail::Vec3& v) {
        return point_norm(f, detail::point_of(v), m);
    };
    detail::Vec3 p = detail::sphere_of(g.point(best));
    double step = 4.0 / std::sqrt(static_cast<double>(g.size()));
    double val = best_v;
    int stalled = 0;
    for (int round = 0; round < 50 && stalled < 3; ++round) {
        const double before = val;
        detail::Vec3 axis = (std::abs(p.z) < 0.9) ? detail::Vec3{0, 0, 1}
                                                  : detail::Vec3{1, 0, 0};
        detail::Vec3 d1 = detail::normalize(detail::cross(p, axis));
        val = std::max(val, detail::line_max(p, d1, step, eval));
        detail::Vec3 d2 = detail::cross(p, detail::normalize(detail::cross(p, axis)));
        val = std::max(val, detail::line_max(p, d2, step, eval));
        step *= 0.65;
        stalled = (val - before <= 1e-13 * val) ? stalled + 1 : 0;
    }
    return std::max(val, best_v);
}

// Quadrature approximation of the L^2 pairing against the mass-1 FS
// measure.  Hermitian by the conjugate-paired grid layout.
inline Complex l2_inner(const ComplexForm& f, const ComplexForm& g,
                        const MetricData& m, const QuadratureGrid& q) {
    if (f.degree() != g.degree())
        throw std::invalid_argument("l2_inner: degree mismatch");
    const int n = f.degree();
    const double tw = std::exp(-2.0 * m.twist() * n);
    // explicit real/imag accumulation: multiplication commutes bitwise, so
    // l2_inner(f,g) == conj(l2_inner(g,f)) holds exactly
    return chunked_sum<Complex>(q.size(), [&](std::size_t j) {
        const ProjectivePoint& x = q.point(j);
        const double fac = q.weight(j) * tw * std::exp(-n * m.weight(x));
        const Complex fv = f.eval(x.z0(), x.z1());
        const Complex gv = g.eval(x.z0(), x.z1());
        const double re = fv.real() * gv.real() + fv.imag() * gv.imag();
        const double im = fv.imag() * gv.real() - fv.real() * gv.imag();
        return Complex(fac * re, fac * im);
    });
}

// integral of |log ||f|| | against the quadrature measure, logs clipped at
// the configured floor
inline double l1_log_norm(const ComplexForm& f, const MetricData& m,
                          const QuadratureGrid& q) {
    if (f.is_zero()) throw std::runtime_error("l1_log_norm of the zero form");
    return chunked_sum<double>(q.size(), [&](std::size_t j) {
        return q.weight(j) * std::abs(log_point_norm(f, q.point(j), m));
    });
}

// quadrature measure of { x : |(1/n) log ||f(x)|| | > eps }
inline double measure_exceed(const ComplexForm& f, const MetricData& m,
                             const QuadratureGrid& q, int n, double eps) {
    if (f.is_zero()) throw std::runtime_error("measure_exceed of the zero form");
    if (n < 1) throw std::invalid_argument("measure_exceed: n >= 1");
    if (eps <= 0.0) throw std::invalid_argument("measure_exceed: eps > 0");
    return chunked_sum<double>(q.size(), [&](std::size_t j) {
        const double v = std::abs(log_point_norm(f, q.point(j), m)) / n;
        return (v > eps) ? q.weight(j) : 0.0;
    });
}

// integral of c1 over P^1(C); equals bundle_degree by Chern-Weil
inline double curvature_mass(const MetricData& m, int bundle_degree,
                             const QuadratureGrid& q) {
    if (bundle_degree < 0)
        throw std::invalid_argument("curvature_mass: bundle_degree >= 0");
    const double mass = chunked_sum<double>(q.size(), [&](std::size_t j) {
        return q.weight(j) * m.curvature_density(q.point(j));
    });
    return bundle_degree * mass;
}

inline double sup_norm(const RealForm& f, const MetricData& m, const QuadratureGrid& g) {
    return sup_norm(to_complex(f), m, g);
}
inline double sup_norm(const IntForm& f, const MetricData& m, const QuadratureGrid& g) {
    return sup_norm(to_complex(f), m, g);
}
inline double l1_log_norm(const RealForm& f, const MetricData& m, const QuadratureGrid& q) {
    return l1_log_norm(to_complex(f), m, q);
}
inline double l1_log_norm(const IntForm& f, const MetricData& m, const QuadratureGrid& q) {
    return l1_log_norm(to_complex(f), m, q);
}

} // namespace p1lab
