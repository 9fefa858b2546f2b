#pragma once

// Numeric roots of integer polynomials.  Seeds come from the companion
// matrix at moderate degree and coefficient range, and from the
// Newton-polygon circles (Bini's initialization) otherwise; an
// Aberth-Ehrlich simultaneous iteration polishes them.  The certificate is
// the relative backward error
//     eta(alpha) = |P(alpha)| / sum_i |c_i| |alpha|^i,
// evaluated in whichever chart keeps powers bounded; eta <= 1e-8 states
// that alpha is an exact root after a 1e-8-relative coefficient
// perturbation.  (A plain |P(alpha)| / ||P||_inf test is vacuous for
// polynomials with large coefficient spread.)

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "intpoly.hpp"

namespace p1lab::zx {

inline std::vector<double> to_double(const ZPoly& a) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].get_d();
    return r;
}

inline std::complex<double> horner(const std::vector<double>& c,
                                   std::complex<double> x) {
    std::complex<double> r(0.0, 0.0);
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

// relative backward error of a root candidate, chart-stable
inline double residual(const ZPoly& g, std::complex<double> root) {
    std::vector<double> c = to_double(g);
    const std::complex<double> x = (std::abs(root) <= 1.0)
                                       ? root
                                       : std::complex<double>(1.0, 0.0) / root;
    if (std::abs(root) > 1.0) std::reverse(c.begin(), c.end());
    const double ax = std::abs(x);
    double scale = 0.0, pw = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        scale += std::abs(c[i]) * pw;
        pw *= ax;
    }
    if (scale == 0.0) return 0.0;
    return std::abs(horner(c, x)) / scale;
}

namespace roots_detail {

// seeds on the Newton-polygon circles: for each segment of the upper
// convex hull of (i, log|c_i|) place its span of points on the circle of
// radius exp(-slope)
inline std::vector<std::complex<double>> bini_seeds(const ZPoly& g) {
    const int d = deg(g);
    std::vector<int> idx;
    std::vector<double> lc;
    for (int i = 0; i <= d; ++i) {
        if (g[static_cast<std::size_t>(i)] != 0) {
            idx.push_back(i);
            lc.push_back(log_abs(g[static_cast<std::size_t>(i)]));
        }
    }
    // upper convex hull, left to right
    std::vector<int> hull;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = static_cast<std::size_t>(hull[hull.size() - 2]);
            const std::size_t b = static_cast<std::size_t>(hull[hull.size() - 1]);
            const double cross = (lc[b] - lc[a]) * (idx[i] - idx[a]) -
                                 (lc[i] - lc[a]) * (idx[b] - idx[a]);
            if (cross <= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(static_cast<int>(i));
    }
    std::vector<std::complex<double>> seeds;
    seeds.reserve(static_cast<std::size_t>(d));
    const double golden = 2.399963229728653;
    int seg = 0;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h, ++seg) {
        const std::size_t a = static_cast<std::size_t>(hull[h]);
        const std::size_t b = static_cast<std::size_t>(hull[h + 1]);
        const int span = idx[b] - idx[a];
        const double r = std::exp((lc[a] - lc[b]) / span);
        for (int k = 0; k < span; ++k) {
            const double th = 2.0 * 3.14159265358979323846 * (k + 0.5) / span +
                              golden * seg;
            seeds.push_back(std::polar(r, th));
        }
    }
    return seeds;
}

inline double log_range(const ZPoly& g) {
    double lo = 1e300, hi = -1e300;
    for (const auto& c : g) {
        if (c == 0) continue;
        const double l = log_abs(c);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    return hi - lo;
}

} // namespace roots_detail

inline std::vector<std::complex<double>> roots(const ZPoly& g) {
    using C = std::complex<double>;
    const int d = deg(g);
    if (d < 1) return {};
    std::vector<double> c = to_double(g);
    if (d == 1) return {C(-c[0] / c[1], 0.0)};

    std::vector<C> r;
    if (d <= 50 && roots_detail::log_range(g) < 27.6) { // range < 1e12
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < d; ++i)
            comp(i, d - 1) = -c[static_cast<std::size_t>(i)] / c.back();
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("companion eigensolver failed");
        r.resize(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    } else {
        r = roots_detail::bini_seeds(g);
        if (static_cast<int>(r.size()) != d)
            throw std::runtime_error("newton-polygon seeding failed");
    }
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (r[i] == r[j]) r[i] += C(1e-10 * (1.0 + std::abs(r[i])), 1e-10);

    std::vector<double> dc(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
        dc[i - 1] = c[i] * static_cast<double>(i);
    std::vector<double> rev(c.rbegin(), c.rend());
    std::vector<double> drev(rev.size() - 1);
    for (std::size_t i = 1; i < rev.size(); ++i)
        drev[i - 1] = rev[i] * static_cast<double>(i);

    // Newton correction p/p' in a bounded chart: for |t| > 1, with
    // q(s) = s^d p(1/s),  p/p' = t q(s) / (d q(s) - s q'(s)) at s = 1/t
    auto newton = [&](const C& t) -> C {
        if (std::abs(t) <= 1.0) {
            const C f = horner(c, t);
            const C df = horner(dc, t);
            if (std::abs(df) == 0.0) return C(0.0, 0.0);
            return f / df;
        }
        const C s = 1.0 / t;
        const C q = horner(rev, s);
        const C dq = horner(drev, s);
        const C den = static_cast<double>(d) * q - s * dq;
        if (std::abs(den) == 0.0) return C(0.0, 0.0);
        return t * q / den;
    };

    for (int sweep = 0; sweep < 300; ++sweep) {
        double worst = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const C ni = newton(r[i]);
            C sum(0.0, 0.0);
            for (std::size_t j = 0; j < r.size(); ++j) {
                if (j == i) continue;
                const C diff = r[i] - r[j];
                if (std::abs(diff) == 0.0) continue;
                sum += 1.0 / diff;
            }
            const C den = 1.0 - ni * sum;
            const C w = (std::abs(den) == 0.0) ? ni : ni / den;
            r[i] -= w;
            worst = std::max(worst, std::abs(w) / (1.0 + std::abs(r[i])));
        }
        if (worst < 1e-14) break;
    }
    return r;
}

} // namespace p1lab::zx
