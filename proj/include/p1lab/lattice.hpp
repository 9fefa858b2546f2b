#pragma once

// The integer-form lattice inside the real section space, with its
// metric-induced sup-norm: rounding, exhaustive ball counting, successive
// minima, restriction-kernel densities, and small-section counts.
//
// Exhaustive enumeration is certified by coefficient boxes derived from
// the sup-norm: extracting the theta-Fourier mode of f on the circle of
// latitude u gives |c_k| * max_u (1-u)^{k/2} u^{(n-k)/2} <= sup_FS(f), so
//     |c_k| <= R e^{eps n} e^{n phi_max / 2} / ||m_k||_inf,FS
// is a rigorous superset of the ball of radius R.  Under Fubini-Study (any
// twist) the monomials are orthogonal, which adds an exact quadratic prune.
// Membership of each candidate is decided by the sup-norm oracle with an
// inclusive relative tolerance of 1e-9 (exact-boundary lattice points are
// counted in).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "bergman.hpp"
#include "finite_field.hpp"
#include "form.hpp"
#include "metric.hpp"
#include "norms.hpp"
#include "quadrature.hpp"

namespace p1lab {

constexpr double kBallTol = 1e-9; // inclusive boundary fuzz for counting

struct SectionLattice {
    int degree = 0;
    MetricData metric;
    const QuadratureGrid* grid = nullptr;
    std::vector<double> monomial_sup;    // computed metric sup-norms
    std::vector<double> monomial_sup_fs; // closed-form FS sup-norms (no twist)
    std::vector<double> monomial_l2_fs;  // closed-form FS L2 norms (no twist)
    double phi_max = 0.0;                // sup |phi| over the grid, with margin
    double scale = 1.0;                  // e^{-eps n}, the global twist factor
    bool flat = true;                    // no perturbation: quadratic prune valid
};

inline SectionLattice make_lattice(int n, const MetricData& m, const QuadratureGrid& q) {
    if (n < 0) throw std::invalid_argument("lattice degree >= 0");
    SectionLattice lat;
    lat.degree = n;
    lat.metric = m;
    lat.grid = &q;
    lat.flat = m.is_flat();
    lat.scale = std::exp(-m.twist() * n);
    double logbinom = 0.0;
    for (int k = 0; k <= n; ++k) {
        // closed forms in log space (binomials overflow past n ~ 1000)
        double logsup = 0.0;
        if (k > 0) logsup += 0.5 * k * std::log(double(k));
        if (n - k > 0) logsup += 0.5 * (n - k) * std::log(double(n - k));
        if (n > 0) logsup -= 0.5 * n * std::log(double(n));
        lat.monomial_sup_fs.push_back(std::exp(logsup));
        lat.monomial_l2_fs.push_back(
            std::exp(-0.5 * (std::log(n + 1.0) + logbinom)));
        if (k < n) logbinom += std::log(double(n - k)) - std::log(double(k + 1));
        // the metric sup-norm of the monomial: closed form under flat
        // metrics, the numeric oracle otherwise
        if (lat.flat)
            lat.monomial_sup.push_back(lat.scale * lat.monomial_sup_fs.back());
        else
            lat.monomial_sup.push_back(sup_norm(ComplexForm::monomial(n, k), m, q));
    }
    if (!lat.flat) {
        double pm = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j)
            pm = std::max(pm, std::abs(m.weight(q.point(j))));
        lat.phi_max = pm * 1.05 + 1e-9;
    }
    return lat;
}

// nearest integers, ties toward zero; the achieved distance is measured by
// the sup-norm oracle and obeys (1/2) sum_k ||m_k||_inf
inline std::pair<IntForm, double> round_to_integral(const RealForm& s,
                                                    const SectionLattice& lat) {
    if (s.degree() != lat.degree)
        throw std::invalid_argument("round_to_integral: degree mismatch");
    std::vector<mpz_class> c;
    std::vector<double> delta;
    bool any = false;
    for (int k = 0; k <= s.degree(); ++k) {
        const double v = s.coeff(k);
        const double a = std::abs(v);
        double r = std::floor(a + 0.5);
        if (r - a == 0.5) r -= 1.0; // tie toward zero
        const double rv = (v < 0) ? -r : r;
        mpz_class zi;
        mpz_set_d(zi.get_mpz_t(), rv);
        c.push_back(zi);
        delta.push_back(v - rv);
        any = any || (v != rv);
    }
    IntForm rounded{std::move(c)};
    double dist = 0.0;
    if (any)
        dist = sup_norm(ComplexForm(std::vector<Complex>(delta.begin(), delta.end())),
                        lat.metric, *lat.grid);
    return {std::move(rounded), dist};
}

namespace detail {

// metrized monomial values on a strided subset of the oracle grid, kept as
// running sums during the enumeration recursion; the subset maximum is a
// lower bound of the sup and localizes its basin for the final polish
struct EvalTable {
    std::vector<std::vector<double>> re, im; // [k][point]
    std::vector<ProjectivePoint> pts;
    std::size_t npts = 0;
};

inline EvalTable make_table(int n, const MetricData& m, const QuadratureGrid& q,
                            std::size_t target = 512) {
    EvalTable t;
    const std::size_t stride = std::max<std::size_t>(1, q.size() / target);
    for (std::size_t j = 0; j < q.size(); j += stride) t.pts.push_back(q.point(j));
    t.npts = t.pts.size();
    t.re.assign(static_cast<std::size_t>(n) + 1, std::vector<double>(t.npts));
    t.im.assign(static_cast<std::size_t>(n) + 1, std::vector<double>(t.npts));
    for (std::size_t j = 0; j < t.npts; ++j) {
        const ProjectivePoint& x = t.pts[j];
        const double fac = std::exp(-0.5 * n * m.weight(x) - m.twist() * n);
        Complex z0k(fac, 0.0);
        std::vector<Complex> vals(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            vals[static_cast<std::size_t>(k)] = z0k;
            z0k *= x.z0();
        }
        Complex z1k(1.0, 0.0);
        for (int k = n; k >= 0; --k) {
            vals[static_cast<std::size_t>(k)] *= z1k;
            z1k *= x.z1();
        }
        for (int k = 0; k <= n; ++k) {
            t.re[static_cast<std::size_t>(k)][j] = vals[static_cast<std::size_t>(k)].real();
            t.im[static_cast<std::size_t>(k)][j] = vals[static_cast<std::size_t>(k)].imag();
        }
    }
    return t;
}

// golden-section polish of the metrized value of a real-coefficient form,
// started at the subset argmax; mirrors the sup_norm refinement
inline double polish_sup(const ComplexForm& f, const MetricData& m,
                         const ProjectivePoint& start, double start_val,
                         double step0) {
    auto eval = [&](const Vec3& v) { return point_norm(f, point_of(v), m); };
    Vec3 p = sphere_of(start);
    double val = start_val;
    double step = step0;
    int stalled = 0;
    for (int round = 0; round < 30 && stalled < 3; ++round) {
        const double before = val;
        Vec3 axis = (std::abs(p.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        Vec3 d1 = normalize(cross(p, axis));
        val = std::max(val, line_max(p, d1, step, eval));
        Vec3 d2 = cross(p, normalize(cross(p, axis)));
        val = std::max(val, line_max(p, d2, step, eval));
        step *= 0.65;
        stalled = (val - before <= 1e-13 * val) ? stalled + 1 : 0;
    }
    return val;
}

} // namespace detail

// Exhaustive visit of every integer form f with sup(f - center) <= radius.
// visit(f, delta) receives the form and its real offset from center.
// Throws when the certified coefficient box exceeds the node budget.
template <typename Visit>
void enumerate_ball(const SectionLattice& lat, const RealForm& center, double radius,
                    Visit&& visit, std::uint64_t node_budget = 60000000ULL) {
    const int n = lat.degree;
    if (center.degree() != n) throw std::invalid_argument("enumerate_ball: degree");
    if (radius < 0.0) throw std::invalid_argument("enumerate_ball: radius >= 0");
    const double Rfs = radius * (1.0 + kBallTol) / lat.scale *
                       std::exp(0.5 * n * lat.phi_max);

    // box bounds, tightest coordinate first
    std::vector<int> order(static_cast<std::size_t>(n) + 1);
    std::vector<double> bound(static_cast<std::size_t>(n) + 1);
    double volume = 1.0;
    for (int k = 0; k <= n; ++k) {
        order[static_cast<std::size_t>(k)] = k;
        bound[static_cast<std::size_t>(k)] = Rfs / lat.monomial_sup_fs[static_cast<std::size_t>(k)];
        volume *= 2.0 * bound[static_cast<std::size_t>(k)] + 1.0;
    }
    if (volume > static_cast<double>(node_budget))
        throw std::runtime_error("enumerate_ball: budget exceeded (box volume ~ " +
                                 std::to_string(volume) + " candidates)");
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return bound[static_cast<std::size_t>(a)] < bound[static_cast<std::size_t>(b)]; });

    detail::EvalTable table = detail::make_table(n, lat.metric, *lat.grid);
    const double rcap = radius * (1.0 + kBallTol);
    const double polish_step = 4.0 / std::sqrt(static_cast<double>(table.npts));

    std::vector<double> delta(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<mpz_class> coeffs(static_cast<std::size_t>(n) + 1);
    std::vector<double> vre(table.npts, 0.0), vim(table.npts, 0.0);
    // quadratic prune data (exact only for flat metrics)
    std::vector<double> l2w(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double w = lat.monomial_l2_fs[static_cast<std::size_t>(k)];
        l2w[static_cast<std::size_t>(k)] = w * w;
    }
    // q2 accumulates the FS L^2 form of delta; for flat metrics the ball
    // sits inside the FS ellipsoid of radius Rfs
    const double q2cap = lat.flat ? Rfs * Rfs : -1.0;

    std::function<void(std::size_t, double)> rec = [&](std::size_t depth, double q2) {
        if (depth == order.size()) {
            // classification chain: balanced-kernel bound (flat metrics:
            // sup_FS^2 <= (n+1) L2_FS^2, sharp since b_n = n+1), triangle UB,
            // running subset maximum as lower bound, then a local polish
            if (lat.flat && (n + 1.0) * q2 <= Rfs * Rfs) {
                visit(IntForm(coeffs), delta);
                return;
            }
            double tri = 0.0;
            for (int k = 0; k <= n; ++k)
                tri += std::abs(delta[static_cast<std::size_t>(k)]) *
                       lat.monomial_sup[static_cast<std::size_t>(k)];
            bool inside;
            if (tri <= rcap) {
                inside = true;
            } else {
                double lb2 = 0.0;
                std::size_t arg = 0;
                for (std::size_t t = 0; t < table.npts; ++t) {
                    const double m2 = vre[t] * vre[t] + vim[t] * vim[t];
                    if (m2 > lb2) {
                        lb2 = m2;
                        arg = t;
                    }
                }
                if (lb2 > rcap * rcap) {
                    inside = false;
                } else {
                    std::vector<Complex> dc(delta.begin(), delta.end());
                    ComplexForm df{std::move(dc)};
                    inside = df.is_zero() ||
                             detail::polish_sup(df, lat.metric, table.pts[arg],
                                                std::sqrt(lb2), polish_step) <= rcap;
                }
            }
            if (inside) visit(IntForm(coeffs), delta);
            return;
        }
        const int k = order[depth];
        const double ck = center.coeff(k);
        const double b = bound[static_cast<std::size_t>(k)];
        const long lo = static_cast<long>(std::ceil(ck - b - 1e-12));
        const long hi = static_cast<long>(std::floor(ck + b + 1e-12));
        const auto& mre = table.re[static_cast<std::size_t>(k)];
        const auto& mim = table.im[static_cast<std::size_t>(k)];
        double dapplied = 0.0;
        for (long v = lo; v <= hi; ++v) {
            const double d = static_cast<double>(v) - ck;
            const double q2n = q2 + d * d * l2w[static_cast<std::size_t>(k)];
            if (q2cap >= 0.0 && q2n > q2cap * (1.0 + 4.0 * kBallTol)) continue;
            const double shift = d - dapplied;
            for (std::size_t t = 0; t < table.npts; ++t) {
                vre[t] += shift * mre[t];
                vim[t] += shift * mim[t];
            }
            dapplied = d;
            delta[static_cast<std::size_t>(k)] = d;
            coeffs[static_cast<std::size_t>(k)] = v;
            rec(depth + 1, q2n);
        }
        if (dapplied != 0.0) {
            for (std::size_t t = 0; t < table.npts; ++t) {
                vre[t] -= dapplied * mre[t];
                vim[t] -= dapplied * mim[t];
            }
        }
        delta[static_cast<std::size_t>(k)] = 0.0;
        coeffs[static_cast<std::size_t>(k)] = 0;
    };
    rec(0, 0.0);
}

struct BallCount {
    RealForm center;
    double radius = 0.0;
    std::uint64_t count = 0;
    bool enumerated = true;
};

inline BallCount ball_count(const SectionLattice& lat, const RealForm& center,
                            double radius) {
    BallCount bc;
    bc.center = center;
    bc.radius = radius;
    enumerate_ball(lat, center, radius,
                   [&](const IntForm&, const std::vector<double>&) { ++bc.count; });
    return bc;
}

inline double ball_growth_ratio(const SectionLattice& lat, const RealForm& center,
                                double radius, double delta) {
    const auto base = ball_count(lat, center, radius);
    if (delta == 0.0) return 0.0;
    const auto grown = ball_count(lat, center, radius + delta);
    return static_cast<double>(grown.count - base.count) /
           static_cast<double>(base.count);
}

// constraint sublattices for restriction densities
struct VanishAtPoint {
    mpz_class a, b; // rational point [a:b]
};
struct DivisibleBy {
    std::uint64_t p;
};
using RestrictionConstraint = std::variant<VanishAtPoint, DivisibleBy>;

inline double restriction_kernel_density(const SectionLattice& lat,
                                         const RestrictionConstraint& constraint,
                                         const RealForm& center, double radius) {
    std::uint64_t total = 0, hits = 0;
    enumerate_ball(lat, center, radius,
                   [&](const IntForm& f, const std::vector<double>&) {
                       ++total;
                       if (std::holds_alternative<VanishAtPoint>(constraint)) {
                           const auto& v = std::get<VanishAtPoint>(constraint);
                           mpz_class val = 0;
                           // f(a,b) = sum c_k a^k b^{n-k}
                           std::vector<mpz_class> apow(static_cast<std::size_t>(f.degree()) + 1);
                           std::vector<mpz_class> bpow(static_cast<std::size_t>(f.degree()) + 1);
                           apow[0] = 1;
                           bpow[0] = 1;
                           for (int k = 1; k <= f.degree(); ++k) {
                               apow[static_cast<std::size_t>(k)] = apow[static_cast<std::size_t>(k - 1)] * v.a;
                               bpow[static_cast<std::size_t>(k)] = bpow[static_cast<std::size_t>(k - 1)] * v.b;
                           }
                           for (int k = 0; k <= f.degree(); ++k)
                               val += f.coeff(k) * apow[static_cast<std::size_t>(k)] *
                                      bpow[static_cast<std::size_t>(f.degree() - k)];
                           if (val == 0) ++hits;
                       } else {
                           const auto& d = std::get<DivisibleBy>(constraint);
                           bool all = true;
                           for (int k = 0; k <= f.degree(); ++k)
                               all = all && mpz_divisible_ui_p(
                                                f.coeff(k).get_mpz_t(),
                                                static_cast<unsigned long>(d.p));
                           if (all) ++hits;
                       }
                   });
    if (total == 0) throw std::runtime_error("restriction density: empty ball");
    return static_cast<double>(hits) / static_cast<double>(total);
}

// upstairs density of a mod-p predicate on the ball vs its density among
// all F_p forms of the same degree
inline std::pair<double, double> density_transfer_check(
    const SectionLattice& lat, std::uint64_t p,
    const std::function<bool(const FpForm&)>& predicate, const RealForm& center,
    double radius) {
    PrimeField field(p);
    std::uint64_t total = 0, hits = 0;
    enumerate_ball(lat, center, radius,
                   [&](const IntForm& f, const std::vector<double>&) {
                       ++total;
                       if (predicate(reduce_form(f, p))) ++hits;
                   });
    const double upstairs = static_cast<double>(hits) / static_cast<double>(total);

    // downstairs: all p^(n+1) forms of degree n (zero form included)
    FpForm g;
    g.p = p;
    g.c.assign(static_cast<std::size_t>(lat.degree) + 1, 0);
    std::uint64_t dtotal = 0, dhits = 0;
    while (true) {
        ++dtotal;
        if (predicate(g)) ++dhits;
        std::size_t i = 0;
        while (i < g.c.size() && ++g.c[i] == p) g.c[i++] = 0;
        if (i == g.c.size()) break;
    }
    return {upstairs, static_cast<double>(dhits) / static_cast<double>(dtotal)};
}

// exact count of integral sections with sup-norm <= 1 (zero included)
inline std::uint64_t count_small_sections(const SectionLattice& lat) {
    if (lat.degree > 8)
        throw std::runtime_error("count_small_sections: dimension too large");
    return ball_count(lat, RealForm::zero(lat.degree), 1.0).count;
}

struct VolumePoint {
    int n = 0;
    double h0 = 0.0;        // log #small sections
    double normalized = 0.0; // h0 / (n^2/2)
};

inline std::vector<VolumePoint> volume_estimate(const MetricData& m,
                                                const std::vector<int>& n_list,
                                                const QuadratureGrid& q) {
    std::vector<VolumePoint> out;
    for (int n : n_list) {
        if (n > 8) throw std::runtime_error("volume_estimate: n <= 8");
        SectionLattice lat = make_lattice(n, m, q);
        const std::uint64_t c = count_small_sections(lat);
        VolumePoint vp;
        vp.n = n;
        vp.h0 = std::log(static_cast<double>(c));
        vp.normalized = (n > 0) ? vp.h0 / (0.5 * n * n) : vp.h0;
        out.push_back(vp);
    }
    return out;
}

namespace detail {

// exact rank of an integer matrix by fraction-free elimination
inline int mpz_rank(std::vector<std::vector<mpz_class>> m) {
    const std::size_t rows = m.size();
    if (rows == 0) return 0;
    const std::size_t cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            const mpz_class a = m[r][c], b = m[i][c];
            for (std::size_t j = c; j < cols; ++j)
                m[i][j] = m[i][j] * a - m[r][j] * b;
        }
        ++r;
    }
    return static_cast<int>(r);
}

} // namespace detail

enum class MinimaMode { exhaustive, reduction };

// Minkowski successive minima of the section lattice under the metric
// sup-norm.  Exhaustive mode enumerates the certified box at the radius of
// the largest monomial norm; reduction mode returns upper bounds from a
// greedy pairwise basis reduction.
inline std::vector<double> successive_minima_estimate(const SectionLattice& lat,
                                                      MinimaMode mode) {
    const int n = lat.degree;
    const std::size_t dim = static_cast<std::size_t>(n) + 1;
    if (mode == MinimaMode::exhaustive) {
        if (n > 8)
            throw std::runtime_error("successive_minima: dimension too large for exhaustion");
        double r0 = 0.0;
        for (double s : lat.monomial_sup) r0 = std::max(r0, s);
        std::vector<std::pair<double, IntForm>> cands;
        enumerate_ball(lat, RealForm::zero(n), r0,
                       [&](const IntForm& f, const std::vector<double>& delta) {
                           if (f.is_zero()) return;
                           // one representative of {f, -f}
                           for (int k = 0; k <= n; ++k) {
                               if (f.coeff(k) == 0) continue;
                               if (f.coeff(k) < 0) return;
                               break;
                           }
                           std::vector<Complex> dc(delta.begin(), delta.end());
                           const double s = sup_norm(ComplexForm(std::move(dc)),
                                                     lat.metric, *lat.grid);
                           cands.emplace_back(s, f);
                       });
        std::sort(cands.begin(), cands.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> minima;
        std::vector<std::vector<mpz_class>> picked;
        for (const auto& [s, f] : cands) {
            std::vector<mpz_class> row;
            for (int k = 0; k <= n; ++k) row.push_back(f.coeff(k));
            auto trial = picked;
            trial.push_back(row);
            if (detail::mpz_rank(trial) > static_cast<int>(picked.size())) {
                picked.push_back(row);
                minima.push_back(s);
                if (picked.size() == dim) break;
            }
        }
        if (minima.size() != dim)
            throw std::runtime_error("successive_minima: enumeration radius too small");
        return minima;
    }

    // reduction mode: greedy sweeps of v_i +- q v_j
    std::vector<std::vector<mpz_class>> basis(dim, std::vector<mpz_class>(dim, 0));
    for (std::size_t i = 0; i < dim; ++i) basis[i][i] = 1;
    auto norm_of = [&](const std::vector<mpz_class>& v) {
        std::vector<Complex> c(dim);
        for (std::size_t k = 0; k < dim; ++k) c[k] = Complex(v[k].get_d(), 0.0);
        ComplexForm f{std::move(c)};
        if (f.is_zero()) return 0.0;
        return sup_norm(f, lat.metric, *lat.grid);
    };
    std::vector<double> norms(dim);
    for (std::size_t i = 0; i < dim; ++i) norms[i] = norm_of(basis[i]);
    for (int sweep = 0; sweep < 12; ++sweep) {
        bool improved = false;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                if (i == j) continue;
                for (long qmul : {1L, -1L, 2L, -2L}) {
                    std::vector<mpz_class> cand = basis[i];
                    for (std::size_t k = 0; k < dim; ++k)
                        cand[k] += qmul * basis[j][k];
                    const double s = norm_of(cand);
                    if (s < norms[i] * (1.0 - 1e-12) && s > 0.0) {
                        basis[i] = std::move(cand);
                        norms[i] = s;
                        improved = true;
                    }
                }
            }
        if (!improved) break;
    }
    std::sort(norms.begin(), norms.end());
    return norms;
}

} // namespace p1lab
