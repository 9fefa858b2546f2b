#pragma once

// Bergman-kernel machinery: L^2-orthonormal bases of the degree-n section
// space, the kernels b_n and u_n, power-sum sections, and the explicit
// search schedule that produces the approximating sequence
//     s' = s_{n,l} / ||s_{n,l}||_inf,   s_{n,l} = sum_i sigma_i^l.
//
// The n-stage is accepted once the L^1 norm of (1/(2n)) log u_n and the
// measure of its normalized excess are small enough; the l-stage once
// (1/(nl)) log ||s_{n,l}|| is L^1-close to that target and the measure
// diagnostic at the configured eps clears.  Caps are explicit and failure
// at the caps raises, carrying the best stage so far.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "form.hpp"
#include "metric.hpp"
#include "norms.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace p1lab {

struct OrthonormalBasis {
    int degree = 0;
    std::vector<ComplexForm> sections;
    double gram_residual = 0.0;
    // metrized values of each section on the construction grid, row per
    // section; valid as long as that grid is alive
    std::vector<std::vector<Complex>> values;
    const QuadratureGrid* grid = nullptr;
};

namespace detail {

// metrized monomial values: row k holds z0^k z1^(n-k) e^{-n phi/2 - eps n}
inline std::vector<std::vector<Complex>> monomial_values(int n, const MetricData& m,
                                                         const QuadratureGrid& q) {
    const std::size_t N = q.size();
    std::vector<std::vector<Complex>> rows(static_cast<std::size_t>(n) + 1,
                                           std::vector<Complex>(N));
    par_for(N, [&](std::size_t j) {
        const ProjectivePoint& x = q.point(j);
        const double fac = std::exp(-0.5 * n * m.weight(x) - m.twist() * n);
        Complex z0k(fac, 0.0);
        for (int k = 0; k <= n; ++k) {
            rows[static_cast<std::size_t>(k)][j] = z0k; // fac * z0^k
            z0k *= x.z0();
        }
        Complex z1k(1.0, 0.0);
        for (int k = n; k >= 0; --k) {
            rows[static_cast<std::size_t>(k)][j] *= z1k; // * z1^{n-k}
            z1k *= x.z1();
        }
    });
    return rows;
}

inline Complex grid_dot(const QuadratureGrid& q, const std::vector<Complex>& a,
                        const std::vector<Complex>& b) {
    return chunked_sum<Complex>(q.size(), [&](std::size_t j) {
        const double re = a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
        const double im = a[j].imag() * b[j].real() - a[j].real() * b[j].imag();
        return Complex(q.weight(j) * re, q.weight(j) * im);
    });
}

} // namespace detail

// Modified Gram-Schmidt on the monomial basis under the quadrature L^2
// pairing, with one full reorthogonalization pass.
inline OrthonormalBasis orthonormalize(int n, const MetricData& m,
                                       const QuadratureGrid& q) {
    if (n < 0) throw std::invalid_argument("orthonormalize: n >= 0");
    if (q.size() < static_cast<std::size_t>(n) + 1)
        throw std::runtime_error("orthonormalization failed: grid too coarse");
    auto rows = detail::monomial_values(n, m, q);
    const std::size_t N = q.size();

    OrthonormalBasis basis;
    basis.degree = n;
    basis.grid = &q;
    std::vector<std::vector<Complex>> coef(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        coef[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(n) + 1,
                                                 Complex(0.0, 0.0));
        coef[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Complex(1.0, 0.0);
    }

    for (int i = 0; i <= n; ++i) {
        auto& vi = rows[static_cast<std::size_t>(i)];
        auto& ci = coef[static_cast<std::size_t>(i)];
        for (int pass = 0; pass < 2; ++pass) {
            for (int jj = 0; jj < i; ++jj) {
                const Complex r = detail::grid_dot(q, vi, rows[static_cast<std::size_t>(jj)]);
                const auto& vj = rows[static_cast<std::size_t>(jj)];
                par_for(N, [&](std::size_t p) { vi[p] -= r * vj[p]; });
                const auto& cj = coef[static_cast<std::size_t>(jj)];
                for (int k = 0; k <= n; ++k)
                    ci[static_cast<std::size_t>(k)] -= r * cj[static_cast<std::size_t>(k)];
            }
        }
        const double nrm = std::sqrt(detail::grid_dot(q, vi, vi).real());
        if (!(nrm > 1e-150))
            throw std::runtime_error("orthonormalization failed: rank deficiency");
        const double inv = 1.0 / nrm;
        par_for(N, [&](std::size_t p) { vi[p] *= inv; });
        for (int k = 0; k <= n; ++k) ci[static_cast<std::size_t>(k)] *= inv;

        // phase convention: leading (highest z0-power) nonzero coefficient
        // real-positive, for reproducible fixtures
        double cmax = 0.0;
        for (int k = 0; k <= n; ++k)
            cmax = std::max(cmax, std::abs(ci[static_cast<std::size_t>(k)]));
        int lead = n;
        while (lead > 0 && std::abs(ci[static_cast<std::size_t>(lead)]) <= 1e-9 * cmax)
            --lead;
        const Complex ph = ci[static_cast<std::size_t>(lead)]
                           / std::abs(ci[static_cast<std::size_t>(lead)]);
        const Complex rot = std::conj(ph);
        for (int k = 0; k <= n; ++k) ci[static_cast<std::size_t>(k)] *= rot;
        par_for(N, [&](std::size_t p) { vi[p] *= rot; });
    }

    double resid = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int jj = 0; jj <= i; ++jj) {
            const Complex g = detail::grid_dot(q, rows[static_cast<std::size_t>(i)],
                                               rows[static_cast<std::size_t>(jj)]);
            const double dev = std::abs(g - ((i == jj) ? Complex(1.0, 0.0)
                                                       : Complex(0.0, 0.0)));
            resid = std::max(resid, dev);
        }
    if (resid > 1e-8)
        throw std::runtime_error("orthonormalization failed: gram residual too large");

    basis.gram_residual = resid;
    basis.values = std::move(rows);
    for (int i = 0; i <= n; ++i)
        basis.sections.emplace_back(ComplexForm(coef[static_cast<std::size_t>(i)]));
    return basis;
}

// b_n(x) = sum_i ||sigma_i(x)||^2
inline double bergman_kernel(const OrthonormalBasis& b, const ProjectivePoint& x,
                             const MetricData& m) {
    double s = 0.0;
    for (const ComplexForm& sec : b.sections) {
        const double v = point_norm(sec, x, m);
        s += v * v;
    }
    return s;
}

// u_n(x) = max_i ||sigma_i(x)||^2; 1 <= b_n/u_n <= r_n pointwise
inline double max_kernel(const OrthonormalBasis& b, const ProjectivePoint& x,
                         const MetricData& m) {
    double s = 0.0;
    for (const ComplexForm& sec : b.sections) {
        const double v = point_norm(sec, x, m);
        s = std::max(s, v * v);
    }
    return s;
}

// sum_i sigma_i^l with exact polynomial exponentiation in the coefficient
// domain; coefficient magnitudes are guarded against double overflow
inline ComplexForm power_sum_section(const OrthonormalBasis& b, int ell) {
    if (ell < 1) throw std::invalid_argument("power_sum_section: ell >= 1");
    ComplexForm acc = ComplexForm::zero(b.degree * ell);
    for (const ComplexForm& sec : b.sections) acc = acc + sec.pow(ell);
    for (int k = 0; k <= acc.degree(); ++k) {
        const double a = std::abs(acc.coeff(k));
        if (!(a < 1e300))
            throw std::runtime_error("power sum overflow (raise precision)");
    }
    return acc;
}

struct DemaillyStage {
    int n = 0;
    int ell = 0;
    ComplexForm section; // sup-normalized
    double sup_norm_value = 0.0;
    double l1_value = 0.0;
    double measure_value = 0.0;
    double kernel_target_l1 = 0.0; // ||(1/(2n)) log u_n||_L1
    double power_gap_l1 = 0.0;     // ||(1/(nl)) log||s|| - (1/(2n)) log u_n||_L1
    double wall_ms = 0.0;
};

struct DemaillySequence {
    double eps = 0.05; // threshold for the measure diagnostic
    std::vector<DemaillyStage> stages;
};

struct ScheduleCaps {
    int n_max = 64;
    int ell_max = 64;
};

class ScheduleError : public std::runtime_error {
public:
    ScheduleError(const std::string& what, DemaillySequence best)
        : std::runtime_error(what), best_so_far(std::move(best)) {}
    DemaillySequence best_so_far;
};

namespace detail {

inline std::vector<int> search_ladder(int lo, int hi) {
    static const int steps[] = {1,  2,  3,  4,  6,  8,  10, 12, 16, 20,  24,  28,
                                32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256};
    std::vector<int> v;
    for (int s : steps)
        if (s >= lo && s <= hi) v.push_back(s);
    if (v.empty() || v.back() != hi) v.push_back(hi);
    return v;
}

} // namespace detail

// The explicit stage search; see the header comment.  The produced stages
// satisfy, after normalization, ||s'||_inf = 1 and have their L^1 and
// measure diagnostics recorded.
inline DemaillySequence demailly_schedule(const MetricData& m, const QuadratureGrid& q,
                                          const std::vector<double>& tol_schedule,
                                          ScheduleCaps caps = {}, double eps = 0.05) {
    if (tol_schedule.empty())
        throw std::invalid_argument("demailly_schedule: empty tolerance schedule");
    for (std::size_t i = 0; i + 1 < tol_schedule.size(); ++i)
        if (!(tol_schedule[i] > tol_schedule[i + 1]))
            throw std::invalid_argument("demailly_schedule: tolerances must decrease");
    if (caps.n_max < 1 || caps.ell_max < 1)
        throw std::invalid_argument("demailly_schedule: caps must be positive");

    const std::size_t N = q.size();
    DemaillySequence seq;
    seq.eps = eps;
    std::map<int, OrthonormalBasis> bases;
    std::map<int, std::vector<double>> targets; // (1/(2n)) log u_n on the grid
    int n_floor = 1;

    auto target_of = [&](int n) -> const std::vector<double>& {
        auto it = targets.find(n);
        if (it != targets.end()) return it->second;
        const OrthonormalBasis& b = bases.count(n) ? bases[n]
                                                   : (bases[n] = orthonormalize(n, m, q));
        std::vector<double> t(N);
        par_for(N, [&](std::size_t j) {
            double u = 0.0;
            for (const auto& row : b.values) u = std::max(u, std::norm(row[j]));
            t[j] = std::max(std::log(u), kLogFloor) / (2.0 * n);
        });
        return targets.emplace(n, std::move(t)).first->second;
    };

    double prev_l1 = 1e300;
    for (double tol : tol_schedule) {
        const auto t0 = std::chrono::steady_clock::now();

        // stage n: L1 of the kernel target small, the large-ell limit of the
        // normalized L1 already under half the stage tolerance, and (when the
        // measure cap below is binding) the limit excess set small in measure
        int n_pick = -1;
        double A_pick = 0.0;
        const double meas_cap = std::min(1.0, 4.0 * tol);
        for (int n : detail::search_ladder(n_floor, caps.n_max)) {
            const auto& t = target_of(n);
            double A = 0.0, tmax = -1e300;
            for (std::size_t j = 0; j < N; ++j) {
                A += q.weight(j) * std::abs(t[j]);
                tmax = std::max(tmax, t[j]);
            }
            double Anorm = 0.0, minf = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                Anorm += q.weight(j) * (tmax - t[j]);
                if (tmax - t[j] > eps) minf += q.weight(j);
            }
            const bool minf_ok = (meas_cap >= 1.0) || (minf <= 0.5 * meas_cap);
            if (A <= 0.5 * tol && Anorm <= 0.5 * tol && minf_ok) {
                n_pick = n;
                A_pick = A;
                break;
            }
        }
        if (n_pick < 0)
            throw ScheduleError("demailly_schedule: n cap exhausted before tolerance met",
                                seq);
        const OrthonormalBasis& basis = bases[n_pick];
        const auto& target = targets[n_pick];

        // stage l: power-sum section close to the kernel target in L1,
        // measure diagnostic under control
        int ell_pick = -1;
        ComplexForm section;
        double D_pick = 0.0, l1_pick = 0.0, meas_pick = 0.0;
        DemaillyStage best_partial;
        bool have_best = false;
        for (int ell : detail::search_ladder(1, caps.ell_max)) {
            std::vector<double> logs(N);
            par_for(N, [&](std::size_t j) {
                Complex s(0.0, 0.0);
                for (const auto& row : basis.values) {
                    Complex p(1.0, 0.0);
                    Complex base = row[j];
                    int e = ell;
                    while (e > 0) {
                        if (e & 1) p *= base;
                        e >>= 1;
                        if (e) base *= base;
                    }
                    s += p;
                }
                logs[j] = std::max(std::log(std::abs(s)), kLogFloor);
            });
            const double nl = static_cast<double>(n_pick) * ell;
            double D = 0.0;
            for (std::size_t j = 0; j < N; ++j)
                D += q.weight(j) * std::abs(logs[j] / nl - target[j]);

            ComplexForm cand = power_sum_section(basis, ell);
            const double sup = sup_norm(cand, m, q);
            const double lsup = std::log(sup);
            double l1 = 0.0, meas = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const double v = std::abs(logs[j] - lsup) / nl;
                l1 += q.weight(j) * v;
                if (v > eps) meas += q.weight(j);
            }
            if (!have_best || l1 < best_partial.l1_value) {
                best_partial = DemaillyStage{n_pick, ell, ComplexForm(), sup, l1, meas,
                                             A_pick, D, 0.0};
                have_best = true;
            }
            if (D <= 0.5 * tol && meas <= meas_cap && l1 <= tol && l1 <= 1.05 * prev_l1) {
                ell_pick = ell;
                section = cand * Complex(1.0 / sup, 0.0);
                D_pick = D;
                l1_pick = l1;
                meas_pick = meas;
                break;
            }
        }
        if (ell_pick < 0) {
            seq.stages.push_back(best_partial);
            throw ScheduleError("demailly_schedule: ell cap exhausted before tolerance met",
                                seq);
        }

        DemaillyStage st;
        st.n = n_pick;
        st.ell = ell_pick;
        st.section = section;
        st.sup_norm_value = sup_norm(section, m, q);
        st.l1_value = l1_pick;
        st.measure_value = meas_pick;
        st.kernel_target_l1 = A_pick;
        st.power_gap_l1 = D_pick;
        st.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
        seq.stages.push_back(std::move(st));
        n_floor = n_pick;
        prev_l1 = l1_pick;
    }
    return seq;
}

// real section extraction: the conjugation-symmetric pipeline produces
// real-coefficient sections; the fp imaginary residue is checked and cut
inline RealForm real_section(const ComplexForm& f, double tol = 1e-9) {
    double cmax = 0.0, imax = 0.0;
    for (int k = 0; k <= f.degree(); ++k) {
        cmax = std::max(cmax, std::abs(f.coeff(k)));
        imax = std::max(imax, std::abs(f.coeff(k).imag()));
    }
    if (imax > tol * std::max(cmax, 1e-300))
        throw std::runtime_error("section is not real");
    std::vector<double> c;
    for (int k = 0; k <= f.degree(); ++k) c.push_back(f.coeff(k).real());
    return RealForm(std::move(c));
}

} // namespace p1lab
