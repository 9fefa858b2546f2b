#pragma once

// Metric data for O(1) on the projective line: the Fubini-Study weight plus
// a smooth conjugation-invariant perturbation and a scalar twist.
//
// The perturbation is a coefficient list over the fixed basis
//     u^a (1-u)^b cos(c*theta),  u = |z1|^2/(|z0|^2+|z1|^2),
// with a+b <= 4, c even and c <= 2*min(a,b) (the last condition makes the
// function smooth at the two poles).  The degree-n point norm is
//     ||f(x)|| = |f(z0,z1)| e^{-n phi(x)/2} e^{-eps n} / |z|^n.
//
// The curvature density relative to the FS measure, for the degree-1
// bundle, is
//     rho = 1 + sum coef * cos(c th) [ u(1-u) g'' + (1-2u) g' - (c^2/4) u^{a-1}(1-u)^{b-1} ],
// with g = u^a (1-u)^b; each basis term integrates to zero against FS.
// Strict positivity of rho at every grid point is enforced at construction.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "point.hpp"
#include "quadrature.hpp"

namespace p1lab {

struct PerturbationTerm {
    int a, b, c;
};

inline const std::vector<PerturbationTerm>& perturbation_basis() {
    static const std::vector<PerturbationTerm> basis = [] {
        std::vector<PerturbationTerm> v;
        for (int s = 0; s <= 4; ++s)
            for (int a = 0; a <= s; ++a) {
                const int b = s - a;
                const int cmax = 2 * std::min(a, b);
                for (int c = 0; c <= cmax; c += 2) v.push_back({a, b, c});
            }
        return v;
    }();
    return basis;
}

class MetricData {
public:
    // unperturbed Fubini-Study, optional twist
    explicit MetricData(double twist = 0.0) : twist_(twist) { require_twist(); }

    MetricData(std::vector<double> perturbation, double twist)
        : pert_(std::move(perturbation)), twist_(twist) {
        require_twist();
        trim();
        if (!pert_.empty()) {
            check_positivity(QuadratureGrid::fibonacci(4096));
        }
    }

    MetricData(std::vector<double> perturbation, double twist, const QuadratureGrid& grid)
        : pert_(std::move(perturbation)), twist_(twist) {
        require_twist();
        trim();
        check_positivity(grid);
    }

    double twist() const { return twist_; }
    const std::vector<double>& perturbation() const { return pert_; }
    bool is_flat() const { return pert_.empty(); }

    // phi(x)
    double weight(const ProjectivePoint& x) const {
        if (pert_.empty()) return 0.0;
        const double u = x.u();
        const double th = x.theta();
        const auto& basis = perturbation_basis();
        double s = 0.0;
        for (std::size_t i = 0; i < pert_.size(); ++i) {
            if (pert_[i] == 0.0) continue;
            const auto& t = basis[i];
            s += pert_[i] * upow(u, t.a) * upow(1.0 - u, t.b) * std::cos(t.c * th);
        }
        return s;
    }

    // c1 / omega_FS for the degree-1 bundle
    double curvature_density(const ProjectivePoint& x) const {
        if (pert_.empty()) return 1.0;
        const double u = x.u();
        const double th = x.theta();
        const auto& basis = perturbation_basis();
        double s = 1.0;
        for (std::size_t i = 0; i < pert_.size(); ++i) {
            if (pert_[i] == 0.0) continue;
            const auto& t = basis[i];
            const double a = t.a, b = t.b;
            double lap = 0.0;
            // u(1-u) g''
            if (t.a >= 1) lap += a * (a - 1.0) * upow(u, t.a - 1) * upow(1.0 - u, t.b + 1);
            lap += -2.0 * a * b * upow(u, t.a) * upow(1.0 - u, t.b);
            if (t.b >= 1) lap += b * (b - 1.0) * upow(u, t.a + 1) * upow(1.0 - u, t.b - 1);
            // (1-2u) g'
            const double one_minus_2u = 1.0 - 2.0 * u;
            if (t.a >= 1) lap += one_minus_2u * a * upow(u, t.a - 1) * upow(1.0 - u, t.b);
            if (t.b >= 1) lap += -one_minus_2u * b * upow(u, t.a) * upow(1.0 - u, t.b - 1);
            // -(c^2/4) u^{a-1} (1-u)^{b-1}; c > 0 forces a,b >= 1
            if (t.c > 0)
                lap += -0.25 * t.c * t.c * upow(u, t.a - 1) * upow(1.0 - u, t.b - 1);
            s += pert_[i] * std::cos(t.c * th) * lap;
        }
        return s;
    }

private:
    static double upow(double x, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= x;
        return r;
    }

    void require_twist() const {
        if (twist_ < 0.0) throw std::invalid_argument("twist must be >= 0");
    }

    void trim() {
        if (pert_.size() > perturbation_basis().size())
            throw std::invalid_argument("perturbation coefficient list too long");
        while (!pert_.empty() && pert_.back() == 0.0) pert_.pop_back();
    }

    void check_positivity(const QuadratureGrid& grid) const {
        constexpr double margin = 1e-6;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (curvature_density(grid.point(j)) < margin)
                throw std::invalid_argument(
                    "metric perturbation destroys curvature positivity");
        }
    }

    std::vector<double> pert_;
    double twist_ = 0.0;
};

} // namespace p1lab
