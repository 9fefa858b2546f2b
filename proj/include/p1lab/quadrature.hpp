#pragma once

// Quadrature for the mass-1 Fubini-Study measure on P^1(C).  Under the
// standard correspondence with the round 2-sphere, the FS measure is the
// uniform measure, so a Fibonacci point set with equal weights gives
// spectrally good uniformity.  Points are stored in conjugate-adjacent
// pairs (x, xbar) with equal weights, which makes every quadrature sum of a
// conjugation-symmetric integrand exactly symmetric.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "point.hpp"

namespace p1lab {

class QuadratureGrid {
public:
    static QuadratureGrid fibonacci(std::size_t n_points) {
        if (n_points < 2)
            throw std::invalid_argument("grid needs at least 2 points");
        const std::size_t m = (n_points + 1) / 2;
        QuadratureGrid g;
        g.pts_.reserve(2 * m);
        g.w_.assign(2 * m, 1.0 / static_cast<double>(2 * m));
        const double golden = 0.618033988749894848;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
            const double frac = static_cast<double>(i) * golden
                                - std::floor(static_cast<double>(i) * golden);
            const double theta = 2.0 * 3.14159265358979323846 * frac;
            const double u = 0.5 * (1.0 - z);
            g.pts_.push_back(ProjectivePoint::from_u_theta(u, theta));
            g.pts_.push_back(ProjectivePoint::from_u_theta(u, -theta));
        }
        return g;
    }

    std::size_t size() const { return pts_.size(); }
    const ProjectivePoint& point(std::size_t j) const { return pts_[j]; }
    double weight(std::size_t j) const { return w_[j]; }
    const std::vector<ProjectivePoint>& points() const { return pts_; }
    const std::vector<double>& weights() const { return w_; }

private:
    std::vector<ProjectivePoint> pts_;
    std::vector<double> w_;
};

} // namespace p1lab
