#pragma once

// Points of P^1(C).  The canonical representative sits on the unit sphere
// |z0|^2 + |z1|^2 = 1 with the first nonzero coordinate real and positive,
// which makes conjugation and equality tests deterministic.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace p1lab {

class ProjectivePoint {
public:
    ProjectivePoint(std::complex<double> z0, std::complex<double> z1) {
        const double n2 = std::norm(z0) + std::norm(z1);
        if (n2 == 0.0 || !std::isfinite(n2))
            throw std::invalid_argument("projective point needs (z0,z1) != (0,0)");
        const double s = 1.0 / std::sqrt(n2);
        z0 *= s;
        z1 *= s;
        // rotate so the first nonzero coordinate is real-positive
        std::complex<double> lead = (std::abs(z0) > 0.0) ? z0 : z1;
        const std::complex<double> phase = std::conj(lead) / std::abs(lead);
        z0_ = z0 * phase;
        z1_ = z1 * phase;
        if (std::abs(z0_) > 0.0) z0_ = std::complex<double>(std::abs(z0_), 0.0);
        else z1_ = std::complex<double>(std::abs(z1_), 0.0);
    }

    // affine chart w = z1/z0
    static ProjectivePoint from_affine(std::complex<double> w) {
        return ProjectivePoint(1.0, w);
    }

    static ProjectivePoint infinity() { return ProjectivePoint(0.0, 1.0); }

    // (u, theta) chart: u = |z1|^2 in [0,1], theta the fiber angle
    static ProjectivePoint from_u_theta(double u, double theta) {
        const double r0 = std::sqrt(std::max(0.0, 1.0 - u));
        const double r1 = std::sqrt(std::max(0.0, u));
        return ProjectivePoint(r0, std::polar(r1, theta));
    }

    const std::complex<double>& z0() const { return z0_; }
    const std::complex<double>& z1() const { return z1_; }

    // u = |z1|^2 / (|z0|^2+|z1|^2) = |z1|^2 on the canonical representative
    double u() const { return std::norm(z1_); }

    // theta = arg(z1 * conj(z0)); zero at the poles by convention
    double theta() const {
        const std::complex<double> t = z1_ * std::conj(z0_);
        if (std::abs(t) == 0.0) return 0.0;
        return std::arg(t);
    }

    ProjectivePoint conj() const {
        return ProjectivePoint(std::conj(z0_), std::conj(z1_));
    }

    double dist(const ProjectivePoint& o) const {
        // Fubini-Study chordal distance |z0 w1 - z1 w0|
        return std::abs(z0_ * o.z1_ - z1_ * o.z0_);
    }

private:
    std::complex<double> z0_, z1_;
};

} // namespace p1lab
