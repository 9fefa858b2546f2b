#pragma once

// End-to-end experiments: the good-section search (avoid a closed subset,
// generically smooth divisor, no vertical components), min-height point
// extraction, and the essential-minimum upper-bound experiment
//     liminf_i h_N(x_i)  <=  (L.N) / deg L_Q + o(1)
// driven by the Demailly pipeline, rounding, and divisor decomposition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "arakelov.hpp"
#include "bergman.hpp"
#include "lattice.hpp"

namespace p1lab {

struct GoodSectionCriteria {
    std::vector<ClosedPoint> avoid_set;
    bool require_generically_smooth = true;
    bool require_no_vertical = true;
    double ball_radius = -1.0; // < 0: the rounding bound (1/2) sum ||m_k||
    std::uint64_t max_candidates = 20000;
};

struct GoodSectionStats {
    std::uint64_t tried = 0;
    std::uint64_t pass_avoid = 0;
    std::uint64_t pass_smooth = 0;
    std::uint64_t pass_content = 0;
};

class GoodSectionError : public std::runtime_error {
public:
    GoodSectionError(const std::string& what, GoodSectionStats s)
        : std::runtime_error(what), stats(s) {}
    GoodSectionStats stats;
};

namespace detail {

// exact divisibility of binary forms: g | f over Z (both nonzero)
inline bool binary_divides(const IntForm& f, const IntForm& g) {
    zx::ZPoly fc = arakelov_detail::dehom(f);
    zx::ZPoly gc = arakelov_detail::dehom(g);
    const int fv1 = f.degree() - zx::deg(fc);
    const int gv1 = g.degree() - zx::deg(gc);
    if (gv1 > fv1) return false;
    // strip t-multiplicities (z0 factors)
    auto strip = [](zx::ZPoly& p) {
        int v = 0;
        while (!p.empty() && p[0] == 0) {
            p.erase(p.begin());
            ++v;
        }
        return v;
    };
    const int fv0 = strip(fc), gv0 = strip(gc);
    if (gv0 > fv0) return false;
    // quick modular rejection before the exact division
    for (std::uint64_t p : {100003ULL, 100019ULL}) {
        fp::Poly fp_ = zx::reduce_mod(fc, p);
        fp::Poly gp_ = zx::reduce_mod(gc, p);
        if (fp::deg(fp_) == zx::deg(fc) && fp::deg(gp_) == zx::deg(gc)) {
            if (!fp::is_zero(fp::rem(fp_, gp_, p))) return false;
            break;
        }
    }
    zx::ZPoly q;
    return zx::divide_exact(fc, gc, q);
}

inline bool squarefree_over_q(const IntForm& f) {
    zx::ZPoly core = arakelov_detail::dehom(f);
    const int v1 = f.degree() - zx::deg(core);
    if (v1 > 1) return false;
    int v0 = 0;
    while (!core.empty() && core[0] == 0) {
        core.erase(core.begin());
        ++v0;
    }
    if (v0 > 1) return false;
    return zx::is_squarefree(core);
}

} // namespace detail

// first lattice point in the ball around the rounded center, in increasing
// triangle-distance order, satisfying the enabled predicates
inline IntForm good_section_search(const IntForm& center, const SectionLattice& lat,
                                   const GoodSectionCriteria& crit,
                                   GoodSectionStats* stats_out = nullptr) {
    const int n = lat.degree;
    if (center.degree() != n) throw std::invalid_argument("good_section_search: degree");
    double radius = crit.ball_radius;
    if (radius < 0.0) {
        radius = 0.0;
        for (double s : lat.monomial_sup) radius += 0.5 * s;
    }

    GoodSectionStats stats;
    auto passes = [&](const IntForm& f) -> bool {
        if (f.is_zero()) return false;
        ++stats.tried;
        if (crit.require_no_vertical) {
            if (content(f) != 1) return false;
        }
        ++stats.pass_content;
        for (const ClosedPoint& y : crit.avoid_set)
            if (detail::binary_divides(f, y.minimal)) return false;
        ++stats.pass_avoid;
        if (crit.require_generically_smooth && !detail::squarefree_over_q(f))
            return false;
        ++stats.pass_smooth;
        return true;
    };

    // best-first enumeration of sparse perturbations by the triangle bound
    // sum |delta_k| ||m_k||; each sparse delta is generated exactly once
    struct Node {
        double dist;
        std::vector<std::pair<int, long>> delta; // (index, value), ordered
        bool operator>(const Node& o) const {
            if (dist != o.dist) return dist > o.dist;
            return delta > o.delta; // deterministic tie order
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> queue;
    queue.push(Node{0.0, {}});

    auto materialize = [&](const Node& nd) {
        IntForm f = center;
        for (const auto& [k, v] : nd.delta) f.coeff(k) += v;
        return f;
    };

    std::uint64_t popped = 0;
    while (!queue.empty() && popped < crit.max_candidates) {
        Node nd = queue.top();
        queue.pop();
        ++popped;
        if (nd.dist > radius) break;
        IntForm f = materialize(nd);
        if (passes(f)) {
            if (stats_out) *stats_out = stats;
            return f;
        }
        // children: bump the magnitude of the last coordinate, or open a
        // fresh coordinate right of it
        if (!nd.delta.empty()) {
            Node bump = nd;
            auto& [k, v] = bump.delta.back();
            bump.dist += lat.monomial_sup[static_cast<std::size_t>(k)];
            v += (v > 0) ? 1 : -1;
            queue.push(std::move(bump));
        }
        const int start = nd.delta.empty() ? 0 : nd.delta.back().first + 1;
        for (int k = start; k <= n; ++k) {
            for (long sgn : {1L, -1L}) {
                Node child = nd;
                child.dist += lat.monomial_sup[static_cast<std::size_t>(k)];
                child.delta.emplace_back(k, sgn);
                if (child.dist <= radius) queue.push(std::move(child));
            }
        }
    }
    if (stats_out) *stats_out = stats;
    throw GoodSectionError(
        "good_section_search: ball exhausted (tried " + std::to_string(stats.tried) +
            ", content-1 " + std::to_string(stats.pass_content) + ", avoid " +
            std::to_string(stats.pass_avoid) + ", smooth " +
            std::to_string(stats.pass_smooth) + ")",
        stats);
}

// the factor of minimal height; ties broken by degree then lexicographic
// minimal form
inline std::pair<ClosedPoint, double> min_height_point(const ArithmeticDivisor& D,
                                                       const MetricData& m,
                                                       int bundle_degree) {
    if (D.horizontal.empty())
        throw std::runtime_error("min_height_point: no horizontal components");
    const HorizontalComponent* best = nullptr;
    double best_h = 0.0;
    for (const auto& hc : D.horizontal) {
        const double h = height_of_point(hc.point, m, bundle_degree);
        if (best == nullptr || h < best_h - 1e-12 ||
            (std::abs(h - best_h) <= 1e-12 &&
             closed_point_less(hc.point, best->point))) {
            best = &hc;
            best_h = h;
        }
    }
    return {best->point, best_h};
}

// sup over tested avoid-sets of the inf of heights over points outside
inline double ess_sup_inf_estimate(
    const std::vector<std::pair<ClosedPoint, double>>& points_by_stage,
    const std::vector<std::vector<ClosedPoint>>& avoid_history) {
    if (points_by_stage.empty())
        throw std::invalid_argument("ess_sup_inf_estimate: no stage points");
    auto contains = [](const std::vector<ClosedPoint>& ys, const ClosedPoint& x) {
        for (const ClosedPoint& y : ys)
            if (y.degree == x.degree && y.minimal == x.minimal) return true;
        return false;
    };
    double best = -1e300;
    std::vector<std::vector<ClosedPoint>> history = avoid_history;
    if (history.empty()) history.push_back({});
    for (const auto& Y : history) {
        double inf = 1e300;
        for (const auto& [x, h] : points_by_stage)
            if (!contains(Y, x)) inf = std::min(inf, h);
        if (inf < 1e300) best = std::max(best, inf);
    }
    return best;
}

struct EssMinStage {
    int n = 0, ell = 0, degree = 0;
    double sup_norm_value = 0.0;
    double l1_value = 0.0;
    double measure_value = 0.0;
    double rounding_distance = 0.0;
    IntForm rounded;           // the raw rounded center (may carry content)
    mpz_class rounded_content; // its content
    IntForm section;           // the good section found near the center
    ClosedPoint min_point;
    double min_height = 0.0;
    double remainder = 0.0; // (1/deg) int log||s|| c1(N)
    double defect = 0.0;    // rhs - min_height
    int num_factors = 0;
    std::uint64_t candidates_tried = 0;
    double wall_ms = 0.0;
};

struct EssMinReport {
    std::vector<EssMinStage> stages;
    double rhs = 0.0;             // L.N / deg L_Q at the final stage
    double liminf_estimate = 0.0; // min over the trailing window
    double sup_inf_estimate = 0.0;
    bool inequality_ok = false;
    double tolerance = 0.05;
    int window = 3;
};

struct EssMinConfig {
    MetricData l_metric;
    int l_degree = 1;
    MetricData n_metric;
    int n_degree = 1;
    std::vector<double> tol_schedule{0.2, 0.1, 0.05};
    ScheduleCaps caps;
    GoodSectionCriteria crit;
    int window = 3;
    double eps = 0.05;
};

inline EssMinReport essmin_experiment(const EssMinConfig& cfg, const QuadratureGrid& q) {
    if (!(cfg.l_metric.twist() > 0.0))
        throw std::invalid_argument("essmin: L must be twisted ample (eps > 0)");
    EssMinReport rep;
    rep.window = cfg.window;

    DemaillySequence seq = demailly_schedule(cfg.l_metric, q, cfg.tol_schedule,
                                             cfg.caps, cfg.eps);
    std::vector<std::pair<ClosedPoint, double>> stage_points;
    for (const DemaillyStage& st : seq.stages) {
        const auto t0 = std::chrono::steady_clock::now();
        EssMinStage es;
        es.n = st.n;
        es.ell = st.ell;
        es.degree = st.n * st.ell;
        es.sup_norm_value = st.sup_norm_value;
        es.l1_value = st.l1_value;
        es.measure_value = st.measure_value;

        RealForm real = real_section(st.section);
        SectionLattice lat = make_lattice(es.degree, cfg.l_metric, q);
        auto [rounded, dist] = round_to_integral(real, lat);
        es.rounding_distance = dist;
        es.rounded = rounded;
        es.rounded_content = content(rounded);

        GoodSectionStats stats;
        es.section = good_section_search(rounded, lat, cfg.crit, &stats);
        es.candidates_tried = stats.tried;

        ArithmeticDivisor D = decompose_divisor(es.section);
        es.num_factors = static_cast<int>(D.horizontal.size());
        auto [pt, h] = min_height_point(D, cfg.n_metric, cfg.n_degree);
        es.min_point = pt;
        es.min_height = h;
        stage_points.emplace_back(pt, h);

        ComplexForm sc = to_complex(es.section);
        es.remainder = chunked_sum<double>(q.size(), [&](std::size_t j) {
                           const ProjectivePoint& x = q.point(j);
                           return q.weight(j) * cfg.n_degree *
                                  cfg.n_metric.curvature_density(x) *
                                  log_point_norm(sc, x, cfg.l_metric);
                       }) /
                       es.degree;
        es.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
        rep.stages.push_back(std::move(es));
    }

    rep.rhs = intersection_via_section(cfg.l_metric, cfg.l_degree, cfg.n_metric,
                                       cfg.n_degree, rep.stages.back().section, q) /
              cfg.l_degree;
    for (auto& es : rep.stages) es.defect = rep.rhs - es.min_height;

    double liminf = 1e300;
    const std::size_t w = static_cast<std::size_t>(std::max(1, cfg.window));
    const std::size_t lo = rep.stages.size() > w ? rep.stages.size() - w : 0;
    for (std::size_t i = lo; i < rep.stages.size(); ++i)
        liminf = std::min(liminf, rep.stages[i].min_height);
    rep.liminf_estimate = liminf;

    // avoid-set family: all low points discovered so far (h <= 0.3, deg <= 2)
    std::vector<ClosedPoint> low;
    for (const auto& [x, h] : stage_points)
        if (h <= 0.3 && x.degree <= 2) low.push_back(x);
    rep.sup_inf_estimate = ess_sup_inf_estimate(stage_points, {{}, low});

    rep.inequality_ok = rep.liminf_estimate <= rep.rhs + rep.tolerance;
    return rep;
}

} // namespace p1lab
