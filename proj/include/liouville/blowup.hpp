#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "liouville/fields.hpp"
#include "liouville/geometry.hpp"

namespace liouville {

/// Nearest positive multiple of 8 pi and the distance to it.
struct QuantizationResult {
    int m = 1;
    double deviation = 0.0;
    bool below_threshold = false;  // mass <= 4 pi - tol
};

inline QuantizationResult quantization_check(double mass, double tol = 1e-9) {
    if (mass <= 0.0) throw domain_error("quantization_check: mass must be positive");
    QuantizationResult q;
    q.m = std::max(1, static_cast<int>(std::lround(mass / (8.0 * M_PI))));
    q.deviation = std::abs(mass - 8.0 * M_PI * q.m);
    q.below_threshold = mass <= 4.0 * M_PI - tol;
    return q;
}

/// Quadrature of V e^u over B(center, radius) intersected with the domain.
/// Fields with off-grid evaluators are integrated on a dedicated local ball
/// grid (graded toward the center); otherwise the node samples inside the
/// ball are summed.
inline double local_mass(const Field& u, const CurvatureFn& V, const Point& center,
                         double radius, int ball_nr = 64, int ball_nt = 64) {
    const QuadratureGrid& g = *u.grid;
    if (center.norm() - radius > 1.0 + 1e-12 ||
        (g.domain.kind == DiskKind::Half && center.x1 + radius < -1e-12))
        throw domain_error("local_mass: ball does not meet the domain");

    // refined local quadrature whenever off-grid evaluation is available;
    // node sums cannot resolve balls only a few cells wide
    const bool refined = u.has_eval() && static_cast<bool>(V.eval_fn);
    if (refined) {
        BallGrid b = ball_grid(center, radius, ball_nr, ball_nt, true, 1e-4);
        double acc = 0.0;
        for (std::size_t i = 0; i < b.nodes.size(); ++i) {
            if (!g.domain.contains(b.nodes[i], 1e-12)) continue;
            acc += b.weights[i] * V.eval(b.nodes[i]) * std::exp(u.eval(b.nodes[i]));
        }
        return acc;
    }
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        if (dist(g.nodes[i], center) <= radius)
            acc += g.weights[i] * V.values[i] * std::exp(u.values[i]);
    }
    return acc;
}

/// Max of u over the annulus r_inner <= |x - center| <= r_outer (within the
/// domain). With an evaluator and a sparsely-sampled annulus, a local polar
/// sweep refines the estimate.
inline double annulus_sup(const Field& u, const Point& center, double r_inner,
                          double r_outer, int refine_nr = 96, int refine_nt = 128) {
    if (!(r_inner < r_outer)) throw domain_error("annulus_sup: need r_inner < r_outer");
    const QuadratureGrid& g = *u.grid;
    double best = -std::numeric_limits<double>::infinity();
    int inside = 0;
    for (int i = 0; i < g.size(); ++i) {
        const double d = dist(g.nodes[i], center);
        if (d >= r_inner && d <= r_outer) {
            ++inside;
            best = std::max(best, u.values[i]);
        }
    }
    if ((inside < 32 || u.has_eval()) && u.has_eval()) {
        for (int j = 0; j < refine_nr; ++j) {
            const double r = r_inner + (r_outer - r_inner) * j / (refine_nr - 1.0);
            for (int k = 0; k < refine_nt; ++k) {
                const double th = 2.0 * M_PI * k / refine_nt;
                const Point p{center.x1 + r * std::cos(th), center.x2 + r * std::sin(th)};
                if (g.domain.contains(p, 1e-12)) best = std::max(best, u.eval(p));
            }
        }
    }
    if (best == -std::numeric_limits<double>::infinity())
        throw domain_error("annulus_sup: annulus does not meet the domain");
    return best;
}

/// sup over nodes of u(x) + 2 log|x - x_star|.
inline double li_shafrir_probe(const Field& u, const Point& x_star) {
    const QuadratureGrid& g = *u.grid;
    if (!g.domain.contains(x_star)) throw domain_error("li_shafrir_probe: x_star outside");
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.size(); ++i) {
        const double d = dist(g.nodes[i], x_star);
        if (d < 1e-300) continue;
        best = std::max(best, u.values[i] + 2.0 * std::log(d));
    }
    return best;
}

struct BlowupPoint {
    Point x;
    double delta = 0.0;          // distance to boundary union excised region
    double boundary_delta = 0.0; // plain d(x, boundary)
    double sup_u = 0.0;
    double diag_2log = 0.0;      // sup_u + 2 log delta
    double diag_4log = 0.0;      // sup_u + 4 log delta
    std::map<double, double> local_mass_at;  // radius fraction eps -> mass
    int quant_m = 1;
    double quant_deviation = 0.0;
    bool quant_below_threshold = false;

    /// Lookup tolerant of floating-point fraction keys.
    double mass_at(double fraction) const {
        for (const auto& [k, v] : local_mass_at)
            if (std::abs(k - fraction) <= 1e-9 * (1.0 + std::abs(fraction))) return v;
        throw config_error("BlowupPoint: no recorded mass at this fraction");
    }
};

struct ExcisedBall {
    Point center;
    double radius;
};

struct ExtractionReport {
    std::vector<BlowupPoint> points;
    double epsilon = 0.0;
    double threshold = 0.0;
    double residual_sup = 0.0;
    bool success = false;        // residual_sup <= threshold
    std::vector<ExcisedBall> excised;
    // sensitivity of the point count to the threshold
    int count_at_threshold_minus_1 = 0;
    int count_at_threshold_plus_1 = 0;
};

namespace detail {

inline double excised_distance(const Point& p, const DiskDomain& d,
                               const std::vector<ExcisedBall>& balls) {
    double dd = boundary_distance(p, d);
    for (const auto& b : balls)
        dd = std::min(dd, std::max(0.0, dist(p, b.center) - b.radius));
    return dd;
}

/// Greedy construction: argmax over non-excised nodes, excise B(x, delta eps),
/// repeat. A candidate is accepted while both its height and its
/// height + 2 log delta clear the threshold (the second is the genuine
/// blow-up diagnostic; rim maxima of an excised ball fail it).
inline int greedy_count(const Field& u, double epsilon, double threshold,
                        int max_points) {
    const QuadratureGrid& g = *u.grid;
    std::vector<char> masked(g.size(), 0);
    std::vector<ExcisedBall> balls;
    int count = 0;
    while (true) {
        int best = -1;
        for (int i = 0; i < g.size(); ++i)
            if (!masked[i] && (best < 0 || u.values[i] > u.values[best])) best = i;
        if (best < 0) break;
        const double sup = u.values[best];
        const double delta =
            std::max(excised_distance(g.nodes[best], g.domain, balls), 1e-300);
        if (!(sup > threshold) || !(sup + 2.0 * std::log(delta) > threshold)) break;
        ++count;
        if (count > max_points) return count;
        balls.push_back({g.nodes[best], delta * epsilon});
        for (int i = 0; i < g.size(); ++i)
            if (!masked[i] && dist(g.nodes[i], balls.back().center) <= balls.back().radius)
                masked[i] = 1;
    }
    return count;
}

}  // namespace detail

/// Theorem-1-style greedy exterior extraction with concentration diagnostics.
/// Local masses are recorded at radius fractions {eps, 2 eps, 3 eps}; the
/// quantization readout uses the extraction fraction eps.
inline ExtractionReport extract_blowups(const Field& u, const CurvatureFn& V,
                                        double epsilon, double threshold,
                                        int max_points = 16) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw config_error("extract_blowups: epsilon must lie in (0, 1/2)");
    if (!std::isfinite(threshold))
        throw config_error("extract_blowups: threshold must be finite");
    const QuadratureGrid& g = *u.grid;

    ExtractionReport rep;
    rep.epsilon = epsilon;
    rep.threshold = threshold;

    std::vector<char> masked(g.size(), 0);
    while (true) {
        int best = -1;
        for (int i = 0; i < g.size(); ++i)
            if (!masked[i] && (best < 0 || u.values[i] > u.values[best])) best = i;
        if (best < 0) {
            rep.residual_sup = 0.0;
            break;
        }
        const double sup = u.values[best];
        const Point x = g.nodes[best];
        const double delta = std::max(detail::excised_distance(x, g.domain, rep.excised),
                                      1e-300);
        if (!(sup > threshold) || !(sup + 2.0 * std::log(delta) > threshold)) {
            rep.residual_sup = sup;
            break;
        }
        if (static_cast<int>(rep.points.size()) >= max_points)
            throw runaway_error("extract_blowups: more than max_points extractions "
                                "(threshold too low)");

        BlowupPoint pt;
        pt.x = x;
        pt.delta = delta;
        pt.boundary_delta = boundary_distance(x, g.domain);
        pt.sup_u = sup;
        pt.diag_2log = sup + 2.0 * std::log(delta);
        pt.diag_4log = sup + 4.0 * std::log(delta);
        for (double f : {1.0, 2.0, 3.0}) {
            const double rad = std::min(f * epsilon * delta, 0.999 * delta);
            pt.local_mass_at[f * epsilon] = local_mass(u, V, x, rad);
        }
        {
            const QuantizationResult q = quantization_check(
                std::max(pt.local_mass_at.begin()->second, 1e-300));
            pt.quant_m = q.m;
            pt.quant_deviation = q.deviation;
            pt.quant_below_threshold = q.below_threshold;
        }
        rep.excised.push_back({x, delta * epsilon});
        rep.points.push_back(std::move(pt));
        for (int i = 0; i < g.size(); ++i)
            if (!masked[i] && dist(g.nodes[i], rep.excised.back().center) <=
                                   rep.excised.back().radius)
                masked[i] = 1;
    }
    rep.success = rep.residual_sup <= threshold;
    rep.count_at_threshold_minus_1 =
        detail::greedy_count(u, epsilon, threshold - 1.0, max_points);
    rep.count_at_threshold_plus_1 =
        detail::greedy_count(u, epsilon, threshold + 1.0, max_points);
    return rep;
}

}  // namespace liouville
