#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "liouville/analytic.hpp"
#include "liouville/fields.hpp"

namespace liouville {

/// Superposition of Dirichlet-corrected transported bubbles:
///   u = sum_k u_{a_k},  V = (sum_k V_k e^{u_k}) e^{-u},
/// so that -Delta u = V e^u holds exactly and u = 0 on the circle.
/// This is the constructed multi-bump test family; each bump carries local
/// mass close to 8 pi once its scale is large.
struct BubbleConfig {
    std::vector<TransportedBubble> bubbles;

    double u(const Point& p) const {
        double s = 0.0;
        for (const auto& b : bubbles) s += b.u(p);
        return s;
    }
    Point grad(const Point& p) const {
        Point g{0.0, 0.0};
        for (const auto& b : bubbles) {
            const Point gb = b.grad(p);
            g.x1 += gb.x1;
            g.x2 += gb.x2;
        }
        return g;
    }
    /// V e^u = sum of the individual bubble densities.
    double density(const Point& p) const {
        double s = 0.0;
        for (const auto& b : bubbles) s += b.density(p);
        return s;
    }
    double V(const Point& p) const { return density(p) * std::exp(-u(p)); }
};

/// Sample a bubble configuration as (Field, CurvatureFn) on a grid, with
/// analytic evaluators attached.
inline std::pair<Field, CurvatureFn> synthetic_field(
    std::shared_ptr<const QuadratureGrid> grid, BubbleConfig cfg) {
    auto shared = std::make_shared<BubbleConfig>(std::move(cfg));
    Field u = Field::from_function(
        grid, [shared](const Point& p) { return shared->u(p); },
        [shared](const Point& p) { return shared->grad(p); });
    CurvatureFn V = CurvatureFn::from_function(
        grid, [shared](const Point& p) { return shared->V(p); });
    return {std::move(u), std::move(V)};
}

inline std::pair<Field, CurvatureFn> two_bubble_field(
    std::shared_ptr<const QuadratureGrid> grid, double lambda,
    const Point& a1 = {0.5, 0.0}, const Point& a2 = {-0.5, 0.0}) {
    BubbleConfig cfg;
    cfg.bubbles.emplace_back(lambda, a1);
    cfg.bubbles.emplace_back(lambda, a2);
    return synthetic_field(std::move(grid), std::move(cfg));
}

}  // namespace liouville
