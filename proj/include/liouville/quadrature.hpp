#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "liouville/errors.hpp"

namespace liouville {

/// Gauss-Legendre rule on [-1, 1]. Nodes by Newton iteration on P_n,
/// good to machine precision for n up to a few thousand.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw config_error("gauss_legendre: n must be >= 1");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

/// Gauss-Legendre on [a, b].
inline void gauss_legendre_ab(int n, double a, double b,
                              std::vector<double>& x, std::vector<double>& w) {
    gauss_legendre(n, x, w);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        x[i] = mid + half * x[i];
        w[i] *= half;
    }
}

/// 4-point Gauss nodes/weights on [0,1], used for composite rules on polylines.
struct gauss4 {
    static constexpr double node[4] = {
        0.069431844202973712, 0.330009478207571868,
        0.669990521792428132, 0.930568155797026288};
    static constexpr double weight[4] = {
        0.173927422568726929, 0.326072577431273071,
        0.326072577431273071, 0.173927422568726929};
};

/// Composite Gauss-4 integral of f over the segments (p_k, p_{k+1}) of a
/// polyline, with arc length as the measure. F takes the 2-D point.
template <class F>
double polyline_integral(const std::vector<std::pair<double, double>>& poly, F&& f) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        const double ax = poly[k].first, ay = poly[k].second;
        const double bx = poly[k + 1].first, by = poly[k + 1].second;
        const double len = std::hypot(bx - ax, by - ay);
        for (int q = 0; q < 4; ++q) {
            const double t = gauss4::node[q];
            total += gauss4::weight[q] * len * f(ax + t * (bx - ax), ay + t * (by - ay));
        }
    }
    return total;
}

}  // namespace liouville
