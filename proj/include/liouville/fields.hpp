#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "liouville/geometry.hpp"

namespace liouville {

/// Scalar samples on a quadrature grid. Analytic fields also carry closures
/// for off-grid evaluation and exact gradients; solver outputs attach the
/// Nystrom interpolant instead.
struct Field {
    std::shared_ptr<const QuadratureGrid> grid;
    std::vector<double> values;
    std::function<double(const Point&)> eval_fn;   // optional
    std::function<Point(const Point&)> grad_fn;    // optional
    bool dirichlet_boundary = true;  // u = 0 on the domain boundary

    Field() = default;

    static Field zeros(std::shared_ptr<const QuadratureGrid> g) {
        Field f;
        f.grid = std::move(g);
        f.values.assign(f.grid->size(), 0.0);
        f.eval_fn = [](const Point&) { return 0.0; };
        f.grad_fn = [](const Point&) { return Point{0.0, 0.0}; };
        return f;
    }

    static Field from_function(std::shared_ptr<const QuadratureGrid> g,
                               std::function<double(const Point&)> fn,
                               std::function<Point(const Point&)> grad = nullptr) {
        Field f;
        f.grid = std::move(g);
        f.values.resize(f.grid->size());
        for (int i = 0; i < f.grid->size(); ++i) f.values[i] = fn(f.grid->nodes[i]);
        f.eval_fn = std::move(fn);
        f.grad_fn = std::move(grad);
        return f;
    }

    double operator[](int i) const { return values[i]; }

    bool has_eval() const { return static_cast<bool>(eval_fn); }
    bool has_grad() const { return static_cast<bool>(grad_fn); }

    double eval(const Point& p) const {
        if (!eval_fn) throw config_error("Field: no off-grid evaluator attached");
        return eval_fn(p);
    }

    Point grad(const Point& p) const {
        if (!grad_fn) throw config_error("Field: no gradient evaluator attached");
        return grad_fn(p);
    }

    double max_value() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : values) m = std::max(m, v);
        return m;
    }
};

struct HoelderData {
    double s = 1.0;  // exponent in (0, 1]
    double A = 0.0;  // seminorm bound
};

/// Prescribed curvature V: nonnegative grid samples bounded by `upper`,
/// optional Hoelder metadata (checked on sampled pairs at construction).
struct CurvatureFn {
    std::shared_ptr<const QuadratureGrid> grid;
    std::vector<double> values;
    std::function<double(const Point&)> eval_fn;  // optional
    double upper = 0.0;
    std::optional<HoelderData> hoelder;

    static CurvatureFn constant(std::shared_ptr<const QuadratureGrid> g, double c) {
        if (c < 0.0) throw domain_error("CurvatureFn: V must be nonnegative");
        CurvatureFn v;
        v.grid = std::move(g);
        v.values.assign(v.grid->size(), c);
        v.upper = c;
        v.eval_fn = [c](const Point&) { return c; };
        return v;
    }

    static CurvatureFn from_function(std::shared_ptr<const QuadratureGrid> g,
                                     std::function<double(const Point&)> fn,
                                     std::optional<HoelderData> hoelder = std::nullopt,
                                     double hoelder_check_tol = 0.05) {
        CurvatureFn v;
        v.grid = std::move(g);
        v.values.resize(v.grid->size());
        double mx = 0.0;
        for (int i = 0; i < v.grid->size(); ++i) {
            const double val = fn(v.grid->nodes[i]);
            if (val < 0.0) throw domain_error("CurvatureFn: negative sample rejected");
            v.values[i] = val;
            mx = std::max(mx, val);
        }
        v.upper = mx;
        v.eval_fn = std::move(fn);
        v.hoelder = hoelder;
        if (hoelder) {
            // sampled seminorm check on seeded random pairs
            std::mt19937 rng(123456u);
            std::uniform_int_distribution<int> pick(0, v.grid->size() - 1);
            for (int t = 0; t < 4000; ++t) {
                const int i = pick(rng), j = pick(rng);
                if (i == j) continue;
                const double d = dist(v.grid->nodes[i], v.grid->nodes[j]);
                if (d < 1e-12) continue;
                const double semi = std::abs(v.values[i] - v.values[j]) / std::pow(d, hoelder->s);
                if (semi > hoelder->A * (1.0 + hoelder_check_tol))
                    throw domain_error("CurvatureFn: sampled Hoelder seminorm exceeds A");
            }
        }
        return v;
    }

    double operator[](int i) const { return values[i]; }

    double eval(const Point& p) const {
        if (!eval_fn) throw config_error("CurvatureFn: no off-grid evaluator attached");
        return eval_fn(p);
    }

    bool ring_constant(double tol = 1e-13) const {
        const auto& g = *grid;
        for (int j = 0; j < g.n_r; ++j) {
            const double v0 = values[g.index(j, 0)];
            for (int k = 1; k < g.n_theta; ++k)
                if (std::abs(values[g.index(j, k)] - v0) > tol * (1.0 + std::abs(v0)))
                    return false;
        }
        return true;
    }
};

/// Weighted integral of node samples: sum w_i f_i.
inline double integrate(const QuadratureGrid& g, const std::vector<double>& f) {
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i) s += g.weights[i] * f[i];
    return s;
}

}  // namespace liouville
