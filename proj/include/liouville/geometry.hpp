#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

using complex = std::complex<double>;

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;

    Point() = default;
    Point(double a, double b) : x1(a), x2(b) {}
    explicit Point(complex z) : x1(z.real()), x2(z.imag()) {}

    complex z() const { return {x1, x2}; }
    double norm() const { return std::hypot(x1, x2); }
    double norm2() const { return x1 * x1 + x2 * x2; }

    Point operator+(const Point& o) const { return {x1 + o.x1, x2 + o.x2}; }
    Point operator-(const Point& o) const { return {x1 - o.x1, x2 - o.x2}; }
    Point operator*(double s) const { return {x1 * s, x2 * s}; }
};

inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }
inline double dot(const Point& a, const Point& b) { return a.x1 * b.x1 + a.x2 * b.x2; }

enum class DiskKind { Full, Half };

/// The unit disk, or the half disk {|x| <= 1, x1 >= 0}. Radius is fixed at 1.
struct DiskDomain {
    DiskKind kind = DiskKind::Full;

    static DiskDomain full() { return {DiskKind::Full}; }
    static DiskDomain half() { return {DiskKind::Half}; }

    double area() const { return kind == DiskKind::Full ? M_PI : 0.5 * M_PI; }

    bool contains(const Point& p, double tol = 1e-12) const {
        if (p.norm() > 1.0 + tol) return false;
        if (kind == DiskKind::Half && p.x1 < -tol) return false;
        return true;
    }
};

/// d(p, boundary of the domain). For the full disk this is 1 - |p|; the half
/// disk adds the distance to the diameter segment {x1 = 0}.
inline double boundary_distance(const Point& p, const DiskDomain& d) {
    if (!d.contains(p)) throw domain_error("boundary_distance: point outside domain");
    const double arc = 1.0 - p.norm();
    if (d.kind == DiskKind::Full) return arc;
    return std::min(arc, p.x1);
}

/// Disk automorphism z -> (z - a) / (1 - conj(a) z); maps the open disk onto
/// itself and the unit circle onto itself, with a -> 0.
inline Point mobius(const Point& a, const Point& zp) {
    if (a.norm() >= 1.0) throw domain_error("mobius: |a| must be < 1");
    const complex z = zp.z(), w = a.z();
    return Point((z - w) / (1.0 - std::conj(w) * z));
}

/// Inverse of mobius(a, .): z -> (z + a) / (1 + conj(a) z).
inline Point mobius_inverse(const Point& a, const Point& zp) {
    if (a.norm() >= 1.0) throw domain_error("mobius_inverse: |a| must be < 1");
    const complex z = zp.z(), w = a.z();
    return Point((z + w) / (1.0 + std::conj(w) * z));
}

/// |phi_a'(z)| for the map above.
inline double mobius_deriv_abs(const Point& a, const Point& zp) {
    const complex z = zp.z(), w = a.z();
    const double den = std::norm(1.0 - std::conj(w) * z);
    return (1.0 - std::norm(w)) / den;
}

/// Tensor polar quadrature grid: Gauss-Legendre radii x uniform angles.
/// Full-disk angles are theta_k = 2 pi k / n_theta; half-disk angles are the
/// midpoints of [-pi/2, pi/2] (keeps nodes off the corners).
///
/// With a focus point, radii are geometrically graded (ratio 2 per level)
/// toward the focus in pulled-back coordinates, and nodes are transported by
/// the Mobius map taking 0 to the focus; weights then carry |phi'|^2 and are
/// normalized so their sum is exactly the domain area.
struct QuadratureGrid {
    DiskDomain domain;
    int n_r = 0;
    int n_theta = 0;
    std::optional<Point> focus;

    std::vector<double> ring_r;   // radial nodes (pullback coordinates)
    std::vector<double> ring_w;   // radial GL weights including the r factor
    std::vector<double> theta;    // angular nodes
    std::vector<Point> nodes;     // node (j,k) at index j*n_theta + k
    std::vector<double> weights;

    int index(int j, int k) const { return j * n_theta + k; }
    int ring_of(int i) const { return i / n_theta; }
    int angle_of(int i) const { return i % n_theta; }
    int size() const { return static_cast<int>(nodes.size()); }

    bool plain_tensor_disk() const {
        return domain.kind == DiskKind::Full && !focus.has_value();
    }

    /// Typical node spacing near radius r (max of radial and arc spacing).
    double spacing_near(double r) const {
        double dr = 1.0;
        for (std::size_t j = 0; j + 1 < ring_r.size(); ++j)
            if (r >= ring_r[j] && r <= ring_r[j + 1])
                dr = ring_r[j + 1] - ring_r[j];
        const double arc = (domain.kind == DiskKind::Full ? 2.0 * M_PI : M_PI) / n_theta;
        return std::max(dr, std::max(r, 0.05) * arc);
    }
};

namespace detail {

/// Radii and weights for int_0^1 f(r) r dr: either one global GL rule or
/// geometric panels [2^-(l+1), 2^-l] refined toward 0 down to `resolution`.
inline void radial_rule(int n_r, bool graded, double resolution,
                        std::vector<double>& r, std::vector<double>& w) {
    r.clear();
    w.clear();
    if (!graded) {
        std::vector<double> x, g;
        gauss_legendre_ab(n_r, 0.0, 1.0, x, g);
        for (int i = 0; i < n_r; ++i) {
            r.push_back(x[i]);
            w.push_back(g[i] * x[i]);
        }
        return;
    }
    int levels = std::max(4, static_cast<int>(std::ceil(std::log2(1.0 / resolution))));
    levels = std::min(levels, 40);
    int per = std::max(3, n_r / levels);
    double hi = 1.0;
    for (int l = 0; l < levels; ++l) {
        const double lo = (l + 1 == levels) ? 0.0 : hi * 0.5;
        std::vector<double> x, g;
        gauss_legendre_ab(per, lo, hi, x, g);
        for (int i = 0; i < per; ++i) {
            r.push_back(x[i]);
            w.push_back(g[i] * x[i]);
        }
        hi = lo;
    }
    std::sort(r.begin(), r.end());
    // weights were pushed in the same (descending-panel) order; rebuild sorted
    // pairs instead
    std::vector<std::pair<double, double>> rw;
    hi = 1.0;
    for (int l = 0; l < levels; ++l) {
        const double lo = (l + 1 == levels) ? 0.0 : hi * 0.5;
        std::vector<double> x, g;
        gauss_legendre_ab(per, lo, hi, x, g);
        for (int i = 0; i < per; ++i) rw.emplace_back(x[i], g[i] * x[i]);
        hi = lo;
    }
    std::sort(rw.begin(), rw.end());
    r.resize(rw.size());
    w.resize(rw.size());
    for (std::size_t i = 0; i < rw.size(); ++i) {
        r[i] = rw[i].first;
        w[i] = rw[i].second;
    }
}

}  // namespace detail

/// Build a polar quadrature grid. `focus_resolution` controls the smallest
/// radial cell of focus grids (default 1e-3).
inline QuadratureGrid build_grid(const DiskDomain& d, int n_r, int n_theta,
                                 std::optional<Point> focus = std::nullopt,
                                 double focus_resolution = 1e-3) {
    if (n_r < 4) throw config_error("build_grid: n_r must be >= 4");
    if (n_theta < 8) throw config_error("build_grid: n_theta must be >= 8");
    if (n_theta % 2 != 0) throw config_error("build_grid: n_theta must be even");
    if (focus) {
        if (!d.contains(*focus)) throw domain_error("build_grid: focus outside domain");
        if (d.kind == DiskKind::Half)
            throw config_error("build_grid: focus grids support the full disk only");
    }

    QuadratureGrid g;
    g.domain = d;
    g.n_theta = n_theta;
    g.focus = focus;

    detail::radial_rule(n_r, focus.has_value(), focus_resolution, g.ring_r, g.ring_w);
    g.n_r = static_cast<int>(g.ring_r.size());

    const bool full = d.kind == DiskKind::Full;
    const double dth = (full ? 2.0 * M_PI : M_PI) / n_theta;
    g.theta.resize(n_theta);
    for (int k = 0; k < n_theta; ++k)
        g.theta[k] = full ? dth * k : -0.5 * M_PI + dth * (k + 0.5);

    g.nodes.resize(static_cast<std::size_t>(g.n_r) * n_theta);
    g.weights.resize(g.nodes.size());
    const bool transported = focus && focus->norm() > 0.0;
    for (int j = 0; j < g.n_r; ++j) {
        for (int k = 0; k < n_theta; ++k) {
            const double r = g.ring_r[j], th = g.theta[k];
            Point p{r * std::cos(th), r * std::sin(th)};
            double w = g.ring_w[j] * dth;
            if (transported) {
                // node phi^{-1}(xi) with xi the center-graded node; area
                // element picks up |(phi^{-1})'(xi)|^2
                const Point neg{-focus->x1, -focus->x2};
                const double jac = mobius_deriv_abs(neg, p);
                w *= jac * jac;
                p = mobius_inverse(*focus, p);
            }
            g.nodes[g.index(j, k)] = p;
            g.weights[g.index(j, k)] = w;
        }
    }
    if (focus) {
        // exact area normalization (transport Jacobian is integrated inexactly)
        double s = 0.0;
        for (double w : g.weights) s += w;
        const double c = d.area() / s;
        for (double& w : g.weights) w *= c;
    }
    return g;
}

/// Local polar grid over the ball B(center, rho), for ball integrals of
/// peaked integrands. Radial panels grade geometrically toward the center
/// when `graded` is set. Weights sum to pi rho^2 exactly up to roundoff.
struct BallGrid {
    Point center;
    double rho = 0.0;
    std::vector<Point> nodes;
    std::vector<double> weights;
};

inline BallGrid ball_grid(const Point& center, double rho, int n_r = 64,
                          int n_theta = 64, bool graded = true,
                          double resolution_frac = 1e-3) {
    if (rho <= 0.0) throw domain_error("ball_grid: rho must be positive");
    BallGrid b;
    b.center = center;
    b.rho = rho;
    std::vector<double> r, w;
    detail::radial_rule(n_r, graded, resolution_frac, r, w);
    const double dth = 2.0 * M_PI / n_theta;
    for (std::size_t j = 0; j < r.size(); ++j) {
        for (int k = 0; k < n_theta; ++k) {
            const double th = dth * k;
            b.nodes.push_back({center.x1 + rho * r[j] * std::cos(th),
                               center.x2 + rho * r[j] * std::sin(th)});
            b.weights.push_back(rho * rho * w[j] * dth);
        }
    }
    return b;
}

/// Sampled perpendicular bisector of (a, b), clipped to the domain.
/// `normal` points from the a-side to the b-side. Sampling is graded toward
/// the closest point to a and b (the segment midpoint).
struct Mediatrix {
    Point a, b;
    std::vector<Point> polyline;
    Point normal;

    /// Integrate f along the mediatrix with composite Gauss-4 per segment.
    template <class F>
    double integrate(F&& f) const {
        std::vector<std::pair<double, double>> poly;
        poly.reserve(polyline.size());
        for (const Point& p : polyline) poly.emplace_back(p.x1, p.x2);
        return polyline_integral(poly, [&](double x, double y) { return f(Point{x, y}); });
    }
};

inline Mediatrix mediatrix_of(const Point& a, const Point& b, const DiskDomain& d,
                              int samples = 257) {
    if (dist(a, b) < 1e-14)
        throw degenerate_input_error("mediatrix_of: points coincide");
    if (!d.contains(a) || !d.contains(b))
        throw domain_error("mediatrix_of: points must lie inside the domain");

    const Point m{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
    const double L = dist(a, b);
    const Point n{(b.x1 - a.x1) / L, (b.x2 - a.x2) / L};  // a-side -> b-side
    const Point t{-n.x2, n.x1};                            // line direction

    // clip m + s t against |p| = 1:  |m|^2 + 2 s <m,t> + s^2 = 1
    const double mt = dot(m, t);
    const double disc = mt * mt - (m.norm2() - 1.0);
    if (disc <= 0.0) throw domain_error("mediatrix_of: line misses the disk");
    double s_lo = -mt - std::sqrt(disc);
    double s_hi = -mt + std::sqrt(disc);
    if (d.kind == DiskKind::Half) {
        // additionally clip against x1 >= 0
        if (std::abs(t.x1) > 1e-14) {
            const double s0 = -m.x1 / t.x1;
            if (t.x1 > 0.0)
                s_lo = std::max(s_lo, s0);
            else
                s_hi = std::min(s_hi, s0);
        }
        if (s_lo >= s_hi) throw domain_error("mediatrix_of: line misses the half disk");
    }

    Mediatrix med;
    med.a = a;
    med.b = b;
    med.normal = n;
    med.polyline.reserve(2 * (samples / 2) + 1);
    // sinh grading concentrates samples near s = 0, the closest approach to
    // a and b, where the line integrands peak
    const int half = samples / 2;
    const double mu = 4.0;
    for (int i = 0; i <= 2 * half; ++i) {
        const double xi = static_cast<double>(i - half) / half;  // [-1, 1]
        const double base = std::sinh(mu * std::abs(xi)) / std::sinh(mu);
        const double s = (xi >= 0.0 ? s_hi : s_lo) * base;  // s_lo < 0 < s_hi
        med.polyline.push_back({m.x1 + s * t.x1, m.x2 + s * t.x2});
    }
    return med;
}

}  // namespace liouville
