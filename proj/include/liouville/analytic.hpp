#pragma once

#include <cmath>

#include "liouville/geometry.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Gelfand branch on the unit disk:
//   u_b(r) = 2 log((1+b) / (1 + b r^2)),  -Delta u = lambda(b) e^u,  u(1) = 0,
//   lambda(b) = 8 b / (1+b)^2, fold at b = 1 (lambda = 2).
// ---------------------------------------------------------------------------

inline double gelfand_u(double b, const Point& p) {
    return 2.0 * std::log((1.0 + b) / (1.0 + b * p.norm2()));
}

inline double gelfand_lambda(double b) {
    return 8.0 * b / ((1.0 + b) * (1.0 + b));
}

/// lambda(b) * int_{B(0,rho)} e^{u_b} = 8 pi b rho^2 / (1 + b rho^2).
inline double gelfand_mass(double b, double rho) {
    const double t = b * rho * rho;
    return 8.0 * M_PI * t / (1.0 + t);
}

inline Point gelfand_grad(double b, const Point& p) {
    const double c = -4.0 * b / (1.0 + b * p.norm2());
    return {c * p.x1, c * p.x2};
}

/// int_{B_1} e^{u_b} = pi (1 + b).
inline double gelfand_int_exp(double b) { return M_PI * (1.0 + b); }

struct GelfandSolution {
    double b;
    explicit GelfandSolution(double b_) : b(b_) {
        if (b <= 0.0) throw domain_error("GelfandSolution: b must be positive");
    }
    double u(const Point& p) const { return gelfand_u(b, p); }
    Point grad(const Point& p) const { return gelfand_grad(b, p); }
    double lambda() const { return gelfand_lambda(b); }
};

// ---------------------------------------------------------------------------
// Planar Liouville bubble:
//   u(p) = log(8 lambda^2 / (1 + lambda^2 |p - x0|^2)^2),
//   -Delta u = e^u on R^2, total mass int e^u = 8 pi.
// ---------------------------------------------------------------------------

inline double bubble_u(double lambda, const Point& x0, const Point& p) {
    const double q = lambda * lambda * (p - x0).norm2();
    return std::log(8.0 * lambda * lambda) - 2.0 * std::log1p(q);
}

inline Point bubble_grad(double lambda, const Point& x0, const Point& p) {
    const double q = lambda * lambda * (p - x0).norm2();
    const double c = -4.0 * lambda * lambda / (1.0 + q);
    return {c * (p.x1 - x0.x1), c * (p.x2 - x0.x2)};
}

/// Mass of e^u over B(x0, r): 8 pi (lambda r)^2 / (1 + (lambda r)^2).
inline double bubble_mass(double lambda, double r) {
    const double t = lambda * lambda * r * r;
    return 8.0 * M_PI * t / (1.0 + t);
}

struct PlanarBubble {
    double lambda;
    Point center;
    PlanarBubble(double l, Point c) : lambda(l), center(c) {
        if (lambda <= 0.0) throw domain_error("PlanarBubble: lambda must be positive");
    }
    double u(const Point& p) const { return bubble_u(lambda, center, p); }
    Point grad(const Point& p) const { return bubble_grad(lambda, center, p); }
};

// ---------------------------------------------------------------------------
// Mobius-transported, Dirichlet-corrected bubble. With phi_a the automorphism
// sending a to 0,
//   u_a(z) = 2 log((1 + lambda^2) / (1 + lambda^2 |phi_a(z)|^2))
// vanishes on |z| = 1 and solves -Delta u_a = V_a e^{u_a} with
//   V_a(z) = 8 lambda^2 / (1+lambda^2)^2 * (1-|a|^2)^2 / |1 - conj(a) z|^4.
// Concentrates at z = a with local mass approaching 8 pi as lambda grows.
// ---------------------------------------------------------------------------

struct TransportedBubble {
    double lambda;
    Point a;

    TransportedBubble(double l, Point a_) : lambda(l), a(a_) {
        if (lambda <= 0.0) throw domain_error("TransportedBubble: lambda must be positive");
        if (a.norm() >= 1.0) throw domain_error("TransportedBubble: |a| must be < 1");
    }

    double u(const Point& p) const {
        const double w2 = mobius(a, p).norm2();
        return 2.0 * (std::log1p(lambda * lambda) - std::log1p(lambda * lambda * w2));
    }

    Point grad(const Point& p) const {
        const complex z = p.z(), w0 = a.z();
        const complex w = (z - w0) / (1.0 - std::conj(w0) * z);
        const complex dw = (1.0 - std::norm(w0)) /
                           ((1.0 - std::conj(w0) * z) * (1.0 - std::conj(w0) * z));
        // grad f = 2 conj(df/dz); f = -2 log(1 + l^2 |w|^2) + const
        const complex dfdz = -2.0 * lambda * lambda * dw * std::conj(w) /
                             (1.0 + lambda * lambda * std::norm(w));
        return Point(2.0 * std::conj(dfdz));
    }

    double V(const Point& p) const {
        const complex z = p.z(), w0 = a.z();
        const double den = std::norm(1.0 - std::conj(w0) * z);  // |1-conj(a)z|^2
        const double c = 8.0 * lambda * lambda / ((1.0 + lambda * lambda) * (1.0 + lambda * lambda));
        const double d = 1.0 - std::norm(w0);
        return c * d * d / (den * den);
    }

    /// V_a e^{u_a} = pulled-back bubble density 8 l^2 |phi_a'|^2 / (1+l^2|phi_a|^2)^2.
    double density(const Point& p) const {
        const double w2 = mobius(a, p).norm2();
        const double dphi = mobius_deriv_abs(a, p);
        const double den = 1.0 + lambda * lambda * w2;
        return 8.0 * lambda * lambda * dphi * dphi / (den * den);
    }

    /// Total mass over the unit disk: 8 pi lambda^2 / (1 + lambda^2).
    double disk_mass() const {
        return 8.0 * M_PI * lambda * lambda / (1.0 + lambda * lambda);
    }
};

}  // namespace liouville
