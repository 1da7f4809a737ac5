#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "liouville/fields.hpp"
#include "liouville/geometry.hpp"
#include "liouville/quadrature.hpp"
#include "liouville/stencil.hpp"

namespace liouville {

/// Rellich-form Pohozaev balance around a pivot p. Two independent
/// identities hold for exact solutions of -Delta u = V e^u with constant V:
///
///   interior := int <x-p, grad u> V e^u
///             = -oint <x-p, grad u> d_nu u + 1/2 oint <x-p, nu> |grad u|^2
///             =: boundary_A          (Rellich)
///   interior  = V(p) oint <x-p, nu> e^u - 2 V(p) int e^u
///             =: boundary_B + volume_term   (divergence of <x-p, grad e^u>)
///
/// The coefficient pattern (the 1/2 and the signs) is the one that balances
/// on the exact radial family; it is frozen here and regression-tested.
/// residual := 2 interior - boundary_A - boundary_B - volume_term.
struct PohozaevReport {
    Point pivot;
    double interior = 0.0;
    double boundary_A = 0.0;
    double boundary_B = 0.0;
    double volume_term = 0.0;
    double residual = 0.0;
    std::string piece;  // which boundary components contributed
};

namespace detail {

/// Gradient access: analytic when the field carries one, tensor stencils
/// otherwise (interior nodes; boundary evaluation needs the analytic form or
/// the Dirichlet normal-derivative fit).
class GradField {
public:
    GradField(const Field& u) : u_(u) {
        if (!u.has_grad()) st_.emplace(*u.grid, u.values, u.dirichlet_boundary);
    }

    Point at_node(int j, int k) const {
        if (u_.has_grad()) return u_.grad(u_.grid->nodes[u_.grid->index(j, k)]);
        return st_->gradient(j, k);
    }

    /// Gradient at a boundary point of the unit circle. Stencil fields use a
    /// radial fit of the column nearest in angle (one-sided, with the
    /// Dirichlet zero at r = 1).
    Point at_circle(double theta) const {
        if (u_.has_grad()) return u_.grad({std::cos(theta), std::sin(theta)});
        const QuadratureGrid& g = *u_.grid;
        if (!u_.dirichlet_boundary)
            throw stencil_error("pohozaev: boundary gradient needs analytic form "
                                "or a Dirichlet field", {});
        // nearest angular column
        int kbest = 0;
        double dbest = 1e300;
        for (int k = 0; k < g.n_theta; ++k) {
            double d = std::abs(std::remainder(theta - g.theta[k], 2.0 * M_PI));
            if (d < dbest) {
                dbest = d;
                kbest = k;
            }
        }
        // 1-D fit of u along the column through (r, kbest), evaluated at r=1;
        // tangential derivative vanishes with u = 0 on the circle
        const int m = 7, deg = 3;
        const int lo = std::max(0, g.n_r - m);
        std::vector<double> rs, vs;
        for (int j = lo; j < g.n_r; ++j) {
            rs.push_back(g.ring_r[j]);
            vs.push_back(u_.values[g.index(j, kbest)]);
        }
        rs.push_back(1.0);
        vs.push_back(0.0);
        double h = 0.0;
        for (double r : rs) h = std::max(h, std::abs(r - 1.0));
        Eigen::MatrixXd A(rs.size(), deg + 1);
        Eigen::VectorXd y(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const double t = (rs[i] - 1.0) / h;
            double p = 1.0;
            for (int d = 0; d <= deg; ++d) {
                A(i, d) = p;
                p *= t;
            }
            y(i) = vs[i];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        const double ur = c(1) / h;
        return {ur * std::cos(theta), ur * std::sin(theta)};
    }

    double value_at_circle(double) const { return 0.0; }  // Dirichlet data

private:
    const Field& u_;
    std::optional<TensorStencil> st_;
};

/// Circle arc integral of f(theta) over [t0, t1] (composite Gauss-4 on a
/// fine subdivision; arc element d sigma = d theta on the unit circle).
template <class F>
double arc_integral(double t0, double t1, F&& f, int segments = 512) {
    double acc = 0.0;
    const double h = (t1 - t0) / segments;
    for (int s = 0; s < segments; ++s) {
        const double a = t0 + s * h;
        for (int q = 0; q < 4; ++q)
            acc += gauss4::weight[q] * h * f(a + gauss4::node[q] * h);
    }
    return acc;
}

}  // namespace detail

/// Evaluate all Pohozaev terms on the full or half disk.
inline PohozaevReport pohozaev_terms(const Field& u, const CurvatureFn& V,
                                     const Point& pivot, const DiskDomain& d) {
    if (!std::isfinite(pivot.x1) || !std::isfinite(pivot.x2))
        throw domain_error("pohozaev_terms: pivot must be finite");
    const QuadratureGrid& g = *u.grid;
    if (g.domain.kind != d.kind)
        throw config_error("pohozaev_terms: field grid does not live on this domain");

    detail::GradField grad(u);

    PohozaevReport rep;
    rep.pivot = pivot;

    // interior and volume integrals on the grid
    double interior = 0.0, int_exp = 0.0;
    for (int j = 0; j < g.n_r; ++j) {
        for (int k = 0; k < g.n_theta; ++k) {
            const int i = g.index(j, k);
            const Point x = g.nodes[i];
            const Point gu = grad.at_node(j, k);
            const double w = g.weights[i];
            interior += w * ((x.x1 - pivot.x1) * gu.x1 + (x.x2 - pivot.x2) * gu.x2) *
                        V.values[i] * std::exp(u.values[i]);
            int_exp += w * std::exp(u.values[i]);
        }
    }
    rep.interior = interior;

    const double Vp = V.eval_fn ? V.eval(pivot) : V.values[0];
    rep.volume_term = -2.0 * Vp * int_exp;

    // boundary terms
    auto rellich = [&](const Point& x, const Point& nu, const Point& gu) {
        const double xg = (x.x1 - pivot.x1) * gu.x1 + (x.x2 - pivot.x2) * gu.x2;
        const double ng = nu.x1 * gu.x1 + nu.x2 * gu.x2;
        const double xn = (x.x1 - pivot.x1) * nu.x1 + (x.x2 - pivot.x2) * nu.x2;
        return -xg * ng + 0.5 * xn * (gu.x1 * gu.x1 + gu.x2 * gu.x2);
    };

    double A = 0.0, B = 0.0;
    const bool full = d.kind == DiskKind::Full;
    const double t0 = full ? 0.0 : -0.5 * M_PI;
    const double t1 = full ? 2.0 * M_PI : 0.5 * M_PI;
    A += detail::arc_integral(t0, t1, [&](double th) {
        const Point x{std::cos(th), std::sin(th)};
        const Point nu = x;  // outward normal of the circle
        return rellich(x, nu, grad.at_circle(th));
    });
    B += detail::arc_integral(t0, t1, [&](double th) {
        const Point x{std::cos(th), std::sin(th)};
        const double xn = (x.x1 - pivot.x1) * x.x1 + (x.x2 - pivot.x2) * x.x2;
        const double uval = u.has_eval() ? u.eval(x) : 0.0;
        return Vp * xn * std::exp(uval);
    });
    rep.piece = "circle";
    if (!full) {
        // diameter segment x1 = 0, outward normal (-1, 0)
        if (!u.has_grad())
            throw stencil_error("pohozaev_terms: half-disk boundary needs analytic "
                                "gradients", {});
        std::vector<std::pair<double, double>> seg;
        const int nseg = 512;
        for (int s = 0; s <= nseg; ++s) seg.emplace_back(0.0, -1.0 + 2.0 * s / nseg);
        A += polyline_integral(seg, [&](double xx, double yy) {
            const Point x{xx, yy};
            const Point nu{-1.0, 0.0};
            return rellich(x, nu, u.grad(x));
        });
        B += polyline_integral(seg, [&](double xx, double yy) {
            const Point x{xx, yy};
            const double xn = -(x.x1 - pivot.x1);
            const double uval = u.has_eval() ? u.eval(x) : 0.0;
            return Vp * xn * std::exp(uval);
        });
        rep.piece = "circle+diameter";
    }
    rep.boundary_A = A;
    rep.boundary_B = B;
    rep.residual = 2.0 * rep.interior - rep.boundary_A - rep.boundary_B - rep.volume_term;
    return rep;
}

/// oint <x-p, nu> e^u - 2 int e^u (the divergence reduction of
/// int <x-p, grad e^u>); equals -2 pi b for the Gelfand solution at p = 0.
inline double divergence_reduction(const Field& u, const Point& pivot,
                                   const DiskDomain& d) {
    const QuadratureGrid& g = *u.grid;
    double int_exp = 0.0;
    for (int i = 0; i < g.size(); ++i) int_exp += g.weights[i] * std::exp(u.values[i]);
    const bool full = d.kind == DiskKind::Full;
    const double t0 = full ? 0.0 : -0.5 * M_PI;
    const double t1 = full ? 2.0 * M_PI : 0.5 * M_PI;
    double ring = detail::arc_integral(t0, t1, [&](double th) {
        const Point x{std::cos(th), std::sin(th)};
        const double xn = (x.x1 - pivot.x1) * x.x1 + (x.x2 - pivot.x2) * x.x2;
        const double uval = u.has_eval() ? u.eval(x) : 0.0;
        return xn * std::exp(uval);
    });
    if (!full) {
        std::vector<std::pair<double, double>> seg;
        const int nseg = 512;
        for (int s = 0; s <= nseg; ++s) seg.emplace_back(0.0, -1.0 + 2.0 * s / nseg);
        ring += polyline_integral(seg, [&](double xx, double yy) {
            const double xn = -(xx - pivot.x1);
            const Point x{xx, yy};
            const double uval = u.has_eval() ? u.eval(x) : 0.0;
            return xn * std::exp(uval);
        });
    }
    return ring - 2.0 * int_exp;
}

/// Node partition of the domain along the mediatrix of (a, b).
struct DomainSplit {
    Point a, b;
    std::vector<int> omega1_nodes, omega2_nodes;
    Mediatrix interface;
};

inline DomainSplit split_domain(const QuadratureGrid& g, const Point& a, const Point& b) {
    DomainSplit s;
    s.a = a;
    s.b = b;
    s.interface = mediatrix_of(a, b, g.domain);
    for (int i = 0; i < g.size(); ++i) {
        if (dist(g.nodes[i], a) <= dist(g.nodes[i], b))
            s.omega1_nodes.push_back(i);
        else
            s.omega2_nodes.push_back(i);
    }
    return s;
}

/// Two-domain split along the mediatrix. Sub-reports use the common pivot
/// m = (a+b)/2 (the projection of either point onto the interface), so the
/// two interface contributions enter with opposite normals and cancel in the
/// combined balance, mirroring the difference-pivot structure of the
/// two-point argument.
struct SplitReport {
    PohozaevReport omega1, omega2;
    double interface_flux_1 = 0.0;  // Rellich terms along the mediatrix, side 1
    double interface_flux_2 = 0.0;  // same with the opposite normal
    double combined_residual = 0.0;
    DomainSplit split;
};

inline SplitReport split_report(const Field& u, const CurvatureFn& V, const Point& a,
                                const Point& b) {
    const QuadratureGrid& g = *u.grid;
    if (dist(a, b) < 1e-14)
        throw degenerate_input_error("split_report: blow-up points coincide");
    if (!g.domain.contains(a) || !g.domain.contains(b))
        throw domain_error("split_report: points must lie inside the domain");

    SplitReport rep;
    rep.split = split_domain(g, a, b);
    const Point pivot{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
    detail::GradField grad(u);

    auto rellich = [&](const Point& x, const Point& nu, const Point& gu) {
        const double xg = (x.x1 - pivot.x1) * gu.x1 + (x.x2 - pivot.x2) * gu.x2;
        const double ng = nu.x1 * gu.x1 + nu.x2 * gu.x2;
        const double xn = (x.x1 - pivot.x1) * nu.x1 + (x.x2 - pivot.x2) * nu.x2;
        return -xg * ng + 0.5 * xn * (gu.x1 * gu.x1 + gu.x2 * gu.x2);
    };

    const double Vp = V.eval_fn ? V.eval(pivot) : V.values[0];

    auto sub_report = [&](const std::vector<int>& nodes, int side) {
        PohozaevReport r;
        r.pivot = pivot;
        double interior = 0.0, int_exp = 0.0;
        for (int i : nodes) {
            const Point x = g.nodes[i];
            const Point gu = grad.at_node(g.ring_of(i), g.angle_of(i));
            interior += g.weights[i] *
                        ((x.x1 - pivot.x1) * gu.x1 + (x.x2 - pivot.x2) * gu.x2) *
                        V.values[i] * std::exp(u.values[i]);
            int_exp += g.weights[i] * std::exp(u.values[i]);
        }
        r.interior = interior;
        r.volume_term = -2.0 * Vp * int_exp;

        // arc portion of the boundary on this side
        auto on_side = [&](const Point& x) {
            const double d1 = dist(x, a), d2 = dist(x, b);
            return side == 1 ? d1 <= d2 : d2 < d1;
        };
        const bool full = g.domain.kind == DiskKind::Full;
        const double t0 = full ? 0.0 : -0.5 * M_PI;
        const double t1 = full ? 2.0 * M_PI : 0.5 * M_PI;
        r.boundary_A = detail::arc_integral(t0, t1, [&](double th) {
            const Point x{std::cos(th), std::sin(th)};
            if (!on_side(x)) return 0.0;
            return rellich(x, x, grad.at_circle(th));
        }, 2048);
        r.boundary_B = detail::arc_integral(t0, t1, [&](double th) {
            const Point x{std::cos(th), std::sin(th)};
            if (!on_side(x)) return 0.0;
            const double xn = (x.x1 - pivot.x1) * x.x1 + (x.x2 - pivot.x2) * x.x2;
            const double uval = u.has_eval() ? u.eval(x) : 0.0;
            return Vp * xn * std::exp(uval);
        }, 2048);
        r.piece = side == 1 ? "arc(omega1)+interface" : "arc(omega2)+interface";
        return r;
    };

    rep.omega1 = sub_report(rep.split.omega1_nodes, 1);
    rep.omega2 = sub_report(rep.split.omega2_nodes, 2);

    // interface Rellich terms; normal of omega1 points toward the b side
    const Point nu1 = rep.split.interface.normal;
    const Point nu2{-nu1.x1, -nu1.x2};
    auto grad_at = [&](const Point& p) {
        if (u.has_grad()) return u.grad(p);
        // stencil fallback: gradient of the nearest node
        int bestj = 0, bestk = 0;
        double bd = 1e300;
        for (int i = 0; i < g.size(); ++i) {
            const double d = (g.nodes[i] - p).norm2();
            if (d < bd) {
                bd = d;
                bestj = g.ring_of(i);
                bestk = g.angle_of(i);
            }
        }
        TensorStencil st(g, u.values, u.dirichlet_boundary);
        return st.gradient(bestj, bestk);
    };
    rep.interface_flux_1 =
        rep.split.interface.integrate([&](const Point& p) { return rellich(p, nu1, grad_at(p)); });
    rep.interface_flux_2 =
        rep.split.interface.integrate([&](const Point& p) { return rellich(p, nu2, grad_at(p)); });

    // B-type interface terms with the common pivot: <x - m, nu> vanishes on
    // the mediatrix, so only the Rellich flux appears.
    auto total_residual = [&](const PohozaevReport& r, double flux) {
        return 2.0 * r.interior - (r.boundary_A + flux) - r.boundary_B - r.volume_term;
    };
    rep.omega1.residual = total_residual(rep.omega1, rep.interface_flux_1);
    rep.omega2.residual = total_residual(rep.omega2, rep.interface_flux_2);
    rep.combined_residual = rep.omega1.residual + rep.omega2.residual;
    return rep;
}

/// Hoelder-weighted integrand profile around x_star:
///   g(x) = |x - x_star| |V(x) - V(x_star)| e^{u(x)}.
/// Reports max g r^{1-s} and a fitted decay exponent alpha (g ~ r^{-alpha}),
/// where the fit window is log-symmetric about the empirical peak so the
/// envelope exponent s - 1 is what a balanced fit sees.
struct HolderProfile {
    std::vector<double> r, g;
    double fitted_alpha = 0.0;
    double max_g_r_pow = 0.0;  // max of g * r^{1-s}
    double s = 1.0;
};

inline HolderProfile holder_profile(const Field& u, const CurvatureFn& V,
                                    const Point& x_star) {
    if (!V.hoelder) throw config_error("holder_profile: V carries no Hoelder data");
    const double s = V.hoelder->s;

    HolderProfile prof;
    prof.s = s;
    const QuadratureGrid& gr = *u.grid;
    const double vstar = V.eval_fn ? V.eval(x_star) : 0.0;

    const bool analytic = u.has_eval() && static_cast<bool>(V.eval_fn);
    if (analytic) {
        // log-spaced radial sweep, 16 angles per radius
        for (int i = 0; i < 160; ++i) {
            const double r = std::pow(10.0, -4.0 + 3.55 * i / 159.0);  // up to ~0.35
            double gmax = 0.0;
            bool any = false;
            for (int k = 0; k < 16; ++k) {
                const double th = 2.0 * M_PI * k / 16;
                const Point p{x_star.x1 + r * std::cos(th), x_star.x2 + r * std::sin(th)};
                if (!gr.domain.contains(p, 1e-12)) continue;
                any = true;
                gmax = std::max(gmax, std::abs(V.eval(p) - vstar) * std::exp(u.eval(p)));
            }
            if (!any) continue;
            prof.r.push_back(r);
            prof.g.push_back(r * gmax);
        }
    } else {
        for (int i = 0; i < gr.size(); ++i) {
            const double r = dist(gr.nodes[i], x_star);
            if (r < 1e-12) continue;
            prof.r.push_back(r);
            prof.g.push_back(r * std::abs(V.values[i] - vstar) * std::exp(u.values[i]));
        }
    }

    for (std::size_t i = 0; i < prof.r.size(); ++i)
        prof.max_g_r_pow = std::max(prof.max_g_r_pow,
                                    prof.g[i] * std::pow(prof.r[i], 1.0 - s));

    // peak-centred log-log least squares; alpha = -slope
    std::size_t ipk = 0;
    for (std::size_t i = 0; i < prof.g.size(); ++i)
        if (prof.g[i] > prof.g[ipk]) ipk = i;
    if (!prof.g.empty() && prof.g[ipk] > 0.0) {
        const double rp = prof.r[ipk];
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < prof.r.size(); ++i) {
            if (prof.g[i] <= 0.0) continue;
            if (prof.r[i] < rp / 20.0 || prof.r[i] > rp * 20.0) continue;
            const double lx = std::log(prof.r[i]), ly = std::log(prof.g[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        if (n >= 2) {
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            prof.fitted_alpha = -slope;
        }
    }
    return prof;
}

/// Per-zone gradient bounds along the mediatrix of (x_i, t_i), zones split by
/// rho = |x - t0| / |x_i - t_i| at 1/2 -+ eps_tilde, with the outer zone
/// capped at |x - t0| <= 1 - eps_outer.
struct MediatrixZoneRow {
    int zone = 0;          // 1, 2, 3
    int samples = 0;
    double max_normalized = 0.0;  // zone-appropriate normalization
    Point argmax;
};

struct MediatrixBoundsReport {
    std::vector<MediatrixZoneRow> rows;  // zones 1..3
    bool interior_configuration_warning = false;  // |t0| < 1 - eps_outer/2
    Point t0;
    double separation = 0.0;
};

struct MediatrixBoundsConfig {
    double eps_tilde = 0.05;
    double eps_outer = 0.1;
};

inline MediatrixBoundsReport mediatrix_gradient_bounds(const Field& u, const Point& x_i,
                                                       const Point& t_i,
                                                       MediatrixBoundsConfig cfg = {}) {
    if (!u.has_grad())
        throw config_error("mediatrix_gradient_bounds: field needs a gradient");
    const QuadratureGrid& g = *u.grid;
    Mediatrix med = mediatrix_of(x_i, t_i, g.domain, 1025);

    MediatrixBoundsReport rep;
    rep.t0 = Point{0.5 * (x_i.x1 + t_i.x1), 0.5 * (x_i.x2 + t_i.x2)};
    rep.separation = dist(x_i, t_i);
    rep.interior_configuration_warning = rep.t0.norm() < 1.0 - 0.5 * cfg.eps_outer;

    rep.rows.assign(3, {});
    for (int z = 0; z < 3; ++z) rep.rows[z].zone = z + 1;

    const double sep = rep.separation;
    const double d_xi_t0 = dist(x_i, rep.t0);
    for (const Point& p : med.polyline) {
        const double d = dist(p, rep.t0);
        const double rho = d / sep;
        int zone;
        if (rho <= 0.5 - cfg.eps_tilde)
            zone = 2;
        else if (rho <= 0.5 + cfg.eps_tilde)
            zone = 3;
        else if (d <= 1.0 - cfg.eps_outer)
            zone = 1;
        else
            continue;
        const Point gu = u.grad(p);
        const double gn = std::hypot(gu.x1, gu.x2);
        double q = 0.0;
        if (zone == 1) q = gn * d;
        if (zone == 2) q = gn * d_xi_t0;
        if (zone == 3) q = gn * sep;
        auto& row = rep.rows[zone - 1];
        ++row.samples;
        if (q > row.max_normalized) {
            row.max_normalized = q;
            row.argmax = p;
        }
    }
    return rep;
}

}  // namespace liouville
