#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liouville/analytic.hpp"
#include "liouville/fields.hpp"
#include "liouville/greens.hpp"
#include "liouville/stencil.hpp"

namespace liouville {

/// u(x_i) = sum_j K_ij f(y_j); linear in f.
inline Field apply_green(const GreenKernel& k, const Field& f) {
    if (f.grid->n_r != k.grid->n_r || f.grid->n_theta != k.grid->n_theta ||
        f.grid->domain.kind != k.grid->domain.kind)
        throw config_error("apply_green: field grid does not match the kernel grid");
    Field u;
    u.grid = k.grid;
    u.values = k.apply(f.values);
    // Nystrom interpolant for off-grid evaluation
    auto kern = &k;
    auto vals = std::make_shared<std::vector<double>>(f.values);
    u.eval_fn = [kern, vals](const Point& p) { return kern->interpolate(*vals, p); };
    return u;
}

struct NewtonConfig {
    double tol = 1e-10;          // on the fixed-point residual, sup norm
    int max_iters = 50;
    double min_step = 1e-6;      // damping floor
    std::optional<double> exp_mass_bound;  // abort if int e^u exceeds this
};

struct SolutionField {
    Field u;
    CurvatureFn V;
    double total_mass = 0.0;   // int V e^u
    double int_exp = 0.0;      // int e^u
    double sup_u = 0.0;
    int newton_iters = 0;
    double residual_inf = 0.0;
};

namespace detail {

inline void attach_interpolant(Field& u, const GreenKernel& k,
                               const std::vector<double>& f_nodes) {
    auto kern = &k;
    auto vals = std::make_shared<std::vector<double>>(f_nodes);
    u.eval_fn = [kern, vals](const Point& p) { return kern->interpolate(*vals, p); };
}

inline bool ring_constant(const QuadratureGrid& g, const std::vector<double>& v,
                          double tol = 1e-13) {
    for (int j = 0; j < g.n_r; ++j) {
        const double v0 = v[g.index(j, 0)];
        for (int k = 1; k < g.n_theta; ++k)
            if (std::abs(v[g.index(j, k)] - v0) > tol * (1.0 + std::abs(v0))) return false;
    }
    return true;
}

/// Newton on F(u) = u - C (V e^u) in the given coordinates (radial block or
/// full dense operator). Returns iterations; throws on divergence.
struct NewtonCore {
    const Eigen::MatrixXd& C;
    Eigen::VectorXd V;
    NewtonConfig cfg;

    // returns (u, iters, residual)
    void solve(Eigen::VectorXd& u, int& iters, double& resid) const {
        const auto n = C.rows();
        Eigen::VectorXd F(n);
        auto residual = [&](const Eigen::VectorXd& w, Eigen::VectorXd& out) {
            out = w - C * (V.array() * w.array().exp()).matrix();
            return out.lpNorm<Eigen::Infinity>();
        };
        double res = residual(u, F);
        for (int it = 0; it < cfg.max_iters; ++it) {
            if (res < cfg.tol) {
                iters = it;
                resid = res;
                return;
            }
            Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) -
                                C * (V.array() * u.array().exp()).matrix().asDiagonal();
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
            // detect a numerically singular Jacobian (fold)
            const double umax = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
            const double umin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
            if (umin < 1e-14 * umax)
                throw fold_error("newton_solve: Jacobian numerically singular (fold)");
            Eigen::VectorXd du = lu.solve(-F);
            double t = 1.0;
            Eigen::VectorXd Fn(n), un(n);
            while (true) {
                un = u + t * du;
                const double rn = residual(un, Fn);
                if (rn < res || t <= cfg.min_step) {
                    u = un;
                    res = rn;
                    F = Fn;
                    break;
                }
                t *= 0.5;
            }
        }
        if (res >= cfg.tol)
            throw nonconvergence_error("newton_solve: no convergence after max_iters",
                                       res, cfg.max_iters);
        iters = cfg.max_iters;
        resid = res;
    }
};

}  // namespace detail

/// Solve u = K[V e^u] by damped Newton on the fixed-point residual.
///
/// Ring-constant problems (constant or radial V with a radial start) reduce
/// exactly to the angular mode-0 block, which is what a dense LU would
/// produce on such data; general data uses the materialized dense operator.
inline SolutionField newton_solve(const GreenKernel& k, const CurvatureFn& V,
                                  const Field& u0, NewtonConfig cfg = {}) {
    const QuadratureGrid& g = *k.grid;
    if (V.grid->size() != g.size() || u0.grid->size() != g.size())
        throw config_error("newton_solve: grid mismatch");
    if (cfg.tol <= 0.0) throw config_error("newton_solve: tol must be positive");

    const bool radial = V.ring_constant() && detail::ring_constant(g, u0.values);

    SolutionField out;
    out.V = V;
    out.u.grid = k.grid;
    out.u.values.assign(g.size(), 0.0);

    if (radial) {
        const int nr = g.n_r;
        Eigen::VectorXd u(nr), vv(nr);
        for (int j = 0; j < nr; ++j) {
            u(j) = u0.values[g.index(j, 0)];
            vv(j) = V.values[g.index(j, 0)];
        }
        detail::NewtonCore core{k.radial_block(), vv, cfg};
        core.solve(u, out.newton_iters, out.residual_inf);
        for (int j = 0; j < nr; ++j)
            for (int kk = 0; kk < g.n_theta; ++kk) out.u.values[g.index(j, kk)] = u(j);
    } else {
        const Eigen::MatrixXd C = k.dense();
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.values.data(), g.size());
        Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(V.values.data(), g.size());
        detail::NewtonCore core{C, vv, cfg};
        core.solve(u, out.newton_iters, out.residual_inf);
        for (int i = 0; i < g.size(); ++i) out.u.values[i] = u(i);
    }

    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i) f[i] = V.values[i] * std::exp(out.u.values[i]);
    out.total_mass = integrate(g, f);
    std::vector<double> eu(g.size());
    for (int i = 0; i < g.size(); ++i) eu[i] = std::exp(out.u.values[i]);
    out.int_exp = integrate(g, eu);
    out.sup_u = out.u.max_value();
    detail::attach_interpolant(out.u, k, f);
    if (cfg.exp_mass_bound && out.int_exp > *cfg.exp_mass_bound)
        throw nonconvergence_error("newton_solve: int e^u exceeded the configured bound",
                                   out.residual_inf, out.newton_iters);
    return out;
}

/// Pointwise -Delta u - V e^u on the grid via tensor polar stencils.
struct PdeResidual {
    std::vector<double> values;
    double sup = 0.0;
    double l1 = 0.0;
};

inline PdeResidual residual_pde(const Field& u, const CurvatureFn& V) {
    const QuadratureGrid& g = *u.grid;
    TensorStencil st(g, u.values, u.dirichlet_boundary);
    PdeResidual out;
    out.values.resize(g.size());
    for (int j = 0; j < g.n_r; ++j) {
        for (int k = 0; k < g.n_theta; ++k) {
            const int i = g.index(j, k);
            const double r = -st.laplacian(j, k) - V.values[i] * std::exp(u.values[i]);
            out.values[i] = r;
            out.sup = std::max(out.sup, std::abs(r));
            out.l1 += g.weights[i] * std::abs(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Radial shooting oracle for V = const = lambda:
//   u'' + u'/r = -lambda e^u, u'(0) = 0, u(1) = 0.
// Independent of the Nystrom path; RK4 with a mesh graded toward the bubble
// width 1/sqrt(b). Both branches returned for lambda < 2.
// ---------------------------------------------------------------------------

struct RadialProfile {
    double lambda = 0.0;
    double u0 = 0.0;  // center value
    std::vector<double> r, u, du;

    double value_at(double rr) const {
        // profiles are dense; linear interpolation is plenty
        auto it = std::lower_bound(r.begin(), r.end(), rr);
        if (it == r.begin()) return u.front();
        if (it == r.end()) return u.back();
        const std::size_t i = it - r.begin();
        const double t = (rr - r[i - 1]) / (r[i] - r[i - 1]);
        return u[i - 1] + t * (u[i] - u[i - 1]);
    }

    /// lambda * int_{B(0,rho)} e^u by composite trapezoid on the stored mesh.
    double mass(double rho) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < r.size() && r[i] < rho; ++i) {
            const double r1 = r[i], r2 = std::min(r[i + 1], rho);
            const double u2 = r[i + 1] <= rho ? u[i + 1] : value_at(rho);
            const double f1 = r1 * std::exp(u[i]), f2 = r2 * std::exp(u2);
            acc += 0.5 * (f1 + f2) * (r2 - r1);
        }
        return lambda * 2.0 * M_PI * acc;
    }
};

namespace detail {

/// Integrate the radial ODE from 0 to 1 with center value alpha; returns u(1)
/// and optionally the full profile.
inline double shoot_once(double lambda, double alpha, RadialProfile* prof) {
    // series start: u = a - lambda e^a r^2 / 4 + O(r^4)
    const double width = 1.0 / std::sqrt(std::max(lambda * std::exp(alpha) / 8.0, 1.0));
    const double h_fine = std::min(1e-3, width / 80.0);
    const double h_coarse = 1e-3;
    double r = std::min(1e-6, h_fine);
    double u = alpha - 0.25 * lambda * std::exp(alpha) * r * r;
    double v = -0.5 * lambda * std::exp(alpha) * r;  // u'
    if (prof) {
        prof->r.assign({0.0, r});
        prof->u.assign({alpha, u});
        prof->du.assign({0.0, v});
    }
    auto rhs = [lambda](double rr, double uu, double vv, double& du, double& dv) {
        du = vv;
        dv = -lambda * std::exp(uu) - vv / rr;
    };
    while (r < 1.0) {
        const double h = std::min((r < 8.0 * width ? h_fine : h_coarse), 1.0 - r);
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        rhs(r, u, v, k1u, k1v);
        rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
        rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
        rhs(r + h, u + h * k3u, v + h * k3v, k4u, k4v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
        if (prof) {
            prof->r.push_back(r);
            prof->u.push_back(u);
            prof->du.push_back(v);
        }
    }
    return u;
}

inline double bisect_shoot(double lambda, double lo, double hi, double flo, double fhi) {
    (void)fhi;
    bool lo_pos = flo > 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot_once(lambda, mid, nullptr);
        if (std::abs(hi - lo) < 1e-13) return mid;
        if ((fm > 0.0) == lo_pos)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Shoot the radial boundary-value problem. For lambda < 2 both branches are
/// returned (lower first); at the fold the single tangent solution; for
/// lambda beyond the fold a no_solution_error.
inline std::vector<RadialProfile> radial_shoot(double lambda, double fold_tol = 1e-7) {
    if (lambda <= 0.0) throw domain_error("radial_shoot: lambda must be positive");
    if (lambda > 2.0 + 1e-12)
        throw no_solution_error("radial_shoot: lambda > 2 is beyond the fold");

    // u(1; alpha) is concave with a single max; locate the peak by golden
    // section, then bracket the root(s).
    auto phi = [lambda](double a) { return detail::shoot_once(lambda, a, nullptr); };
    double lo = 0.0, hi = 2.0 * std::log(8.0 / lambda) + 2.0;
    double gl = lo + 0.381966 * (hi - lo), gh = hi - 0.381966 * (hi - lo);
    double fgl = phi(gl), fgh = phi(gh);
    for (int it = 0; it < 120; ++it) {
        if (fgl < fgh) {
            lo = gl;
            gl = gh;
            fgl = fgh;
            gh = hi - 0.381966 * (hi - lo);
            fgh = phi(gh);
        } else {
            hi = gh;
            gh = gl;
            fgh = fgl;
            gl = lo + 0.381966 * (hi - lo);
            fgl = phi(gl);
        }
        if (hi - lo < 1e-12) break;
    }
    const double a_peak = 0.5 * (gl + gh);
    const double f_peak = phi(a_peak);

    std::vector<double> roots;
    if (f_peak < -fold_tol) {
        throw no_solution_error("radial_shoot: no solution at this lambda (past the fold)");
    } else if (f_peak < fold_tol) {
        // at the fold: the root is the zero of phi', located by 5-point
        // differences (phi is flat in phi but sharp in phi')
        double a = a_peak, step = 1e-2;
        auto dphi = [&](double x) {
            const double h = 3e-4;
            return (phi(x - 2 * h) - 8 * phi(x - h) + 8 * phi(x + h) - phi(x + 2 * h)) /
                   (12 * h);
        };
        double l = a - step, r = a + step;
        while (dphi(l) < 0.0) l -= step;
        while (dphi(r) > 0.0) r += step;
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (l + r);
            (dphi(m) > 0.0 ? l : r) = m;
        }
        roots.push_back(0.5 * (l + r));
    } else {
        const double f0 = phi(0.0);
        if (f0 >= 0.0) {
            roots.push_back(0.0);  // degenerate; lambda ~ 0
        } else {
            roots.push_back(detail::bisect_shoot(lambda, 0.0, a_peak, f0, f_peak));
        }
        double far = std::max(a_peak + 1.0, 2.0 * std::log(8.0 / lambda) + 1.0);
        while (phi(far) > 0.0) far += 1.0;
        roots.push_back(detail::bisect_shoot(lambda, a_peak, far, f_peak, phi(far)));
    }

    std::vector<RadialProfile> out;
    for (double a : roots) {
        RadialProfile p;
        p.lambda = lambda;
        p.u0 = a;
        detail::shoot_once(lambda, a, &p);
        out.push_back(std::move(p));
    }
    return out;
}

/// Bordered solve of the radial constant-V problem with a prescribed center
/// height: unknowns (u, lambda), constraint u(r_0) = target at the innermost
/// ring. Regular across the fold, where plain Newton in u alone degenerates.
/// Returns the discrete lambda alongside the solution.
struct RadialBranchPoint {
    SolutionField solution;
    double lambda = 0.0;
};

inline RadialBranchPoint solve_radial_prescribed_height(const GreenKernel& k,
                                                        double b,
                                                        NewtonConfig cfg = {}) {
    if (b <= 0.0) throw domain_error("solve_radial_prescribed_height: b must be positive");
    const QuadratureGrid& g = *k.grid;
    const int nr = g.n_r;
    const Eigen::MatrixXd& C = k.radial_block();

    Eigen::VectorXd u(nr);
    for (int j = 0; j < nr; ++j) u(j) = gelfand_u(b, {g.ring_r[j], 0.0});
    const double target = u(0);
    double lam = gelfand_lambda(b);

    int iters = 0;
    double res = 0.0;
    for (int it = 0;; ++it) {
        Eigen::VectorXd F = u - C * (lam * u.array().exp()).matrix();
        const double cons = u(0) - target;
        res = std::max(F.lpNorm<Eigen::Infinity>(), std::abs(cons));
        iters = it;
        if (res < cfg.tol) break;
        if (it >= cfg.max_iters)
            throw nonconvergence_error(
                "solve_radial_prescribed_height: no convergence", res, it);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nr + 1, nr + 1);
        A.topLeftCorner(nr, nr) = Eigen::MatrixXd::Identity(nr, nr) -
                                  C * (lam * u.array().exp()).matrix().asDiagonal();
        A.topRightCorner(nr, 1) = -C * u.array().exp().matrix();
        A(nr, 0) = 1.0;
        Eigen::VectorXd rhs(nr + 1);
        rhs.head(nr) = -F;
        rhs(nr) = -cons;
        Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
        u += sol.head(nr);
        lam += sol(nr);
    }

    RadialBranchPoint out;
    out.lambda = lam;
    out.solution.V = CurvatureFn::constant(k.grid, std::max(lam, 0.0));
    out.solution.u.grid = k.grid;
    out.solution.u.values.assign(g.size(), 0.0);
    for (int j = 0; j < nr; ++j)
        for (int kk = 0; kk < g.n_theta; ++kk)
            out.solution.u.values[g.index(j, kk)] = u(j);
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i)
        f[i] = lam * std::exp(out.solution.u.values[i]);
    out.solution.total_mass = integrate(g, f);
    std::vector<double> eu(g.size());
    for (int i = 0; i < g.size(); ++i) eu[i] = std::exp(out.solution.u.values[i]);
    out.solution.int_exp = integrate(g, eu);
    out.solution.sup_u = out.solution.u.max_value();
    out.solution.newton_iters = iters;
    out.solution.residual_inf = res;
    detail::attach_interpolant(out.solution.u, k, f);
    return out;
}

// ---------------------------------------------------------------------------
// Pseudo-arclength continuation through the fold for a parameterized family
// of curvatures. The constant family V = lambda reduces to the radial block.
// ---------------------------------------------------------------------------

struct ContinuationConfig {
    double ds = 0.25;                  // arc step
    double min_ds = 1e-6;
    int max_steps = 400;
    double stop_sup_u = 9.5;           // stop once sup u exceeds this
    std::optional<double> stop_mass;   // or total mass int V e^u
    std::optional<double> stop_int_exp;  // or int e^u (the paper-style bound C)
    NewtonConfig newton;
};

struct ContinuationStep {
    double param = 0.0;
    double sup_u = 0.0;
    double total_mass = 0.0;
    double int_exp = 0.0;
    double residual_inf = 0.0;
    int newton_iters = 0;
    std::vector<double> u_ring;  // radial profile (ring values)
};

struct ContinuationRun {
    std::vector<ContinuationStep> steps;
    std::optional<double> fold_estimate;
    std::string termination;
};

/// Continuation for the constant family V = lambda, in the radial subspace.
inline ContinuationRun continue_branch(const GreenKernel& k, double lambda_start,
                                       ContinuationConfig cfg = {}) {
    const QuadratureGrid& g = *k.grid;
    const int nr = g.n_r;
    const Eigen::MatrixXd& C = k.radial_block();
    Eigen::VectorXd ring_w(nr);
    for (int j = 0; j < nr; ++j) ring_w(j) = g.ring_w[j] * 2.0 * M_PI;

    ContinuationRun run;
    auto push_step = [&](double lam, const Eigen::VectorXd& u, int iters, double res) {
        ContinuationStep s;
        s.param = lam;
        s.sup_u = u.maxCoeff();
        s.total_mass = ring_w.dot((lam * u.array().exp()).matrix());
        s.int_exp = ring_w.dot(u.array().exp().matrix());
        s.newton_iters = iters;
        s.residual_inf = res;
        s.u_ring.assign(u.data(), u.data() + nr);
        run.steps.push_back(std::move(s));
    };

    auto corrector_plain = [&](double lam, Eigen::VectorXd& u, int& it, double& res) {
        detail::NewtonCore core{C, Eigen::VectorXd::Constant(nr, lam), cfg.newton};
        core.solve(u, it, res);
    };

    // two seed points on the lower branch
    Eigen::VectorXd u = Eigen::VectorXd::Zero(nr);
    int it = 0;
    double res = 0.0;
    corrector_plain(lambda_start, u, it, res);
    push_step(lambda_start, u, it, res);
    Eigen::VectorXd u_prev = u;
    double lam_prev = lambda_start;
    double lam = lambda_start * 1.2 + 1e-3;
    corrector_plain(lam, u, it, res);
    push_step(lam, u, it, res);

    double ds = cfg.ds;
    auto corrector_arc = [&](double& lamc, Eigen::VectorXd& uc, const Eigen::VectorXd& du,
                             double dl, const Eigen::VectorXd& u1, double lam1) -> bool {
        for (int k2 = 0; k2 < 40; ++k2) {
            Eigen::VectorXd F = uc - C * (lamc * uc.array().exp()).matrix();
            const double gcon = du.dot(uc - u1) / nr + dl * (lamc - lam1) - ds * ds;
            const double rn = std::max(F.lpNorm<Eigen::Infinity>(), std::abs(gcon));
            if (rn < cfg.newton.tol) return true;
            Eigen::MatrixXd A(nr + 1, nr + 1);
            A.topLeftCorner(nr, nr) =
                Eigen::MatrixXd::Identity(nr, nr) -
                C * (lamc * uc.array().exp()).matrix().asDiagonal();
            A.topRightCorner(nr, 1) = -C * uc.array().exp().matrix();
            A.bottomLeftCorner(1, nr) = du.transpose() / nr;
            A(nr, nr) = dl;
            Eigen::VectorXd rhs(nr + 1);
            rhs.head(nr) = -F;
            rhs(nr) = -gcon;
            Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
            uc += sol.head(nr);
            lamc += sol(nr);
        }
        return false;
    };

    bool fold_seen = false;
    for (int step = 2; step < cfg.max_steps; ++step) {
        Eigen::VectorXd du = u - u_prev;
        double dl = lam - lam_prev;
        const double nrm = std::sqrt(dl * dl + du.squaredNorm() / nr);
        du *= ds / nrm;
        dl *= ds / nrm;
        Eigen::VectorXd uc = u + du;
        double lamc = lam + dl;
        if (!corrector_arc(lamc, uc, du, dl, u, lam)) {
            ds *= 0.5;
            if (ds < cfg.min_ds) {
                run.termination = "stall: arc step collapsed";
                throw stall_error(run.termination);
            }
            continue;
        }
        u_prev = u;
        lam_prev = lam;
        u = uc;
        lam = lamc;
        {
            Eigen::VectorXd F = u - C * (lam * u.array().exp()).matrix();
            push_step(lam, u, 0, F.lpNorm<Eigen::Infinity>());
        }

        // fold: parameter direction changed sign; refine with the extended
        // (Moore-Spence) system F = 0, J v = 0, <c, v> = 1
        const auto& st = run.steps;
        const std::size_t nstep = st.size();
        if (!fold_seen && nstep >= 3 && (st[nstep - 1].param - st[nstep - 2].param) *
                                                (st[nstep - 2].param - st[nstep - 3].param) <
                                            0.0) {
            fold_seen = true;
            Eigen::VectorXd uf = u;
            double lf = lam;
            Eigen::VectorXd v = (u - u_prev).normalized();
            const Eigen::VectorXd cvec = v;
            for (int itf = 0; itf < 30; ++itf) {
                const Eigen::VectorXd eu = uf.array().exp().matrix();
                const Eigen::MatrixXd J =
                    Eigen::MatrixXd::Identity(nr, nr) -
                    C * (lf * eu.array()).matrix().asDiagonal();
                Eigen::VectorXd F1 = uf - C * (lf * eu.array()).matrix();
                Eigen::VectorXd F2 = J * v;
                const double F3 = cvec.dot(v) - 1.0;
                const double rn = std::max({F1.lpNorm<Eigen::Infinity>(),
                                            F2.lpNorm<Eigen::Infinity>(), std::abs(F3)});
                if (rn < 1e-11) break;
                Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * nr + 1, 2 * nr + 1);
                A.topLeftCorner(nr, nr) = J;
                A.block(0, 2 * nr, nr, 1) = -C * eu;
                A.block(nr, 0, nr, nr) =
                    -C * ((lf * eu.array() * v.array()).matrix()).asDiagonal();
                A.block(nr, nr, nr, nr) = J;
                A.block(nr, 2 * nr, nr, 1) = -C * (eu.array() * v.array()).matrix();
                A.block(2 * nr, nr, 1, nr) = cvec.transpose();
                Eigen::VectorXd rhs(2 * nr + 1);
                rhs.head(nr) = -F1;
                rhs.segment(nr, nr) = -F2;
                rhs(2 * nr) = -F3;
                Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
                uf += sol.head(nr);
                v += sol.segment(nr, nr);
                lf += sol(2 * nr);
            }
            run.fold_estimate = lf;
        }

        if (run.steps.back().sup_u > cfg.stop_sup_u) {
            run.termination = "sup_u bound reached";
            return run;
        }
        if (cfg.stop_mass && run.steps.back().total_mass > *cfg.stop_mass) {
            run.termination = "mass bound reached";
            return run;
        }
        if (cfg.stop_int_exp && run.steps.back().int_exp > *cfg.stop_int_exp) {
            run.termination = "int e^u bound reached";
            return run;
        }
    }
    run.termination = "max steps";
    return run;
}

}  // namespace liouville
