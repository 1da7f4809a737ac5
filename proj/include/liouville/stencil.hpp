#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "liouville/fields.hpp"

namespace liouville {

/// Derivatives on the tensor polar grid. Radial derivatives come from 1-D
/// least-squares polynomial fits along the node's column (augmented by
/// mirrored samples through the center and, for Dirichlet fields, by the
/// known zero on the boundary circle); angular derivatives are 4th-order
/// central differences on the uniform ring.
///
/// Requires a plain tensor grid (no focus transport).
class TensorStencil {
public:
    TensorStencil(const QuadratureGrid& g, const std::vector<double>& values,
                  bool dirichlet)
        : g_(g), v_(values), dirichlet_(dirichlet) {
        if (g.focus && g.focus->norm() > 0.0)
            throw stencil_error("TensorStencil: transported focus grids unsupported", {});
        full_ = g.domain.kind == DiskKind::Full;
    }

    /// du/dr, d2u/dr2 at ring j in column k.
    void radial(int j, int k, double& ur, double& urr, int deg = 4, int npts = 8) const {
        std::vector<double> rs, vs;
        collect_column(j, k, rs, vs);
        fit1d(rs, vs, g_.ring_r[j], deg, npts, ur, urr);
    }

    double du_dtheta(int j, int k) const {
        const double h = dtheta();
        return (at(j, k - 2) - 8.0 * at(j, k - 1) + 8.0 * at(j, k + 1) - at(j, k + 2)) /
               (12.0 * h);
    }

    double d2u_dtheta2(int j, int k) const {
        const double h = dtheta();
        return (-at(j, k - 2) + 16.0 * at(j, k - 1) - 30.0 * at(j, k) +
                16.0 * at(j, k + 1) - at(j, k + 2)) /
               (12.0 * h * h);
    }

    Point gradient(int j, int k) const {
        double ur, urr;
        radial(j, k, ur, urr, 3, 7);
        const double ut = du_dtheta(j, k);
        const double r = g_.ring_r[j];
        const double c = std::cos(g_.theta[k]), s = std::sin(g_.theta[k]);
        return {ur * c - ut * s / r, ur * s + ut * c / r};
    }

    double laplacian(int j, int k) const {
        double ur, urr;
        radial(j, k, ur, urr, 4, 8);
        const double r = g_.ring_r[j];
        return urr + ur / r + d2u_dtheta2(j, k) / (r * r);
    }

private:
    double dtheta() const { return (full_ ? 2.0 * M_PI : M_PI) / g_.n_theta; }

    double at(int j, int k) const {
        if (full_) {
            k = ((k % g_.n_theta) + g_.n_theta) % g_.n_theta;
            return v_[g_.index(j, k)];
        }
        // half disk: reflect across the diameter (even extension is wrong for
        // general fields; use one-sided clamping instead)
        k = std::clamp(k, 0, g_.n_theta - 1);
        return v_[g_.index(j, k)];
    }

    void collect_column(int j, int k, std::vector<double>& rs, std::vector<double>& vs) const {
        const int lo = std::max(0, j - 6), hi = std::min(g_.n_r - 1, j + 6);
        for (int jj = lo; jj <= hi; ++jj) {
            rs.push_back(g_.ring_r[jj]);
            vs.push_back(v_[g_.index(jj, k)]);
        }
        if (full_ && lo == 0) {
            // continue through the center: u(-r, theta) = u(r, theta + pi)
            const int kk = (k + g_.n_theta / 2) % g_.n_theta;
            for (int jj = 0; jj < 6 - j && jj < g_.n_r; ++jj) {
                rs.push_back(-g_.ring_r[jj]);
                vs.push_back(v_[g_.index(jj, kk)]);
            }
        }
        if (dirichlet_ && hi == g_.n_r - 1) {
            rs.push_back(1.0);
            vs.push_back(0.0);
        }
    }

    static void fit1d(const std::vector<double>& rs, const std::vector<double>& vs,
                      double r0, int deg, int npts, double& d1, double& d2) {
        const int n = static_cast<int>(rs.size());
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return std::abs(rs[a] - r0) < std::abs(rs[b] - r0);
        });
        const int m = std::min(n, npts);
        if (m < deg + 1) throw stencil_error("TensorStencil: not enough radial samples", {});
        double h = 0.0;
        for (int i = 0; i < m; ++i) h = std::max(h, std::abs(rs[idx[i]] - r0));
        Eigen::MatrixXd A(m, deg + 1);
        Eigen::VectorXd y(m);
        for (int i = 0; i < m; ++i) {
            const double t = (rs[idx[i]] - r0) / h;
            double p = 1.0;
            for (int d = 0; d <= deg; ++d) {
                A(i, d) = p;
                p *= t;
            }
            y(i) = vs[idx[i]];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        d1 = c(1) / h;
        d2 = 2.0 * c(2) / (h * h);
    }

    const QuadratureGrid& g_;
    const std::vector<double>& v_;
    bool dirichlet_;
    bool full_;
};

}  // namespace liouville
