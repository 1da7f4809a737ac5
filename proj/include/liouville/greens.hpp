#pragma once

#include <Eigen/Dense>
#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "liouville/fields.hpp"
#include "liouville/geometry.hpp"

namespace liouville {

/// Dirichlet Green function of the unit disk (complex notation):
///   G(x, y) = (1/2pi) log(|1 - conj(x) y| / |x - y|).
/// Clamped to its boundary limit 0 when either argument sits within 1e-8 of
/// the circle, which avoids cancellation between the two logs.
inline double green(const Point& x, const Point& y) {
    const double d2 = (x - y).norm2();
    if (d2 < 1e-28) throw singularity_error("green: x == y");
    if (x.norm() > 1.0 - 1e-8 || y.norm() > 1.0 - 1e-8) return 0.0;
    const complex zx = x.z(), zy = y.z();
    const double num2 = std::norm(1.0 - std::conj(zx) * zy);
    return 0.25 * M_1_PI * std::log(num2 / d2);
}

/// True Euclidean gradient of G with respect to x, as a vector. In complex
/// form grad_x G = (1/2pi) [ -y/(1 - conj(x) y) - 1/(conj(x) - conj(y)) ];
/// the complex-derivative display (1-|y|^2)/((x-y)(x conj(y)-1)) equals
/// 4 pi conj(grad)/2 ... i.e. it is proportional to this, the normalization
/// here is fixed against central differences of green().
inline Point green_grad_x(const Point& x, const Point& y) {
    if ((x - y).norm2() < 1e-28) throw singularity_error("green_grad_x: x == y");
    const complex zx = x.z(), zy = y.z();
    const complex g = -zy / (1.0 - std::conj(zx) * zy) -
                      1.0 / (std::conj(zx) - std::conj(zy));
    return Point(0.5 * M_1_PI * g);
}

/// int_{B(center, rho)} G(center, y) dy.
///
/// The log singularity integrates in closed form (rho^2/4 - rho^2/2 log rho);
/// the regular part (1/2pi) log|1 - conj(c) y| is harmonic on the ball, so its
/// integral is exactly pi rho^2 times its value at the center.
inline double green_ball_integral(const Point& center, double rho) {
    if (rho <= 0.0) throw domain_error("green_ball_integral: rho must be positive");
    if (center.norm() + rho > 1.0 + 1e-12)
        throw domain_error("green_ball_integral: ball not contained in the disk");
    const double singular = 0.25 * rho * rho - 0.5 * rho * rho * std::log(rho);
    const double regular = 0.5 * rho * rho * std::log1p(-center.norm2());
    return singular + regular;
}

/// Nystrom realization of f -> int_{B_1} G(., y) f(y) dy on a plain tensor
/// polar grid. The kernel splits as G = S + R with S = -(1/2pi) log|x-y| and
/// R = (1/2pi) log|1 - conj(x) y|. Both parts are invariant under common
/// rotations of (x, y), so the operator is block-circulant in the angular
/// index and is stored as per-mode radial blocks (real, since the angular
/// dependence is even):
///
///   - S: plain angular samples; the diagonal is fixed so each row applied to
///     the constant 1 reproduces the exact potential (1-|x|^2)/4, using
///     int_{B_1} log|x-y| dy = pi (|x|^2 - 1)/2 as the global anchor.
///   - R: product integration against the trigonometric interpolant, with
///     Fourier moments measured on an 8x oversampled ring (keeps the
///     near-boundary image singularity from aliasing through the quadrature).
class GreenKernel {
public:
    static constexpr int kOversample = 8;

    std::shared_ptr<const QuadratureGrid> grid;

    explicit GreenKernel(std::shared_ptr<const QuadratureGrid> g) : grid(std::move(g)) {
        const QuadratureGrid& q = *grid;
        if (!q.plain_tensor_disk())
            throw config_error("assemble_kernel: requires a plain full-disk tensor grid");
        if (q.n_r < 4 || q.n_theta < 8)
            throw config_error("assemble_kernel: insufficient grid size");
        assemble();
    }

    int n_r() const { return grid->n_r; }
    int n_theta() const { return grid->n_theta; }
    int modes() const { return grid->n_theta / 2 + 1; }

    /// Apply to node samples; returns node samples of the potential.
    std::vector<double> apply(const std::vector<double>& f) const {
        const QuadratureGrid& q = *grid;
        const int nr = q.n_r, nt = q.n_theta, nm = modes();
        if (static_cast<int>(f.size()) != q.size())
            throw config_error("apply_green: field size does not match the kernel grid");

        // forward FFT per ring
        Eigen::MatrixXcd fhat(nr, nm);
        {
            std::vector<double> in(nt);
            std::vector<std::complex<double>> out(nm);
            fftw_plan plan = fftw_plan_dft_r2c_1d(
                nt, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
            for (int j = 0; j < nr; ++j) {
                for (int k = 0; k < nt; ++k) in[k] = f[q.index(j, k)];
                fftw_execute(plan);
                for (int m = 0; m < nm; ++m) fhat(j, m) = out[m];
            }
            fftw_destroy_plan(plan);
        }

        Eigen::MatrixXcd uhat(nr, nm);
        for (int m = 0; m < nm; ++m) {
            const Eigen::MatrixXd& block = symbol_[m];
            uhat.col(m) = block * fhat.col(m).real().matrix() +
                          std::complex<double>(0, 1) * (block * fhat.col(m).imag().matrix());
        }

        std::vector<double> u(q.size());
        {
            std::vector<std::complex<double>> in(nm);
            std::vector<double> out(nt);
            fftw_plan plan = fftw_plan_dft_c2r_1d(
                nt, reinterpret_cast<fftw_complex*>(in.data()), out.data(), FFTW_ESTIMATE);
            for (int j = 0; j < nr; ++j) {
                for (int m = 0; m < nm; ++m) in[m] = uhat(j, m);
                fftw_execute(plan);
                for (int k = 0; k < nt; ++k) u[q.index(j, k)] = out[k] / nt;
            }
            fftw_destroy_plan(plan);
        }
        return u;
    }

    /// Angular mode-0 block: the exact restriction of the operator to
    /// ring-constant data (n_r x n_r).
    const Eigen::MatrixXd& radial_block() const { return symbol_[0]; }

    /// Per-mode block, for mode-space solves.
    const Eigen::MatrixXd& mode_block(int m) const { return symbol_[m]; }

    /// Materialize the full dense matrix (small grids only).
    Eigen::MatrixXd dense() const {
        const QuadratureGrid& q = *grid;
        const int nr = q.n_r, nt = q.n_theta, nm = modes();
        const std::size_t n = static_cast<std::size_t>(q.size());
        if (n > 8192)
            throw config_error("GreenKernel::dense: grid too large to materialize");
        Eigen::MatrixXd M(n, n);
        std::vector<std::complex<double>> in(nm);
        std::vector<double> out(nt);
        fftw_plan plan = fftw_plan_dft_c2r_1d(
            nt, reinterpret_cast<fftw_complex*>(in.data()), out.data(), FFTW_ESTIMATE);
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nr; ++j) {
                for (int m = 0; m < nm; ++m) in[m] = symbol_[m](i, j);
                fftw_execute(plan);
                // out[d] = sum_m symbol e^{+2pi i m d / nt} = C(i, j, delta=d) * nt-scale
                for (int k = 0; k < nt; ++k) {
                    for (int kp = 0; kp < nt; ++kp) {
                        const int d = ((kp - k) % nt + nt) % nt;
                        M(i * nt + k, j * nt + kp) = out[d] / nt;
                    }
                }
            }
        }
        fftw_destroy_plan(plan);
        return M;
    }

    /// Nystrom interpolation of the potential at an arbitrary interior point:
    /// plain quadrature plus the constant-anchor correction weighted by the
    /// nearest-node sample.
    double interpolate(const std::vector<double>& f, const Point& x) const {
        const QuadratureGrid& q = *grid;
        double plain = 0.0, srow = 0.0;
        double fnear = 0.0, dnear = 1e300;
        for (int i = 0; i < q.size(); ++i) {
            const Point& y = q.nodes[i];
            const double d2 = (x - y).norm2();
            if (d2 < dnear) {
                dnear = d2;
                fnear = f[i];
            }
            const double s = -0.25 * M_1_PI * std::log(d2);  // -(1/2pi) log|x-y|
            const double num2 = std::norm(1.0 - std::conj(x.z()) * y.z());
            const double r = 0.25 * M_1_PI * std::log(num2);
            plain += q.weights[i] * (s + r) * f[i];
            srow += q.weights[i] * s;
        }
        return plain + fnear * ((1.0 - x.norm2()) * 0.25 - srow);
    }

private:
    void assemble() {
        const QuadratureGrid& q = *grid;
        const int nr = q.n_r, nt = q.n_theta, nm = modes();
        const int nf = kOversample * nt;
        const double dth = 2.0 * M_PI / nt;

        symbol_.assign(nm, Eigen::MatrixXd::Zero(nr, nr));

        std::vector<double> s_in(nt), f_in(nf);
        std::vector<std::complex<double>> s_out(nt / 2 + 1), f_out(nf / 2 + 1);
        fftw_plan s_plan = fftw_plan_dft_r2c_1d(
            nt, s_in.data(), reinterpret_cast<fftw_complex*>(s_out.data()), FFTW_ESTIMATE);
        fftw_plan f_plan = fftw_plan_dft_r2c_1d(
            nf, f_in.data(), reinterpret_cast<fftw_complex*>(f_out.data()), FFTW_ESTIMATE);

        std::vector<double> s_rowsum(nr, 0.0);

        for (int i = 0; i < nr; ++i) {
            for (int j = i; j < nr; ++j) {
                const double r = q.ring_r[i], s = q.ring_r[j];
                // ---- singular part: plain samples of -(1/2pi) log|x - y|
                const double a2 = r * r + s * s;
                for (int k = 0; k < nt; ++k) {
                    if (i == j && k == 0) {
                        s_in[k] = 0.0;  // the anchor supplies the diagonal
                        continue;
                    }
                    const double d2 = a2 - 2.0 * r * s * std::cos(dth * k);
                    s_in[k] = -0.25 * M_1_PI * std::log(d2);
                }
                fftw_execute(s_plan);
                // ---- regular part moments on the oversampled ring
                const double c = r * s;
                for (int k = 0; k < nf; ++k) {
                    const double d2 = 1.0 + c * c - 2.0 * c * std::cos(2.0 * M_PI * k / nf);
                    f_in[k] = 0.25 * M_1_PI * std::log(d2);
                }
                fftw_execute(f_plan);

                const double wi = q.ring_w[i] * dth, wj = q.ring_w[j] * dth;
                for (int m = 0; m < nm; ++m) {
                    const double sm = s_out[m].real();   // even samples: real spectrum
                    const double rm = f_out[m].real() / kOversample;
                    symbol_[m](i, j) += wj * (sm + rm);
                    if (j != i) symbol_[m](j, i) += wi * (sm + rm);
                }
                s_rowsum[i] += wj * s_out[0].real();
                if (j != i) s_rowsum[j] += wi * s_out[0].real();
            }
        }
        fftw_destroy_plan(s_plan);
        fftw_destroy_plan(f_plan);

        // global anchor: rows act exactly on constants for the singular part,
        // int_{B_1} -(1/2pi) log|x-y| dy = (1 - |x|^2)/4
        for (int i = 0; i < nr; ++i) {
            const double d = 0.25 * (1.0 - q.ring_r[i] * q.ring_r[i]) - s_rowsum[i];
            for (int m = 0; m < nm; ++m) symbol_[m](i, i) += d;
        }
    }

    std::vector<Eigen::MatrixXd> symbol_;  // per angular mode, n_r x n_r
};

inline GreenKernel assemble_kernel(std::shared_ptr<const QuadratureGrid> grid) {
    return GreenKernel(std::move(grid));
}

}  // namespace liouville
