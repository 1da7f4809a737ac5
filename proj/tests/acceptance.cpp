// Acceptance suite: one line per criterion, exit 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/analytic.hpp"
#include "liouville/blowup.hpp"
#include "liouville/fields.hpp"
#include "liouville/geometry.hpp"
#include "liouville/greens.hpp"
#include "liouville/pohozaev.hpp"
#include "liouville/solver.hpp"
#include "liouville/synthetic.hpp"

using namespace liouville;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void require_close(double value, double expected, double tol, const std::string& what) {
        if (!(std::abs(value - expected) <= tol)) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s: got %.10g want %.10g +- %.3g",
                          what.c_str(), value, expected, tol);
            detail += buf;
        }
    }
    void finish() {
        if (ok) {
            std::printf("[PASS] %s\n", name.c_str());
        } else {
            std::printf("[FAIL] %s  (%s)\n", name.c_str(), detail.c_str());
            ++g_failures;
        }
        std::fflush(stdout);
    }
};

std::shared_ptr<const QuadratureGrid> grid96() {
    static auto g = std::make_shared<const QuadratureGrid>(
        build_grid(DiskDomain::full(), 96, 192));
    return g;
}

const GreenKernel& kernel96() {
    static GreenKernel k(grid96());
    return k;
}

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

// ---------------------------------------------------------------------- C1
void c1_green_selftest() {
    Criterion c{"C1 Green self-test: symmetry, boundary, ball integrals, gradient"};
    const auto t0 = clk::now();

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ur(-0.69, 0.69);
    double worst_sym = 0.0;
    int pairs = 0;
    while (pairs < 1000) {
        Point x{ur(rng), ur(rng)}, y{ur(rng), ur(rng)};
        if (dist(x, y) < 1e-3) continue;
        ++pairs;
        worst_sym = std::max(worst_sym, std::abs(green(x, y) - green(y, x)));
    }
    c.require(worst_sym <= 1e-12, "symmetry above 1e-12");

    double worst_bnd = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double th = 2.0 * M_PI * t / 1000.0;
        worst_bnd = std::max(
            worst_bnd, std::abs(green({0.4 * std::cos(3.0 * th), 0.4 * std::sin(2.0 * th)},
                                      {std::cos(th), std::sin(th)})));
    }
    c.require(worst_bnd <= 1e-12, "boundary value above 1e-12");

    c.require_close(green_ball_integral({0, 0}, 0.5), 0.1491434, 1e-6,
                    "int_B(0,1/2) G(0,y)");
    c.require_close(green_ball_integral({0, 0}, 1.0), 0.25, 1e-6, "int_B1 G(0,y)");

    double worst_grad = 0.0;
    int done = 0;
    while (done < 100) {
        Point x{ur(rng), ur(rng)}, y{ur(rng), ur(rng)};
        if (dist(x, y) < 0.05) continue;
        ++done;
        const double h = 1e-6;
        const Point g = green_grad_x(x, y);
        const double fd1 = (green({x.x1 + h, x.x2}, y) - green({x.x1 - h, x.x2}, y)) / (2 * h);
        const double fd2 = (green({x.x1, x.x2 + h}, y) - green({x.x1, x.x2 - h}, y)) / (2 * h);
        const double scale = std::max(1.0, std::hypot(g.x1, g.x2));
        worst_grad = std::max(worst_grad, std::hypot(g.x1 - fd1, g.x2 - fd2) / scale);
    }
    c.require(worst_grad < 1e-6, "gradient vs central differences above 1e-6 relative");

    const double dt = seconds_since(t0);
    c.require(dt < 2.0, "runtime " + std::to_string(dt) + "s exceeds 2s");
    c.finish();
}

// ---------------------------------------------------------------------- C2
void c2_poisson_oracle() {
    Criterion c{"C2 Poisson oracle: f==1 potential within 1e-6, 3x decay on refinement"};
    auto err_at = [](const GreenKernel& k) {
        const QuadratureGrid& g = *k.grid;
        std::vector<double> one(g.size(), 1.0);
        std::vector<double> u = k.apply(one);
        double worst = 0.0;
        for (int i = 0; i < g.size(); ++i)
            worst = std::max(worst, std::abs(u[i] - 0.25 * (1.0 - g.nodes[i].norm2())));
        return worst;
    };
    const double e96 = err_at(kernel96());
    c.require(e96 < 1e-6, "sup error at 96x192 is " + std::to_string(e96));
    auto g192 = std::make_shared<const QuadratureGrid>(
        build_grid(DiskDomain::full(), 192, 384));
    GreenKernel k192(g192);
    const double e192 = err_at(k192);
    c.require(e96 / e192 >= 3.0,
              "refinement ratio " + std::to_string(e96 / e192) + " below 3");
    c.finish();
}

// ------------------------------------------------------------------- C3/C4
ContinuationRun the_run;

void c3_gelfand_reproduction() {
    Criterion c{"C3 Gelfand branch: both solutions at lambda=16/9, fold at 2"};
    const auto t0 = clk::now();

    CurvatureFn V = CurvatureFn::constant(grid96(), 16.0 / 9.0);
    SolutionField lower = newton_solve(kernel96(), V, Field::zeros(grid96()));
    c.require_close(lower.sup_u, 0.8109302, 1e-5, "lower branch sup u");

    Field warm = Field::from_function(
        grid96(), [](const Point& p) { return gelfand_u(2.0, p) + 0.01; });
    SolutionField upper = newton_solve(kernel96(), V, warm);
    c.require_close(upper.sup_u, 2.1972246, 1e-5, "upper branch sup u");

    the_run = continue_branch(kernel96(), 0.1);
    c.require(the_run.fold_estimate.has_value(), "fold not detected");
    if (the_run.fold_estimate)
        c.require_close(*the_run.fold_estimate, 2.0, 1e-3, "fold location");

    const double dt = seconds_since(t0);
    c.require(dt < 30.0, "runtime " + std::to_string(dt) + "s exceeds 30s");
    c.finish();
}

void c4_mass_law() {
    Criterion c{"C4 mass law 8 pi b/(1+b) and the 4 pi / b<=1 / sup<=2log2 equivalence"};
    c.require(!the_run.steps.empty(), "no continuation data");
    for (const auto& s : the_run.steps) {
        const double b = std::exp(s.sup_u / 2.0) - 1.0;
        const double mex = 8.0 * M_PI * b / (1.0 + b);
        if (std::abs(s.total_mass - mex) > 0.002 * mex) {
            c.require(false, "mass law off by more than 0.2% at sup_u=" +
                                 std::to_string(s.sup_u));
            break;
        }
    }
    const double slack = 1e-3;
    for (const auto& s : the_run.steps) {
        const double b = std::exp(s.sup_u / 2.0) - 1.0;
        const int c1 = s.total_mass < 4.0 * M_PI - slack ? -1
                       : s.total_mass > 4.0 * M_PI + slack ? 1 : 0;
        const int c2 = b < 1.0 - slack ? -1 : b > 1.0 + slack ? 1 : 0;
        const int c3 = s.sup_u < 2.0 * std::log(2.0) - slack ? -1
                       : s.sup_u > 2.0 * std::log(2.0) + slack ? 1 : 0;
        if ((c1 && c2 && c1 != c2) || (c2 && c3 && c2 != c3) || (c1 && c3 && c1 != c3)) {
            c.require(false, "threshold conditions disagree at sup_u=" +
                                 std::to_string(s.sup_u));
            break;
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------- C5
void c5_quantization() {
    Criterion c{"C5 quantization at desk scale: radial oracle masses, m=1"};
    double prev_dev = 1e300;
    for (double b : {1e2, 1e3, 1e4}) {
        const double lam = gelfand_lambda(b);
        auto profs = radial_shoot(lam);
        const RadialProfile& up = profs.back();
        const double total = up.mass(1.0);
        const double expect = 8.0 * M_PI * b / (1.0 + b);
        c.require(std::abs(total - expect) <= 1e-3 * expect,
                  "total mass at b=" + std::to_string(b));
        if (b == 1e4)
            c.require_close(up.mass(0.1), 24.8839, 0.005 * 24.8839,
                            "local mass in B(0, 0.1) at b=1e4");
        const QuantizationResult q = quantization_check(total);
        c.require(q.m == 1, "nearest multiple is not 8 pi at b=" + std::to_string(b));
        c.require(q.deviation < prev_dev, "deviation not shrinking at b=" + std::to_string(b));
        prev_dev = q.deviation;
    }
    c.finish();
}

// ---------------------------------------------------------------------- C6
void c6_extraction() {
    Criterion c{"C6 extraction: two bubbles found, masses near 8 pi, disjoint balls"};
    const auto t0 = clk::now();

    auto [u, V] = two_bubble_field(grid96(), 50.0);
    ExtractionReport r = extract_blowups(u, V, 0.1, 5.0);
    c.require(r.points.size() == 2,
              "expected 2 points, got " + std::to_string(r.points.size()));
    for (const auto& p : r.points) {
        // mass read at the widest recorded fraction (3 eps): the excision ball
        // itself clips 8% of the bubble at lambda = 50
        const double m = p.mass_at(0.3);
        c.require(std::abs(m - 8.0 * M_PI) <= 0.05 * 8.0 * M_PI,
                  "local mass " + std::to_string(m) + " not within 5% of 8 pi");
    }
    if (r.excised.size() == 2) {
        c.require(dist(r.excised[0].center, r.excised[1].center) >
                      r.excised[0].radius + r.excised[1].radius,
                  "excised balls overlap");
    }
    if (r.points.size() == 2)
        c.require(dist(r.points[1].x, r.excised[0].center) > r.excised[0].radius,
                  "second point inside the first excised ball");

    Field z = Field::zeros(grid96());
    CurvatureFn one = CurvatureFn::constant(grid96(), 1.0);
    ExtractionReport rz = extract_blowups(z, one, 0.1, 0.0);
    c.require(rz.points.empty(), "zero field produced points");

    const double dt = seconds_since(t0);
    c.require(dt < 10.0, "runtime " + std::to_string(dt) + "s exceeds 10s");
    c.finish();
}

// ---------------------------------------------------------------------- C7
void c7_pohozaev() {
    Criterion c{"C7 Pohozaev balance: analytic 1e-6, stencil 5e-3, divergence -2 pi b"};
    for (double b : {0.5, 1.0, 2.0}) {
        Field u = Field::from_function(
            grid96(), [b](const Point& p) { return gelfand_u(b, p); },
            [b](const Point& p) { return gelfand_grad(b, p); });
        CurvatureFn V = CurvatureFn::constant(grid96(), gelfand_lambda(b));
        PohozaevReport r = pohozaev_terms(u, V, {0, 0}, DiskDomain::full());
        c.require(std::abs(r.residual) < 1e-6,
                  "analytic residual at b=" + std::to_string(b) + " is " +
                      std::to_string(r.residual));
    }
    {
        Field u = Field::from_function(
            grid96(), [](const Point& p) { return gelfand_u(1.0, p); });
        CurvatureFn V = CurvatureFn::constant(grid96(), 2.0);
        PohozaevReport r = pohozaev_terms(u, V, {0, 0}, DiskDomain::full());
        c.require(std::abs(r.residual) < 5e-3,
                  "stencil residual is " + std::to_string(r.residual));
    }
    {
        Field u = Field::from_function(
            grid96(), [](const Point& p) { return gelfand_u(1.0, p); },
            [](const Point& p) { return gelfand_grad(1.0, p); });
        c.require_close(divergence_reduction(u, {0, 0}, DiskDomain::full()),
                        -2.0 * M_PI, 1e-6, "divergence reduction at b=1");

        CurvatureFn V = CurvatureFn::constant(grid96(), 2.0);
        const Point a{0.31, 0.12}, bb{-0.22, 0.41};
        SplitReport s = split_report(u, V, a, bb);
        const Point m{0.5 * (a.x1 + bb.x1), 0.5 * (a.x2 + bb.x2)};
        PohozaevReport whole = pohozaev_terms(u, V, m, DiskDomain::full());
        c.require(std::abs(s.omega1.interior + s.omega2.interior - whole.interior) < 1e-6,
                  "split additivity");

        const Point h{0.12, -0.07};
        PohozaevReport r0 = pohozaev_terms(u, V, {0, 0}, DiskDomain::full());
        PohozaevReport r1 = pohozaev_terms(u, V, h, DiskDomain::full());
        double corr = 0.0;
        const auto& g = *grid96();
        for (int i = 0; i < g.size(); ++i) {
            const Point gu = gelfand_grad(1.0, g.nodes[i]);
            corr += g.weights[i] * (h.x1 * gu.x1 + h.x2 * gu.x2) * V.values[i] *
                    std::exp(u.values[i]);
        }
        c.require(std::abs(r1.interior - r0.interior + corr) < 1e-8, "pivot linearity");
    }
    c.finish();
}

// ---------------------------------------------------------------------- C8
void c8_li_shafrir() {
    Criterion c{"C8 Li-Shafrir probe: log 2 for bubbles, scale independent"};
    auto probe_of = [](double lam) {
        double best = -1e300;
        for (int i = 1; i <= 8192; ++i) {
            const double t = 3.0 * i / 8192.0;  // t = lam r
            const double r = t / lam;
            best = std::max(best, bubble_u(lam, {0, 0}, {r, 0}) + 2.0 * std::log(r));
        }
        return best;
    };
    const double p1 = probe_of(1.0), p10 = probe_of(10.0), p100 = probe_of(100.0);
    c.require_close(p1, std::log(2.0), 1e-4, "probe at lambda=1");
    c.require_close(p10, std::log(2.0), 1e-4, "probe at lambda=10");
    c.require_close(p100, std::log(2.0), 1e-4, "probe at lambda=100");
    c.require(std::abs(p1 - p10) <= 1e-10 && std::abs(p10 - p100) <= 1e-10,
              "probe depends on the scale");
    c.finish();
}

// ---------------------------------------------------------------------- C9
void c9_holder_profile() {
    Criterion c{"C9 Hoelder profile: bounded weighted integrand, flat fitted decay"};
    const double lam = 50.0, s = 0.75;
    Field ub = Field::from_function(grid96(), [lam](const Point& p) {
        return bubble_u(lam, {0, 0}, p);
    });
    CurvatureFn V = CurvatureFn::from_function(
        grid96(), [s](const Point& p) { return 1.0 + std::pow(p.norm(), s); },
        HoelderData{s, 1.05});
    HolderProfile prof = holder_profile(ub, V, {0, 0});

    double oracle = 0.0;  // 1-D maximization of r^2 8 lam^2/(1+lam^2 r^2)^2
    for (int i = 1; i <= 400000; ++i) {
        const double r = 0.35 * i / 400000.0;
        const double q = 1.0 + lam * lam * r * r;
        oracle = std::max(oracle, r * r * 8.0 * lam * lam / (q * q));
    }
    c.require(prof.max_g_r_pow <= 1.10 * oracle,
              "max g r^{1-s} = " + std::to_string(prof.max_g_r_pow) + " above oracle+10% (" +
                  std::to_string(oracle) + ")");
    c.require(prof.fitted_alpha <= 1.0 - s + 0.1,
              "fitted alpha " + std::to_string(prof.fitted_alpha) + " above 1-s+0.1");
    c.finish();
}

// --------------------------------------------------------------------- C10
void c10_cli_interface() {
    Criterion c{"C10 CLI determinism and exit codes 0/2/3/4"};
    const std::string cli = LIOUVILLE_CLI_PATH;
    fs::path base = fs::temp_directory_path() / "liouville_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    auto run = [&](const std::string& args) {
        return WEXITSTATUS(std::system((cli + " " + args + " >/dev/null 2>&1").c_str()));
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    // exit 0 + determinism
    {
        std::ofstream cfg(base / "cfg.json");
        cfg << R"({"scenario":"gelfand","b_max":2.0,"seed":11,)"
            << R"("grid":{"n_r":48,"n_theta":96}})";
    }
    fs::create_directories(base / "a");
    fs::create_directories(base / "b");
    c.require(run("--config " + (base / "cfg.json").string() + " --out " +
                  (base / "a").string() + " --quiet") == 0,
              "gelfand run did not exit 0");
    c.require(run("--config " + (base / "cfg.json").string() + " --out " +
                  (base / "b").string() + " --quiet") == 0,
              "second gelfand run did not exit 0");
    c.require(slurp(base / "a" / "gelfand.csv") == slurp(base / "b" / "gelfand.csv"),
              "CSV not byte-identical across identical runs");
    c.require(!slurp(base / "a" / "gelfand.csv").empty(), "CSV empty");

    // exit 2: invalid config
    {
        std::ofstream cfg(base / "empty.json");
    }
    c.require(run("--config " + (base / "empty.json").string()) == 2,
              "empty config did not exit 2");

    // exit 3: numerical runaway, with a partial report on disk
    {
        std::ofstream cfg(base / "runaway.json");
        cfg << R"({"scenario":"extract","epsilon":0.1,"threshold":-10.0,)"
            << R"("grid":{"n_r":48,"n_theta":96},)"
            << R"("bubbles":[{"x":0.5,"y":0.0,"lambda":50.0},)"
            << R"({"x":-0.5,"y":0.0,"lambda":50.0}]})";
    }
    fs::create_directories(base / "r");
    c.require(run("--config " + (base / "runaway.json").string() + " --out " +
                  (base / "r").string()) == 3,
              "runaway extraction did not exit 3");
    c.require(fs::exists(base / "r" / "report.json"),
              "no partial report.json after exit 3");

    // exit 4: unwritable output
    c.require(run("--scenario selftest-green --out /proc/liouville_acceptance") == 4,
              "unwritable output did not exit 4");
    c.finish();
}

}  // namespace

int main() {
    c1_green_selftest();
    c2_poisson_oracle();
    c3_gelfand_reproduction();
    c4_mass_law();
    c5_quantization();
    c6_extraction();
    c7_pohozaev();
    c8_li_shafrir();
    c9_holder_profile();
    c10_cli_interface();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
