// liouville-lab: batch driver for the disk Liouville problem -Delta u = V e^u.
//
// Scenarios: selftest-green, gelfand, bubble, extract, pohozaev, sweep.
// Flags: --config PATH, --out DIR, --scenario NAME, --quiet.
// Exit codes: 0 ok, 2 invalid config, 3 numerical nonconvergence, 4 unwritable
// output path.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/analytic.hpp"
#include "liouville/blowup.hpp"
#include "liouville/fields.hpp"
#include "liouville/format.hpp"
#include "liouville/geometry.hpp"
#include "liouville/greens.hpp"
#include "liouville/pohozaev.hpp"
#include "liouville/solver.hpp"
#include "liouville/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace liouville;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string scenario_override;
    bool quiet = false;
};

struct Check {
    std::string name;
    bool passed;
    double value;
    double expected;
    double tolerance;
};

struct Report {
    std::string scenario;
    std::vector<Check> checks;
    json extra = json::object();

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    json to_json() const {
        json j;
        j["scenario"] = scenario;
        j["checks"] = json::array();
        int npass = 0;
        for (const auto& c : checks) {
            json cj;
            cj["name"] = c.name;
            cj["passed"] = c.passed;
            cj["value"] = format_g9(c.value);
            cj["expected"] = format_g9(c.expected);
            cj["tolerance"] = format_g9(c.tolerance);
            j["checks"].push_back(cj);
            if (c.passed) ++npass;
        }
        j["summary"] = {{"passed", npass},
                        {"failed", static_cast<int>(checks.size()) - npass}};
        for (auto& [k, v] : extra.items()) j[k] = v;
        return j;
    }
};

void add_check(Report& r, const std::string& name, double value, double expected,
               double tol) {
    r.checks.push_back({name, std::abs(value - expected) <= tol, value, expected, tol});
}

void add_flag(Report& r, const std::string& name, bool ok) {
    r.checks.push_back({name, ok, ok ? 1.0 : 0.0, 1.0, 0.0});
}

[[noreturn]] void die(int code, const std::string& msg) {
    std::cerr << "liouville-lab: " << msg << "\n";
    std::exit(code);
}

void write_file_or_die(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) die(4, "cannot open output path: " + p.string());
    out << body;
    if (!out.good()) die(4, "write failed: " + p.string());
}

std::string csv_row(const std::vector<double>& vals) {
    std::string row;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) row += ',';
        row += format_g9(vals[i]);
    }
    row += "\r\n";
    return row;
}

// --------------------------------------------------------------------------

Report run_selftest_green(const json& cfg, const fs::path&, bool quiet) {
    Report rep;
    rep.scenario = "selftest-green";
    const unsigned seed = cfg.value("seed", 42u);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ur(-0.95, 0.95);

    double worst_sym = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Point x{ur(rng), ur(rng)}, y{ur(rng), ur(rng)};
        if (x.norm() > 0.95 || y.norm() > 0.95 || dist(x, y) < 1e-3) continue;
        worst_sym = std::max(worst_sym, std::abs(green(x, y) - green(y, x)));
    }
    add_check(rep, "symmetry_random_pairs", worst_sym, 0.0, 1e-12);

    double worst_bnd = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double th = 2.0 * M_PI * t / 1000.0;
        Point x{ur(rng) * 0.5, ur(rng) * 0.5};
        worst_bnd = std::max(worst_bnd,
                             std::abs(green(x, {std::cos(th), std::sin(th)})));
    }
    add_check(rep, "boundary_vanishing", worst_bnd, 0.0, 1e-12);

    add_check(rep, "ball_integral_rho_half", green_ball_integral({0, 0}, 0.5),
              0.1491434, 1e-6);
    add_check(rep, "ball_integral_rho_one", green_ball_integral({0, 0}, 1.0), 0.25,
              1e-6);

    double worst_grad = 0.0;
    int done = 0;
    while (done < 100) {
        Point x{ur(rng), ur(rng)}, y{ur(rng), ur(rng)};
        if (x.norm() > 0.9 || y.norm() > 0.9 || dist(x, y) < 0.05) continue;
        ++done;
        const double h = 1e-6;
        const Point g = green_grad_x(x, y);
        const double fd1 =
            (green({x.x1 + h, x.x2}, y) - green({x.x1 - h, x.x2}, y)) / (2 * h);
        const double fd2 =
            (green({x.x1, x.x2 + h}, y) - green({x.x1, x.x2 - h}, y)) / (2 * h);
        const double scale = std::max(1.0, std::hypot(g.x1, g.x2));
        worst_grad = std::max(worst_grad, std::hypot(g.x1 - fd1, g.x2 - fd2) / scale);
    }
    add_check(rep, "gradient_vs_central_difference", worst_grad, 0.0, 1e-6);

    double worst_pos = 1.0;
    for (int t = 0; t < 500; ++t) {
        Point x{ur(rng) * 0.98, ur(rng) * 0.98}, y{ur(rng) * 0.98, ur(rng) * 0.98};
        if (dist(x, y) < 1e-3 || x.norm() > 0.99 || y.norm() > 0.99) continue;
        worst_pos = std::min(worst_pos, green(x, y));
    }
    add_flag(rep, "positivity_random_pairs", worst_pos > 0.0);

    // small-ball bound: value / delta^2 bounded by 1 along the boundary sweep
    double worst_ratio = 0.0;
    for (double d : {0.2, 0.1, 0.05, 0.025})
        worst_ratio = std::max(worst_ratio,
                               green_ball_integral({1.0 - d, 0.0}, d) / (d * d));
    add_flag(rep, "small_ball_ratio_bounded", worst_ratio <= 1.0);

    if (!quiet)
        std::cout << "selftest-green: " << rep.checks.size() << " checks\n";
    return rep;
}

Report run_gelfand(const json& cfg, const fs::path& out_dir, bool quiet) {
    Report rep;
    rep.scenario = "gelfand";
    const double b_max = cfg.value("b_max", 100.0);
    const int n_r = cfg.value("/grid/n_r"_json_pointer, 96);
    const int n_t = cfg.value("/grid/n_theta"_json_pointer, 192);
    if (b_max <= 0.0) die(2, "gelfand: b_max must be positive");

    auto grid = std::make_shared<const QuadratureGrid>(
        build_grid(DiskDomain::full(), n_r, n_t));
    GreenKernel kernel(grid);

    // prescribed-b sweep, warm-started from the closed form
    std::vector<double> bs;
    for (int i = 1; i <= 9; ++i)
        if (0.1 * i < b_max) bs.push_back(0.1 * i);
    for (double b = 1.0; b <= b_max * (1 + 1e-12); b *= 1.4678) bs.push_back(b);
    if (bs.back() < b_max) bs.push_back(b_max);

    std::string csv = "b,lambda,sup_u,total_mass,mass_ratio_8pi,newton_iters,residual\r\n";
    double final_ratio = 0.0;
    for (double b : bs) {
        RadialBranchPoint pt;
        try {
            // bordered solve with prescribed height: regular across the fold
            pt = solve_radial_prescribed_height(kernel, b);
        } catch (const error& e) {
            die(3, std::string("gelfand: solve failed at b=") + format_g9(b) + ": " +
                       e.what());
        }
        const SolutionField& sol = pt.solution;
        final_ratio = sol.total_mass / (8.0 * M_PI);
        csv += csv_row({b, pt.lambda, sol.sup_u, sol.total_mass, final_ratio,
                        static_cast<double>(sol.newton_iters), sol.residual_inf});
    }
    write_file_or_die(out_dir / "gelfand.csv", csv);

    add_check(rep, "final_mass_ratio", final_ratio, b_max / (1.0 + b_max), 2e-3);

    // continuation for the fold estimate
    try {
        ContinuationRun run = continue_branch(kernel, 0.1);
        if (run.fold_estimate) {
            add_check(rep, "fold_estimate", *run.fold_estimate, 2.0, 1e-3);
            rep.extra["fold_estimate"] = format_g9(*run.fold_estimate);
        } else {
            add_flag(rep, "fold_detected", false);
        }
        rep.extra["continuation_steps"] = run.steps.size();
        rep.extra["termination"] = run.termination;
    } catch (const error& e) {
        die(3, std::string("gelfand: continuation failed: ") + e.what());
    }
    if (!quiet) std::cout << "gelfand: wrote gelfand.csv (" << bs.size() << " rows)\n";
    return rep;
}

Report run_bubble(const json& cfg, const fs::path& out_dir, bool quiet) {
    Report rep;
    rep.scenario = "bubble";
    std::vector<double> lambdas = cfg.value("lambdas", std::vector<double>{1.0, 10.0, 100.0});

    std::string csv = "lambda,sup_u,mass_8pi_ratio,ls_probe\r\n";
    for (double lam : lambdas) {
        if (lam <= 0.0) die(2, "bubble: lambda must be positive");
        // scaled node set keeps the probe resolution lambda-independent
        double probe = -1e300;
        double mass = 0.0;
        const int n = 4096;
        double prev_t = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double t = 40.0 * i / n;  // t = lambda r
            const double r = t / lam;
            const double uu = bubble_u(lam, {0, 0}, {r, 0});
            probe = std::max(probe, uu + 2.0 * std::log(r));
            mass += std::exp(bubble_u(lam, {0, 0}, {0.5 * (t + prev_t) / lam, 0})) * 2.0 *
                    M_PI * (0.5 * (t + prev_t) / lam) * (t - prev_t) / lam;
            prev_t = t;
        }
        csv += csv_row({lam, bubble_u(lam, {0, 0}, {0, 0}), mass / (8.0 * M_PI), probe});
        add_check(rep, "ls_probe_lambda_" + format_g9(lam), probe, std::log(2.0), 1e-4);
    }
    write_file_or_die(out_dir / "bubble.csv", csv);
    if (!quiet) std::cout << "bubble: wrote bubble.csv\n";
    return rep;
}

Report run_extract(const json& cfg, const fs::path& out_dir, bool quiet) {
    Report rep;
    rep.scenario = "extract";
    const double eps = cfg.value("epsilon", 0.1);
    const double threshold = cfg.value("threshold", 5.0);
    const int n_r = cfg.value("/grid/n_r"_json_pointer, 96);
    const int n_t = cfg.value("/grid/n_theta"_json_pointer, 192);
    if (!(eps > 0.0 && eps < 0.5)) die(2, "extract: epsilon must lie in (0, 1/2)");

    auto grid = std::make_shared<const QuadratureGrid>(
        build_grid(DiskDomain::full(), n_r, n_t));

    Field u;
    CurvatureFn V;
    if (!cfg.contains("bubbles") || cfg["bubbles"].empty()) {
        u = Field::zeros(grid);
        V = CurvatureFn::constant(grid, 1.0);
    } else {
        BubbleConfig bc;
        for (const auto& b : cfg["bubbles"]) {
            const double lam = b.value("lambda", 50.0);
            const double x = b.value("x", 0.0), y = b.value("y", 0.0);
            if (lam <= 0.0 || std::hypot(x, y) >= 1.0)
                die(2, "extract: bubble needs lambda > 0 and |center| < 1");
            bc.bubbles.emplace_back(lam, Point{x, y});
        }
        auto [uu, vv] = synthetic_field(grid, std::move(bc));
        u = std::move(uu);
        V = std::move(vv);
    }

    ExtractionReport er;
    try {
        er = extract_blowups(u, V, eps, threshold);
    } catch (const runaway_error& e) {
        die(3, std::string("extract: ") + e.what());
    }

    std::string csv =
        "k,x1,x2,delta,sup_u,diag_2log,local_mass_eps,quant_m,quant_dev\r\n";
    for (std::size_t k = 0; k < er.points.size(); ++k) {
        const auto& p = er.points[k];
        csv += csv_row({static_cast<double>(k), p.x.x1, p.x.x2, p.delta, p.sup_u,
                        p.diag_2log, p.mass_at(eps),
                        static_cast<double>(p.quant_m), p.quant_deviation});
    }
    write_file_or_die(out_dir / "extract.csv", csv);

    rep.extra["points"] = er.points.size();
    rep.extra["residual_sup"] = format_g9(er.residual_sup);
    rep.extra["count_at_threshold_minus_1"] = er.count_at_threshold_minus_1;
    rep.extra["count_at_threshold_plus_1"] = er.count_at_threshold_plus_1;
    add_flag(rep, "extraction_completed", true);
    if (cfg.contains("expected_points"))
        add_check(rep, "point_count", er.points.size(),
                  cfg["expected_points"].get<double>(), 0.0);
    if (!quiet)
        std::cout << "extract: " << er.points.size() << " points, residual sup "
                  << format_g9(er.residual_sup) << "\n";
    return rep;
}

Report run_pohozaev(const json& cfg, const fs::path& out_dir, bool quiet) {
    Report rep;
    rep.scenario = "pohozaev";
    const int n_r = cfg.value("/grid/n_r"_json_pointer, 96);
    const int n_t = cfg.value("/grid/n_theta"_json_pointer, 192);
    const double px = cfg.value("/pivot/0"_json_pointer, 0.0);
    const double py = cfg.value("/pivot/1"_json_pointer, 0.0);
    const bool stencil = cfg.value("gradients", std::string("analytic")) == "stencil";

    auto grid = std::make_shared<const QuadratureGrid>(
        build_grid(DiskDomain::full(), n_r, n_t));

    json cases = cfg.value("cases", json::array({{{"type", "zero"}}}));
    std::string csv = "pivot_x1,pivot_x2,interior,boundary_A,boundary_B,volume,residual\r\n";
    for (const auto& c : cases) {
        const std::string type = c.value("type", "zero");
        Field u;
        CurvatureFn V;
        if (type == "zero") {
            u = Field::zeros(grid);
            V = CurvatureFn::constant(grid, 1.0);
        } else if (type == "gelfand") {
            const double b = c.value("b", 1.0);
            if (b <= 0.0) die(2, "pohozaev: b must be positive");
            u = Field::from_function(
                grid, [b](const Point& p) { return gelfand_u(b, p); },
                [b](const Point& p) { return gelfand_grad(b, p); });
            V = CurvatureFn::constant(grid, gelfand_lambda(b));
        } else {
            die(2, "pohozaev: unknown case type '" + type + "'");
        }
        if (stencil) {
            u.grad_fn = nullptr;  // force the stencil path
        }
        PohozaevReport pr = pohozaev_terms(u, V, {px, py}, grid->domain);
        csv += csv_row({pr.pivot.x1, pr.pivot.x2, pr.interior, pr.boundary_A,
                        pr.boundary_B, pr.volume_term, pr.residual});
        add_check(rep, "residual_" + type + (stencil ? "_stencil" : "_analytic"),
                  pr.residual, 0.0, stencil ? 5e-3 : 1e-6);
    }
    write_file_or_die(out_dir / "pohozaev.csv", csv);
    if (!quiet) std::cout << "pohozaev: wrote pohozaev.csv\n";
    return rep;
}

Report run_sweep(const json& cfg, const fs::path& out_dir, bool quiet) {
    Report rep;
    rep.scenario = "sweep";
    std::vector<double> bs = cfg.value("b_list", std::vector<double>{1e2, 1e3, 1e4});

    std::string csv = "b,lambda,u0,total_mass,mass_ratio_8pi,local_mass_01,quant_m,quant_dev\r\n";
    double prev_dev = 1e300;
    bool monotone = true;
    for (double b : bs) {
        if (b <= 1.0) die(2, "sweep: b values must exceed 1 (upper branch)");
        const double lam = gelfand_lambda(b);
        std::vector<RadialProfile> profs;
        try {
            profs = radial_shoot(lam);
        } catch (const error& e) {
            die(3, std::string("sweep: radial shooting failed: ") + e.what());
        }
        const RadialProfile& up = profs.back();
        const double mass = up.mass(1.0);
        const double m01 = up.mass(0.1);
        const QuantizationResult q = quantization_check(mass);
        monotone = monotone && q.deviation < prev_dev;
        prev_dev = q.deviation;
        csv += csv_row({b, lam, up.u0, mass, mass / (8.0 * M_PI), m01,
                        static_cast<double>(q.m), q.deviation});
        add_check(rep, "total_mass_b_" + format_g9(b), mass,
                  8.0 * M_PI * b / (1.0 + b), 1e-3 * 8.0 * M_PI);
    }
    add_flag(rep, "deviation_monotone", monotone);
    write_file_or_die(out_dir / "sweep.csv", csv);
    if (!quiet) std::cout << "sweep: wrote sweep.csv\n";
    return rep;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        auto need_value = [&](const char* flag) -> std::string {
            if (i + 1 >= argc) die(2, std::string(flag) + " requires a value");
            return argv[++i];
        };
        if (a == "--config")
            opt.config_path = need_value("--config");
        else if (a == "--out")
            opt.out_dir = need_value("--out");
        else if (a == "--scenario")
            opt.scenario_override = need_value("--scenario");
        else if (a == "--quiet")
            opt.quiet = true;
        else
            die(2, "unknown flag: " + a);
    }
    if (opt.config_path.empty() && opt.scenario_override.empty())
        die(2, "need --config PATH or --scenario NAME");

    json cfg = json::object();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) die(2, "cannot read config: " + opt.config_path);
        try {
            cfg = json::parse(in);
        } catch (const std::exception& e) {
            die(2, std::string("config parse error: ") + e.what());
        }
        if (!cfg.is_object()) die(2, "config must be a JSON object");
    }
    if (!opt.scenario_override.empty()) cfg["scenario"] = opt.scenario_override;
    if (!cfg.contains("scenario")) die(2, "config is missing 'scenario'");
    const std::string scenario = cfg["scenario"].get<std::string>();

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    const fs::path out_dir(opt.out_dir);
    {
        // fail fast on unwritable output locations
        std::ofstream probe(out_dir / ".write_probe");
        if (!probe) die(4, "output directory not writable: " + opt.out_dir);
        probe.close();
        fs::remove(out_dir / ".write_probe", ec);
    }

    Report rep;
    try {
        if (scenario == "selftest-green")
            rep = run_selftest_green(cfg, out_dir, opt.quiet);
        else if (scenario == "gelfand")
            rep = run_gelfand(cfg, out_dir, opt.quiet);
        else if (scenario == "bubble")
            rep = run_bubble(cfg, out_dir, opt.quiet);
        else if (scenario == "extract")
            rep = run_extract(cfg, out_dir, opt.quiet);
        else if (scenario == "pohozaev")
            rep = run_pohozaev(cfg, out_dir, opt.quiet);
        else if (scenario == "sweep")
            rep = run_sweep(cfg, out_dir, opt.quiet);
        else
            die(2, "unknown scenario: " + scenario);
    } catch (const config_error& e) {
        die(2, e.what());
    } catch (const domain_error& e) {
        die(2, e.what());
    } catch (const error& e) {
        // write a partial report before signalling numerical failure
        Report partial;
        partial.scenario = scenario;
        add_flag(partial, "completed", false);
        partial.extra["error"] = e.what();
        write_file_or_die(out_dir / "report.json", partial.to_json().dump(2) + "\n");
        die(3, e.what());
    }

    write_file_or_die(out_dir / "report.json", rep.to_json().dump(2) + "\n");
    if (!opt.quiet)
        std::cout << "report.json: " << rep.checks.size() << " checks, "
                  << (rep.all_passed() ? "all passed" : "FAILURES") << "\n";
    return rep.all_passed() ? 0 : 1;
}
