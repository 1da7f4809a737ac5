#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "liouville/geometry.hpp"

using namespace liouville;

TEST_CASE("boundary distance on the disk and half disk") {
    CHECK(boundary_distance({0, 0}, DiskDomain::full()) == Catch::Approx(1.0));
    CHECK(boundary_distance({0.6, 0}, DiskDomain::full()) == Catch::Approx(0.4));
    CHECK(boundary_distance({0.3, 0.2}, DiskDomain::half()) == Catch::Approx(0.3));
    CHECK_THROWS_AS(boundary_distance({1.5, 0}, DiskDomain::full()), domain_error);
    CHECK_THROWS_AS(boundary_distance({-0.2, 0}, DiskDomain::half()), domain_error);
}

TEST_CASE("boundary distance is 1-Lipschitz") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ur(-0.7, 0.7);
    for (int t = 0; t < 1000; ++t) {
        Point p{ur(rng), ur(rng)}, q{ur(rng), ur(rng)};
        const double dd = std::abs(boundary_distance(p, DiskDomain::full()) -
                                   boundary_distance(q, DiskDomain::full()));
        CHECK(dd <= dist(p, q) + 1e-14);
    }
}

TEST_CASE("grid weights sum to the domain area") {
    for (auto [nr, nt] : {std::pair{16, 32}, {64, 128}, {96, 192}}) {
        QuadratureGrid g = build_grid(DiskDomain::full(), nr, nt);
        double s = 0.0;
        for (double w : g.weights) s += w;
        CHECK(std::abs(s - M_PI) <= 1e-10 * M_PI);
        for (const Point& p : g.nodes) CHECK(p.norm() < 1.0);
        for (double w : g.weights) CHECK(w > 0.0);
    }
    QuadratureGrid h = build_grid(DiskDomain::half(), 64, 128);
    double s = 0.0;
    for (double w : h.weights) s += w;
    CHECK(std::abs(s - 0.5 * M_PI) <= 1e-10 * M_PI);
    for (const Point& p : h.nodes) {
        CHECK(p.x1 > 0.0);
        CHECK(p.norm() < 1.0);
    }
}

TEST_CASE("focus grid resolves a small ball at the origin") {
    QuadratureGrid g = build_grid(DiskDomain::full(), 64, 128, Point{0, 0}, 1e-3);
    double s = 0.0, inside = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        s += g.weights[i];
        if (g.nodes[i].norm() < 0.01) inside += g.weights[i];
    }
    CHECK(std::abs(s - M_PI) <= 1e-10 * M_PI);
    CHECK(std::abs(inside - M_PI * 1e-4) <= 0.05 * M_PI * 1e-4);
}

TEST_CASE("focus grid transported off-center keeps the area") {
    QuadratureGrid g = build_grid(DiskDomain::full(), 64, 128, Point{0.5, 0.2}, 1e-3);
    double s = 0.0;
    for (double w : g.weights) s += w;
    CHECK(std::abs(s - M_PI) <= 1e-10 * M_PI);
    for (const Point& p : g.nodes) CHECK(p.norm() < 1.0);
}

TEST_CASE("grid preconditions") {
    CHECK_THROWS_AS(build_grid(DiskDomain::full(), 3, 64), config_error);
    CHECK_THROWS_AS(build_grid(DiskDomain::full(), 16, 6), config_error);
    CHECK_THROWS_AS(build_grid(DiskDomain::full(), 16, 33), config_error);
    CHECK_THROWS_AS(build_grid(DiskDomain::full(), 16, 32, Point{1.5, 0}), domain_error);
}

TEST_CASE("mobius maps the disk onto itself") {
    Point r = mobius({0.5, 0}, {0.5, 0});
    CHECK(r.norm() == Catch::Approx(0.0).margin(1e-15));
    Point id = mobius({0, 0}, {0.3, -0.4});
    CHECK(id.x1 == Catch::Approx(0.3));
    CHECK(id.x2 == Catch::Approx(-0.4));
    Point bnd = mobius({0.5, 0}, {1, 0});
    CHECK(bnd.x1 == Catch::Approx(1.0));
    CHECK(bnd.norm() == Catch::Approx(1.0).margin(1e-14));
    CHECK_THROWS_AS(mobius({1.0, 0}, {0, 0}), domain_error);
}

TEST_CASE("mobius inverse recovers the input") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(-0.6, 0.6);
    const Point a{0.37, -0.21};
    for (int t = 0; t < 1000; ++t) {
        Point z{ur(rng), ur(rng)};
        Point back = mobius_inverse(a, mobius(a, z));
        CHECK(dist(back, z) <= 1e-12);
    }
}

TEST_CASE("mediatrix of a horizontal pair is a vertical chord") {
    Mediatrix m = mediatrix_of({0.5, 0}, {0.7, 0}, DiskDomain::full());
    for (const Point& p : m.polyline) CHECK(std::abs(p.x1 - 0.6) <= 1e-12);
    CHECK(m.normal.x1 == Catch::Approx(1.0));
    CHECK(std::abs(m.polyline.front().norm() - 1.0) <= 1e-10);
    CHECK(std::abs(m.polyline.back().norm() - 1.0) <= 1e-10);
}

TEST_CASE("mediatrix of a symmetric vertical pair is the horizontal diameter") {
    Mediatrix m = mediatrix_of({0, 0.3}, {0, -0.3}, DiskDomain::full());
    for (const Point& p : m.polyline) CHECK(std::abs(p.x2) <= 1e-12);
}

TEST_CASE("mediatrix samples are equidistant from both points") {
    Mediatrix m = mediatrix_of({0.5, 0.1}, {0.6, 0.3}, DiskDomain::full());
    for (const Point& p : m.polyline)
        CHECK(std::abs(dist(p, m.a) - dist(p, m.b)) < 1e-12);
    CHECK_THROWS_AS(mediatrix_of({0.5, 0.1}, {0.5, 0.1}, DiskDomain::full()),
                    degenerate_input_error);
}

TEST_CASE("mediatrix clips to the half disk") {
    Mediatrix m = mediatrix_of({0.2, 0.3}, {0.4, 0.35}, DiskDomain::half());
    for (const Point& p : m.polyline) {
        CHECK(p.x1 >= -1e-12);
        CHECK(p.norm() <= 1.0 + 1e-12);
    }
    const Point e1 = m.polyline.front(), e2 = m.polyline.back();
    auto on_boundary = [](const Point& p) {
        return std::abs(p.norm() - 1.0) <= 1e-10 || std::abs(p.x1) <= 1e-10;
    };
    CHECK(on_boundary(e1));
    CHECK(on_boundary(e2));
}
