#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmsim/errors.hpp"
#include "pmsim/qcore.hpp"

#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace pmsim;
using qcore::SpatialAmplitude;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("linear polarization amplitudes and expectation") {
    const auto s = qcore::make_linear_polarization(kPi / 4.0);
    CHECK(std::abs(s.amp_h - std::numbers::sqrt2 / 2.0) <= 1e-15);
    CHECK(std::abs(s.amp_v - std::numbers::sqrt2 / 2.0) <= 1e-15);

    // reference values quoted to three decimals
    CHECK(std::abs(qcore::expectation_p(qcore::make_linear_polarization(17.0 * kPi / 60.0)) -
                   (-0.208)) <= 5e-4);
    CHECK(std::abs(qcore::expectation_p(qcore::make_linear_polarization(kPi / 4.0))) <= 5e-4);
    CHECK(std::abs(qcore::expectation_p(qcore::make_linear_polarization(kPi / 8.0)) - 0.707) <= 5e-4);

    const auto h = qcore::make_linear_polarization(0.0);
    CHECK(h.amp_h == 1.0);
    CHECK(h.amp_v == 0.0);
    CHECK(qcore::expectation_p(h) == 1.0);

    CHECK_THROWS_AS(qcore::make_linear_polarization(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(qcore::make_linear_polarization(std::nan("")), std::invalid_argument);
}

TEST_CASE("polarization norm and expectation identities") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-8.0, 8.0);
    for (int i = 0; i < 200; ++i) {
        const double theta = dist(rng);
        const auto s = qcore::make_linear_polarization(theta);
        CHECK(std::abs(s.amp_h * s.amp_h + s.amp_v * s.amp_v - 1.0) <= 1e-12);
        CHECK(std::abs(qcore::expectation_p(s) - std::cos(2.0 * theta)) <= 1e-12);
    }
}

TEST_CASE("gaussian pointer has unit norm and the advertised peak") {
    const auto f = SpatialAmplitude::gaussian(4.1);
    CHECK(std::abs(f.squared_norm() - 1.0) <= 1e-12);
    CHECK(std::abs(f.value_at(0.0) - 0.311934280290) <= 1e-10);

    // quadrature agrees with the closed-form norm
    const double quad = oracle::simpson([&](double x) { return f.value_at(x) * f.value_at(x); },
                                        -40.0, 40.0, 2000);
    CHECK(std::abs(quad - 1.0) <= 1e-9);

    CHECK_THROWS_AS(SpatialAmplitude::gaussian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialAmplitude::gaussian(-1.0), std::invalid_argument);
}

TEST_CASE("gaussian overlap closed form") {
    CHECK(qcore::gaussian_overlap(2.0, 3.0, 3.0) == 1.0);
    CHECK(std::abs(qcore::gaussian_overlap(2.0, 1.5, 0.0) - 0.932102492360) <= 1e-12);

    // independent quadrature of the product of two shifted pointers
    const auto fa = SpatialAmplitude::gaussian(2.0, 1.5);
    const auto fb = SpatialAmplitude::gaussian(2.0, 0.0);
    const double quad = oracle::simpson(
        [&](double x) { return fa.value_at(x) * fb.value_at(x); }, -30.0, 30.0, 4000);
    CHECK(std::abs(quad - 0.932102492360) <= 1e-9);
}

TEST_CASE("component canonicalization sorts, merges and prunes") {
    const SpatialAmplitude a(1.0, {{0.5, 2.0}, {0.25, -1.0}, {0.5, 2.0 + 1e-12}});
    REQUIRE(a.components().size() == 2);
    CHECK(a.components()[0].center == -1.0);
    CHECK(a.components()[1].center == 2.0);
    CHECK(std::abs(a.components()[1].weight - 1.0) <= 1e-15);

    // exact cancellation vanishes
    const SpatialAmplitude zero(1.0, {{0.5, 0.0}, {-0.5, 0.0}});
    CHECK(zero.components().empty());
    CHECK(zero.squared_norm() == 0.0);
    CHECK(zero.value_at(0.3) == 0.0);

    CHECK_THROWS_AS(SpatialAmplitude(1.0, {{std::nan(""), 0.0}}), std::invalid_argument);
}

TEST_CASE("translate, scale, superpose algebra") {
    const auto f = SpatialAmplitude::gaussian(2.0);
    const auto g = f.translated(3.0);
    CHECK(g.components().front().center == 3.0);
    CHECK(std::abs(g.squared_norm() - 1.0) <= 1e-15);

    const auto h = f.scaled(-0.5);
    CHECK(h.components().front().weight == -0.5);
    CHECK(std::abs(h.squared_norm() - 0.25) <= 1e-15);

    const auto s = SpatialAmplitude::superpose(f, g);
    CHECK(s.components().size() == 2);
    const double expect = 2.0 + 2.0 * qcore::gaussian_overlap(2.0, 0.0, 3.0);
    CHECK(std::abs(s.squared_norm() - expect) <= 1e-13);

    const auto other_width = SpatialAmplitude::gaussian(1.0);
    CHECK_THROWS_AS(SpatialAmplitude::superpose(f, other_width), std::invalid_argument);
    CHECK_THROWS_AS(f.overlap_with(other_width), std::invalid_argument);
}

TEST_CASE("multi-component norms match quadrature") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> wdist(-1.0, 1.0);
    std::uniform_real_distribution<double> cdist(-6.0, 6.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<qcore::GaussianComponent> comps;
        const int m = 2 + int(rng() % 6);
        for (int j = 0; j < m; ++j) comps.push_back({wdist(rng), cdist(rng)});
        const SpatialAmplitude a(1.7, comps);
        const double closed = a.squared_norm();
        const double quad = oracle::simpson(
            [&](double x) { return a.value_at(x) * a.value_at(x); }, -25.0, 25.0, 4000);
        CHECK(std::abs(closed - quad) <= 1e-9 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("density terms sum to the squared norm") {
    const SpatialAmplitude a(2.0, {{0.8, 0.0}, {-0.3, 1.0}, {0.4, 5.0}});
    const auto terms = qcore::density_terms(a);
    double total = 0.0;
    for (const auto& t : terms) total += t.weight;
    CHECK(std::abs(total - a.squared_norm()) <= 1e-13);

    const auto single = qcore::density_terms(SpatialAmplitude::gaussian(2.0, 4.0));
    REQUIRE(single.size() == 1);
    CHECK(single[0].weight == 1.0);
    CHECK(single[0].mean == 4.0);
}

TEST_CASE("mirror and scale invariances of the overlap algebra") {
    const SpatialAmplitude a(1.3, {{0.6, -2.0}, {0.7, 0.5}, {-0.2, 3.0}});
    std::vector<qcore::GaussianComponent> mirrored;
    for (const auto& c : a.components()) mirrored.push_back({c.weight, -c.center});
    const SpatialAmplitude b(1.3, mirrored);
    CHECK(std::abs(a.squared_norm() - b.squared_norm()) <= 1e-15);

    for (double lambda : {0.25, 3.0, 11.0}) {
        std::vector<qcore::GaussianComponent> scaled;
        for (const auto& c : a.components()) scaled.push_back({c.weight, lambda * c.center});
        const SpatialAmplitude c(1.3 * lambda, scaled);
        CHECK(std::abs(a.squared_norm() - c.squared_norm()) <= 1e-13);
    }
}

TEST_CASE("rasterize matches value_at and integrates to one") {
    const SpatialAmplitude a(2.0, {{0.7, -1.0}, {0.5, 4.0}});
    const qcore::Grid grid{-20.0, 0.04, 1101}; // spans [-20, 24]
    const auto vals = qcore::rasterize(a, grid);
    REQUIRE(vals.size() == grid.n);
    for (std::size_t i = 0; i < grid.n; i += 97)
        CHECK(std::abs(vals[i] - a.value_at(grid.x(i))) <= 1e-12);

    const auto f = SpatialAmplitude::gaussian(2.0);
    const qcore::Grid fine{-16.0, 2.0 / 50.0, 801};
    const auto fv = qcore::rasterize(f, fine);
    double mass = 0.0;
    for (double v : fv) mass += v * v * fine.step;
    CHECK(std::abs(mass - 1.0) <= 1e-8);
}

TEST_CASE("rasterize rejects grids that clip the state") {
    const auto f = SpatialAmplitude::gaussian(2.0, 0.0);
    CHECK_THROWS_AS(qcore::rasterize(f, qcore::Grid{-5.0, 0.1, 101}), domain_coverage_error);
    CHECK_THROWS_AS(qcore::rasterize(f, qcore::Grid{-20.0, 0.1, 101}), domain_coverage_error);
    CHECK_THROWS_AS(qcore::rasterize(f, qcore::Grid{-20.0, 0.0, 100}), std::invalid_argument);
    CHECK_THROWS_AS(qcore::rasterize(f, qcore::Grid{-20.0, 0.1, 1}), std::invalid_argument);

    // empty amplitude needs no coverage
    const SpatialAmplitude zero(2.0, {});
    const auto vals = qcore::rasterize(zero, qcore::Grid{0.0, 1.0, 4});
    for (double v : vals) CHECK(v == 0.0);
}

TEST_CASE("binomial-mixture rasterization equals term-by-term evaluation") {
    // two-cycle protected profile built by hand
    const double sigma = 4.1, g = 1.66;
    const double c2 = 0.396, s2 = 1.0 - 0.396;
    const SpatialAmplitude phi(sigma, {{s2 * s2, 0.0}, {2.0 * c2 * s2, g}, {c2 * c2, 2.0 * g}});
    const qcore::Grid grid{-30.0, 0.2, 321};
    const auto vals = qcore::rasterize(phi, grid);
    const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
    for (std::size_t i = 0; i < grid.n; i += 13) {
        const double x = grid.x(i);
        double direct = 0.0;
        for (const auto& [w, c] : std::vector<std::pair<double, double>>{
                 {s2 * s2, 0.0}, {2.0 * c2 * s2, g}, {c2 * c2, 2.0 * g}})
            direct += w * norm * std::exp(-(x - c) * (x - c) / (4.0 * sigma * sigma));
        CHECK(std::abs(vals[i] - direct) <= 1e-12);
    }
}
