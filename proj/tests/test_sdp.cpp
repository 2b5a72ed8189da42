#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sslot/loss.hpp"
#include "sslot/sdp.hpp"

using namespace sslot;

namespace {

double pdf(double x, double m, double s) {
    const double z = (x - m) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
}

// E[f(D)] for D ~ N(m, s^2) by Simpson on m +- 9s.
template <typename F>
double expect(F f, double m, double s) {
    const int n = 6000;
    const double lo = m - 9.0 * s, h = 18.0 * s / n;
    double acc = f(lo) * pdf(lo, m, s) + f(lo + 18.0 * s) * pdf(lo + 18.0 * s, m, s);
    for (int i = 1; i < n; ++i) {
        const double x = lo + i * h;
        acc += (i % 2 ? 4.0 : 2.0) * f(x) * pdf(x, m, s);
    }
    return acc * h / 3.0;
}

// Expected holding and penalty cost of one period starting at y.
double period_cost(double y, double h, double b, double m, double s) {
    return expect([&](double d) { return h * std::max(y - d, 0.0) + b * std::max(d - y, 0.0); }, m,
                  s);
}

}  // namespace

TEST_CASE("worked example matches the published curve") {
    const auto sol = solve_sdp(worked_example());
    CHECK(sol.policy.order_up_to[0] == 70.0);
    CHECK(sol.policy.reorder_points[0] == 14.0);
    CHECK(scarf_g(sol, 1, 70.0) == doctest::Approx(262.5839).epsilon(0.5 / 262.58));
    CHECK(scarf_g(sol, 1, 70.0) + 100.0 == doctest::Approx(362.5839).epsilon(0.5 / 362.58));
    CHECK(sol.expected_cost == doctest::Approx(362.5839).epsilon(0.5 / 362.58));
    const std::pair<double, double> curve[] = {{0, 503.0985}, {14, 366.166}, {40, 322.664},
                                               {70, 262.5839}, {100, 309.1825}, {125, 332.6558},
                                               {150, 336.3615}, {200, 442.5128}};
    for (auto [y, g] : curve) {
        CAPTURE(y);
        CHECK(std::abs(scarf_g(sol, 1, y) - g) < 0.1);
    }
    // The indifference point lies between s_1 and s_1 + 1.
    CHECK(sol.indifference_points[0] >= 14.0);
    CHECK(sol.indifference_points[0] < 15.0);
}

TEST_CASE("single period against quadrature and the critical fractile") {
    CostParameters k{50.0, 0.0, 1.0, 9.0};
    const auto inst = make_instance(k, {100.0}, 0.2);
    const auto sol = solve_sdp(inst, 1.0, 4);
    for (double y : {60.0, 90.0, 117.0, 140.0}) {
        CAPTURE(y);
        CHECK(scarf_g(sol, 1, y) == doctest::Approx(period_cost(y, 1.0, 9.0, 100.0, 20.0)).epsilon(1e-7));
    }
    // Newsvendor: S = mean + sd * z(b / (b + h)) = 100 + 20 * 1.28155 = 125.6.
    CHECK(sol.policy.order_up_to[0] == doctest::Approx(126.0));
    const double S = sol.policy.order_up_to[0];
    const double threshold = 50.0 + scarf_g(sol, 1, S);
    const double s = sol.policy.reorder_points[0];
    CHECK(scarf_g(sol, 1, s) >= threshold);
    CHECK(scarf_g(sol, 1, s + 1.0) < threshold);
}

TEST_CASE("two periods against nested quadrature") {
    CostParameters k{60.0, 0.0, 1.0, 5.0};
    const auto inst = make_instance(k, {30.0, 50.0}, 0.2);
    const InventoryGrid grid{-200.0, 300.0, 0.25};
    const auto sol = solve_sdp(inst, grid);

    // Continuous second-stage value from the exact period cost.
    auto g2 = [&](double y) { return period_cost(y, 1.0, 5.0, 50.0, 10.0); };
    double S2 = 0.0, best = 1e300;
    for (double y = 20.0; y <= 80.0; y += 0.01) {
        if (g2(y) < best) best = g2(y), S2 = y;
    }
    auto c2 = [&](double x) { return x >= S2 ? g2(x) : std::min(g2(x), 60.0 + best); };
    for (double y : {0.0, 25.0, 45.0, 70.0, 100.0}) {
        CAPTURE(y);
        const double truth =
            period_cost(y, 1.0, 5.0, 30.0, 6.0) + expect([&](double d) { return c2(y - d); }, 30.0, 6.0);
        CHECK(std::abs(scarf_g(sol, 1, y) - truth) < 0.05);
    }
}

TEST_CASE("policy extraction rule on the computed tables") {
    const auto sol = solve_sdp(worked_example());
    for (int t = 1; t <= 4; ++t) {
        const auto &g = sol.g[t - 1];
        const int S = sol.grid.index_of(sol.policy.order_up_to[t - 1]);
        const int s = sol.grid.index_of(sol.policy.reorder_points[t - 1]);
        REQUIRE(S >= 0);
        REQUIRE(s >= 0);
        CHECK(g[S] == *std::min_element(g.begin(), g.end()));
        CHECK(g[s] >= 100.0 + g[S]);
        for (int i = s + 1; i <= S; ++i) CHECK(g[i] < 100.0 + g[S]);
    }
    CHECK(extract_policy(sol) == sol.policy);
}

TEST_CASE("K-convexity of the worked example and a counterexample") {
    const auto sol = solve_sdp(worked_example());
    for (int t = 0; t < 4; ++t) {
        CHECK(check_k_convexity(sol.g[t], sol.grid.step, 100.0).ok);
    }
    // Two separated dips: not K-convex for small K.
    std::vector<double> bumpy;
    for (int i = 0; i < 60; ++i) {
        const double x = i;
        bumpy.push_back(std::min(std::abs(x - 15.0), std::abs(x - 45.0) - 5.0) + 0.01 * x * x);
    }
    const auto bad = check_k_convexity(bumpy, 1.0, 0.5);
    CHECK_FALSE(bad.ok);
    CHECK(bad.violation > 0.0);
    CHECK(check_k_convexity(bumpy, 1.0, 1000.0).ok);
}

TEST_CASE("grid validation and boundary errors") {
    const auto inst = worked_example();
    CHECK_THROWS_AS(solve_sdp(inst, InventoryGrid{0.0, 10.0, 3.0}), ValidationError);
    CHECK_THROWS_AS(solve_sdp(inst, InventoryGrid{10.0, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(solve_sdp(inst, InventoryGrid{-100.5, 300.5, 1.0}), ValidationError);
    CHECK_THROWS_AS(solve_sdp(inst, InventoryGrid{-160.0, 320.0, 1.0}, 0.5), ValidationError);
    // Upper bound inside the optimal order-up-to region.
    CHECK_THROWS_AS(solve_sdp(inst, InventoryGrid{-160.0, 60.0, 1.0}), GridBoundError);
    auto stocked = inst;
    stocked.initial_inventory = 30.0;
    try {
        solve_sdp(stocked, InventoryGrid{20.0, 320.0, 1.0});
        FAIL("expected GridBoundError");
    } catch (const GridBoundError &e) {
        CHECK(e.lower_bound());
    }
}

TEST_CASE("grid extension recovers a reorder point far below zero") {
    // Ordering pays only after K / b = 80 units of backlog.
    CostParameters k{400.0, 0.0, 1.0, 5.0};
    auto inst = make_instance(k, {10.0, 10.0}, 0.1);
    const auto sol = solve_sdp(inst, 1.0, 4);
    CHECK(sol.policy.reorder_points[1] < -50.0);
    CHECK(sol.grid.lower < sol.policy.reorder_points[1]);
}

TEST_CASE("default grid holds the initial inventory") {
    auto inst = worked_example();
    inst.initial_inventory = 12.3;
    const auto g = default_grid(inst, 0.5);
    CHECK(g.index_of(12.3) >= 0);
    CHECK(g.lower <= -160.0);
    CHECK(g.upper >= 320.0);
}

TEST_CASE("G table CSV") {
    std::filesystem::create_directories(SSLOT_TMP_DIR);
    const auto path = std::filesystem::path(SSLOT_TMP_DIR) / "g.csv";
    const auto sol = solve_sdp(worked_example());
    write_g_csv(sol, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,y,G");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4 * sol.grid.size());
}
