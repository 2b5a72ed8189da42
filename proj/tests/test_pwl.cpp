#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sslot/core.hpp"
#include "sslot/pwl.hpp"

using namespace sslot;

namespace {

// Random convex function given by breakpoints and increasing slopes, with
// its own evaluator.
struct Shape {
    std::vector<double> xs, vs, slopes;  // slopes.size() == xs.size() + 1

    double operator()(double x) const {
        if (x <= xs.front()) return vs.front() + slopes.front() * (x - xs.front());
        for (std::size_t k = 1; k < xs.size(); ++k) {
            if (x <= xs[k]) return vs[k - 1] + slopes[k] * (x - xs[k - 1]);
        }
        return vs.back() + slopes.back() * (x - xs.back());
    }

    ConvexPwl pwl() const {
        return ConvexPwl::interpolate(xs, vs, slopes.front(), slopes.back());
    }
};

Shape random_shape(std::mt19937 &rng) {
    std::uniform_real_distribution<double> u(-6.0, 6.0), d(0.0, 1.5);
    Shape s;
    for (int i = 0; i < 5; ++i) s.xs.push_back(u(rng));
    std::sort(s.xs.begin(), s.xs.end());
    double slope = -3.0 + d(rng);
    s.slopes.push_back(slope);
    s.vs.push_back(u(rng));
    for (std::size_t k = 1; k < s.xs.size(); ++k) {
        slope += d(rng);
        s.slopes.push_back(slope);
        s.vs.push_back(s.vs.back() + slope * (s.xs[k] - s.xs[k - 1]));
    }
    s.slopes.push_back(slope + d(rng));
    return s;
}

}  // namespace

TEST_CASE("interpolation and evaluation") {
    auto f = ConvexPwl::interpolate({0.0, 1.0, 3.0}, {2.0, 1.0, 1.0}, -2.0, 1.0);
    CHECK(f(-1.0) == doctest::Approx(4.0));
    CHECK(f(0.5) == doctest::Approx(1.5));
    CHECK(f(2.0) == doctest::Approx(1.0));
    CHECK(f(5.0) == doctest::Approx(3.0));
    const auto m = f.minimum();
    CHECK(m.x == doctest::Approx(1.0));
    CHECK(m.value == doctest::Approx(1.0));
}

TEST_CASE("restriction gives infinity outside and moves the minimum") {
    auto f = ConvexPwl::interpolate({0.0}, {0.0}, -1.0, 1.0).restricted(2.0, 5.0);
    CHECK(std::isinf(f(1.0)));
    CHECK(f(3.0) == doctest::Approx(3.0));
    CHECK(f.minimum().x == doctest::Approx(2.0));
    CHECK(f.lower() == 2.0);
    CHECK(f.upper() == 5.0);
}

TEST_CASE("unbounded minimum throws") {
    CHECK_THROWS_AS(ConvexPwl::linear(1.0, 0.0).minimum(), SolverError);
    CHECK_NOTHROW(ConvexPwl::linear(1.0, 0.0).restricted(0.0, 1.0).minimum());
}

TEST_CASE("sum, shift, scale and suffix minimum against direct evaluation") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_shape(rng);
        const auto b = random_shape(rng);
        const auto fa = a.pwl();
        const auto fb = b.pwl();
        auto sum = fa;
        sum += fb.shifted(1.5);
        auto scaled = fa;
        scaled.scale(2.5).add_linear(0.3, -1.0);
        const auto tail = fa.restricted(-10.0, 10.0).suffix_min();
        for (int i = 0; i <= 100; ++i) {
            const double x = -8.0 + 0.16 * i;
            CHECK(sum(x) == doctest::Approx(a(x) + b(x - 1.5)).epsilon(1e-9));
            CHECK(scaled(x) == doctest::Approx(2.5 * a(x) + 0.3 * x - 1.0).epsilon(1e-9));
            // A convex piecewise-linear minimum sits at an end or a kink.
            double direct = std::min(a(x), a(10.0));
            for (double z : a.xs) {
                if (z >= x && z <= 10.0) direct = std::min(direct, a(z));
            }
            CHECK(tail(x) == doctest::Approx(direct).epsilon(1e-9));
        }
    }
}

TEST_CASE("sublevel set") {
    auto f = ConvexPwl::interpolate({0.0}, {0.0}, -2.0, 1.0);
    const auto iv = f.sublevel(4.0);
    REQUIRE(iv);
    CHECK(iv->first == doctest::Approx(-2.0));
    CHECK(iv->second == doctest::Approx(4.0));
    CHECK_FALSE(f.sublevel(-0.5));
    const auto r = f.restricted(-1.0, 10.0).sublevel(1.0);
    REQUIRE(r);
    CHECK(r->first == doctest::Approx(-0.5));
    CHECK(r->second == doctest::Approx(1.0));
}
