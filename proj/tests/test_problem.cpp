// SPDX-License-Identifier: MIT
#include "mhjb/error.hpp"
#include "mhjb/problem.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mhjb;

namespace {

// Composite Simpson for int_0^L f(s) ds.
template <typename F>
double simpson(F f, double length, int panels) {
    const double dx = length / panels;
    double s = f(0.0) + f(length);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * dx);
    return s * dx / 3.0;
}

}  // namespace

TEST_CASE("builtin quadratic example evaluates g and f") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const std::vector<double> x{0.5, 0.5};
    std::vector<double> v(2);
    spec.dynamics(x, 1.0, v);
    CHECK(v[0] == -1.0);
    CHECK(v[1] == -1.0);
    CHECK(spec.cost(x, 1.0) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(spec.discount == 1.0);
    CHECK(spec.lip_g == 2.0);
    CHECK(spec.bound_g == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(spec.bound_f == 1.75);
    CHECK(spec.domain.lower == std::vector<double>{-1.0, -1.0});
    CHECK(spec.domain.upper == std::vector<double>{1.0, 1.0});
}

TEST_CASE("cost vanishes at a = 0 and is affine in a") {
    const ProblemSpec spec = builtin("paper_example_2d");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ua(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const std::vector<double> x{u(rng), u(rng)};
        const double a = ua(rng);
        CHECK(spec.cost(x, 0.0) == 0.0);
        CHECK(spec.cost(x, a) == a * spec.cost(x, 1.0));
    }
}

TEST_CASE("unknown builtin id raises a registry error") {
    CHECK_THROWS_AS(builtin("no_such_problem"), RegistryError);
    for (const auto& id : builtin_ids()) CHECK_NOTHROW(builtin(id).validate());
}

TEST_CASE("top-level slice matches quadrature along the a = 1 flow") {
    // With a == 1 the state decays as x e^{-2s}; integrate f along it.
    const ProblemSpec spec = builtin("paper_example_2d");
    for (const std::vector<double>& x : {std::vector<double>{0.5, 0.5}, {0.0, 0.0}, {-0.9, 0.3}, {0.7, -0.2}}) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double quad =
            simpson([&](double s) { return (0.25 - r2 * std::exp(-4.0 * s)) * std::exp(-s); }, 60.0, 60000);
        CHECK(spec.top_level_value(x) == doctest::Approx(quad).epsilon(1e-10));
    }
    CHECK(spec.top_level_value(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("toy problem slice matches quadrature along its a = 1 flow") {
    // g(x,1) = -2x + 0.2, so x(s) = 0.1 + (x0 - 0.1) e^{-2s}; f(x,1) = x^2 + x - 0.2.
    const ProblemSpec spec = builtin("toy_1d");
    REQUIRE(spec.top_level_value);
    for (double x0 : {-0.6, 0.0, 0.1, 0.45}) {
        const double quad = simpson(
            [&](double s) {
                const double x = 0.1 + (x0 - 0.1) * std::exp(-2.0 * s);
                return (x * x + x - 0.2) * std::exp(-s);
            },
            60.0, 60000);
        CHECK(spec.top_level_value(std::vector<double>{x0}) == doctest::Approx(quad).epsilon(1e-10));
    }
}

TEST_CASE("holder exponent branches") {
    ProblemSpec spec = builtin("paper_example_2d");
    spec.discount = 2.0;
    spec.lip_g = 1.0;
    CHECK(holder_exponent(spec) == 1.0);
    spec.discount = 1.0;
    spec.lip_g = 2.0;
    CHECK(holder_exponent(spec) == 0.5);
    spec.lip_g = 1.0;
    CHECK_THROWS_AS(holder_exponent(spec), ConfigError);
    spec.gamma_override = 0.3;
    CHECK(holder_exponent(spec) == 0.3);
}

TEST_CASE("holder exponent depends only on the ratio") {
    ProblemSpec spec = builtin("paper_example_2d");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int t = 0; t < 200; ++t) {
        spec.discount = u(rng);
        spec.lip_g = u(rng);
        const double g1 = holder_exponent(spec);
        spec.discount *= 2.0;
        spec.lip_g *= 2.0;
        CHECK(holder_exponent(spec) == doctest::Approx(g1).epsilon(1e-15));
    }
}

TEST_CASE("estimated constants stay below the declared ones") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const ConstantEstimate est = estimate_constants(spec, 10000);
    CHECK(est.ok());
    CHECK(est.bound_f <= 1.75);
    CHECK(est.lip_g <= 2.0 + std::sqrt(2.0));
    CHECK(est.bound_g <= 2.0 * std::sqrt(2.0) * (1.0 + kConstantSlack));
    CHECK(est.bound_f > 1.0);  // corners reach 1.75; random samples get close
    const ConstantEstimate toy = estimate_constants(builtin("toy_1d"), 10000);
    CHECK(toy.ok());
}

TEST_CASE("constant dynamics estimate zero Lipschitz constant") {
    ProblemSpec spec = builtin("paper_example_2d");
    spec.dynamics = [](std::span<const double>, double, std::span<double> v) {
        v[0] = 0.3;
        v[1] = -1.2;
    };
    const ConstantEstimate est = estimate_constants(spec, 2000);
    CHECK(est.lip_g == 0.0);
}

TEST_CASE("understated constants are flagged") {
    ProblemSpec spec = builtin("paper_example_2d");
    spec.bound_f = 0.5;
    spec.lip_g = 0.1;
    const ConstantEstimate est = estimate_constants(spec, 5000);
    CHECK_FALSE(est.ok());
    CHECK(est.violations.size() >= 2);
}

TEST_CASE("estimates grow monotonically with the sample count") {
    const ProblemSpec spec = builtin("paper_example_2d");
    ConstantEstimate prev = estimate_constants(spec, 10);
    for (std::size_t n : {100u, 1000u, 5000u}) {
        const ConstantEstimate next = estimate_constants(spec, n);
        CHECK(next.lip_g >= prev.lip_g);
        CHECK(next.bound_g >= prev.bound_g);
        CHECK(next.lip_f >= prev.lip_f);
        CHECK(next.bound_f >= prev.bound_f);
        prev = next;
    }
}

TEST_CASE("validation rejects malformed problems") {
    ProblemSpec spec = builtin("paper_example_2d");
    spec.discount = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = builtin("paper_example_2d");
    spec.domain.upper[1] = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = builtin("paper_example_2d");
    spec.lip_f = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}
