// SPDX-License-Identifier: MIT
#include "mhjb/bellman.hpp"
#include "mhjb/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mhjb;

namespace {

struct Instance {
    ProblemSpec spec;
    Triangulation tri;
    ControlGrid grid;
    double h;
};

Instance make(const char* id, double k, double h) {
    ProblemSpec spec = builtin(id);
    Triangulation tri = build_uniform(spec.domain, k);
    return {std::move(spec), std::move(tri), control_grid(h), h};
}

// Minimum over b of the on-the-fly single-control update: an operator
// built from the one-shot helper rather than the precomputed stencils.
GridFunction slow_apply(const Instance& in, const GridFunction& w, PolicyField& policy) {
    GridFunction out(in.tri, in.grid);
    policy = PolicyField(in.tri.vertex_count(), in.grid.level_count());
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < in.grid.level_count(); ++a) {
            double best = 0.0;
            for (std::size_t b = a; b < in.grid.level_count(); ++b) {
                const double v = apply_fixed_control(w, in.spec, in.tri, in.grid, in.h, i, a, b);
                if (b == a || v < best) {
                    best = v;
                    policy.at(i, a) = static_cast<std::uint32_t>(b);
                }
            }
            out.at(i, a) = best;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("fixed-control update on the zero function is the running cost") {
    const Instance in = make("paper_example_2d", 0.5, 0.5);
    const GridFunction zero(in.tri, in.grid);
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < in.grid.level_count(); ++a) {
            const double hf = in.h * in.spec.cost(in.tri.vertex(i), in.grid.level(a));
            for (std::size_t b = a; b < in.grid.level_count(); ++b) {
                CHECK(apply_fixed_control(zero, in.spec, in.tri, in.grid, in.h, i, a, b) == hf);
            }
        }
    }
}

TEST_CASE("node (0.5, 0.5) at a = b = 1 maps to the origin and costs -0.125") {
    const Instance in = make("paper_example_2d", 0.5, 0.5);
    const std::size_t node = 8;  // last vertex, (0.5, 0.5)
    REQUIRE(in.tri.vertex(node)[0] == 0.5);
    REQUIRE(in.tri.vertex(node)[1] == 0.5);
    const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
    const auto verts = op.stencil_vertices(node, 2);
    const auto weights = op.stencil_weights(node, 2);
    double x = 0.0, y = 0.0;
    for (std::size_t j = 0; j < verts.size(); ++j) {
        x += weights[j] * in.tri.vertex(verts[j])[0];
        y += weights[j] * in.tri.vertex(verts[j])[1];
    }
    CHECK(x == 0.0);
    CHECK(y == 0.0);
    const GridFunction zero(in.tri, in.grid);
    CHECK(apply_fixed_control(zero, in.spec, in.tri, in.grid, in.h, node, 2, 2) == -0.125);
    CHECK(op.apply_fixed_control(zero, node, 2, 2) == -0.125);
}

TEST_CASE("fixed-control update on a constant") {
    const Instance in = make("paper_example_2d", 0.2, 0.1);
    const GridFunction c(in.tri, in.grid, 3.0);
    const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
    for (std::size_t i = 0; i < in.tri.vertex_count(); i += 7) {
        for (std::size_t a = 0; a < in.grid.level_count(); ++a) {
            const double expected = 0.9 * 3.0 + 0.1 * in.spec.cost(in.tri.vertex(i), in.grid.level(a));
            CHECK(op.apply_fixed_control(c, i, a, in.grid.top()) == doctest::Approx(expected).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(apply_fixed_control(c, in.spec, in.tri, in.grid, in.h, 0, 3, 2), ConfigError);
}

TEST_CASE("operator rejects non-contractive or mismatched steps") {
    const ProblemSpec spec = builtin("paper_example_2d");
    const Triangulation tri = build_uniform(spec.domain, 0.5);
    CHECK_THROWS_AS(BellmanOperator(spec, tri, control_grid(1.0), 1.0), ConfigError);
    CHECK_THROWS_AS(BellmanOperator(spec, tri, control_grid(0.25), 0.5), ConfigError);
    ProblemSpec fast = spec;
    fast.discount = 3.0;
    CHECK_THROWS_AS(BellmanOperator(fast, tri, control_grid(0.5), 0.5), ConfigError);
}

TEST_CASE("image outside omega_k names the node and the control") {
    ProblemSpec spec = builtin("paper_example_2d");
    spec.dynamics = [](std::span<const double>, double, std::span<double> v) {
        v[0] = 1.0;
        v[1] = 0.0;
    };
    const Triangulation tri = build_uniform(spec.domain, 0.5);
    try {
        BellmanOperator op(spec, tri, control_grid(0.5), 0.5);
        FAIL("expected OutOfDomainError");
    } catch (const OutOfDomainError& e) {
        const std::string what = e.what();
        CHECK(what.find("node") != std::string::npos);
        CHECK(what.find("a = ") != std::string::npos);
    }
    BellmanOptions clamp;
    clamp.clamp = true;
    CHECK_NOTHROW(BellmanOperator(spec, tri, control_grid(0.5), 0.5, clamp));
}

TEST_CASE("apply on zero: values h f and smallest-b policy") {
    const Instance in = make("paper_example_2d", 0.2, 0.2);
    const auto [out, policy] = apply(GridFunction(in.tri, in.grid), in.spec, in.tri, in.grid, in.h);
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < in.grid.level_count(); ++a) {
            CHECK(out.at(i, a) == in.h * in.spec.cost(in.tri.vertex(i), in.grid.level(a)));
            CHECK(policy.at(i, a) == a);
        }
    }
    CHECK(policy.admissible());
}

TEST_CASE("stencil sweep equals the on-the-fly operator bit for bit") {
    for (const char* id : {"paper_example_2d", "toy_1d"}) {
        CAPTURE(id);
        const Instance in = std::string(id) == "toy_1d" ? make(id, 0.2, 0.1) : make(id, 0.2, 0.2);
        std::mt19937_64 rng(1);
        const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
        for (int t = 0; t < 10; ++t) {
            const GridFunction w = test::random_grid_function(in.tri.vertex_count(), in.grid.level_count(), rng);
            GridFunction fast(in.tri, in.grid);
            PolicyField pf, ps;
            pf = PolicyField(in.tri.vertex_count(), in.grid.level_count());
            op.apply(w, fast, &pf);
            const GridFunction slow = slow_apply(in, w, ps);
            CHECK(fast == slow);
            CHECK(pf == ps);
        }
    }
}

TEST_CASE("the top level only sees b = 1") {
    const Instance in = make("paper_example_2d", 0.2, 0.2);
    std::mt19937_64 rng(4);
    const GridFunction w = test::random_grid_function(in.tri.vertex_count(), in.grid.level_count(), rng);
    const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
    GridFunction out(in.tri, in.grid);
    PolicyField pol(in.tri.vertex_count(), in.grid.level_count());
    op.apply(w, out, &pol);
    const std::size_t top = in.grid.top();
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        CHECK(out.at(i, top) == op.apply_fixed_control(w, i, top, top));
        CHECK(pol.at(i, top) == top);
    }
}

TEST_CASE("constant inputs differ by exactly (1 - lambda h)|c - c'|") {
    const Instance in = make("paper_example_2d", 0.1, 0.1);
    const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
    GridFunction o1(in.tri, in.grid), o2(in.tri, in.grid);
    op.apply(GridFunction(in.tri, in.grid, 2.0), o1);
    op.apply(GridFunction(in.tri, in.grid, -1.0), o2);
    CHECK(sup_norm_diff(o1, o2) == doctest::Approx(0.9 * 3.0).epsilon(1e-14));
}

TEST_CASE("contraction, monotonicity and constant shift on random inputs") {
    const Instance in = make("paper_example_2d", 0.1, 0.1);
    const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> bump(0.0, 0.5);
    GridFunction a(in.tri, in.grid), b(in.tri, in.grid);
    for (int t = 0; t < 30; ++t) {
        const GridFunction w = test::random_grid_function(in.tri.vertex_count(), in.grid.level_count(), rng);
        const GridFunction v = test::random_grid_function(in.tri.vertex_count(), in.grid.level_count(), rng);
        op.apply(w, a);
        op.apply(v, b);
        CHECK(sup_norm_diff(a, b) <= op.contraction() * sup_norm_diff(w, v) + 1e-12);

        GridFunction up = w;
        for (double& x : up.values()) x += bump(rng);
        op.apply(up, b);
        for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(a.values()[i] <= b.values()[i]);

        // Shift by a dyadic constant so both sides round identically.
        GridFunction shifted = w;
        for (double& x : shifted.values()) x += 0.25;
        op.apply(shifted, b);
        for (std::size_t i = 0; i < a.values().size(); ++i) {
            CHECK(b.values()[i] == doctest::Approx(a.values()[i] + 0.9 * 0.25).epsilon(1e-14).scale(1.0));
        }
    }
}

TEST_CASE("greedy policy on level-monotone inputs with zero cost") {
    const Instance in = make("zero_cost_2d", 0.2, 0.2);
    GridFunction inc(in.tri, in.grid), dec(in.tri, in.grid);
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < in.grid.level_count(); ++a) {
            inc.at(i, a) = static_cast<double>(a);
            dec.at(i, a) = -static_cast<double>(a);
        }
    }
    const PolicyField pz = greedy_policy(GridFunction(in.tri, in.grid), in.spec, in.tri, in.grid, in.h);
    const PolicyField pi = greedy_policy(inc, in.spec, in.tri, in.grid, in.h);
    const PolicyField pd = greedy_policy(dec, in.spec, in.tri, in.grid, in.h);
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        for (std::size_t a = 0; a < in.grid.level_count(); ++a) {
            CHECK(pz.at(i, a) == a);
            CHECK(pi.at(i, a) == a);
            CHECK(pd.at(i, a) == in.grid.top());
        }
    }
}

TEST_CASE("min over a smaller admissible set is never lower") {
    const Instance in = make("paper_example_2d", 0.2, 0.2);
    const BellmanOperator op(in.spec, in.tri, in.grid, in.h);
    std::mt19937_64 rng(8);
    const GridFunction w = test::random_grid_function(in.tri.vertex_count(), in.grid.level_count(), rng);
    for (std::size_t i = 0; i < in.tri.vertex_count(); ++i) {
        // Freeze the (x, a) terms at a = 0 and shrink the b-range.
        double prev = -1e300;
        for (std::size_t lo = 0; lo < in.grid.level_count(); ++lo) {
            double best = 1e300;
            for (std::size_t b = lo; b < in.grid.level_count(); ++b) best = std::min(best, op.apply_fixed_control(w, i, 0, b));
            CHECK(best >= prev);
            prev = best;
        }
    }
}

TEST_CASE("apply is independent of the worker count") {
    const Instance in = make("paper_example_2d", 0.05, 0.05);
    std::mt19937_64 rng(21);
    const GridFunction w = test::random_grid_function(in.tri.vertex_count(), in.grid.level_count(), rng);
    BellmanOperator op(in.spec, in.tri, in.grid, in.h, {false, 1});
    GridFunction one(in.tri, in.grid), many(in.tri, in.grid);
    op.apply(w, one);
    for (std::size_t workers : {2u, 3u, 4u, 7u}) {
        op.set_workers(workers);
        op.apply(w, many);
        CHECK(one == many);
    }
}

TEST_CASE("policy field admissibility") {
    PolicyField p(3, 4);
    CHECK(p.admissible());
    p.at(1, 2) = 1;
    CHECK_FALSE(p.admissible());
}
