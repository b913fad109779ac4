// SPDX-License-Identifier: MIT
#include "mhjb/problem.hpp"

#include "mhjb/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mhjb {

void ProblemSpec::validate() const {
    if (!(discount > 0.0) || !std::isfinite(discount)) {
        throw ConfigError("discount must be a positive finite number");
    }
    if (domain.dimension() == 0 || domain.upper.size() != domain.lower.size()) {
        throw ConfigError("domain box must have matching non-empty lower/upper corners");
    }
    for (std::size_t axis = 0; axis < domain.dimension(); ++axis) {
        if (!(domain.lower[axis] < domain.upper[axis])) {
            std::ostringstream os;
            os << "domain lower corner must be below upper corner on axis " << axis;
            throw ConfigError(os.str());
        }
    }
    for (double c : {lip_g, bound_g, lip_f, bound_f}) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw ConfigError("Lipschitz and bound constants must be finite and non-negative");
        }
    }
    if (gamma_override && !(*gamma_override > 0.0 && *gamma_override < 1.0)) {
        throw ConfigError("gamma override must lie in (0,1)");
    }
    if (!dynamics || !cost) {
        throw ConfigError("problem needs both dynamics and cost");
    }
}

namespace {

double squared_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

ProblemSpec quadratic_example(bool zero_cost) {
    ProblemSpec spec;
    spec.name = zero_cost ? "zero_cost_2d" : "paper_example_2d";
    spec.domain = Box{{-1.0, -1.0}, {1.0, 1.0}};
    spec.discount = 1.0;
    spec.dynamics = [](std::span<const double> x, double a, std::span<double> v) {
        v[0] = -(a + 1.0) * x[0];
        v[1] = -(a + 1.0) * x[1];
    };
    spec.lip_g = 2.0;
    spec.bound_g = 2.0 * std::sqrt(2.0);
    if (zero_cost) {
        spec.cost = [](std::span<const double>, double) { return 0.0; };
        spec.top_level_value = [](std::span<const double>) { return 0.0; };
        return spec;
    }
    spec.cost = [](std::span<const double> x, double a) { return a * (0.25 - squared_norm(x)); };
    // |f(x,a)-f(y,b)| <= max|1/4-|x|^2| |a-b| + 2 max|x| |x-y| on the closed box.
    double max_radius_sq = 0.0;
    for (std::size_t axis = 0; axis < 2; ++axis) {
        max_radius_sq += std::max(spec.domain.lower[axis] * spec.domain.lower[axis],
                                  spec.domain.upper[axis] * spec.domain.upper[axis]);
    }
    spec.bound_f = std::max(0.25, max_radius_sq - 0.25);
    spec.lip_f = std::max(spec.bound_f, 2.0 * std::sqrt(max_radius_sq));
    // Along a == 1 the state is x e^{-2s}: int_0^inf (1/4 - |x|^2 e^{-4s}) e^{-s} ds.
    spec.top_level_value = [](std::span<const double> x) { return 0.25 - squared_norm(x) / 5.0; };
    return spec;
}

ProblemSpec toy_1d() {
    ProblemSpec spec;
    spec.name = "toy_1d";
    spec.domain = Box{{-1.0}, {1.0}};
    spec.discount = 1.0;
    spec.dynamics = [](std::span<const double> x, double a, std::span<double> v) {
        v[0] = -(1.0 + a) * x[0] + 0.2 * a;
    };
    spec.cost = [](std::span<const double> x, double a) { return x[0] * x[0] + a * (x[0] - 0.2); };
    spec.lip_g = 2.0;
    spec.bound_g = 2.2;
    spec.lip_f = 3.0;
    spec.bound_f = 1.8;
    // Along a == 1 the state is 1/10 + (x - 1/10) e^{-2s}.
    spec.top_level_value = [](std::span<const double> x) {
        const double d = x[0] - 0.1;
        return -0.09 + 0.4 * d + d * d / 5.0;
    };
    return spec;
}

}  // namespace

std::vector<std::string> builtin_ids() {
    return {"paper_example_2d", "zero_cost_2d", "toy_1d"};
}

ProblemSpec builtin(std::string_view id) {
    if (id == "paper_example_2d") return quadratic_example(false);
    if (id == "zero_cost_2d") return quadratic_example(true);
    if (id == "toy_1d") return toy_1d();
    throw RegistryError("unknown builtin problem '" + std::string(id) + "'");
}

double holder_exponent(const ProblemSpec& spec) {
    const double lambda = spec.discount;
    const double lg = spec.lip_g;
    const double scale = std::max(std::abs(lambda), std::abs(lg));
    if (std::abs(lambda - lg) <= 1e-12 * scale) {
        if (!spec.gamma_override) {
            throw ConfigError("discount equals L_g: a gamma override in (0,1) is required");
        }
        return *spec.gamma_override;
    }
    return lambda > lg ? 1.0 : lambda / lg;
}

ConstantEstimate estimate_constants(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed) {
    const std::size_t nu = spec.dimension();
    std::mt19937_64 rng(seed);
    std::vector<std::uniform_real_distribution<double>> axis_dist;
    for (std::size_t axis = 0; axis < nu; ++axis) {
        axis_dist.emplace_back(spec.domain.lower[axis], spec.domain.upper[axis]);
    }
    std::uniform_real_distribution<double> control_dist(0.0, 1.0);

    ConstantEstimate est;
    std::vector<double> x(nu), y(nu), gx(nu), gy(nu);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t axis = 0; axis < nu; ++axis) x[axis] = axis_dist[axis](rng);
        for (std::size_t axis = 0; axis < nu; ++axis) y[axis] = axis_dist[axis](rng);
        const double a = control_dist(rng);
        const double b = control_dist(rng);

        spec.dynamics(x, a, gx);
        spec.dynamics(y, b, gy);
        const double fx = spec.cost(x, a);
        const double fy = spec.cost(y, b);

        double dx = 0.0, dg = 0.0;
        for (std::size_t axis = 0; axis < nu; ++axis) {
            dx += (x[axis] - y[axis]) * (x[axis] - y[axis]);
            dg += (gx[axis] - gy[axis]) * (gx[axis] - gy[axis]);
        }
        const double gap = std::sqrt(dx) + std::abs(a - b);
        if (gap > 0.0) {
            est.lip_g = std::max(est.lip_g, std::sqrt(dg) / gap);
            est.lip_f = std::max(est.lip_f, std::abs(fx - fy) / gap);
        }
        est.bound_g = std::max({est.bound_g, std::sqrt(squared_norm(gx)), std::sqrt(squared_norm(gy))});
        est.bound_f = std::max({est.bound_f, std::abs(fx), std::abs(fy)});
    }

    auto check = [&](const char* label, double estimated, double declared) {
        if (estimated > declared * (1.0 + kConstantSlack) + 1e-300) {
            std::ostringstream os;
            os.precision(17);
            os << label << ": sampled " << estimated << " exceeds declared " << declared;
            est.violations.push_back(os.str());
        }
    };
    check("L_g", est.lip_g, spec.lip_g);
    check("M_g", est.bound_g, spec.bound_g);
    check("L_f", est.lip_f, spec.lip_f);
    check("M_f", est.bound_f, spec.bound_f);
    return est;
}

}  // namespace mhjb
