// SPDX-License-Identifier: MIT
#include "mhjb/mesh.hpp"

#include "mhjb/error.hpp"
#include "mhjb/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mhjb {

namespace {

std::size_t factorial(std::size_t n) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

// Rank of `perm` among the permutations of 0..n-1 in lexicographic order.
std::size_t permutation_rank(std::span<const std::size_t> perm) {
    const std::size_t n = perm.size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller = 0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (perm[j] < perm[i]) ++smaller;
        }
        rank += smaller * factorial(n - 1 - i);
    }
    return rank;
}

// Determinant by Gaussian elimination with partial pivoting; `m` is n x n
// row-major and is destroyed.
double determinant(std::vector<double> m, std::size_t n) {
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
        }
        if (m[pivot * n + col] == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
            det = -det;
        }
        const double diag = m[col * n + col];
        det *= diag;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = m[r * n + col] / diag;
            for (std::size_t c = col; c < n; ++c) m[r * n + c] -= factor * m[col * n + c];
        }
    }
    return det;
}

// (q-1)-dimensional volume of the simplex spanned by q points.
double simplex_volume(const std::vector<const std::vector<double>*>& pts) {
    const std::size_t q = pts.size();
    if (q <= 1) return 1.0;
    const std::size_t edges = q - 1;
    const std::size_t dim = pts.front()->size();
    std::vector<std::vector<double>> e(edges, std::vector<double>(dim));
    for (std::size_t i = 0; i < edges; ++i) {
        for (std::size_t d = 0; d < dim; ++d) e[i][d] = (*pts[i + 1])[d] - (*pts[0])[d];
    }
    std::vector<double> gram(edges * edges);
    for (std::size_t i = 0; i < edges; ++i) {
        for (std::size_t j = 0; j < edges; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) s += e[i][d] * e[j][d];
            gram[i * edges + j] = s;
        }
    }
    const double det = determinant(std::move(gram), edges);
    return std::sqrt(std::max(det, 0.0)) / static_cast<double>(factorial(edges));
}

std::string describe_point(std::span<const double> p) {
    std::string out = "(";
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (d) out += ", ";
        out += format_double(p[d]);
    }
    return out + ")";
}

}  // namespace

double simplex_diameter(const std::vector<std::vector<double>>& points) {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < points[i].size(); ++d) {
                const double diff = points[i][d] - points[j][d];
                s += diff * diff;
            }
            best = std::max(best, std::sqrt(s));
        }
    }
    return best;
}

double simplex_inradius(const std::vector<std::vector<double>>& points) {
    const std::size_t nu = points.size() - 1;
    std::vector<const std::vector<double>*> all;
    for (const auto& p : points) all.push_back(&p);
    const double volume = simplex_volume(all);
    double facets = 0.0;
    for (std::size_t skip = 0; skip < points.size(); ++skip) {
        std::vector<const std::vector<double>*> facet;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i != skip) facet.push_back(&points[i]);
        }
        facets += simplex_volume(facet);
    }
    return facets > 0.0 ? static_cast<double>(nu) * volume / facets : 0.0;
}

Triangulation build_uniform(const Box& domain, double k) {
    const std::size_t nu = domain.dimension();
    if (nu == 0 || domain.upper.size() != nu) throw MeshError("domain box must be non-empty");
    if (!(k > 0.0) || !std::isfinite(k)) throw MeshError("mesh size k must be positive");

    Triangulation tri;
    tri.k_ = k;
    tri.omega_.lower.resize(nu);
    tri.omega_.upper.resize(nu);
    tri.cells_.resize(nu);
    for (std::size_t d = 0; d < nu; ++d) {
        const double inner = domain.width(d) - 2.0 * k;
        std::ostringstream os;
        os.precision(17);
        if (!(inner > 0.0)) {
            os << "mesh size k = " << k << " leaves an empty inner box on axis " << d
               << " (need k < " << domain.width(d) / 2.0 << ")";
            throw MeshError(os.str());
        }
        const double ratio = inner / k;
        const double cells = std::round(ratio);
        if (std::abs(ratio - cells) > 1e-9 || cells < 1.0) {
            os << "mesh size k = " << k << " is not commensurate with the box on axis " << d
               << ": (width - 2k)/k = " << ratio << " is not an integer";
            throw MeshError(os.str());
        }
        tri.cells_[d] = static_cast<std::size_t>(cells);
        tri.omega_.lower[d] = domain.lower[d] + k;
        tri.omega_.upper[d] = domain.upper[d] - k;
    }

    // Axis 0 is the slowest-varying index, so vertex order is lexicographic.
    tri.vertex_strides_.assign(nu, 1);
    for (std::size_t d = nu - 1; d > 0; --d) {
        tri.vertex_strides_[d - 1] = tri.vertex_strides_[d] * (tri.cells_[d] + 1);
    }
    const std::size_t vertices = tri.vertex_strides_[0] * (tri.cells_[0] + 1);
    if (vertices > std::numeric_limits<VertexId>::max()) throw MeshError("mesh too large");

    tri.vertex_coords_.resize(vertices * nu);
    for (std::size_t v = 0; v < vertices; ++v) {
        std::size_t rest = v;
        for (std::size_t d = 0; d < nu; ++d) {
            const std::size_t idx = rest / tri.vertex_strides_[d];
            rest %= tri.vertex_strides_[d];
            tri.vertex_coords_[v * nu + d] = tri.omega_.lower[d] + static_cast<double>(idx) * k;
        }
    }

    std::vector<std::size_t> perm(nu);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
        tri.permutations_.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::size_t> cell_strides(nu, 1);
    for (std::size_t d = nu - 1; d > 0; --d) cell_strides[d - 1] = cell_strides[d] * tri.cells_[d];
    const std::size_t cells = cell_strides[0] * tri.cells_[0];

    tri.simplex_vertices_.reserve(cells * tri.permutations_.size() * (nu + 1));
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rest = c;
        std::size_t corner = 0;
        for (std::size_t d = 0; d < nu; ++d) {
            corner += (rest / cell_strides[d]) * tri.vertex_strides_[d];
            rest %= cell_strides[d];
        }
        for (const auto& p : tri.permutations_) {
            std::size_t v = corner;
            tri.simplex_vertices_.push_back(static_cast<VertexId>(v));
            for (std::size_t j = 0; j < nu; ++j) {
                v += tri.vertex_strides_[p[j]];
                tri.simplex_vertices_.push_back(static_cast<VertexId>(v));
            }
        }
    }

    std::vector<std::vector<double>> first;
    for (VertexId v : tri.simplex(0)) first.emplace_back(tri.vertex(v).begin(), tri.vertex(v).end());
    tri.max_diameter_ = simplex_diameter(first);
    return tri;
}

double snap_mesh_size(const Box& domain, double k) {
    if (!(k > 0.0)) throw MeshError("mesh size k must be positive");
    const double width = domain.width(0);
    // width = (cells + 2) k
    const double cells = std::max(1.0, std::round(width / k - 2.0));
    return width / (cells + 2.0);
}

BarycentricCoords Triangulation::locate(std::span<const double> p) const {
    const std::size_t nu = dimension();
    if (p.size() != nu) throw DimensionError("point dimension does not match the triangulation");

    std::vector<double> local(nu);
    std::size_t corner = 0;
    std::size_t cell_linear = 0;
    for (std::size_t d = 0; d < nu; ++d) {
        double x = p[d];
        const double tol = snap_tolerance();
        if (!(x >= omega_.lower[d] - tol && x <= omega_.upper[d] + tol)) {
            std::ostringstream os;
            os << "point " << describe_point(p) << " lies outside omega_k on axis " << d << ": x"
               << d + 1 << " = " << format_double(x) << " not in [" << format_double(omega_.lower[d]) << ", "
               << format_double(omega_.upper[d]) << "]";
            throw OutOfDomainError(os.str(), d, x);
        }
        x = std::clamp(x, omega_.lower[d], omega_.upper[d]);
        double s = (x - omega_.lower[d]) / k_;
        const double nearest = std::round(s);
        if (std::abs(s - nearest) <= 1e-12 * std::max(1.0, nearest)) s = nearest;
        const double n = static_cast<double>(cells_[d]);
        s = std::clamp(s, 0.0, n);
        const double cell = std::min(std::floor(s), n - 1.0);
        local[d] = s - cell;
        const auto ci = static_cast<std::size_t>(cell);
        corner += ci * vertex_strides_[d];
        cell_linear = cell_linear * cells_[d] + ci;
    }

    std::vector<std::size_t> order(nu);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return local[a] > local[b]; });

    BarycentricCoords bc;
    bc.simplex = cell_linear * permutations_.size() + permutation_rank(order);
    bc.vertices.resize(nu + 1);
    bc.weights.resize(nu + 1);
    bc.vertices[0] = static_cast<VertexId>(corner);
    bc.weights[0] = 1.0 - local[order[0]];
    std::size_t v = corner;
    for (std::size_t j = 1; j <= nu; ++j) {
        v += vertex_strides_[order[j - 1]];
        bc.vertices[j] = static_cast<VertexId>(v);
        bc.weights[j] = j < nu ? local[order[j - 1]] - local[order[j]] : local[order[nu - 1]];
    }
    return bc;
}

MeshReport check_hypotheses(const Triangulation& tri, const ProblemSpec& spec, double h, const ControlGrid& grid,
                            const std::optional<Box>& compact) {
    if (!(h > 0.0)) throw ConfigError("time step h must be positive");
    if (spec.dimension() != tri.dimension()) throw DimensionError("problem and mesh dimensions differ");
    const std::size_t nu = tri.dimension();
    MeshReport report;

    report.max_diameter = 0.0;
    report.min_diameter = std::numeric_limits<double>::infinity();
    report.chi1 = std::numeric_limits<double>::infinity();
    std::vector<double> diameters(tri.simplex_count());
    std::vector<std::vector<double>> pts(nu + 1);
    for (std::size_t j = 0; j < tri.simplex_count(); ++j) {
        const auto s = tri.simplex(j);
        for (std::size_t i = 0; i <= nu; ++i) pts[i].assign(tri.vertex(s[i]).begin(), tri.vertex(s[i]).end());
        diameters[j] = simplex_diameter(pts);
        report.max_diameter = std::max(report.max_diameter, diameters[j]);
        report.min_diameter = std::min(report.min_diameter, diameters[j]);
        report.chi1 = std::min(report.chi1, simplex_inradius(pts) / diameters[j]);
    }
    report.hip1_ok = std::abs(report.max_diameter - tri.max_diameter()) <= 1e-12 * tri.max_diameter();
    report.hip4_ok = std::isfinite(report.chi1) && report.chi1 > 0.0;
    report.k_over_d_max = report.max_diameter / report.min_diameter;
    report.hip5_ok = std::isfinite(report.k_over_d_max) && report.k_over_d_max >= 1.0;

    report.hip2_h = h;
    report.hip2_levels = grid.level_count();
    std::vector<double> velocity(nu), image(nu);
    const double tol = tri.snap_tolerance();
    const Box& omega = tri.omega();
    for (std::size_t v = 0; v < tri.vertex_count(); ++v) {
        const auto x = tri.vertex(v);
        for (std::size_t a = 0; a < grid.level_count(); ++a) {
            spec.dynamics(x, grid.level(a), velocity);
            bool inside = true;
            for (std::size_t d = 0; d < nu; ++d) {
                image[d] = x[d] + h * velocity[d];
                inside = inside && image[d] >= omega.lower[d] - tol && image[d] <= omega.upper[d] + tol;
            }
            if (!inside) {
                if (report.hip2_violations == 0) {
                    report.hip2_first_violation = "vertex " + std::to_string(v) + " " + describe_point(x) +
                                                  " with a = " + format_double(grid.level(a)) + " maps to " +
                                                  describe_point(image);
                }
                ++report.hip2_violations;
            }
        }
    }
    report.hip2_ok = report.hip2_violations == 0;

    if (compact) {
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < nu; ++d) {
            margin = std::min({margin, compact->lower[d] - omega.lower[d], omega.upper[d] - compact->upper[d]});
        }
        report.hip3_margin = margin;
    }
    return report;
}

void write_vertices(std::ostream& os, const Triangulation& tri) {
    for (std::size_t v = 0; v < tri.vertex_count(); ++v) {
        os << v;
        for (double c : tri.vertex(v)) os << ' ' << format_double(c);
        os << '\n';
    }
}

void write_simplices(std::ostream& os, const Triangulation& tri) {
    for (std::size_t j = 0; j < tri.simplex_count(); ++j) {
        os << j;
        for (VertexId v : tri.simplex(j)) os << ' ' << v;
        os << '\n';
    }
}

}  // namespace mhjb
