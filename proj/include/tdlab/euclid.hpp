#pragma once

// Grid approximations of the Euclidean Turan and Delsarte constants.
//
// A symmetric open domain U in R^d is sampled on the torus (R/N) Z_N^d of side R.
// The finite problems on Z_N^d with the sampled set U_N are solved exactly and
// rescaled by the cell volume (R/N)^d, so the reported numbers are Riemann sums
// of the integral of the extremal function. These are heuristic approximations;
// no bracketing of the continuum value is claimed.

#include "tdlab/extremal.hpp"
#include "tdlab/group.hpp"
#include "tdlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tdlab {

class EuclideanDomain {
public:
    struct Ball {
        double radius = 1.0;
    };
    struct Box {
        std::vector<double> half_widths;
    };
    /// Intersection of slabs |normal_k . x| < offset_k.
    struct Polytope {
        std::vector<std::vector<double>> normals;
        std::vector<double> offsets;
    };
    struct Union {
        std::vector<EuclideanDomain> parts;
    };
    using Shape = std::variant<Ball, Box, Polytope, Union>;

    EuclideanDomain(std::size_t dim, Shape shape) : dim_(dim), shape_(std::move(shape))
    {
        if (dim_ < 1) {
            throw std::invalid_argument("domain dimension must be >= 1");
        }
        validate();
        compute_bounds();
    }

    static EuclideanDomain ball(std::size_t dim, double radius) { return {dim, Ball{radius}}; }
    static EuclideanDomain cube(std::size_t dim, double half_width) { return {dim, Box{std::vector<double>(dim, half_width)}}; }

    std::size_t dimension() const { return dim_; }
    const Shape& shape() const { return shape_; }
    double bounding_radius() const { return bounding_radius_; }
    /// Half-widths of the smallest axis-aligned box containing U.
    const std::vector<double>& bounding_box() const { return bounding_box_; }

    const char* kind() const
    {
        return std::visit(
            [](const auto& s) -> const char* {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Ball>) {
                    return "ball";
                } else if constexpr (std::is_same_v<T, Box>) {
                    return "box";
                } else if constexpr (std::is_same_v<T, Polytope>) {
                    return "polytope";
                } else {
                    return "union";
                }
            },
            shape_);
    }

    /// Strict membership; every shape is an open set.
    bool contains(const std::vector<double>& p) const
    {
        return std::visit(
            [&](const auto& s) -> bool {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Ball>) {
                    double r2 = 0.0;
                    for (double v : p) {
                        r2 += v * v;
                    }
                    return r2 < s.radius * s.radius;
                } else if constexpr (std::is_same_v<T, Box>) {
                    for (std::size_t j = 0; j < dim_; ++j) {
                        if (!(std::abs(p[j]) < s.half_widths[j])) {
                            return false;
                        }
                    }
                    return true;
                } else if constexpr (std::is_same_v<T, Polytope>) {
                    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
                        double dot = 0.0;
                        for (std::size_t j = 0; j < dim_; ++j) {
                            dot += s.normals[k][j] * p[j];
                        }
                        if (!(std::abs(dot) < s.offsets[k])) {
                            return false;
                        }
                    }
                    return true;
                } else {
                    return std::any_of(s.parts.begin(), s.parts.end(), [&](const EuclideanDomain& d) { return d.contains(p); });
                }
            },
            shape_);
    }

    bool convex() const { return !std::holds_alternative<Union>(shape_); }

    /// Lebesgue measure when it has a closed form (ball, box).
    std::optional<double> volume() const
    {
        if (const auto* b = std::get_if<Ball>(&shape_)) {
            const double d = static_cast<double>(dim_);
            return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(b->radius, d);
        }
        if (const auto* b = std::get_if<Box>(&shape_)) {
            double v = 1.0;
            for (double h : b->half_widths) {
                v *= 2.0 * h;
            }
            return v;
        }
        return std::nullopt;
    }

    /// Boxes tile by translations, and so does a one-dimensional ball (an interval).
    bool known_tile() const
    {
        return std::holds_alternative<Box>(shape_) || (std::holds_alternative<Ball>(shape_) && dim_ == 1);
    }

    /// 2^{-d} m(U) for the shapes known to be Turan domains (balls and boxes).
    std::optional<double> reference_turan() const
    {
        if (std::holds_alternative<Ball>(shape_) || std::holds_alternative<Box>(shape_)) {
            return *volume() / std::pow(2.0, static_cast<double>(dim_));
        }
        return std::nullopt;
    }

    /// For tiles the Delsarte constant equals the Turan constant 2^{-d} m(U).
    std::optional<double> reference_delsarte() const
    {
        if (known_tile()) {
            return reference_turan();
        }
        return std::nullopt;
    }

private:
    void validate() const
    {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Ball>) {
                    if (!(s.radius > 0.0) || !std::isfinite(s.radius)) {
                        throw std::invalid_argument("ball radius must be positive");
                    }
                } else if constexpr (std::is_same_v<T, Box>) {
                    if (s.half_widths.size() != dim_) {
                        throw std::invalid_argument("box needs one half-width per dimension");
                    }
                    for (double h : s.half_widths) {
                        if (!(h > 0.0) || !std::isfinite(h)) {
                            throw std::invalid_argument("box half-widths must be positive");
                        }
                    }
                } else if constexpr (std::is_same_v<T, Polytope>) {
                    if (s.normals.size() != s.offsets.size() || s.normals.size() < dim_) {
                        throw std::invalid_argument("polytope needs matching normals/offsets, at least d of them");
                    }
                    for (std::size_t k = 0; k < s.normals.size(); ++k) {
                        if (s.normals[k].size() != dim_ || !(s.offsets[k] > 0.0)) {
                            throw std::invalid_argument("polytope slab has wrong dimension or non-positive offset");
                        }
                    }
                } else {
                    if (s.parts.empty()) {
                        throw std::invalid_argument("union needs at least one part");
                    }
                    for (const auto& d : s.parts) {
                        if (d.dimension() != dim_) {
                            throw std::invalid_argument("union parts must share the dimension");
                        }
                    }
                }
            },
            shape_);
    }

    void compute_bounds()
    {
        bounding_box_.assign(dim_, 0.0);
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Ball>) {
                    bounding_radius_ = s.radius;
                    bounding_box_.assign(dim_, s.radius);
                } else if constexpr (std::is_same_v<T, Box>) {
                    double r2 = 0.0;
                    for (double h : s.half_widths) {
                        r2 += h * h;
                    }
                    bounding_radius_ = std::sqrt(r2);
                    bounding_box_ = s.half_widths;
                } else if constexpr (std::is_same_v<T, Polytope>) {
                    for (const auto& v : polytope_vertices(s)) {
                        double r2 = 0.0;
                        for (std::size_t j = 0; j < dim_; ++j) {
                            r2 += v[j] * v[j];
                            bounding_box_[j] = std::max(bounding_box_[j], std::abs(v[j]));
                        }
                        bounding_radius_ = std::max(bounding_radius_, std::sqrt(r2));
                    }
                } else {
                    for (const auto& d : s.parts) {
                        bounding_radius_ = std::max(bounding_radius_, d.bounding_radius());
                        for (std::size_t j = 0; j < dim_; ++j) {
                            bounding_box_[j] = std::max(bounding_box_[j], d.bounding_box()[j]);
                        }
                    }
                }
            },
            shape_);
    }

    // Every vertex lies on d of the planes n_k . x = +-b_k.
    std::vector<std::vector<double>> polytope_vertices(const Polytope& p) const
    {
        if (dim_ > 3) {
            throw std::invalid_argument("polytopes are supported in dimension <= 3");
        }
        const std::size_t m = p.offsets.size();
        std::vector<std::vector<double>> planes;
        std::vector<double> rhs;
        for (std::size_t k = 0; k < m; ++k) {
            planes.push_back(p.normals[k]);
            rhs.push_back(p.offsets[k]);
            std::vector<double> neg = p.normals[k];
            for (double& v : neg) {
                v = -v;
            }
            planes.push_back(neg);
            rhs.push_back(p.offsets[k]);
        }
        const std::size_t np = planes.size();
        std::vector<std::vector<double>> vertices;
        std::vector<std::size_t> pick(dim_);
        auto solve_small = [&](std::vector<double>& x) -> bool {
            // Gaussian elimination on a d x d system.
            std::vector<std::vector<double>> a(dim_, std::vector<double>(dim_ + 1));
            for (std::size_t i = 0; i < dim_; ++i) {
                for (std::size_t j = 0; j < dim_; ++j) {
                    a[i][j] = planes[pick[i]][j];
                }
                a[i][dim_] = rhs[pick[i]];
            }
            for (std::size_t c = 0; c < dim_; ++c) {
                std::size_t piv = c;
                for (std::size_t r = c + 1; r < dim_; ++r) {
                    if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                        piv = r;
                    }
                }
                if (std::abs(a[piv][c]) < 1e-12) {
                    return false;
                }
                std::swap(a[c], a[piv]);
                for (std::size_t r = 0; r < dim_; ++r) {
                    if (r == c) {
                        continue;
                    }
                    const double f = a[r][c] / a[c][c];
                    for (std::size_t j = c; j <= dim_; ++j) {
                        a[r][j] -= f * a[c][j];
                    }
                }
            }
            x.resize(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                x[i] = a[i][dim_] / a[i][i];
            }
            return true;
        };
        auto recurse = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
            if (depth == dim_) {
                std::vector<double> x;
                if (!solve_small(x)) {
                    return;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    double dot = 0.0;
                    for (std::size_t j = 0; j < dim_; ++j) {
                        dot += p.normals[k][j] * x[j];
                    }
                    if (std::abs(dot) > p.offsets[k] * (1.0 + 1e-9)) {
                        return;
                    }
                }
                vertices.push_back(std::move(x));
                return;
            }
            for (std::size_t i = start; i < np; ++i) {
                pick[depth] = i;
                self(self, depth + 1, i + 1);
            }
        };
        recurse(recurse, 0, 0);
        if (vertices.empty()) {
            throw std::invalid_argument("polytope is unbounded or degenerate");
        }
        return vertices;
    }

    std::size_t dim_;
    Shape shape_;
    double bounding_radius_ = 0.0;
    std::vector<double> bounding_box_;
};

struct DiscretizationGrid {
    std::size_t resolution = 0; // N per axis
    double period = 0.0;        // R
    double spacing = 0.0;       // R / N
    std::size_t dimension = 0;
    FiniteAbelianGroup group;
    SymmetricSet points; // U_N
    Subset half_body;    // grid points of U/2

    double cell_volume() const { return std::pow(spacing, static_cast<double>(dimension)); }

    /// Signed offsets in (-N/2, N/2] of a grid index.
    std::vector<int> offsets(std::size_t index) const
    {
        auto c = group.coords(index);
        const int n = static_cast<int>(resolution);
        for (int& v : c) {
            if (v > n / 2) {
                v -= n;
            }
        }
        return c;
    }
};

inline double default_period(const EuclideanDomain& u) { return 4.0 * u.bounding_radius(); }

inline DiscretizationGrid discretize(const EuclideanDomain& u, std::size_t n, double period)
{
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("grid resolution N must be even and >= 2");
    }
    if (!(period > 2.0 * u.bounding_radius())) {
        throw std::invalid_argument("period R must exceed twice the bounding radius (wraparound)");
    }
    const std::size_t d = u.dimension();
    FiniteAbelianGroup g(std::vector<int>(d, static_cast<int>(n)));
    const double h = period / static_cast<double>(n);
    Subset pts(g);
    Subset half(g);
    std::vector<double> p(d);
    std::vector<double> p2(d);
    const int half_n = static_cast<int>(n) / 2;
    for (std::size_t x = 0; x < g.order(); ++x) {
        auto c = g.coords(x);
        for (std::size_t j = 0; j < d; ++j) {
            const int o = c[j] > half_n ? c[j] - static_cast<int>(n) : c[j];
            p[j] = static_cast<double>(o) * h;
            p2[j] = 2.0 * p[j];
        }
        if (u.contains(p)) {
            if (std::any_of(c.begin(), c.end(), [half_n](int v) { return v == half_n; })) {
                throw std::invalid_argument("domain reaches the torus boundary (wraparound)");
            }
            pts.insert(x);
        }
        if (u.contains(p2)) {
            half.insert(x);
        }
    }
    return {n, period, h, d, g, SymmetricSet(std::move(pts)), std::move(half)};
}

/// Signed coordinate permutations of Z_N^d that map the set onto itself.
inline std::vector<std::vector<std::size_t>> grid_symmetries(const DiscretizationGrid& grid)
{
    const auto& g = grid.group;
    const std::size_t d = grid.dimension;
    std::vector<std::size_t> perm(d);
    for (std::size_t j = 0; j < d; ++j) {
        perm[j] = j;
    }
    std::vector<std::vector<std::size_t>> out;
    do {
        for (std::size_t signs = 0; signs < (std::size_t{1} << d); ++signs) {
            std::vector<std::size_t> map(g.order());
            std::vector<int> c2(d);
            bool keeps = true;
            for (std::size_t x = 0; x < g.order() && keeps; ++x) {
                const auto c = g.coords(x);
                for (std::size_t j = 0; j < d; ++j) {
                    c2[j] = ((signs >> j) & 1U) ? -c[perm[j]] : c[perm[j]];
                }
                map[x] = g.index(c2);
                keeps = grid.points.contains(x) == grid.points.contains(map[x]);
            }
            if (keeps) {
                out.push_back(std::move(map));
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

struct EuclidOptions {
    std::optional<double> period;     // default 4 * bounding radius
    std::size_t max_variables = 4096; // LP variable budget per solve
    unsigned threads = 0;             // 0: default_threads()
    bool use_symmetry = true;
    bool snapshots = true;
};

inline void check_budget(std::size_t dim, std::size_t n)
{
    const bool ok = (dim <= 2 && n <= 64) || (dim == 3 && n <= 16);
    if (!ok) {
        throw std::invalid_argument("grid budget exceeded: d <= 2 needs N <= 64, d = 3 needs N <= 16, d >= 4 unsupported (d=" +
                                    std::to_string(dim) + ", N=" + std::to_string(n) + ")");
    }
}

struct ApproximationLevel {
    std::size_t resolution = 0;
    double period = 0.0;
    double spacing = 0.0;
    std::size_t grid_points = 0;     // |U_N|
    std::size_t half_body_points = 0; // |A_N|
    double discrete_measure = 0.0;   // (R/N)^d |U_N|
    double half_body_measure = 0.0;  // (R/N)^d |A_N|
    double turan = 0.0;              // (R/N)^d sum f for the Turan extremizer
    double delsarte = 0.0;
    std::optional<double> turan_error;
    std::optional<double> delsarte_error;
    std::size_t lp_variables_turan = 0;
    std::size_t lp_variables_delsarte = 0;
    int iterations_turan = 0;
    int iterations_delsarte = 0;
};

struct ApproximationReport {
    EuclideanDomain domain;
    std::vector<ApproximationLevel> levels;
    std::optional<double> reference_turan;
    std::optional<double> reference_delsarte;
    std::vector<std::optional<double>> convergence_orders; // between consecutive levels
    std::vector<std::string> invariant_failures;
    std::optional<std::size_t> snapshot_resolution;
    std::vector<double> snapshot_turan;
    std::vector<double> snapshot_delsarte;

    bool ok() const { return invariant_failures.empty(); }
};

namespace detail {

struct GridSolve {
    double turan = 0.0;
    double delsarte = 0.0;
    ExtremalSolution turan_solution;
    ExtremalSolution delsarte_solution;
    std::size_t vars_turan = 0;
    std::size_t vars_delsarte = 0;
};

inline OrbitPartition grid_orbits(const DiscretizationGrid& grid, bool use_symmetry)
{
    if (!use_symmetry) {
        return orbits_under(grid.group);
    }
    return orbits_under(grid.group, grid_symmetries(grid));
}

inline std::size_t count_variables(ProblemKind kind, const SymmetricSet& u, const OrbitPartition& orbits)
{
    std::size_t n = 0;
    for (std::size_t id = 0; id < orbits.orbits.size(); ++id) {
        if (orbit_in_support(kind, u.contains(orbits.orbits[id].front()), id)) {
            ++n;
        }
    }
    return n;
}

inline double rescale(const DiscretizationGrid& grid, double value)
{
    return grid.cell_volume() * std::sqrt(static_cast<double>(grid.group.order())) * value;
}

} // namespace detail

/// Builds each grid, solves the Turan and Delsarte LPs, and collects the rescaled
/// values with errors against the known continuum values where they exist.
inline ApproximationReport approximate_constants(const EuclideanDomain& u, const std::vector<std::size_t>& resolutions, const EuclidOptions& options = {})
{
    if (resolutions.empty()) {
        throw std::invalid_argument("need at least one resolution");
    }
    const double period = options.period.value_or(default_period(u));
    std::vector<DiscretizationGrid> grids;
    std::vector<OrbitPartition> orbits;
    for (std::size_t n : resolutions) {
        check_budget(u.dimension(), n);
        grids.push_back(discretize(u, n, period));
        orbits.push_back(detail::grid_orbits(grids.back(), options.use_symmetry));
        for (auto kind : {ProblemKind::Turan, ProblemKind::Delsarte}) {
            const std::size_t nv = detail::count_variables(kind, grids.back().points, orbits.back());
            if (nv > options.max_variables) {
                throw std::invalid_argument("LP variable budget exceeded (" + std::to_string(nv) + " > " + std::to_string(options.max_variables) + ")");
            }
        }
    }
    // Two solves per level, run concurrently, merged by index.
    std::vector<ExtremalSolution> solved(2 * grids.size());
    parallel_for(solved.size(), options.threads ? options.threads : default_threads(), [&](std::size_t i) {
        const auto& grid = grids[i / 2];
        const auto kind = i % 2 == 0 ? ProblemKind::Turan : ProblemKind::Delsarte;
        solved[i] = solve_extremal({kind, grid.points}, orbits[i / 2]);
    });

    ApproximationReport rep{u, {}, u.reference_turan(), u.reference_delsarte(), {}, {}, std::nullopt, {}, {}};
    for (std::size_t k = 0; k < grids.size(); ++k) {
        const auto& grid = grids[k];
        const auto& ts = solved[2 * k];
        const auto& ds = solved[2 * k + 1];
        ApproximationLevel lv;
        lv.resolution = grid.resolution;
        lv.period = grid.period;
        lv.spacing = grid.spacing;
        lv.grid_points = grid.points.size();
        lv.half_body_points = grid.half_body.size();
        lv.discrete_measure = grid.cell_volume() * static_cast<double>(lv.grid_points);
        lv.half_body_measure = grid.cell_volume() * static_cast<double>(lv.half_body_points);
        lv.turan = detail::rescale(grid, ts.value);
        lv.delsarte = detail::rescale(grid, ds.value);
        lv.lp_variables_turan = ts.lp.variables;
        lv.lp_variables_delsarte = ds.lp.variables;
        lv.iterations_turan = ts.lp.iterations;
        lv.iterations_delsarte = ds.lp.iterations;
        if (rep.reference_turan) {
            lv.turan_error = std::abs(lv.turan - *rep.reference_turan);
        }
        if (rep.reference_delsarte) {
            lv.delsarte_error = std::abs(lv.delsarte - *rep.reference_delsarte);
        }
        const std::string tag = "N=" + std::to_string(grid.resolution) + ": ";
        if (lv.delsarte < lv.turan - 1e-7) {
            rep.invariant_failures.push_back(tag + "Delsarte value below Turan value");
        }
        if (u.convex() && lv.turan < lv.half_body_measure - 1e-7) {
            rep.invariant_failures.push_back(tag + "Turan value below half-body measure");
        }
        rep.levels.push_back(lv);
    }
    for (std::size_t k = 0; k + 1 < rep.levels.size(); ++k) {
        const auto& a = rep.levels[k];
        const auto& b = rep.levels[k + 1];
        std::optional<double> order;
        if (a.turan_error && b.turan_error && *a.turan_error > 0.0 && *b.turan_error > 0.0 && a.resolution != b.resolution) {
            order = std::log(*a.turan_error / *b.turan_error) /
                    std::log(static_cast<double>(b.resolution) / static_cast<double>(a.resolution));
        }
        rep.convergence_orders.push_back(order);
    }
    if (options.snapshots) {
        std::size_t finest = 0;
        for (std::size_t k = 1; k < grids.size(); ++k) {
            if (grids[k].resolution > grids[finest].resolution) {
                finest = k;
            }
        }
        rep.snapshot_resolution = grids[finest].resolution;
        rep.snapshot_turan = solved[2 * finest].extremizer.values();
        rep.snapshot_delsarte = solved[2 * finest + 1].extremizer.values();
    }
    return rep;
}

struct GapReport {
    std::size_t resolution = 0;
    double turan = 0.0;
    double delsarte = 0.0;
    double half_measure = 0.0;     // 2^{-d} m(U), exact when known, else from the grid
    double turan_gap = 0.0;        // T_N - 2^{-d} m(U)
    double delsarte_gap = 0.0;     // D_N - max(T_N, 2^{-d} m(U))
    double calibration_error = 0.0; // tile calibration at the same grid
    double threshold = 0.0;
    bool strict_delsarte_gap = false;
    std::string label = "numerical evidence only";
};

inline constexpr double kGapThresholdFloor = 1e-6;

/// Compares D_N with T_N and 2^{-d} m(U). The threshold is three times the error
/// of a tile calibration on the same torus and grid: the bounding box of U.
inline GapReport turan_domain_gap(const EuclideanDomain& u, std::size_t n, const EuclidOptions& options = {})
{
    if (!u.convex()) {
        throw std::invalid_argument("turan_domain_gap needs a convex domain");
    }
    EuclidOptions opt = options;
    opt.period = options.period.value_or(default_period(u));
    opt.snapshots = false;
    const auto main = approximate_constants(u, {n}, opt);
    const EuclideanDomain calib_domain(u.dimension(), EuclideanDomain::Box{u.bounding_box()});
    const auto calib = approximate_constants(calib_domain, {n}, opt);
    const double calib_error = std::max(*calib.levels[0].turan_error, *calib.levels[0].delsarte_error);
    GapReport g;
    const auto& lv = main.levels[0];
    g.resolution = n;
    g.turan = lv.turan;
    g.delsarte = lv.delsarte;
    const double scale = std::pow(2.0, -static_cast<double>(u.dimension()));
    g.half_measure = main.reference_turan.value_or(scale * lv.discrete_measure);
    if (const auto vol = u.volume()) {
        g.half_measure = scale * *vol;
    }
    g.turan_gap = g.turan - g.half_measure;
    g.delsarte_gap = g.delsarte - std::max(g.turan, g.half_measure);
    g.calibration_error = calib_error;
    g.threshold = std::max(3.0 * calib_error, kGapThresholdFloor);
    g.strict_delsarte_gap = g.delsarte_gap > g.threshold;
    return g;
}

} // namespace tdlab
