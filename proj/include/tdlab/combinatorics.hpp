#pragma once

// Tiling, spectrality, packing and weak tiling for subsets of small finite
// abelian groups (|G| <= 64), plus the dual functions built from tiling and
// spectral witnesses.

#include "tdlab/extremal.hpp"
#include "tdlab/group.hpp"
#include "tdlab/simplex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tdlab {

using Mask = std::uint64_t;

/// Bit-mask view of a group of order <= 64 with a translation table.
class MaskGroup {
public:
    explicit MaskGroup(FiniteAbelianGroup g) : group_(std::move(g)), n_(group_.order())
    {
        if (n_ > 64) {
            throw std::invalid_argument("exhaustive subset searches need |G| <= 64");
        }
        add_.resize(n_ * n_);
        neg_.resize(n_);
        for (std::size_t a = 0; a < n_; ++a) {
            neg_[a] = static_cast<std::uint8_t>(group_.negate(a));
            for (std::size_t b = 0; b < n_; ++b) {
                add_[a * n_ + b] = static_cast<std::uint8_t>(group_.add(a, b));
            }
        }
        full_ = n_ == 64 ? ~Mask{0} : ((Mask{1} << n_) - 1);
    }

    const FiniteAbelianGroup& group() const { return group_; }
    std::size_t order() const { return n_; }
    Mask full() const { return full_; }

    std::size_t add(std::size_t a, std::size_t b) const { return add_[a * n_ + b]; }
    std::size_t negate(std::size_t a) const { return neg_[a]; }
    std::size_t subtract(std::size_t a, std::size_t b) const { return add(a, negate(b)); }

    Mask translate(Mask m, std::size_t t) const
    {
        Mask out = 0;
        while (m) {
            const int x = std::countr_zero(m);
            m &= m - 1;
            out |= Mask{1} << add(static_cast<std::size_t>(x), t);
        }
        return out;
    }

    Mask negate_mask(Mask m) const
    {
        Mask out = 0;
        while (m) {
            const int x = std::countr_zero(m);
            m &= m - 1;
            out |= Mask{1} << negate(static_cast<std::size_t>(x));
        }
        return out;
    }

    /// A - A.
    Mask difference(Mask a) const
    {
        Mask out = 0;
        Mask rest = a;
        while (rest) {
            const int x = std::countr_zero(rest);
            rest &= rest - 1;
            out |= translate(a, negate(static_cast<std::size_t>(x)));
        }
        return out;
    }

private:
    FiniteAbelianGroup group_;
    std::size_t n_;
    std::vector<std::uint8_t> add_;
    std::vector<std::uint8_t> neg_;
    Mask full_ = 0;
};

namespace detail {

inline std::vector<std::size_t> mask_elements(Mask m)
{
    std::vector<std::size_t> out;
    while (m) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
        m &= m - 1;
    }
    return out;
}

inline bool tile_dfs(const MaskGroup& mg, const std::vector<Mask>& translates, const std::vector<std::size_t>& a_elems, Mask covered, Mask& lambda)
{
    if (covered == mg.full()) {
        return true;
    }
    const auto u = static_cast<std::size_t>(std::countr_zero(~covered));
    std::vector<std::size_t> cands;
    cands.reserve(a_elems.size());
    for (std::size_t a : a_elems) {
        cands.push_back(mg.subtract(u, a));
    }
    std::sort(cands.begin(), cands.end());
    for (std::size_t l : cands) {
        if ((translates[l] & covered) == 0) {
            lambda |= Mask{1} << l;
            if (tile_dfs(mg, translates, a_elems, covered | translates[l], lambda)) {
                return true;
            }
            lambda &= ~(Mask{1} << l);
        }
    }
    return false;
}

/// Exact-cover search with 0 in Lambda; each step covers the smallest uncovered
/// element, candidates in ascending order.
inline std::optional<Mask> tile_mask(const MaskGroup& mg, Mask a)
{
    const auto size = static_cast<std::size_t>(std::popcount(a));
    if (size == 0 || mg.order() % size != 0) {
        return std::nullopt;
    }
    std::vector<Mask> translates(mg.order());
    for (std::size_t t = 0; t < mg.order(); ++t) {
        translates[t] = mg.translate(a, t);
    }
    Mask lambda = 1;
    if (tile_dfs(mg, translates, mask_elements(a), translates[0], lambda)) {
        return lambda;
    }
    return std::nullopt;
}

/// Greedy colouring bound for the clique search.
inline int colour_bound(const std::vector<Mask>& adj, Mask cand)
{
    int colours = 0;
    while (cand) {
        ++colours;
        Mask avail = cand;
        while (avail) {
            const int v = std::countr_zero(avail);
            avail &= ~(Mask{1} << v);
            avail &= ~adj[static_cast<std::size_t>(v)];
            cand &= ~(Mask{1} << v);
        }
    }
    return colours;
}

inline void max_clique_dfs(const std::vector<Mask>& adj, Mask current, int size, Mask cand, Mask& best, int& best_size)
{
    if (size > best_size) {
        best_size = size;
        best = current;
    }
    if (size + std::popcount(cand) <= best_size || size + colour_bound(adj, cand) <= best_size) {
        return;
    }
    while (cand) {
        if (size + std::popcount(cand) <= best_size) {
            return;
        }
        const int v = std::countr_zero(cand);
        cand &= ~(Mask{1} << v);
        max_clique_dfs(adj, current | (Mask{1} << v), size + 1, cand & adj[static_cast<std::size_t>(v)], best, best_size);
    }
}

/// Maximum clique containing vertex 0; ties go to the first clique found in
/// ascending vertex order.
inline Mask max_clique_with_origin(const std::vector<Mask>& adj)
{
    Mask best = 1;
    int best_size = 1;
    max_clique_dfs(adj, 1, 1, adj[0], best, best_size);
    return best;
}

inline bool find_clique_dfs(const std::vector<Mask>& adj, Mask current, int size, int target, Mask cand, Mask& out)
{
    if (size == target) {
        out = current;
        return true;
    }
    while (cand) {
        if (size + std::popcount(cand) < target) {
            return false;
        }
        const int v = std::countr_zero(cand);
        cand &= ~(Mask{1} << v);
        if (find_clique_dfs(adj, current | (Mask{1} << v), size + 1, target, cand & adj[static_cast<std::size_t>(v)], out)) {
            return true;
        }
    }
    return false;
}

/// Zero set {gamma : |hat 1_A(gamma)| <= 1e-9 sqrt|A|} as a mask.
inline Mask fourier_zero_mask(const MaskGroup& mg, Mask a)
{
    std::vector<double> ind(mg.order(), 0.0);
    for (std::size_t x : mask_elements(a)) {
        ind[x] = 1.0;
    }
    const auto spec = fourier_complex(mg.group(), ind);
    const double thresh = 1e-9 * std::sqrt(static_cast<double>(std::popcount(a)));
    Mask z = 0;
    for (std::size_t t = 0; t < mg.order(); ++t) {
        if (std::abs(spec[t]) <= thresh) {
            z |= Mask{1} << t;
        }
    }
    return z;
}

inline std::optional<Mask> spectrum_mask(const MaskGroup& mg, Mask a)
{
    const int size = std::popcount(a);
    if (size == 0 || static_cast<std::size_t>(size) > mg.order()) {
        return std::nullopt;
    }
    const Mask zero = fourier_zero_mask(mg, a);
    std::vector<Mask> adj(mg.order());
    for (std::size_t v = 0; v < mg.order(); ++v) {
        adj[v] = mg.translate(zero, v) & ~(Mask{1} << v); // w ~ v iff w - v in Z
    }
    Mask out = 0;
    if (find_clique_dfs(adj, 1, 1, size, adj[0] & ~Mask{1}, out)) {
        return out;
    }
    return std::nullopt;
}

/// Largest Lambda containing 0 with (A + lambda) pairwise disjoint, given U = A - A.
inline Mask packing_mask(const MaskGroup& mg, Mask difference_set)
{
    std::vector<Mask> adj(mg.order());
    for (std::size_t v = 0; v < mg.order(); ++v) {
        adj[v] = ~mg.translate(difference_set, v) & mg.full();
    }
    return max_clique_with_origin(adj);
}

inline void require_nonempty(const Subset& a, const char* what)
{
    if (a.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty set");
    }
}

} // namespace detail

struct TilingWitness {
    Subset A;
    Subset lambda;
};

struct SpectralWitness {
    Subset A;
    Subset lambda; // dual indices
};

inline std::optional<TilingWitness> find_tiling(const Subset& a)
{
    detail::require_nonempty(a, "find_tiling");
    MaskGroup mg(a.group());
    const auto lam = detail::tile_mask(mg, a.mask());
    if (!lam) {
        return std::nullopt;
    }
    return TilingWitness{a, Subset::from_mask(a.group(), *lam)};
}

inline std::optional<SpectralWitness> find_spectrum(const Subset& a)
{
    detail::require_nonempty(a, "find_spectrum");
    MaskGroup mg(a.group());
    const auto lam = detail::spectrum_mask(mg, a.mask());
    if (!lam) {
        return std::nullopt;
    }
    return SpectralWitness{a, Subset::from_mask(a.group(), *lam)};
}

/// Empty string when the witness is valid, otherwise the failed condition.
inline std::string witness_problem(const TilingWitness& w)
{
    const auto& g = w.A.group();
    if (!(w.lambda.group() == g)) {
        return "witness sets live on different groups";
    }
    if (w.A.empty() || w.lambda.empty()) {
        return "empty set in witness";
    }
    std::vector<int> cover(g.order(), 0);
    for (std::size_t l : w.lambda.elements()) {
        for (std::size_t a : w.A.elements()) {
            ++cover[g.add(a, l)];
        }
    }
    if (std::any_of(cover.begin(), cover.end(), [](int c) { return c != 1; })) {
        return "translates do not partition G";
    }
    const auto da = autocorrelation_support(w.A);
    const auto dl = autocorrelation_support(w.lambda);
    for (std::size_t x = 1; x < g.order(); ++x) {
        if (da.contains(x) && dl.contains(x)) {
            return "(A-A) and (Lambda-Lambda) meet outside 0";
        }
    }
    if (w.A.size() * w.lambda.size() != g.order()) {
        return "|A| |Lambda| != |G|";
    }
    return {};
}

inline std::string witness_problem(const SpectralWitness& w)
{
    const auto& g = w.A.group();
    if (!(w.lambda.group() == g)) {
        return "witness sets live on different groups";
    }
    if (w.A.empty() || w.lambda.size() != w.A.size()) {
        return "|Lambda| != |A|";
    }
    const auto spec = detail::fourier_complex(g, GroupFunction::indicator(w.A).values());
    const double thresh = 1e-9 * std::sqrt(static_cast<double>(w.A.size()));
    const auto lam = w.lambda.elements();
    for (std::size_t s : lam) {
        for (std::size_t t : lam) {
            if (s != t && std::abs(spec[g.subtract(s, t)]) > thresh) {
                return "characters in Lambda are not orthogonal on A";
            }
        }
    }
    return {};
}

/// h = m(A) * 1_Lambda * 1_{-Lambda}.
inline GroupFunction witness_to_dual(const TilingWitness& w)
{
    if (auto why = witness_problem(w); !why.empty()) {
        throw std::invalid_argument("invalid tiling witness: " + why);
    }
    const auto lam = GroupFunction::indicator(w.lambda);
    const auto neg = GroupFunction::indicator(w.lambda.negated());
    return convolve(lam, neg) * measure(w.A);
}

/// h(x) = |A|^{-2} |sum_{gamma in Lambda} gamma(x)|^2.
inline GroupFunction witness_to_dual(const SpectralWitness& w)
{
    if (auto why = witness_problem(w); !why.empty()) {
        throw std::invalid_argument("invalid spectral witness: " + why);
    }
    const auto& g = w.A.group();
    const auto lam = w.lambda.elements();
    const double scale = 1.0 / static_cast<double>(w.A.size() * w.A.size());
    GroupFunction h(g);
    for (std::size_t x = 0; x < g.order(); ++x) {
        std::complex<double> s = 0.0;
        for (std::size_t t : lam) {
            s += g.root_of_unity(g.phase(t, x));
        }
        h[x] = std::norm(s) * scale;
    }
    return h;
}

struct WeakTilingWitness {
    Subset A;
    GroupFunction nu;      // nu(0) = 0, nu >= 0
    double residual = 0.0; // max_x |sum_y 1_A(y) nu(x - y) - 1_{A^c}(x)|
};

/// Unnormalized convolution sum_y 1_A(y) nu(x - y) minus 1_{A^c}, sup norm.
inline double weak_tiling_residual(const Subset& a, const GroupFunction& nu)
{
    const auto& g = a.group();
    const auto elems = a.elements();
    double r = 0.0;
    for (std::size_t x = 0; x < g.order(); ++x) {
        long double s = 0.0L;
        for (std::size_t y : elems) {
            s += nu[g.subtract(x, y)];
        }
        r = std::max(r, static_cast<double>(std::fabs(s - (a.contains(x) ? 0.0L : 1.0L))));
    }
    return r;
}

/// Feasibility LP for nu >= 0, nu(0) = 0 with sum_y 1_A(y) nu(x - y) = 1_{A^c}(x).
inline std::optional<WeakTilingWitness> weak_tiling(const Subset& a)
{
    detail::require_nonempty(a, "weak_tiling");
    const auto& g = a.group();
    const std::size_t n = g.order();
    if (a.size() == n) {
        throw std::invalid_argument("weak_tiling: A is the whole group");
    }
    // Variables nu(1), ..., nu(n-1).
    LinearProgram lp(n - 1);
    const auto elems = a.elements();
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<double> row(n - 1, 0.0);
        for (std::size_t y : elems) {
            const std::size_t z = g.subtract(x, y);
            if (z != 0) {
                row[z - 1] += 1.0;
            }
        }
        lp.add_eq(row, a.contains(x) ? 0.0 : 1.0);
    }
    const auto sol = solve(lp);
    if (sol.status != LpStatus::Optimal) {
        return std::nullopt;
    }
    GroupFunction nu(g);
    for (std::size_t z = 1; z < n; ++z) {
        nu[z] = std::max(0.0, sol.x[z - 1]);
    }
    const double res = weak_tiling_residual(a, nu);
    if (res > 1e-8) {
        return std::nullopt;
    }
    return WeakTilingWitness{a, nu, res};
}

struct Packing {
    std::size_t cardinality = 0;
    Subset lambda;
};

inline Packing max_packing(const Subset& a)
{
    detail::require_nonempty(a, "max_packing");
    MaskGroup mg(a.group());
    const Mask lam = detail::packing_mask(mg, mg.difference(a.mask()));
    return {static_cast<std::size_t>(std::popcount(lam)), Subset::from_mask(a.group(), lam)};
}

/// sqrt|G| / D(A - A), an upper bound on the number of disjoint translates of A.
inline double packing_bound_from_delsarte(std::size_t group_order, double delsarte)
{
    return std::sqrt(static_cast<double>(group_order)) / delsarte;
}

inline double packing_bound(const Subset& a)
{
    detail::require_nonempty(a, "packing_bound");
    const double d = extremal_constant(ProblemKind::Delsarte, autocorrelation_support(a));
    return packing_bound_from_delsarte(a.group().order(), d);
}

struct ClassifyReport {
    Subset A;
    SymmetricSet difference_set;
    bool tiles = false;
    bool spectral = false;
    double turan = 0.0;    // T(A - A)
    double delsarte = 0.0; // D(A - A)
    double m = 0.0;        // m(A)
    bool turan_equals_m = false;
    bool delsarte_equals_m = false;
    std::optional<TilingWitness> tiling;
    std::optional<SpectralWitness> spectrum;

    /// Tiles or spectral, yet T = D = m(A) fails.
    bool violates_tiling_spectral_equality(double tol = kCertificateTolerance) const
    {
        return (tiles || spectral) && (std::abs(turan - m) > tol || std::abs(delsarte - m) > tol);
    }
};

inline ClassifyReport classify(const Subset& a, double tol = kCertificateTolerance)
{
    detail::require_nonempty(a, "classify");
    auto diff = autocorrelation_support(a);
    ClassifyReport r{a, diff, false, false, 0.0, 0.0, 0.0, false, false, std::nullopt, std::nullopt};
    r.tiling = find_tiling(a);
    r.spectrum = find_spectrum(a);
    r.tiles = r.tiling.has_value();
    r.spectral = r.spectrum.has_value();
    r.turan = extremal_constant(ProblemKind::Turan, diff);
    r.delsarte = extremal_constant(ProblemKind::Delsarte, diff);
    r.m = measure(a);
    r.turan_equals_m = std::abs(r.turan - r.m) <= tol;
    r.delsarte_equals_m = std::abs(r.delsarte - r.m) <= tol;
    return r;
}

} // namespace tdlab
