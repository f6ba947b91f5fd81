#pragma once

// Slow, independent reference implementations used to check the library.
// Nothing here calls into the code under test except for basic group arithmetic.

#include "tdlab/group.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using tdlab::FiniteAbelianGroup;

/// exp(2 pi i sum_j t_j x_j / n_j) straight from coordinates, no phase tables.
inline std::complex<double> character(const FiniteAbelianGroup& g, std::size_t t, std::size_t x)
{
    const auto tc = g.coords(t);
    const auto xc = g.coords(x);
    double angle = 0.0;
    for (std::size_t j = 0; j < tc.size(); ++j) {
        angle += 2.0 * std::numbers::pi * static_cast<double>(tc[j] * xc[j]) / static_cast<double>(g.factors()[j]);
    }
    return std::polar(1.0, angle);
}

/// |G|^{-1/2} sum_x f(x) conj(gamma(x)).
inline std::vector<std::complex<double>> dft(const FiniteAbelianGroup& g, const std::vector<double>& f)
{
    const std::size_t n = g.order();
    std::vector<std::complex<double>> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::complex<double> s = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            s += f[x] * std::conj(character(g, t, x));
        }
        out[t] = s / std::sqrt(static_cast<double>(n));
    }
    return out;
}

inline std::vector<double> convolution(const FiniteAbelianGroup& g, const std::vector<double>& f, const std::vector<double>& h)
{
    const std::size_t n = g.order();
    std::vector<double> out(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            out[x] += f[y] * h[g.subtract(x, y)];
        }
        out[x] /= std::sqrt(static_cast<double>(n));
    }
    return out;
}

/// max c.x over {x : A x <= b} by enumerating every vertex. Returns nullopt if no
/// vertex is feasible. Only for a handful of variables and rows; assumes the
/// optimum is attained at a vertex (bounded region or bounded objective).
struct VertexResult {
    double value;
    std::vector<double> x;
};

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) {
                p = r;
            }
        }
        if (std::abs(a[p][c]) < 1e-11) {
            return std::nullopt;
        }
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) {
                continue;
            }
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = b[i] / a[i][i];
    }
    return x;
}

inline std::optional<VertexResult> max_over_vertices(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                                                     const std::vector<double>& b)
{
    const std::size_t n = c.size();
    const std::size_t m = b.size();
    std::optional<VertexResult> best;
    std::vector<std::size_t> pick(n);
    auto rec = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
        if (depth == n) {
            std::vector<std::vector<double>> sa(n);
            std::vector<double> sb(n);
            for (std::size_t i = 0; i < n; ++i) {
                sa[i] = a[pick[i]];
                sb[i] = b[pick[i]];
            }
            const auto x = solve_square(sa, sb);
            if (!x) {
                return;
            }
            for (std::size_t r = 0; r < m; ++r) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    s += a[r][j] * (*x)[j];
                }
                if (s > b[r] + 1e-9) {
                    return;
                }
            }
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                v += c[j] * (*x)[j];
            }
            if (!best || v > best->value) {
                best = VertexResult{v, *x};
            }
            return;
        }
        for (std::size_t i = start; i < m; ++i) {
            pick[depth] = i;
            self(self, depth + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    return best;
}

/// Turan-type constants by vertex enumeration, written from the definitions:
/// f even, f(0) = 1, supported as the kind demands, hat f >= 0, maximize hat f(0).
/// The dual constants are suprema as well.
/// Variables are the values on the classes {x, -x}.
enum class Kind { Turan, DualTuran, Delsarte, DualDelsarte };

inline double extremal_value(Kind kind, const FiniteAbelianGroup& g, const std::vector<bool>& in_u)
{
    const std::size_t n = g.order();
    std::vector<std::size_t> rep;
    std::vector<int> cls(n, -1);
    for (std::size_t x = 0; x < n; ++x) {
        if (cls[x] < 0) {
            cls[x] = cls[g.negate(x)] = static_cast<int>(rep.size());
            rep.push_back(x);
        }
    }
    // Class 0 is {0}; it is fixed to 1 and folded into the right-hand sides.
    std::vector<std::size_t> vars;
    for (std::size_t k = 1; k < rep.size(); ++k) {
        const bool u = in_u[rep[k]];
        bool used = false;
        switch (kind) {
        case Kind::Turan: used = u; break;
        case Kind::Delsarte: used = true; break;
        case Kind::DualTuran:
        case Kind::DualDelsarte: used = !u; break;
        }
        if (used) {
            vars.push_back(k);
        }
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    auto coef = [&](std::size_t t, std::size_t k) {
        double v = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            if (cls[x] == static_cast<int>(k)) {
                v += character(g, t, x).real();
            }
        }
        return s * v;
    };
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    // hat f(t) >= 0 for every t.
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<double> row;
        for (std::size_t k : vars) {
            row.push_back(-coef(t, k));
        }
        a.push_back(row);
        b.push_back(coef(t, 0));
    }
    // Sign conditions: Delsarte f <= 0 off U, dual Delsarte h >= 0 on U^c.
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const bool u = in_u[rep[vars[i]]];
        std::vector<double> row(vars.size(), 0.0);
        if (kind == Kind::Delsarte && !u) {
            row[i] = 1.0;
        } else if (kind == Kind::DualDelsarte && !u) {
            row[i] = -1.0;
        } else {
            continue;
        }
        a.push_back(row);
        b.push_back(0.0);
    }
    std::vector<double> c;
    for (std::size_t k : vars) {
        c.push_back(coef(0, k));
    }
    const double base = coef(0, 0);
    if (vars.empty()) {
        return base;
    }
    const auto r = max_over_vertices(c, a, b);
    if (!r) {
        return std::nan("");
    }
    return base + r->value;
}

/// Every subset mask of a group of order <= 20 satisfying pred, lowest first.
template <class Pred>
std::optional<std::uint64_t> first_mask(std::size_t n, Pred&& pred)
{
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        if (pred(m)) {
            return m;
        }
    }
    return std::nullopt;
}

inline std::vector<std::size_t> bits(std::uint64_t m)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < 64; ++i) {
        if ((m >> i) & 1U) {
            out.push_back(i);
        }
    }
    return out;
}

/// Does A + Lambda partition G?
inline bool partitions(const FiniteAbelianGroup& g, std::uint64_t a, std::uint64_t lambda)
{
    std::vector<int> cover(g.order(), 0);
    for (std::size_t l : bits(lambda)) {
        for (std::size_t x : bits(a)) {
            ++cover[g.add(x, l)];
        }
    }
    for (int c : cover) {
        if (c != 1) {
            return false;
        }
    }
    return true;
}

inline bool tiles(const FiniteAbelianGroup& g, std::uint64_t a)
{
    return first_mask(g.order(), [&](std::uint64_t l) { return (l & 1U) && partitions(g, a, l); }).has_value();
}

inline bool spectral(const FiniteAbelianGroup& g, std::uint64_t a)
{
    const auto elems = bits(a);
    auto orthogonal = [&](std::size_t s, std::size_t t) {
        std::complex<double> sum = 0.0;
        for (std::size_t x : elems) {
            sum += character(g, s, x) * std::conj(character(g, t, x));
        }
        return std::abs(sum) < 1e-9;
    };
    return first_mask(g.order(), [&](std::uint64_t l) {
               if (!(l & 1U) || std::popcount(l) != std::popcount(a)) {
                   return false;
               }
               const auto lb = bits(l);
               for (std::size_t i = 0; i < lb.size(); ++i) {
                   for (std::size_t j = i + 1; j < lb.size(); ++j) {
                       if (!orthogonal(lb[i], lb[j])) {
                           return false;
                       }
                   }
               }
               return true;
           })
        .has_value();
}

/// Largest Lambda with the translates A + lambda pairwise disjoint.
inline std::size_t max_packing(const FiniteAbelianGroup& g, std::uint64_t a)
{
    std::size_t best = 0;
    const auto ea = bits(a);
    for (std::uint64_t l = 1; l < (std::uint64_t{1} << g.order()); ++l) {
        const auto size = static_cast<std::size_t>(std::popcount(l));
        if (size <= best) {
            continue;
        }
        std::vector<int> cover(g.order(), 0);
        bool ok = true;
        for (std::size_t t : bits(l)) {
            for (std::size_t x : ea) {
                if (++cover[g.add(x, t)] > 1) {
                    ok = false;
                }
            }
        }
        if (ok) {
            best = size;
        }
    }
    return best;
}

} // namespace oracle
