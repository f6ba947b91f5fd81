#pragma once

// The Turan and Delsarte problems on a finite abelian group, their duals, and
// the certificates tying an optimal primal/dual pair together.
//
//   Turan        f(0)=1, f = 0 off U,            hat f >= 0, maximize hat f(0)
//   Delsarte     f(0)=1, f <= 0 off U,           hat f >= 0, maximize hat f(0)
//   dual Turan   h(0)=1, h = 0 on U\{0},         hat h >= 0, maximize hat h(0)
//   dual Delsarte h(0)=1, h = 0 on U\{0}, h >= 0 off U, hat h >= 0, maximize hat h(0)
//
// Unknown functions are even; LP variables are their values on orbits of a
// symmetry group acting on G (by default the orbits {x, -x}).

#include "tdlab/group.hpp"
#include "tdlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tdlab {

enum class ProblemKind { Turan, DualTuran, Delsarte, DualDelsarte };

inline const char* to_string(ProblemKind k)
{
    switch (k) {
    case ProblemKind::Turan:
        return "turan";
    case ProblemKind::DualTuran:
        return "dual_turan";
    case ProblemKind::Delsarte:
        return "delsarte";
    case ProblemKind::DualDelsarte:
        return "dual_delsarte";
    }
    return "unknown";
}

inline ProblemKind parse_problem_kind(std::string_view s)
{
    if (s == "turan") {
        return ProblemKind::Turan;
    }
    if (s == "dual_turan") {
        return ProblemKind::DualTuran;
    }
    if (s == "delsarte") {
        return ProblemKind::Delsarte;
    }
    if (s == "dual_delsarte") {
        return ProblemKind::DualDelsarte;
    }
    throw std::invalid_argument("unknown problem kind '" + std::string(s) + "'");
}

inline bool is_primal(ProblemKind k) { return k == ProblemKind::Turan || k == ProblemKind::Delsarte; }

inline ProblemKind dual_of(ProblemKind k)
{
    switch (k) {
    case ProblemKind::Turan:
        return ProblemKind::DualTuran;
    case ProblemKind::DualTuran:
        return ProblemKind::Turan;
    case ProblemKind::Delsarte:
        return ProblemKind::DualDelsarte;
    case ProblemKind::DualDelsarte:
        return ProblemKind::Delsarte;
    }
    return k;
}

/// Partition of G into orbits of a group of automorphisms that contains x -> -x.
/// Orbits are numbered by their smallest element, so orbit 0 is {0}.
struct OrbitPartition {
    std::vector<std::size_t> orbit_of;
    std::vector<std::vector<std::size_t>> orbits;
};

/// Orbits of the automorphisms in `maps` together with negation. Each map is a
/// permutation of element indices fixing 0.
inline OrbitPartition orbits_under(const FiniteAbelianGroup& g, const std::vector<std::vector<std::size_t>>& maps = {})
{
    const std::size_t n = g.order();
    for (const auto& m : maps) {
        if (m.size() != n || m[0] != 0) {
            throw std::invalid_argument("symmetry maps must be permutations of G fixing 0");
        }
    }
    OrbitPartition part;
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    part.orbit_of.assign(n, unset);
    std::vector<std::size_t> stack;
    for (std::size_t x = 0; x < n; ++x) {
        if (part.orbit_of[x] != unset) {
            continue;
        }
        const std::size_t id = part.orbits.size();
        part.orbits.emplace_back();
        part.orbit_of[x] = id;
        stack.assign(1, x);
        while (!stack.empty()) {
            const std::size_t y = stack.back();
            stack.pop_back();
            part.orbits[id].push_back(y);
            auto visit = [&](std::size_t z) {
                if (part.orbit_of[z] == unset) {
                    part.orbit_of[z] = id;
                    stack.push_back(z);
                }
            };
            visit(g.negate(y));
            for (const auto& m : maps) {
                visit(m[y]);
            }
        }
        std::sort(part.orbits[id].begin(), part.orbits[id].end());
    }
    return part;
}

struct ExtremalProblem {
    ProblemKind kind = ProblemKind::Turan;
    SymmetricSet U;
};

/// The LP for one problem together with the orbit bookkeeping needed to read
/// functions back out of it.
struct CompiledProblem {
    LinearProgram lp;
    OrbitPartition orbits;
    std::vector<std::size_t> variable_orbits;   // LP variable j -> orbit id
    std::vector<std::size_t> constraint_orbits; // le row i -> orbit id of the dual point
};

namespace detail {

inline bool orbit_in_support(ProblemKind kind, bool in_u, std::size_t orbit_id)
{
    if (orbit_id == 0) {
        return true;
    }
    switch (kind) {
    case ProblemKind::Turan:
        return in_u;
    case ProblemKind::Delsarte:
        return true;
    case ProblemKind::DualTuran:
    case ProblemKind::DualDelsarte:
        return !in_u;
    }
    return false;
}

inline BoundKind orbit_bound(ProblemKind kind, bool in_u)
{
    switch (kind) {
    case ProblemKind::Turan:
    case ProblemKind::DualTuran:
        return BoundKind::Free;
    case ProblemKind::Delsarte:
        return in_u ? BoundKind::Free : BoundKind::NonPositive;
    case ProblemKind::DualDelsarte:
        return BoundKind::NonNegative;
    }
    return BoundKind::Free;
}

inline void check_orbits_respect(const OrbitPartition& orbits, const SymmetricSet& u)
{
    if (orbits.orbit_of.size() != u.group().order() || orbits.orbits.empty() || orbits.orbits[0] != std::vector<std::size_t>{0}) {
        throw std::invalid_argument("orbit partition does not match the group");
    }
    for (const auto& o : orbits.orbits) {
        const bool first = u.contains(o.front());
        for (std::size_t x : o) {
            if (u.contains(x) != first) {
                throw std::invalid_argument("orbit partition splits U");
            }
        }
    }
}

} // namespace detail

/// Compiles a problem into a LinearProgram over orbit values. The origin value is
/// a fixed variable equal to 1; there is one row -hat f(gamma) <= 0 per dual orbit.
inline CompiledProblem compile(const ExtremalProblem& p, const OrbitPartition& orbits)
{
    const auto& u = p.U;
    const auto& g = u.group();
    detail::check_orbits_respect(orbits, u);
    CompiledProblem out;
    out.orbits = orbits;
    for (std::size_t id = 0; id < orbits.orbits.size(); ++id) {
        const bool in_u = u.contains(orbits.orbits[id].front());
        if (detail::orbit_in_support(p.kind, in_u, id)) {
            out.variable_orbits.push_back(id);
        }
    }
    const std::size_t nv = out.variable_orbits.size();
    const double norm = 1.0 / std::sqrt(static_cast<double>(g.order()));
    out.lp = LinearProgram(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const std::size_t id = out.variable_orbits[j];
        const auto& orbit = orbits.orbits[id];
        out.lp.objective[j] = norm * static_cast<double>(orbit.size());
        if (id == 0) {
            out.lp.bounds[j] = {BoundKind::Fixed, 1.0};
        } else {
            out.lp.bounds[j] = {detail::orbit_bound(p.kind, u.contains(orbit.front())), 0.0};
        }
    }
    out.lp.le_matrix = DenseMatrix(0, nv);
    out.lp.le_matrix.data.reserve(orbits.orbits.size() * nv);
    std::vector<double> row(nv);
    for (std::size_t q = 0; q < orbits.orbits.size(); ++q) {
        const std::size_t t = orbits.orbits[q].front();
        for (std::size_t j = 0; j < nv; ++j) {
            long double s = 0.0L;
            for (std::size_t x : orbits.orbits[out.variable_orbits[j]]) {
                s += g.root_of_unity(g.phase(t, x)).real();
            }
            // Cancelling sums of roots of unity leave rounding noise; keep them exactly zero.
            if (std::abs(s) < 1e-12L * static_cast<long double>(orbits.orbits[out.variable_orbits[j]].size())) {
                s = 0.0L;
            }
            row[j] = -norm * static_cast<double>(s);
        }
        out.lp.add_le(row, 0.0);
        out.constraint_orbits.push_back(q);
    }
    return out;
}

inline CompiledProblem compile(const ExtremalProblem& p) { return compile(p, orbits_under(p.U.group())); }

struct AdmissibilityReport {
    double violation = 0.0;
    std::string reason;
    bool ok(double tol = kTolerance) const { return violation <= tol; }
};

/// Checks every admissibility condition of `kind` for f; spectrum is hat f.
inline AdmissibilityReport check_admissible(ProblemKind kind, const SymmetricSet& u, const GroupFunction& f, const GroupFunction& spectrum)
{
    AdmissibilityReport rep;
    auto note = [&rep](double v, const char* why) {
        if (v > rep.violation) {
            rep.violation = v;
            rep.reason = why;
        }
    };
    const auto& g = u.group();
    if (!(f.group() == g) || !(spectrum.group() == g)) {
        throw std::invalid_argument("function and set live on different groups");
    }
    note(std::abs(f[0] - 1.0), "value at origin differs from 1");
    for (std::size_t x = 0; x < g.order(); ++x) {
        note(std::abs(f[x] - f[g.negate(x)]), "function is not even");
        const bool in_u = u.contains(x);
        if (x != 0) {
            switch (kind) {
            case ProblemKind::Turan:
                if (!in_u) {
                    note(std::abs(f[x]), "nonzero outside U");
                }
                break;
            case ProblemKind::Delsarte:
                if (!in_u) {
                    note(f[x], "positive outside U");
                }
                break;
            case ProblemKind::DualTuran:
                if (in_u) {
                    note(std::abs(f[x]), "nonzero on U minus origin");
                }
                break;
            case ProblemKind::DualDelsarte:
                if (in_u) {
                    note(std::abs(f[x]), "nonzero on U minus origin");
                } else {
                    note(-f[x], "negative outside U");
                }
                break;
            }
        }
        note(-spectrum[x], "Fourier transform is negative");
    }
    return rep;
}

inline AdmissibilityReport check_admissible(ProblemKind kind, const SymmetricSet& u, const GroupFunction& f)
{
    if (!f.is_even()) {
        return {1.0, "function is not even"};
    }
    return check_admissible(kind, u, f, fourier(f));
}

struct LpDiagnostics {
    LpStatus status = LpStatus::Optimal;
    int iterations = 0;
    double max_residual = 0.0;
    double objective = 0.0;
    std::size_t variables = 0;
    std::size_t constraints = 0;
};

struct ExtremalSolution {
    ProblemKind kind = ProblemKind::Turan;
    double value = 0.0;
    GroupFunction extremizer;
    GroupFunction spectrum;
    LpDiagnostics lp;
    double admissibility_violation = 0.0;
    std::vector<double> multipliers; // LP multipliers of the Fourier rows
};

/// Function built from the Fourier-row multipliers of an optimal LP solution. It is
/// admissible for the problem dual to the compiled one, with hat h(0) = 1 / value.
inline GroupFunction multiplier_witness(const CompiledProblem& cp, const FiniteAbelianGroup& g, const LpSolution& sol)
{
    GroupFunction weights(g);
    weights[0] = 1.0;
    for (std::size_t i = 0; i < cp.constraint_orbits.size(); ++i) {
        const auto& orbit = cp.orbits.orbits[cp.constraint_orbits[i]];
        const double share = sol.dual_le.at(i) / static_cast<double>(orbit.size());
        for (std::size_t t : orbit) {
            weights[t] += share;
        }
    }
    GroupFunction phi = fourier(weights) * std::sqrt(static_cast<double>(g.order()));
    return phi * (1.0 / phi[0]);
}

inline ExtremalSolution solve_extremal(const ExtremalProblem& p, const OrbitPartition& orbits, const SolverOptions& options = {})
{
    const auto cp = compile(p, orbits);
    const auto sol = solve(cp.lp, options);
    if (sol.status != LpStatus::Optimal) {
        throw SolverError(std::string("extremal LP for ") + to_string(p.kind) + " ended " + to_string(sol.status));
    }
    const auto& g = p.U.group();
    ExtremalSolution out;
    out.kind = p.kind;
    out.value = sol.objective;
    out.extremizer = GroupFunction(g);
    for (std::size_t j = 0; j < cp.variable_orbits.size(); ++j) {
        for (std::size_t x : orbits.orbits[cp.variable_orbits[j]]) {
            out.extremizer[x] = sol.x[j];
        }
    }
    out.spectrum = fourier(out.extremizer);
    out.lp = {sol.status, sol.iterations, sol.max_residual, sol.objective, cp.lp.num_vars(), cp.lp.le_rhs.size()};
    out.admissibility_violation = check_admissible(p.kind, p.U, out.extremizer, out.spectrum).violation;
    out.admissibility_violation = std::max(out.admissibility_violation, std::abs(out.value - out.spectrum[0]));
    out.multipliers = sol.dual_le;
    return out;
}

inline ExtremalSolution solve_extremal(const ExtremalProblem& p, const SolverOptions& options = {})
{
    return solve_extremal(p, orbits_under(p.U.group()), options);
}

/// Optimal value only.
inline double extremal_constant(ProblemKind kind, const SymmetricSet& u)
{
    return solve_extremal({kind, u}).value;
}

struct ComplementarityResiduals {
    double r1 = 0.0; // || hat f . hat h - hat f(0) hat h(0) delta_0 ||
    double r2 = 0.0; // || f * h - |G|^{-1/2} ||
    double r3 = 0.0; // || f . h - delta_0 ||
};

inline ComplementarityResiduals complementarity(const GroupFunction& f, const GroupFunction& h)
{
    const auto& g = f.group();
    const auto fh = fourier(f);
    const auto hh = fourier(h);
    ComplementarityResiduals r;
    auto spec = fh.pointwise(hh);
    spec[0] -= fh[0] * hh[0];
    r.r1 = spec.sup_norm();
    const auto conv = convolve(f, h);
    r.r2 = max_abs_difference(conv, GroupFunction::constant(g, 1.0 / std::sqrt(static_cast<double>(g.order()))));
    r.r3 = max_abs_difference(f.pointwise(h), GroupFunction::delta0(g));
    return r;
}

inline constexpr double kCertificateTolerance = 1e-7;
inline constexpr const char* kCertificateSchema = "td-cert/1";

struct Certificate {
    ProblemKind kind = ProblemKind::Turan; // primal kind
    SymmetricSet U;
    ExtremalSolution primal;
    ExtremalSolution dual;
    double product = 0.0;
    ComplementarityResiduals residuals;

    bool passes(double tol = kCertificateTolerance) const
    {
        bool ok = std::abs(product - 1.0) <= tol && residuals.r1 <= tol && residuals.r2 <= tol;
        if (kind == ProblemKind::Delsarte) {
            ok = ok && residuals.r3 <= tol;
        }
        return ok && primal.admissibility_violation <= 1e-8 && dual.admissibility_violation <= 1e-8;
    }
};

/// Solves a primal problem and its dual, each by its own LP, and measures the
/// duality product and the complementarity identities through the group transforms.
inline Certificate certify(const ExtremalProblem& p, const OrbitPartition& orbits, const SolverOptions& options = {})
{
    if (!is_primal(p.kind)) {
        throw std::invalid_argument("certify expects a primal problem kind (turan or delsarte)");
    }
    Certificate c{p.kind, p.U, solve_extremal(p, orbits, options), solve_extremal({dual_of(p.kind), p.U}, orbits, options), 0.0, {}};
    c.product = c.primal.value * c.dual.value;
    c.residuals = complementarity(c.primal.extremizer, c.dual.extremizer);
    return c;
}

inline Certificate certify(const ExtremalProblem& p, const SolverOptions& options = {})
{
    return certify(p, orbits_under(p.U.group()), options);
}

struct BaselineWitness {
    GroupFunction h;
    GroupFunction spectrum;
    bool admissible = false;
    AdmissibilityReport report;
    double lower_bound = 0.0; // m(U)^{-1}
};

/// h = delta_0 + m(U)^{-1} 1_{U^c}. In finite groups this need not be admissible;
/// the report says whether it is.
inline BaselineWitness baseline_dual_witness(const SymmetricSet& u)
{
    if (u.is_whole()) {
        throw std::invalid_argument("baseline_dual_witness: U is the whole group");
    }
    const auto& g = u.group();
    const double inv_m = 1.0 / measure(u.subset());
    BaselineWitness w;
    w.h = GroupFunction::delta0(g) + GroupFunction::indicator(u.subset().complement()) * inv_m;
    w.spectrum = fourier(w.h);
    w.report = check_admissible(ProblemKind::DualDelsarte, u, w.h, w.spectrum);
    w.admissible = w.report.ok() && w.spectrum[0] >= inv_m - kTolerance;
    w.lower_bound = inv_m;
    return w;
}

} // namespace tdlab
