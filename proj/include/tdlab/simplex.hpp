#pragma once

// Dense two-phase primal simplex with dual multipliers.
//
// Problem form:   maximize c.x
//                 A_eq x  = b_eq
//                 A_le x <= b_le
//                 each x_j free, >= 0, <= 0 or fixed.
//
// Steepest-edge pricing; Bland's rule takes over after rows + cols consecutive
// degenerate pivots. Degenerate <= right-hand sides are spread by a small
// deterministic perturbation that is removed (dual simplex) before the end.
// Rows and columns are equilibrated by geometric means before solving. The
// final basis is refactored from the (scaled) input data to clean up the
// primal point and the multipliers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlab {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major dense matrix.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    void append_row(const std::vector<double>& row)
    {
        if (rows == 0 && cols == 0) {
            cols = row.size();
        }
        if (row.size() != cols) {
            throw std::invalid_argument("row length does not match matrix width");
        }
        data.insert(data.end(), row.begin(), row.end());
        ++rows;
    }
};

enum class BoundKind { Free, NonNegative, NonPositive, Fixed };

struct VariableBound {
    BoundKind kind = BoundKind::NonNegative;
    double value = 0.0; // only for Fixed
};

struct LinearProgram {
    std::vector<double> objective;
    DenseMatrix eq_matrix;
    std::vector<double> eq_rhs;
    DenseMatrix le_matrix;
    std::vector<double> le_rhs;
    std::vector<VariableBound> bounds;

    LinearProgram() = default;

    explicit LinearProgram(std::size_t num_vars)
        : objective(num_vars, 0.0), eq_matrix(0, num_vars), le_matrix(0, num_vars), bounds(num_vars)
    {
    }

    std::size_t num_vars() const { return objective.size(); }

    void add_le(const std::vector<double>& row, double rhs)
    {
        le_matrix.append_row(row);
        le_rhs.push_back(rhs);
    }

    void add_eq(const std::vector<double>& row, double rhs)
    {
        eq_matrix.append_row(row);
        eq_rhs.push_back(rhs);
    }

    void validate() const
    {
        const std::size_t n = num_vars();
        if (bounds.size() != n) {
            throw std::invalid_argument("bounds length does not match variable count");
        }
        if (eq_matrix.rows > 0 && eq_matrix.cols != n) {
            throw std::invalid_argument("equality matrix width does not match variable count");
        }
        if (le_matrix.rows > 0 && le_matrix.cols != n) {
            throw std::invalid_argument("inequality matrix width does not match variable count");
        }
        if (eq_matrix.rows != eq_rhs.size() || le_matrix.rows != le_rhs.size()) {
            throw std::invalid_argument("right-hand side length does not match row count");
        }
        auto finite = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        };
        if (!finite(objective) || !finite(eq_matrix.data) || !finite(le_matrix.data) || !finite(eq_rhs) || !finite(le_rhs)) {
            throw std::invalid_argument("linear program contains NaN or Inf");
        }
        for (const auto& b : bounds) {
            if (b.kind == BoundKind::Fixed && !std::isfinite(b.value)) {
                throw std::invalid_argument("fixed bound value is not finite");
            }
        }
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::Optimal:
        return "optimal";
    case LpStatus::Infeasible:
        return "infeasible";
    case LpStatus::Unbounded:
        return "unbounded";
    }
    return "unknown";
}

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    std::vector<double> dual_eq;
    std::vector<double> dual_le;
    double objective = 0.0;
    int iterations = 0;
    double max_residual = 0.0;
    std::vector<std::size_t> basis; // internal column indices, for determinism checks
};

struct ResidualReport {
    double primal = 0.0;
    double dual = 0.0;
    double complementarity = 0.0;
    double gap = 0.0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;

    double max() const { return std::max({primal, dual, complementarity, gap}); }
    bool ok(double tol = 1e-8) const { return max() <= tol; }
};

/// Recomputes primal, dual, complementarity residuals and the duality gap from the
/// input data alone. The gap is reported relative to 1 + |primal objective|.
inline ResidualReport check_certificate(const LinearProgram& lp, const LpSolution& sol)
{
    using ld = long double;
    ResidualReport rep;
    const std::size_t n = lp.num_vars();
    if (sol.x.size() != n || sol.dual_eq.size() != lp.eq_rhs.size() || sol.dual_le.size() != lp.le_rhs.size()) {
        rep.primal = rep.dual = rep.complementarity = rep.gap = std::numeric_limits<double>::infinity();
        return rep;
    }
    std::vector<ld> reduced(n);
    for (std::size_t j = 0; j < n; ++j) {
        reduced[j] = lp.objective[j];
    }
    ld pobj = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
        pobj += static_cast<ld>(lp.objective[j]) * sol.x[j];
    }
    ld dobj = 0.0L;
    for (std::size_t i = 0; i < lp.eq_rhs.size(); ++i) {
        ld ax = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            ax += static_cast<ld>(lp.eq_matrix(i, j)) * sol.x[j];
            reduced[j] -= static_cast<ld>(lp.eq_matrix(i, j)) * sol.dual_eq[i];
        }
        rep.primal = std::max(rep.primal, static_cast<double>(std::fabs(ax - lp.eq_rhs[i])));
        dobj += static_cast<ld>(lp.eq_rhs[i]) * sol.dual_eq[i];
    }
    for (std::size_t i = 0; i < lp.le_rhs.size(); ++i) {
        ld ax = 0.0L;
        const double y = sol.dual_le[i];
        for (std::size_t j = 0; j < n; ++j) {
            ax += static_cast<ld>(lp.le_matrix(i, j)) * sol.x[j];
            reduced[j] -= static_cast<ld>(lp.le_matrix(i, j)) * y;
        }
        const ld slack = lp.le_rhs[i] - ax;
        rep.primal = std::max(rep.primal, static_cast<double>(std::max(0.0L, -slack)));
        rep.dual = std::max(rep.dual, std::max(0.0, -y));
        rep.complementarity = std::max(rep.complementarity, static_cast<double>(std::fabs(slack * y)));
        dobj += static_cast<ld>(lp.le_rhs[i]) * y;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const ld r = reduced[j];
        const double xj = sol.x[j];
        switch (lp.bounds[j].kind) {
        case BoundKind::Free:
            rep.dual = std::max(rep.dual, static_cast<double>(std::fabs(r)));
            break;
        case BoundKind::NonNegative:
            rep.primal = std::max(rep.primal, std::max(0.0, -xj));
            rep.dual = std::max(rep.dual, static_cast<double>(std::max(0.0L, r)));
            rep.complementarity = std::max(rep.complementarity, static_cast<double>(std::fabs(r * xj)));
            break;
        case BoundKind::NonPositive:
            rep.primal = std::max(rep.primal, std::max(0.0, xj));
            rep.dual = std::max(rep.dual, static_cast<double>(std::max(0.0L, -r)));
            rep.complementarity = std::max(rep.complementarity, static_cast<double>(std::fabs(r * xj)));
            break;
        case BoundKind::Fixed:
            rep.primal = std::max(rep.primal, std::fabs(xj - lp.bounds[j].value));
            dobj += r * lp.bounds[j].value;
            break;
        }
    }
    rep.primal_objective = static_cast<double>(pobj);
    rep.dual_objective = static_cast<double>(dobj);
    rep.gap = static_cast<double>(std::fabs(pobj - dobj) / (1.0L + std::fabs(pobj)));
    return rep;
}

struct SolverOptions {
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-10;
    double feasibility_tol = 1e-9;
    int bland_after = -1; // consecutive degenerate pivots before Bland's rule; < 0: rows + cols
    int max_iterations = 1'000'000;
    bool scale = true;
    bool perturb = true; // spread degenerate <= right-hand sides while pivoting
    bool steepest_edge = true; // price by d_k^2 / (1 + |column k|^2) instead of d_k
    double accept_residual = 1e-8;
};

namespace detail {

// Dense LU with partial pivoting; returns false if singular.
class DenseLu {
public:
    bool factor(DenseMatrix a)
    {
        n_ = a.rows;
        lu_ = std::move(a);
        perm_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            perm_[i] = i;
        }
        double amax = 0.0;
        for (double v : lu_.data) {
            amax = std::max(amax, std::abs(v));
        }
        const double tiny = 1e-13 * std::max(1.0, amax);
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t p = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n_; ++i) {
                if (std::abs(lu_(i, k)) > best) {
                    best = std::abs(lu_(i, k));
                    p = i;
                }
            }
            if (best <= tiny) {
                return false;
            }
            if (p != k) {
                for (std::size_t j = 0; j < n_; ++j) {
                    std::swap(lu_(k, j), lu_(p, j));
                }
                std::swap(perm_[k], perm_[p]);
            }
            const double piv = lu_(k, k);
            for (std::size_t i = k + 1; i < n_; ++i) {
                const double f = lu_(i, k) / piv;
                lu_(i, k) = f;
                if (f == 0.0) {
                    continue;
                }
                double* ri = &lu_.data[i * n_];
                const double* rk = &lu_.data[k * n_];
                for (std::size_t j = k + 1; j < n_; ++j) {
                    ri[j] -= f * rk[j];
                }
            }
        }
        return true;
    }

    // Solves A x = b.
    std::vector<double> solve(const std::vector<double>& b) const
    {
        std::vector<double> y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) {
                s -= lu_(i, j) * y[j];
            }
            y[i] = s;
        }
        for (std::size_t i = n_; i-- > 0;) {
            double s = y[i];
            for (std::size_t j = i + 1; j < n_; ++j) {
                s -= lu_(i, j) * y[j];
            }
            y[i] = s / lu_(i, i);
        }
        return y;
    }

    // Solves A^T x = b.
    std::vector<double> solve_transposed(const std::vector<double>& b) const
    {
        std::vector<double> z(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < i; ++j) {
                s -= lu_(j, i) * z[j];
            }
            z[i] = s / lu_(i, i);
        }
        for (std::size_t i = n_; i-- > 0;) {
            double s = z[i];
            for (std::size_t j = i + 1; j < n_; ++j) {
                s -= lu_(j, i) * z[j];
            }
            z[i] = s;
        }
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            x[perm_[i]] = z[i];
        }
        return x;
    }

private:
    std::size_t n_ = 0;
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

class SimplexTableau {
public:
    SimplexTableau(const LinearProgram& lp, const SolverOptions& opt) : lp_(lp), opt_(opt) { build(); }

    LpSolution run()
    {
        LpSolution sol;
        if (num_art_ > 0) {
            std::vector<double> cost(ncols_, 0.0);
            for (std::size_t k = art_begin_; k < ncols_; ++k) {
                cost[k] = -1.0;
            }
            set_objective(cost);
            const auto st = iterate(/*phase_one=*/true);
            if (st != Step::Optimal) {
                throw SolverError("phase one did not terminate at an optimum");
            }
            double infeas = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] >= art_begin_) {
                    infeas += std::max(0.0, rhs(i));
                }
            }
            if (infeas > opt_.feasibility_tol * (1.0 + rhs_norm_)) {
                sol.status = LpStatus::Infeasible;
                sol.iterations = iterations_;
                return sol;
            }
            drive_out_artificials();
        }
        std::vector<double> cost(ncols_, 0.0);
        for (std::size_t k = 0; k < nstruct_; ++k) {
            cost[k] = c_[k];
        }
        set_objective(cost);
        auto st = iterate(/*phase_one=*/false);
        if (st == Step::Optimal && opt_.perturb) {
            st = restore_rhs();
        }
        sol.iterations = iterations_;
        if (st == Step::Unbounded) {
            sol.status = LpStatus::Unbounded;
            return sol;
        }
        sol.status = LpStatus::Optimal;
        extract(sol, cost);
        return sol;
    }

private:
    enum class Step { Optimal, Unbounded };

    void build()
    {
        const std::size_t n = lp_.num_vars();
        const std::size_t meq = lp_.eq_rhs.size();
        const std::size_t mle = lp_.le_rhs.size();
        m_ = meq + mle;

        // Map user variables to internal columns.
        col_of_var_.assign(n, npos);
        var_sign_.assign(n, 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto kind = lp_.bounds[j].kind;
            if (kind == BoundKind::Fixed) {
                continue;
            }
            col_of_var_[j] = nstruct_++;
            var_sign_[j] = kind == BoundKind::NonPositive ? -1.0 : 1.0;
            free_.push_back(kind == BoundKind::Free);
        }

        DenseMatrix a(m_, nstruct_);
        std::vector<double> b(m_);
        auto fill_row = [&](std::size_t i, const DenseMatrix& src, std::size_t r, double rhs) {
            long double shift = 0.0L;
            for (std::size_t j = 0; j < n; ++j) {
                const double v = src(r, j);
                if (col_of_var_[j] == npos) {
                    shift += static_cast<long double>(v) * lp_.bounds[j].value;
                } else {
                    a(i, col_of_var_[j]) = v * var_sign_[j];
                }
            }
            b[i] = static_cast<double>(rhs - shift);
        };
        for (std::size_t r = 0; r < meq; ++r) {
            fill_row(r, lp_.eq_matrix, r, lp_.eq_rhs[r]);
        }
        for (std::size_t r = 0; r < mle; ++r) {
            fill_row(meq + r, lp_.le_matrix, r, lp_.le_rhs[r]);
        }
        c_.assign(nstruct_, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (col_of_var_[j] != npos) {
                c_[col_of_var_[j]] = lp_.objective[j] * var_sign_[j];
            }
        }

        row_scale_.assign(m_, 1.0);
        col_scale_.assign(nstruct_, 1.0);
        if (opt_.scale) {
            equilibrate(a);
        }
        for (std::size_t i = 0; i < m_; ++i) {
            b[i] *= row_scale_[i];
        }
        for (std::size_t k = 0; k < nstruct_; ++k) {
            c_[k] *= col_scale_[k];
        }

        // Column layout: structural | slacks (one per <= row) | artificials.
        slack_begin_ = nstruct_;
        art_begin_ = slack_begin_ + mle;
        row_flip_.assign(m_, 1.0);
        std::vector<bool> needs_art(m_, false);
        for (std::size_t i = 0; i < m_; ++i) {
            row_flip_[i] = b[i] < 0.0 ? -1.0 : 1.0;
            needs_art[i] = i < meq || row_flip_[i] < 0.0;
            if (needs_art[i]) {
                ++num_art_;
            }
        }
        ncols_ = art_begin_ + num_art_;
        width_ = ncols_ + 2; // working rhs, then the unperturbed rhs
        tab_.assign(m_ * width_, 0.0);
        basis_.assign(m_, 0);
        unit_col_.assign(m_, npos);
        unit_sign_.assign(m_, 1.0);
        std::size_t next_art = art_begin_;
        for (std::size_t i = 0; i < m_; ++i) {
            double* row = &tab_[i * width_];
            for (std::size_t k = 0; k < nstruct_; ++k) {
                row[k] = row_flip_[i] * a(i, k);
            }
            if (i >= meq) {
                const std::size_t s = slack_begin_ + (i - meq);
                row[s] = row_flip_[i];
                unit_col_[i] = s;
                unit_sign_[i] = row_flip_[i];
            }
            if (needs_art[i]) {
                row[next_art] = 1.0;
                basis_[i] = next_art;
                unit_col_[i] = next_art;
                unit_sign_[i] = 1.0;
                ++next_art;
            } else {
                basis_[i] = slack_begin_ + (i - meq);
            }
            row[ncols_] = row_flip_[i] * b[i];
            row[ncols_ + 1] = row[ncols_];
            rhs_norm_ = std::max(rhs_norm_, std::abs(b[i]));
        }
        if (opt_.perturb) {
            // Distinct positive shifts on rows whose slack starts basic; the true rhs is
            // restored, and repaired by dual simplex if needed, once phase two ends.
            for (std::size_t i = meq; i < m_; ++i) {
                if (needs_art[i]) {
                    continue;
                }
                const double u = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
                tab_[i * width_ + ncols_] += kPerturbation * (1.0 + rhs_norm_) * (0.5 + 0.5 * u);
            }
        }
        col_flip_.assign(ncols_, 1.0);
        is_basic_.assign(ncols_, false);
        for (std::size_t i = 0; i < m_; ++i) {
            is_basic_[basis_[i]] = true;
        }
        original_ = tab_;
        free_.resize(ncols_, false);
        bland_after_ = opt_.bland_after >= 0 ? opt_.bland_after : static_cast<int>(m_ + ncols_);
    }

    // Entries this far below the largest in their row or column do not steer the scaling.
    static constexpr double kNegligible = 1e-8;

    void equilibrate(DenseMatrix& a)
    {
        for (int pass = 0; pass < 6; ++pass) {
            for (std::size_t i = 0; i < m_; ++i) {
                double hi = 0.0;
                for (std::size_t k = 0; k < nstruct_; ++k) {
                    hi = std::max(hi, std::abs(a(i, k)));
                }
                double lo = hi;
                for (std::size_t k = 0; k < nstruct_; ++k) {
                    const double v = std::abs(a(i, k));
                    if (v > kNegligible * hi) {
                        lo = std::min(lo, v);
                    }
                }
                if (hi > 0.0) {
                    const double s = 1.0 / std::sqrt(lo * hi);
                    row_scale_[i] *= s;
                    for (std::size_t k = 0; k < nstruct_; ++k) {
                        a(i, k) *= s;
                    }
                }
            }
            for (std::size_t k = 0; k < nstruct_; ++k) {
                double hi = 0.0;
                for (std::size_t i = 0; i < m_; ++i) {
                    hi = std::max(hi, std::abs(a(i, k)));
                }
                double lo = hi;
                for (std::size_t i = 0; i < m_; ++i) {
                    const double v = std::abs(a(i, k));
                    if (v > kNegligible * hi) {
                        lo = std::min(lo, v);
                    }
                }
                if (hi > 0.0) {
                    const double s = 1.0 / std::sqrt(lo * hi);
                    col_scale_[k] *= s;
                    for (std::size_t i = 0; i < m_; ++i) {
                        a(i, k) *= s;
                    }
                }
            }
        }
    }

    static constexpr double kPerturbation = 1e-7;

    double rhs(std::size_t i) const { return tab_[i * width_ + ncols_]; }

    void set_objective(const std::vector<double>& cost)
    {
        cost_ = cost;
        obj_.assign(width_, 0.0);
        for (std::size_t k = 0; k < ncols_; ++k) {
            obj_[k] = -cost[k] * col_flip_[k];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]] * col_flip_[basis_[i]];
            if (cb == 0.0) {
                continue;
            }
            const double* row = &tab_[i * width_];
            for (std::size_t k = 0; k < width_; ++k) {
                obj_[k] += cb * row[k];
            }
        }
    }

    bool enterable(std::size_t k) const { return !is_basic_[k] && k < art_begin_; }

    Step iterate(bool phase_one)
    {
        const double otol = opt_.optimality_tol;
        for (;;) {
            if (iterations_ >= opt_.max_iterations) {
                throw SolverError("simplex iteration limit reached");
            }
            const bool bland = degenerate_run_ >= bland_after_;
            const bool steep = opt_.steepest_edge && !bland;
            if (steep) {
                col_norm_.assign(ncols_, 1.0);
                for (std::size_t i = 0; i < m_; ++i) {
                    const double* row = &tab_[i * width_];
                    for (std::size_t k = 0; k < ncols_; ++k) {
                        col_norm_[k] += row[k] * row[k];
                    }
                }
            }
            std::size_t enter = npos;
            double best = 0.0;
            for (std::size_t k = 0; k < ncols_; ++k) {
                if (!enterable(k)) {
                    continue;
                }
                const double d = obj_[k];
                double score = 0.0;
                if (free_[k]) {
                    score = std::abs(d) > otol ? std::abs(d) : 0.0;
                } else if (d < -otol) {
                    score = -d;
                }
                if (score <= 0.0) {
                    continue;
                }
                if (steep) {
                    score = score * score / col_norm_[k];
                }
                if (bland) {
                    enter = k;
                    break;
                }
                if (score > best) {
                    best = score;
                    enter = k;
                }
            }
            if (enter == npos) {
                return Step::Optimal;
            }
            if (free_[enter] && obj_[enter] > 0.0) {
                flip_column(enter);
            }
            const std::size_t leave = ratio_test(enter, bland);
            if (leave == npos) {
                if (phase_one) {
                    throw SolverError("phase one reported an unbounded direction");
                }
                return Step::Unbounded;
            }
            const bool degenerate = rhs(leave) <= 1e-12 * (1.0 + rhs_norm_);
            degenerate_run_ = degenerate ? degenerate_run_ + 1 : 0;
            pivot(leave, enter);
            ++iterations_;
        }
    }

    // Minimum ratio over rows with a positive pivot entry; free basic variables never
    // leave. Entries below pivot_tol relative to the column's largest are ignored.
    // Near-ties go to the larger pivot entry, or under Bland's rule to the smallest
    // basic index.
    std::size_t ratio_test(std::size_t enter, bool bland) const
    {
        double big = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (!free_[basis_[i]]) {
                big = std::max(big, std::abs(tab_[i * width_ + enter]));
            }
        }
        const double floor = opt_.pivot_tol * std::max(1.0, big);
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = tab_[i * width_ + enter];
            if (!free_[basis_[i]] && a > floor) {
                best_ratio = std::min(best_ratio, std::max(0.0, rhs(i)) / a);
            }
        }
        if (best_ratio == std::numeric_limits<double>::infinity()) {
            return npos;
        }
        const double slack = 1e-12 * (1.0 + best_ratio);
        std::size_t leave = npos;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = tab_[i * width_ + enter];
            if (free_[basis_[i]] || a <= floor || std::max(0.0, rhs(i)) / a > best_ratio + slack) {
                continue;
            }
            if (leave == npos || (bland ? basis_[i] < basis_[leave] : a > tab_[leave * width_ + enter])) {
                leave = i;
            }
        }
        return leave;
    }

    // Swap in the unperturbed rhs. The basis stays dual feasible, so dual simplex
    // pivots bring it back to primal feasibility; a final primal pass mops up.
    Step restore_rhs()
    {
        const double ftol = opt_.feasibility_tol * (1.0 + rhs_norm_);
        for (std::size_t i = 0; i < m_; ++i) {
            double& r = tab_[i * width_ + ncols_];
            r = tab_[i * width_ + ncols_ + 1];
            if (!free_[basis_[i]] && r < 0.0 && r >= -ftol) {
                r = 0.0;
            }
        }
        set_objective(std::vector<double>(cost_));
        for (;;) {
            if (iterations_ >= opt_.max_iterations) {
                throw SolverError("simplex iteration limit reached");
            }
            std::size_t leave = npos;
            double worst = -ftol;
            for (std::size_t i = 0; i < m_; ++i) {
                if (free_[basis_[i]] || basis_[i] >= art_begin_) {
                    continue;
                }
                if (rhs(i) < worst) {
                    worst = rhs(i);
                    leave = i;
                }
            }
            if (leave == npos) {
                break;
            }
            const double* row = &tab_[leave * width_];
            double big = 0.0;
            for (std::size_t k = 0; k < ncols_; ++k) {
                big = std::max(big, std::abs(row[k]));
            }
            const double floor = opt_.pivot_tol * std::max(1.0, big);
            std::size_t enter = npos;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < ncols_; ++k) {
                if (!enterable(k)) {
                    continue;
                }
                const double a = free_[k] ? -std::abs(row[k]) : row[k];
                if (a >= -floor) {
                    continue;
                }
                const double ratio = std::max(0.0, obj_[k]) / -a;
                if (enter == npos || ratio < best_ratio - 1e-12 ||
                    (ratio <= best_ratio + 1e-12 && -a > std::abs(row[enter]))) {
                    best_ratio = std::min(best_ratio, ratio);
                    enter = k;
                }
            }
            if (enter == npos) {
                throw SolverError("dual simplex found no entering column");
            }
            if (free_[enter] && row[enter] > 0.0) {
                flip_column(enter);
            }
            pivot(leave, enter);
            ++iterations_;
        }
        return iterate(/*phase_one=*/false);
    }

    void flip_column(std::size_t k)
    {
        for (std::size_t i = 0; i < m_; ++i) {
            tab_[i * width_ + k] = -tab_[i * width_ + k];
        }
        obj_[k] = -obj_[k];
        col_flip_[k] = -col_flip_[k];
    }

    void pivot(std::size_t r, std::size_t k)
    {
        double* prow = &tab_[r * width_];
        const double piv = prow[k];
        for (std::size_t j = 0; j < width_; ++j) {
            prow[j] /= piv;
        }
        prow[k] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) {
                continue;
            }
            double* row = &tab_[i * width_];
            const double f = row[k];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < width_; ++j) {
                row[j] -= f * prow[j];
            }
            row[k] = 0.0;
            if (!free_[basis_[i]] && row[ncols_] < 0.0 && row[ncols_] > -1e-11) {
                row[ncols_] = 0.0;
            }
        }
        const double f = obj_[k];
        if (f != 0.0) {
            for (std::size_t j = 0; j < width_; ++j) {
                obj_[j] -= f * prow[j];
            }
            obj_[k] = 0.0;
        }
        is_basic_[basis_[r]] = false;
        basis_[r] = k;
        is_basic_[k] = true;
    }

    void drive_out_artificials()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < art_begin_) {
                continue;
            }
            const double* row = &tab_[i * width_];
            double best = 0.0;
            std::size_t pick = npos;
            for (std::size_t k = 0; k < art_begin_; ++k) {
                if (is_basic_[k]) {
                    continue;
                }
                if (std::abs(row[k]) > std::max(best, 1e-9)) {
                    best = std::abs(row[k]);
                    pick = k;
                }
            }
            if (pick != npos) {
                pivot(i, pick);
            }
            // Otherwise the row is redundant; its artificial stays basic at zero.
        }
    }

    void extract(LpSolution& sol, const std::vector<double>& cost)
    {
        // Tableau values.
        std::vector<double> xcol(ncols_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            xcol[basis_[i]] = rhs(i);
        }
        std::vector<double> w(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            w[i] = obj_[unit_col_[i]] / (unit_sign_[i] * col_flip_[unit_col_[i]]);
        }
        auto candidate_from = [&](const std::vector<double>& xc, const std::vector<double>& wc) {
            LpSolution s = sol;
            fill_user_solution(s, xc, wc);
            return s;
        };
        LpSolution best = candidate_from(xcol, w);
        double best_res = check_certificate(lp_, best).max();

        // Refactor the final basis from the original tableau.
        DenseMatrix bm(m_, m_);
        std::vector<double> b0(m_);
        std::vector<double> cb(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t r = 0; r < m_; ++r) {
                bm(r, i) = original_[r * width_ + basis_[i]] * col_flip_[basis_[i]];
            }
            b0[i] = original_[i * width_ + ncols_ + 1];
            cb[i] = cost[basis_[i]] * col_flip_[basis_[i]];
        }
        DenseLu lu;
        if (m_ > 0 && lu.factor(bm)) {
            const auto xb = lu.solve(b0);
            const auto wr = lu.solve_transposed(cb);
            std::vector<double> xr(ncols_, 0.0);
            for (std::size_t i = 0; i < m_; ++i) {
                xr[basis_[i]] = xb[i];
            }
            // Clip bounded variables at their bound.
            for (std::size_t k = 0; k < ncols_; ++k) {
                if (!free_[k] && xr[k] < 0.0 && xr[k] > -1e-9) {
                    xr[k] = 0.0;
                }
            }
            LpSolution refined = candidate_from(xr, wr);
            const double res = check_certificate(lp_, refined).max();
            if (res <= best_res) {
                best = std::move(refined);
                best_res = res;
            }
        }
        sol = std::move(best);
        sol.max_residual = best_res;
        sol.basis = basis_;
        if (!(best_res <= opt_.accept_residual)) {
            throw SolverError("simplex terminated with residual " + std::to_string(best_res) + " above tolerance");
        }
    }

    void fill_user_solution(LpSolution& s, const std::vector<double>& xcol, const std::vector<double>& w) const
    {
        const std::size_t n = lp_.num_vars();
        const std::size_t meq = lp_.eq_rhs.size();
        s.x.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = col_of_var_[j];
            if (k == npos) {
                s.x[j] = lp_.bounds[j].value;
            } else {
                s.x[j] = var_sign_[j] * col_scale_[k] * col_flip_[k] * xcol[k];
            }
        }
        s.dual_eq.assign(meq, 0.0);
        s.dual_le.assign(lp_.le_rhs.size(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double y = row_flip_[i] * row_scale_[i] * w[i];
            if (i < meq) {
                s.dual_eq[i] = y;
            } else {
                s.dual_le[i - meq] = y;
            }
        }
        long double obj = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            obj += static_cast<long double>(lp_.objective[j]) * s.x[j];
        }
        s.objective = static_cast<double>(obj);
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    const LinearProgram& lp_;
    SolverOptions opt_;
    std::size_t m_ = 0;
    std::size_t nstruct_ = 0;
    std::size_t slack_begin_ = 0;
    std::size_t art_begin_ = 0;
    std::size_t num_art_ = 0;
    std::size_t ncols_ = 0;
    std::size_t width_ = 0;
    std::vector<std::size_t> col_of_var_;
    std::vector<double> var_sign_;
    std::vector<bool> free_;
    std::vector<double> c_;
    std::vector<double> row_scale_;
    std::vector<double> col_scale_;
    std::vector<double> row_flip_;
    std::vector<double> col_flip_;
    std::vector<double> tab_;
    std::vector<double> original_;
    std::vector<double> obj_;
    std::vector<double> cost_;
    std::vector<double> col_norm_;
    std::vector<std::size_t> basis_;
    std::vector<bool> is_basic_;
    std::vector<std::size_t> unit_col_;
    std::vector<double> unit_sign_;
    double rhs_norm_ = 0.0;
    int iterations_ = 0;
    int bland_after_ = 0;
    int degenerate_run_ = 0;
};

} // namespace detail

inline LpSolution solve(const LinearProgram& lp, const SolverOptions& options = {})
{
    lp.validate();
    detail::SimplexTableau tableau(lp, options);
    return tableau.run();
}

} // namespace tdlab
