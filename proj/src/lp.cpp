#include "tiltset/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tiltset::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;
constexpr int kMaxIterations = 20000;
constexpr int kRefactorInterval = 40;

enum class VarState { basic, at_lower, at_upper, free_at_zero };

// Row-major tableau: pivots are row operations.
using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::RowMajor>;

// Bounded-variable two-phase simplex. Entering variable by Bland's rule
// (lowest eligible index, no cycling in exact arithmetic); the leaving row
// prefers the numerically largest pivot among (near-)tied ratios, and the
// tableau is refactorized from the original columns at a fixed cadence so
// degenerate pivot runs cannot let it drift.
struct Simplex {
    int m;
    int n;
    int total;                      // n structural + m artificial columns
    Tableau a_ext;                  // original [A | S], never modified
    Eigen::VectorXd rhs;            // original b
    Tableau t;                      // B^-1 a_ext
    Eigen::VectorXd lower, upper;
    std::vector<VarState> state;
    std::vector<int> basis;
    Eigen::VectorXd basic_value;
    Eigen::VectorXd z;
    Eigen::VectorXd cost;           // active phase cost over all columns
    bool phase_two = false;
    int pivots_since_refactor = 0;

    double nonbasic_value(int j) const {
        switch (state[j]) {
            case VarState::at_lower: return lower(j);
            case VarState::at_upper: return upper(j);
            default: return 0.0;
        }
    }

    bool eligible(int j, int& dir) const {
        if (state[j] == VarState::basic) return false;
        if (phase_two && j >= n) return false;
        if (upper(j) - lower(j) == 0.0) return false;
        if (state[j] == VarState::at_lower && z(j) < -kReducedCostTol) {
            dir = +1;
            return true;
        }
        if (state[j] == VarState::at_upper && z(j) > kReducedCostTol) {
            dir = -1;
            return true;
        }
        if (state[j] == VarState::free_at_zero &&
            std::abs(z(j)) > kReducedCostTol) {
            dir = z(j) > 0 ? -1 : +1;
            return true;
        }
        return false;
    }

    // Rebuilds t, basic_value and z from the original data. Clears the
    // rounding accumulated by pivot row operations.
    void refactorize() {
        Eigen::MatrixXd b_mat(m, m);
        for (int i = 0; i < m; ++i) b_mat.col(i) = a_ext.col(basis[i]);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(b_mat);
        t = lu.solve(Eigen::MatrixXd(a_ext));

        Eigen::VectorXd shifted = rhs;
        for (int j = 0; j < total; ++j) {
            if (state[j] != VarState::basic) {
                const double v = nonbasic_value(j);
                if (v != 0.0) shifted -= a_ext.col(j) * v;
            }
        }
        basic_value = lu.solve(shifted);
        clamp_basics();

        z = cost;
        for (int i = 0; i < m; ++i) {
            const double cb = cost(basis[i]);
            if (cb != 0.0) z -= cb * t.row(i).transpose();
        }
        for (int i = 0; i < m; ++i) z(basis[i]) = 0.0;
        pivots_since_refactor = 0;
    }

    // Degenerate pivots can push basic values out of bounds by rounding;
    // snap them back so ratio tests stay meaningful.
    void clamp_basics() {
        for (int i = 0; i < m; ++i) {
            const int j = basis[i];
            if (std::isfinite(lower(j)) && basic_value(i) < lower(j) &&
                basic_value(i) > lower(j) - 1e-7) {
                basic_value(i) = lower(j);
            }
            if (std::isfinite(upper(j)) && basic_value(i) > upper(j) &&
                basic_value(i) < upper(j) + 1e-7) {
                basic_value(i) = upper(j);
            }
        }
    }

    void set_phase_cost(const Eigen::VectorXd& c) {
        cost = c;
        refactorize();
    }

    bool iterate() {
        bool refactored_at_stall = false;
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            if (pivots_since_refactor >= kRefactorInterval) refactorize();

            int enter = -1, dir = 0;
            for (int j = 0; j < total; ++j) {
                if (eligible(j, dir)) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) {
                // Confirm optimality against a fresh factorization once.
                if (!refactored_at_stall && pivots_since_refactor > 0) {
                    refactorize();
                    refactored_at_stall = true;
                    continue;
                }
                return true;
            }
            refactored_at_stall = false;

            // Ratio test.
            double step = kInf;
            const double span = upper(enter) - lower(enter);
            if (std::isfinite(span)) step = span;
            int leave_row = -1;
            for (int i = 0; i < m; ++i) {
                const double d = dir * t(i, enter);
                double limit = kInf;
                if (d > kPivotTol) {
                    if (std::isfinite(lower(basis[i]))) {
                        limit = (basic_value(i) - lower(basis[i])) / d;
                    }
                } else if (d < -kPivotTol) {
                    if (std::isfinite(upper(basis[i]))) {
                        limit = (upper(basis[i]) - basic_value(i)) / (-d);
                    }
                } else {
                    continue;
                }
                if (limit < 0) limit = 0;
                if (limit < step - kRatioTieTol) {
                    step = limit;
                    leave_row = i;
                } else if (limit <= step + kRatioTieTol && leave_row >= 0 &&
                           std::abs(t(i, enter)) >
                               std::abs(t(leave_row, enter))) {
                    // Near-tie: take the stabler (larger) pivot.
                    step = std::min(step, limit);
                    leave_row = i;
                }
            }

            if (!std::isfinite(step)) return false;  // unbounded ray

            if (leave_row < 0) {
                for (int i = 0; i < m; ++i) {
                    basic_value(i) -= dir * step * t(i, enter);
                }
                state[enter] =
                    dir > 0 ? VarState::at_upper : VarState::at_lower;
                clamp_basics();
                continue;
            }

            const double enter_value = nonbasic_value(enter) + dir * step;
            for (int i = 0; i < m; ++i) {
                basic_value(i) -= dir * step * t(i, enter);
            }
            const int leave = basis[leave_row];
            const double d_leave = dir * t(leave_row, enter);
            state[leave] =
                d_leave > 0 ? VarState::at_lower : VarState::at_upper;
            basic_value(leave_row) = enter_value;

            const double pivot = t(leave_row, enter);
            t.row(leave_row) /= pivot;
            for (int i = 0; i < m; ++i) {
                if (i == leave_row) continue;
                const double f = t(i, enter);
                if (f != 0.0) t.row(i) -= f * t.row(leave_row);
            }
            const double zf = z(enter);
            if (zf != 0.0) z -= zf * t.row(leave_row).transpose();

            basis[leave_row] = enter;
            state[enter] = VarState::basic;
            clamp_basics();
            ++pivots_since_refactor;
        }
        throw std::runtime_error("lp: iteration limit hit");
    }
};

void check_problem(const LpProblem& p) {
    const auto n = p.cost.size();
    const auto m = p.eq_lhs.rows();
    if (p.eq_lhs.cols() != n || p.eq_rhs.size() != m ||
        p.lower.size() != n || p.upper.size() != n) {
        throw std::invalid_argument("lp: inconsistent problem dimensions");
    }
    if (!p.cost.allFinite() || !p.eq_lhs.allFinite() || !p.eq_rhs.allFinite()) {
        throw std::invalid_argument("lp: cost/constraints must be finite");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isnan(p.lower(j)) || std::isnan(p.upper(j))) {
            throw std::invalid_argument("lp: NaN bound");
        }
        if (p.lower(j) > p.upper(j)) {
            throw std::invalid_argument("lp: lower bound exceeds upper bound");
        }
    }
}

}  // namespace

LpSolution solve(const LpProblem& problem) {
    check_problem(problem);
    const int n = static_cast<int>(problem.cost.size());
    const int m = static_cast<int>(problem.eq_lhs.rows());

    if (m == 0) {
        // Pure box problem: each coordinate minimizes independently.
        Eigen::VectorXd x(n);
        for (int j = 0; j < n; ++j) {
            const double c = problem.cost(j);
            if (c > 0) {
                if (!std::isfinite(problem.lower(j))) {
                    return {Status::unbounded, {}, 0.0};
                }
                x(j) = problem.lower(j);
            } else if (c < 0) {
                if (!std::isfinite(problem.upper(j))) {
                    return {Status::unbounded, {}, 0.0};
                }
                x(j) = problem.upper(j);
            } else {
                x(j) = std::isfinite(problem.lower(j)) ? problem.lower(j)
                       : std::isfinite(problem.upper(j)) ? problem.upper(j)
                                                         : 0.0;
            }
        }
        return {Status::optimal, x, problem.cost.dot(x)};
    }

    Simplex s;
    s.m = m;
    s.n = n;
    s.total = n + m;
    s.lower.resize(s.total);
    s.upper.resize(s.total);
    s.lower.head(n) = problem.lower;
    s.upper.head(n) = problem.upper;
    s.lower.tail(m).setZero();
    s.upper.tail(m).setConstant(kInf);
    s.state.assign(s.total, VarState::at_lower);
    s.rhs = problem.eq_rhs;

    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(problem.lower(j))) {
            s.state[j] = VarState::at_lower;
            x0(j) = problem.lower(j);
        } else if (std::isfinite(problem.upper(j))) {
            s.state[j] = VarState::at_upper;
            x0(j) = problem.upper(j);
        } else {
            s.state[j] = VarState::free_at_zero;
            x0(j) = 0.0;
        }
    }

    const Eigen::VectorXd residual = problem.eq_rhs - problem.eq_lhs * x0;
    s.a_ext.resize(m, s.total);
    s.a_ext.leftCols(n) = problem.eq_lhs;
    s.a_ext.rightCols(m).setZero();
    s.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        s.a_ext(i, n + i) = residual(i) < 0 ? -1.0 : 1.0;
        s.basis[i] = n + i;
        s.state[n + i] = VarState::basic;
    }

    // Crash: a structural column that is a singleton in its row can start
    // basic instead of the artificial whenever the implied value respects
    // its own bounds. This skips most degenerate phase-1 pivots for the
    // slack-heavy problems built by minimize_linf / minimize_range.
    {
        std::vector<int> row_of_col(n, -1);
        std::vector<int> count_in_col(n, 0);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < m; ++i) {
                if (problem.eq_lhs(i, j) != 0.0) {
                    ++count_in_col[j];
                    row_of_col[j] = i;
                }
            }
        }
        std::vector<bool> row_taken(m, false);
        for (int j = 0; j < n; ++j) {
            if (count_in_col[j] != 1) continue;
            const int i = row_of_col[j];
            if (row_taken[i]) continue;
            const double coeff = problem.eq_lhs(i, j);
            if (std::abs(coeff) < 0.5) continue;
            // Residual currently absorbed by the artificial of row i.
            const double implied = x0(j) + residual(i) / coeff;
            if (implied >= s.lower(j) - 1e-12 && implied <= s.upper(j) + 1e-12) {
                s.state[n + i] = VarState::at_lower;  // artificial parked at 0
                s.basis[i] = j;
                s.state[j] = VarState::basic;
                row_taken[i] = true;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(s.total);
    phase1_cost.tail(m).setOnes();
    s.set_phase_cost(phase1_cost);
    if (!s.iterate()) {
        throw std::runtime_error("lp: phase 1 reported unbounded");
    }
    const double scale = std::max(1.0, problem.eq_rhs.cwiseAbs().maxCoeff());
    double artificial_sum = 0.0;
    for (int i = 0; i < m; ++i) {
        if (s.basis[i] >= n) artificial_sum += std::abs(s.basic_value(i));
    }
    if (artificial_sum > 1e-7 * scale) {
        return {Status::infeasible, {}, 0.0};
    }
    for (int i = 0; i < m; ++i) {
        if (s.basis[i] >= n) s.basic_value(i) = 0.0;
    }
    s.upper.tail(m).setZero();
    s.phase_two = true;

    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(s.total);
    phase2_cost.head(n) = problem.cost;
    s.set_phase_cost(phase2_cost);
    if (!s.iterate()) {
        return {Status::unbounded, {}, 0.0};
    }

    // Recover x; re-solve the basic block against the original columns to
    // shed any remaining drift.
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x(j) = s.nonbasic_value(j);
    std::vector<int> structural_rows;
    for (int i = 0; i < m; ++i) {
        if (s.basis[i] < n) structural_rows.push_back(i);
    }
    const int nb = static_cast<int>(structural_rows.size());
    if (nb > 0) {
        Eigen::VectorXd rhs = problem.eq_rhs;
        for (int j = 0; j < n; ++j) {
            if (s.state[j] != VarState::basic && x(j) != 0.0) {
                rhs -= problem.eq_lhs.col(j) * x(j);
            }
        }
        Eigen::MatrixXd bmat(m, nb);
        for (int k = 0; k < nb; ++k) {
            bmat.col(k) = problem.eq_lhs.col(s.basis[structural_rows[k]]);
        }
        const Eigen::VectorXd xb =
            bmat.completeOrthogonalDecomposition().solve(rhs);
        for (int k = 0; k < nb; ++k) {
            x(s.basis[structural_rows[k]]) = xb(k);
        }
    }
    return {Status::optimal, x, problem.cost.dot(x)};
}

LinfResult minimize_linf(const Eigen::MatrixXd& eq_lhs,
                         const Eigen::VectorXd& eq_rhs,
                         const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper) {
    const int n = static_cast<int>(eq_lhs.cols());
    const int m = static_cast<int>(eq_lhs.rows());
    // Variables: [x (n), t, p (n), q (n)] with x_j + t - p_j = 0 and
    // -x_j + t - q_j = 0, p, q >= 0; minimizing t minimizes max_j |x_j|.
    const int nv = 3 * n + 1;
    LpProblem p;
    p.cost = Eigen::VectorXd::Zero(nv);
    p.cost(n) = 1.0;
    p.eq_lhs = Eigen::MatrixXd::Zero(m + 2 * n, nv);
    p.eq_rhs = Eigen::VectorXd::Zero(m + 2 * n);
    p.eq_lhs.topLeftCorner(m, n) = eq_lhs;
    p.eq_rhs.head(m) = eq_rhs;
    for (int j = 0; j < n; ++j) {
        p.eq_lhs(m + j, j) = 1.0;
        p.eq_lhs(m + j, n) = 1.0;
        p.eq_lhs(m + j, n + 1 + j) = -1.0;
        p.eq_lhs(m + n + j, j) = -1.0;
        p.eq_lhs(m + n + j, n) = 1.0;
        p.eq_lhs(m + n + j, n + 1 + n + j) = -1.0;
    }
    p.lower = Eigen::VectorXd::Zero(nv);
    p.upper = Eigen::VectorXd::Constant(nv, kInf);
    p.lower.head(n) = lower;
    p.upper.head(n) = upper;

    const LpSolution sol = solve(p);
    if (sol.status != Status::optimal) {
        return {sol.status, {}, std::numeric_limits<double>::infinity()};
    }
    return {Status::optimal, sol.x.head(n), sol.objective};
}

RangeResult minimize_range(const Eigen::MatrixXd& eq_lhs,
                           const Eigen::VectorXd& eq_rhs,
                           double u_max) {
    const int n = static_cast<int>(eq_lhs.cols());
    const int m = static_cast<int>(eq_lhs.rows());
    // Variables: [x (n), s_lo, s_hi, a (n), b (n)] with
    // x_j - s_lo - a_j = 0 and -x_j + s_hi - b_j = 0, a, b >= 0.
    const int nv = 3 * n + 2;
    LpProblem p;
    p.cost = Eigen::VectorXd::Zero(nv);
    p.cost(n) = -1.0;
    p.cost(n + 1) = 1.0;
    p.eq_lhs = Eigen::MatrixXd::Zero(m + 2 * n, nv);
    p.eq_rhs = Eigen::VectorXd::Zero(m + 2 * n);
    p.eq_lhs.topLeftCorner(m, n) = eq_lhs;
    p.eq_rhs.head(m) = eq_rhs;
    for (int j = 0; j < n; ++j) {
        p.eq_lhs(m + j, j) = 1.0;
        p.eq_lhs(m + j, n) = -1.0;
        p.eq_lhs(m + j, n + 2 + j) = -1.0;
        p.eq_lhs(m + n + j, j) = -1.0;
        p.eq_lhs(m + n + j, n + 1) = 1.0;
        p.eq_lhs(m + n + j, n + 2 + n + j) = -1.0;
    }
    p.lower = Eigen::VectorXd::Zero(nv);
    p.upper = Eigen::VectorXd::Constant(nv, kInf);
    p.upper.head(n + 2).setConstant(u_max);

    const LpSolution sol = solve(p);
    if (sol.status != Status::optimal) {
        return {sol.status, {}, std::numeric_limits<double>::infinity()};
    }
    return {Status::optimal, sol.x.head(n), sol.objective};
}

}  // namespace tiltset::lp
