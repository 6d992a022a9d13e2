// Self-contained dense linear programming: equality constraints plus box
// bounds, solved by a bounded-variable two-phase simplex with Bland's rule
// (deterministic, termination-safe). Sized for the small, well-scaled
// problems this project produces (tens of variables).

#pragma once

#include <Eigen/Dense>

namespace tiltset::lp {

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kOptTol = 1e-8;

enum class Status { optimal, infeasible, unbounded };

/// min cost^T x  s.t.  eq_lhs x = eq_rhs,  lower <= x <= upper.
/// Bounds may be +-infinity.
struct LpProblem {
    Eigen::VectorXd cost;
    Eigen::MatrixXd eq_lhs;
    Eigen::VectorXd eq_rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct LpSolution {
    Status status = Status::infeasible;
    Eigen::VectorXd x;        // empty unless optimal
    double objective = 0.0;
};

/// Infeasible/unbounded are reported via status; malformed input (dimension
/// mismatch, NaN, lower > upper) throws std::invalid_argument.
LpSolution solve(const LpProblem& problem);

struct LinfResult {
    Status status = Status::infeasible;
    Eigen::VectorXd x;
    double linf = 0.0;
};

/// min ||x||_inf s.t. eq_lhs x = eq_rhs, lower <= x <= upper.
/// Internally lifts to (x, t, slacks) with -t <= x_j <= t and minimizes t.
LinfResult minimize_linf(const Eigen::MatrixXd& eq_lhs,
                         const Eigen::VectorXd& eq_rhs,
                         const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper);

struct RangeResult {
    Status status = Status::infeasible;
    Eigen::VectorXd x;
    double range = 0.0;
};

/// min (max_j x_j - min_j x_j) s.t. eq_lhs x = eq_rhs, 0 <= x <= u_max.
/// Internally lifts to (x, s_lo, s_hi, slacks) with s_lo <= x_j <= s_hi.
RangeResult minimize_range(const Eigen::MatrixXd& eq_lhs,
                           const Eigen::VectorXd& eq_rhs,
                           double u_max);

}  // namespace tiltset::lp
