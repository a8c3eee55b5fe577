#pragma once

#include <string>
#include <vector>

#include "gridfire/program.hpp"

namespace gridfire {

struct SolverOptions {
    double rel_gap = 1e-6;
    double abs_gap = 1e-8;
    double feas_tol = 1e-8;
    double int_tol = 1e-6;      // integrality tolerance
    int node_limit = 100000;
    double time_limit_sec = 1e18;
    int ipm_max_iters = 100;
    bool root_rounding = true;  // rounding heuristic for an early incumbent
    bool verbose = false;
};

enum class SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    GapLimit,
    NodeLimit,
    TimeLimit,
    NumericalFailure,
};

const char* to_string(SolveStatus status);

struct Solution {
    SolveStatus status = SolveStatus::NumericalFailure;
    double objective = 0.0;
    double best_bound = -kInf;
    std::vector<double> x;            // indexed like the program's variables
    int ipm_iterations = 0;
    int nodes = 0;
    int failed_nodes = 0;
    std::vector<double> bound_history;  // global bound after each processed node
};

/// Continuous solve with every binary relaxed to its [lb, ub] box.
Solution solve_relaxation(const ConicProgram& program, const SolverOptions& opts = {});

/// Best-first branch and bound over the binary variables; branches on the
/// most fractional one, ties to the lowest index. The incumbent is always
/// re-solved with its binaries pinned so the continuous part is clean.
Solution branch_and_bound(const ConicProgram& program, const SolverOptions& opts = {});

struct ConeResidual {
    std::string label;
    double residual = 0.0;  // ell*v - (P^2 + Q^2) for branch-flow cones
    bool flagged = false;
};

struct ExactnessReport {
    std::vector<ConeResidual> entries;
    double max_residual = 0.0;
    int flagged_count = 0;
};

/// Relaxation slack per cone; entries above `threshold` are flagged as
/// points where the conic relaxation of the branch flow model is inexact.
ExactnessReport check_soc_exactness(const ConicProgram& program, const std::vector<double>& x,
                                    double threshold = 1e-4);

namespace detail {
/// Primal-dual Nesterov-Todd scaled interior point method on the already
/// reduced program (no fixed variables). Used by the public entry points.
Solution solve_continuous(const ConicProgram& program, const SolverOptions& opts);
}  // namespace detail

}  // namespace gridfire
