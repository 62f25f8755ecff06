#pragma once

#include "sparsectrl/core.hpp"

namespace sparsectrl::numeric {

/// Thrown when a solver cannot produce a result (singular normal equations,
/// infeasible program treated as an internal error, ...).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by count_switches when a control profile is not bang-bang within
/// the stated tolerance.
struct StructureViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Zero-order-hold discretization of an integrator chain: per-step state
/// transition Phi[j][k] = h^(k-j)/(k-j)! (k >= j) and input column
/// Gamma[j] = h^(n-j)/(n-j)!, exact for piecewise-constant controls.
struct DiscreteSystem {
    int order;
    int steps;
    double step_size;
    Eigen::MatrixXd transition;  // n x n, upper triangular, unit diagonal
    Eigen::VectorXd input;       // n x 1
};

/// Requires steps >= 2(order + 1) so the grid can represent the n+1 switch
/// intervals of the optimal control.
DiscreteSystem discretize(const IntegratorChain& chain, double duration, int steps);

/// Columns R_k = Phi^(N-1-k) Gamma: the terminal state reached from x0 is
/// Phi^N x0 + R u. Entries are computed in closed form,
/// R_k[j] = ((T - t_k)^(n-j) - (T - t_{k+1})^(n-j)) / (n-j)!.
Eigen::MatrixXd reachability_matrix(const DiscreteSystem& sys);

/// Roll the state forward through all control steps.
StateVector propagate(const DiscreteSystem& sys, const StateVector& x0,
                      const Eigen::VectorXd& controls);

enum class SolveStatus { ok, iteration_limit, infeasible };

const char* to_string(SolveStatus status);

struct SolveReport {
    SampledSeries control;      // piecewise-constant, times are interval left edges
    double bound = 0.0;         // achieved K = max |u_k|
    double terminal_cost = 0.0; // K1 of the soft split: squared terminal-state error
    double effort_cost = 0.0;   // K2 of the soft split: effort_weight * K
    StateVector terminal_state;
    int iterations = 0;
    SolveStatus status = SolveStatus::ok;
};

/// Minimize the peak |u_k| subject to reaching the rest-to-rest target
/// exactly: the epigraph linear program (minimize K with -K <= u_k <= K),
/// solved by an in-repo bounded-variable simplex on the equivalent
/// normalized form (maximize theta = 1/K with |w_k| <= 1, G w = theta b).
SolveReport solve_min_effort_linf(const IntegratorChain& chain, const MovementTask& task,
                                  int steps);

/// Minimum-Euclidean-norm control satisfying the terminal equality, via the
/// normal equations of the underdetermined system (n x n Gram solve).
SolveReport solve_min_effort_l2(const IntegratorChain& chain, const MovementTask& task, int steps);

/// Minimize  ||x(T) - x_f||^2 + effort_weight * max_k |u_k|  with the
/// terminal constraint soft. Outer golden-section search over the control
/// bound K; inner box-constrained least squares by projected gradient with
/// step 1/L (L = largest Gram eigenvalue by power iteration). The report
/// splits the objective into terminal_cost + effort_cost.
SolveReport solve_soft_terminal(const IntegratorChain& chain, double x_start, double x_end,
                                double effort_weight, double duration, int steps);

/// Count switches of a sampled control against the bound K: samples with
/// |u_k| >= (1-tol) K are classified by sign, consecutive equal signs merge
/// into blocks, and the result is block boundaries + 2 (entry and exit).
/// Samples inside the dead zone are tolerated up to 2 per counted switch;
/// beyond that the profile is not bang-bang and an error is thrown.
int count_switches(const SampledSeries& control, double bound, double tol = 0.05);

}  // namespace sparsectrl::numeric
