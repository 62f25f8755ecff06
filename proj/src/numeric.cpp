#include "sparsectrl/numeric.hpp"

#include "sparsectrl/detail/box_simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sparsectrl::numeric {

namespace {

constexpr int kInnerIterationCap = 100000;
constexpr double kInnerRelTol = 1e-10;

std::vector<double> grid_left_edges(double step_size, int steps) {
    std::vector<double> times(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        times[static_cast<std::size_t>(k)] = step_size * static_cast<double>(k);
    }
    return times;
}

// Rest-to-rest targets leave b = (D, 0, ..., 0): the transition matrix is
// unit upper triangular, so Phi^N maps a rest state to itself.
Eigen::VectorXd terminal_gap(const DiscreteSystem& sys, double displacement) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.order);
    b(0) = displacement;
    return b;
}

SolveReport zero_control_report(const DiscreteSystem& sys, double x_start) {
    SolveReport report;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.steps);
    report.control = SampledSeries(grid_left_edges(sys.step_size, sys.steps),
                                   std::vector<double>(static_cast<std::size_t>(sys.steps), 0.0));
    StateVector x0 = StateVector::Zero(sys.order);
    x0(0) = x_start;
    report.terminal_state = propagate(sys, x0, u);
    return report;
}

SolveReport report_from_controls(const DiscreteSystem& sys, double x_start,
                                 const Eigen::VectorXd& u) {
    SolveReport report;
    std::vector<double> values(u.data(), u.data() + u.size());
    report.control = SampledSeries(grid_left_edges(sys.step_size, sys.steps), std::move(values));
    report.bound = u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0;
    StateVector x0 = StateVector::Zero(sys.order);
    x0(0) = x_start;
    report.terminal_state = propagate(sys, x0, u);
    return report;
}

double largest_eigenvalue(const Eigen::MatrixXd& sym) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(sym.rows());
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Eigen::VectorXd next = sym * v;
        const double next_lambda = next.norm();
        if (next_lambda == 0.0) return 0.0;
        v = next / next_lambda;
        if (std::abs(next_lambda - lambda) <= 1e-13 * next_lambda) {
            return next_lambda;
        }
        lambda = next_lambda;
    }
    return lambda;
}

struct BoxLeastSquares {
    const Eigen::MatrixXd& g;
    const Eigen::VectorXd& b;
    double step;     // 1/L
    double f_scale;  // objective at u = 0; anchors the relative stop rule

    // Accelerated projected gradient (momentum with restart on increase) on
    // f(u) = 0.5 ||G u - b||^2 over |u_k| <= bound. Plain projected steps
    // decay only like 1/k here because the Hessian has rank n << N, so the
    // accelerated variant is used with the same 1/L step. Returns the
    // squared residual ||G u - b||^2 at the best iterate.
    double solve(double bound, Eigen::VectorXd& u, int& iterations, bool& hit_cap) const {
        u = u.cwiseMax(-bound).cwiseMin(bound);
        Eigen::VectorXd extrapolated = u;
        Eigen::VectorXd previous = u;
        double momentum = 1.0;
        double f = 0.5 * (g * u - b).squaredNorm();
        double f_best = f;
        Eigen::VectorXd u_best = u;
        for (int i = 0; i < kInnerIterationCap; ++i) {
            ++iterations;
            const Eigen::VectorXd gradient = g.transpose() * (g * extrapolated - b);
            u = (extrapolated - step * gradient).cwiseMax(-bound).cwiseMin(bound);
            const double f_next = 0.5 * (g * u - b).squaredNorm();
            if (f_next > f) {
                // Momentum overshoot: restart from the last point.
                extrapolated = u;
                momentum = 1.0;
            } else {
                const double momentum_next =
                    0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
                extrapolated = u + ((momentum - 1.0) / momentum_next) * (u - previous);
                momentum = momentum_next;
            }
            previous = u;
            if (f_next < f_best) {
                f_best = f_next;
                u_best = u;
            }
            if (std::abs(f - f_next) <= kInnerRelTol * std::max(f_scale, 1e-300)) {
                u = u_best;
                return 2.0 * f_best;
            }
            f = f_next;
        }
        hit_cap = true;
        u = u_best;
        return 2.0 * f_best;
    }
};

}  // namespace

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::ok: return "ok";
        case SolveStatus::iteration_limit: return "iteration_limit";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

DiscreteSystem discretize(const IntegratorChain& chain, double duration, int steps) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ValidationError("duration must be strictly positive");
    }
    const int n = chain.order();
    if (steps < 2 * (n + 1)) {
        std::ostringstream msg;
        msg << "need at least " << 2 * (n + 1) << " steps for order " << n << ", got " << steps;
        throw ValidationError(msg.str());
    }
    DiscreteSystem sys;
    sys.order = n;
    sys.steps = steps;
    sys.step_size = duration / static_cast<double>(steps);
    sys.transition = Eigen::MatrixXd::Zero(n, n);
    sys.input = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        double entry = 1.0;
        sys.transition(j, j) = 1.0;
        for (int k = j + 1; k < n; ++k) {
            entry *= sys.step_size / static_cast<double>(k - j);
            sys.transition(j, k) = entry;
        }
        double gamma = 1.0;  // h^(n-j)/(n-j)!
        for (int m = 1; m <= n - j; ++m) {
            gamma *= sys.step_size / static_cast<double>(m);
        }
        sys.input(j) = gamma;
    }
    return sys;
}

Eigen::MatrixXd reachability_matrix(const DiscreteSystem& sys) {
    const int n = sys.order;
    const int steps = sys.steps;
    const double duration = sys.step_size * static_cast<double>(steps);
    Eigen::MatrixXd reach(n, steps);
    for (int k = 0; k < steps; ++k) {
        const double s_left = duration - sys.step_size * static_cast<double>(k);
        const double s_right = duration - sys.step_size * static_cast<double>(k + 1);
        for (int j = 0; j < n; ++j) {
            const int power = n - j;
            double factorial = 1.0;
            for (int m = 2; m <= power; ++m) factorial *= static_cast<double>(m);
            reach(j, k) = (std::pow(s_left, power) - std::pow(s_right, power)) / factorial;
        }
    }
    return reach;
}

StateVector propagate(const DiscreteSystem& sys, const StateVector& x0,
                      const Eigen::VectorXd& controls) {
    if (x0.size() != sys.order) {
        throw ValidationError("state dimension must match the chain order");
    }
    if (controls.size() != sys.steps) {
        throw ValidationError("control count must match the step count");
    }
    StateVector x = x0;
    for (int k = 0; k < sys.steps; ++k) {
        x = sys.transition * x + sys.input * controls(k);
    }
    return x;
}

SolveReport solve_min_effort_linf(const IntegratorChain& chain, const MovementTask& task,
                                  int steps) {
    const DiscreteSystem sys = discretize(chain, task.duration, steps);
    const double displacement = task.displacement();
    if (displacement == 0.0) {
        return zero_control_report(sys, task.x_start);  // degenerate: all-zero control
    }

    const int n = sys.order;
    const Eigen::MatrixXd reach = reachability_matrix(sys);
    const Eigen::VectorXd gap = terminal_gap(sys, displacement);

    // Normalized epigraph form: with w = u/K and theta = 1/K,
    //   maximize theta  s.t.  G w - theta b = 0,  |w_k| <= 1,
    // every variable is boxed, which is what the simplex wants. theta is
    // additionally scaled by its own a-priori cap so all columns are O(1).
    double theta_cap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (gap(j) != 0.0) {
            theta_cap = std::min(theta_cap, reach.row(j).cwiseAbs().sum() / std::abs(gap(j)));
        }
    }

    Eigen::MatrixXd columns(n, steps + 1);
    columns.leftCols(steps) = reach;
    columns.col(steps) = -gap * theta_cap;
    for (int j = 0; j < n; ++j) {
        const double scale = columns.row(j).cwiseAbs().maxCoeff();
        if (scale > 0.0) columns.row(j) /= scale;
    }

    Eigen::VectorXd cost = Eigen::VectorXd::Zero(steps + 1);
    cost(steps) = -1.0;  // maximize theta
    Eigen::VectorXd lower = Eigen::VectorXd::Constant(steps + 1, -1.0);
    Eigen::VectorXd upper = Eigen::VectorXd::Constant(steps + 1, 1.0);
    lower(steps) = 0.0;

    const detail::LpResult lp = detail::solve_box_lp(columns, Eigen::VectorXd::Zero(n), cost,
                                                     lower, upper);

    SolveReport report;
    const double theta = lp.x(steps) * theta_cap;
    if (lp.status == detail::LpStatus::infeasible || !(theta > 0.0)) {
        // Cannot happen for a well-posed integrator-chain task; report it
        // rather than fabricating a control.
        report = zero_control_report(sys, task.x_start);
        report.status = SolveStatus::infeasible;
        report.iterations = lp.iterations;
        return report;
    }
    Eigen::VectorXd u = lp.x.head(steps) / theta;
    report = report_from_controls(sys, task.x_start, u);
    report.iterations = lp.iterations;
    report.status = lp.status == detail::LpStatus::optimal ? SolveStatus::ok
                                                           : SolveStatus::iteration_limit;
    return report;
}

SolveReport solve_min_effort_l2(const IntegratorChain& chain, const MovementTask& task,
                                int steps) {
    const DiscreteSystem sys = discretize(chain, task.duration, steps);
    const Eigen::MatrixXd reach = reachability_matrix(sys);
    const Eigen::VectorXd gap = terminal_gap(sys, task.displacement());

    const Eigen::MatrixXd gram = reach * reach.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd multipliers = ldlt.solve(gap);
    const double defect = (gram * multipliers - gap).cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !multipliers.allFinite() ||
        defect > 1e-8 * std::max(1.0, gap.cwiseAbs().maxCoeff())) {
        throw SolverError("minimum-norm solve failed: singular Gram matrix");
    }
    const Eigen::VectorXd u = reach.transpose() * multipliers;
    SolveReport report = report_from_controls(sys, task.x_start, u);
    report.iterations = 1;
    return report;
}

SolveReport solve_soft_terminal(const IntegratorChain& chain, double x_start, double x_end,
                                double effort_weight, double duration, int steps) {
    if (!(effort_weight >= 0.0) || !std::isfinite(effort_weight)) {
        throw ValidationError("effort weight must be finite and nonnegative");
    }
    const MovementTask task(x_start, x_end, duration);
    const DiscreteSystem sys = discretize(chain, duration, steps);
    const Eigen::MatrixXd reach = reachability_matrix(sys);
    const Eigen::VectorXd gap = terminal_gap(sys, task.displacement());

    if (gap.cwiseAbs().maxCoeff() == 0.0) {
        return zero_control_report(sys, x_start);
    }

    // The hard-constraint amplitude brackets the search: at that bound the
    // terminal error is exactly zero in this discretization.
    SolveReport hard = solve_min_effort_linf(chain, task, steps);
    if (hard.status == SolveStatus::infeasible) {
        SolveReport report = zero_control_report(sys, x_start);
        report.status = SolveStatus::infeasible;
        return report;
    }
    if (effort_weight == 0.0) {
        // Hard-constraint limit: the exact-terminal solve already is the
        // minimizer of the terminal error alone.
        Eigen::VectorXd u(steps);
        for (int k = 0; k < steps; ++k) u(k) = hard.control.values[static_cast<std::size_t>(k)];
        hard.terminal_cost = (reach * u - gap).squaredNorm();
        hard.effort_cost = 0.0;
        return hard;
    }
    const double bound_hard = hard.bound;

    const double lambda = largest_eigenvalue(reach * reach.transpose());
    if (!(lambda > 0.0)) {
        throw SolverError("soft-terminal solve failed: zero Gram matrix");
    }
    const BoxLeastSquares inner{reach, gap, 1.0 / lambda, 0.5 * gap.squaredNorm()};

    int iterations = 0;
    bool hit_cap = false;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(steps);
    const auto objective = [&](double bound) {
        const double terminal = inner.solve(bound, u, iterations, hit_cap);
        return terminal + effort_weight * bound;
    };

    // Golden-section search; the objective is convex in the bound.
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = bound_hard;
    const double tol = 1e-10 * std::max(1.0, bound_hard);
    double mid_low = hi - golden * (hi - lo);
    double mid_high = lo + golden * (hi - lo);
    double f_low = objective(mid_low);
    double f_high = objective(mid_high);
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        if (f_low <= f_high) {
            hi = mid_high;
            mid_high = mid_low;
            f_high = f_low;
            mid_low = hi - golden * (hi - lo);
            f_low = objective(mid_low);
        } else {
            lo = mid_low;
            mid_low = mid_high;
            f_low = f_high;
            mid_high = lo + golden * (hi - lo);
            f_high = objective(mid_high);
        }
    }
    const double bound_opt = 0.5 * (lo + hi);
    const double terminal_cost = inner.solve(bound_opt, u, iterations, hit_cap);

    SolveReport report = report_from_controls(sys, x_start, u);
    report.terminal_cost = terminal_cost;
    report.effort_cost = effort_weight * bound_opt;
    report.iterations = iterations;
    report.status = hit_cap ? SolveStatus::iteration_limit : SolveStatus::ok;
    return report;
}

int count_switches(const SampledSeries& control, double bound, double tol) {
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw ValidationError("count_switches needs a positive bound");
    }
    if (!(tol >= 0.0) || !(tol < 1.0)) {
        throw ValidationError("tolerance must lie in [0, 1)");
    }
    const double threshold = (1.0 - tol) * bound;
    int blocks = 0;
    int dead = 0;
    int previous_sign = 0;
    for (double value : control.values) {
        if (std::abs(value) < threshold) {
            ++dead;
            continue;
        }
        const int sign = value < 0.0 ? -1 : 1;
        if (sign != previous_sign) {
            ++blocks;
            previous_sign = sign;
        }
    }
    if (blocks == 0) {
        throw StructureViolationError("no samples reach the bound: not a bang-bang profile");
    }
    const int switches = (blocks - 1) + 2;
    if (dead > 2 * switches) {
        std::ostringstream msg;
        msg << dead << " samples in the dead zone exceeds the allowance of " << 2 * switches;
        throw StructureViolationError(msg.str());
    }
    return switches;
}

}  // namespace sparsectrl::numeric
