#include "sparsectrl/detail/box_simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sparsectrl::detail {

namespace {

constexpr double kDualTol = 1e-10;
constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : char { basic, at_lower, at_upper };

struct Tableau {
    Eigen::MatrixXd columns;  // structural + artificial columns
    Eigen::VectorXd rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd cost;
    std::vector<VarState> state;
    std::vector<int> basis;  // row -> variable
    Eigen::VectorXd x;
    int iterations = 0;
};

// Value of every nonbasic variable is its bound; solve the basis system for
// the rest. Recomputed from scratch each iteration so FP error cannot
// accumulate across pivots.
bool recompute_basics(Tableau& t) {
    const int m = static_cast<int>(t.basis.size());
    Eigen::VectorXd rhs = t.rhs;
    for (int j = 0; j < t.columns.cols(); ++j) {
        if (t.state[static_cast<std::size_t>(j)] == VarState::basic) continue;
        const double v =
            t.state[static_cast<std::size_t>(j)] == VarState::at_lower ? t.lower(j) : t.upper(j);
        t.x(j) = v;
        if (v != 0.0) rhs -= t.columns.col(j) * v;
    }
    Eigen::MatrixXd basis_matrix(m, m);
    for (int i = 0; i < m; ++i) basis_matrix.col(i) = t.columns.col(t.basis[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::VectorXd xb = lu.solve(rhs);
    if (!xb.allFinite()) return false;
    if ((basis_matrix * xb - rhs).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
        return false;
    }
    for (int i = 0; i < m; ++i) t.x(t.basis[static_cast<std::size_t>(i)]) = xb(i);
    return true;
}

// One simplex phase on the current cost vector. Returns false if the
// iteration cap was hit before optimality.
bool run_phase(Tableau& t, bool allow_artificial_entering, int artificial_start, int max_iterations) {
    const int m = static_cast<int>(t.basis.size());
    const int total = static_cast<int>(t.columns.cols());
    const int bland_threshold = max_iterations / 2;

    for (int iter = 0; iter < max_iterations; ++iter) {
        ++t.iterations;
        if (!recompute_basics(t)) throw std::runtime_error("simplex: singular basis");

        Eigen::MatrixXd basis_matrix(m, m);
        Eigen::VectorXd cb(m);
        for (int i = 0; i < m; ++i) {
            basis_matrix.col(i) = t.columns.col(t.basis[static_cast<std::size_t>(i)]);
            cb(i) = t.cost(t.basis[static_cast<std::size_t>(i)]);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu_t(basis_matrix.transpose());
        const Eigen::VectorXd y = lu_t.solve(cb);

        // Pricing: a variable at a bound enters if moving off that bound
        // lowers the objective.
        const bool use_bland = iter > bland_threshold;
        int entering = -1;
        double best_violation = kDualTol;
        for (int j = 0; j < total; ++j) {
            const VarState s = t.state[static_cast<std::size_t>(j)];
            if (s == VarState::basic) continue;
            if (!allow_artificial_entering && j >= artificial_start) continue;
            if (t.lower(j) == t.upper(j)) continue;  // fixed
            const double d = t.cost(j) - y.dot(t.columns.col(j));
            const double violation = s == VarState::at_lower ? -d : d;
            if (violation > best_violation) {
                entering = j;
                if (use_bland) break;
                best_violation = violation;
            }
        }
        if (entering < 0) return true;  // optimal for this phase

        const double dir = t.state[static_cast<std::size_t>(entering)] == VarState::at_lower ? 1.0 : -1.0;
        const Eigen::VectorXd w = lu.solve(t.columns.col(entering));

        // Ratio test: the entering variable moves by `step` toward its
        // opposite bound; each basic variable must stay inside its box.
        double step = t.upper(entering) - t.lower(entering);
        int leaving = -1;  // -1 means bound flip
        double leaving_pivot = 0.0;
        for (int i = 0; i < m; ++i) {
            const double delta = -dir * w(i);  // d x_B(i) / d step
            if (std::abs(delta) <= kPivotTol) continue;
            const int bi = t.basis[static_cast<std::size_t>(i)];
            const double room = delta > 0.0 ? t.upper(bi) - t.x(bi) : t.x(bi) - t.lower(bi);
            const double limit = std::max(0.0, room) / std::abs(delta);
            if (limit < step - 1e-12 ||
                (limit < step + 1e-12 && std::abs(w(i)) > std::abs(leaving_pivot))) {
                step = limit;
                leaving = i;
                leaving_pivot = w(i);
            }
        }
        if (!std::isfinite(step)) throw std::runtime_error("simplex: unbounded direction");

        if (leaving < 0) {
            // Bound flip: the entering variable runs all the way to its
            // opposite bound without any basic hitting a limit.
            t.state[static_cast<std::size_t>(entering)] =
                dir > 0.0 ? VarState::at_upper : VarState::at_lower;
            continue;
        }

        const int leaving_var = t.basis[static_cast<std::size_t>(leaving)];
        const double delta = -dir * leaving_pivot;
        t.state[static_cast<std::size_t>(leaving_var)] =
            delta > 0.0 ? VarState::at_upper : VarState::at_lower;
        t.basis[static_cast<std::size_t>(leaving)] = entering;
        t.state[static_cast<std::size_t>(entering)] = VarState::basic;
    }
    return false;
}

}  // namespace

LpResult solve_box_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                      const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                      int max_iterations) {
    const int m = static_cast<int>(a.rows());
    const int p = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != p || lower.size() != p || upper.size() != p) {
        throw std::invalid_argument("simplex: inconsistent problem dimensions");
    }
    for (int j = 0; j < p; ++j) {
        if (!(lower(j) <= upper(j)) || !std::isfinite(lower(j)) || !std::isfinite(upper(j))) {
            throw std::invalid_argument("simplex: bounds must be finite with lower <= upper");
        }
    }
    if (max_iterations <= 0) max_iterations = 200 * (p + m + 10);

    Tableau t;
    const int total = p + m;
    t.columns = Eigen::MatrixXd::Zero(m, total);
    t.columns.leftCols(p) = a;
    t.rhs = b;
    t.lower = Eigen::VectorXd::Zero(total);
    t.upper = Eigen::VectorXd::Zero(total);
    t.cost = Eigen::VectorXd::Zero(total);
    t.state.assign(static_cast<std::size_t>(total), VarState::at_lower);
    t.x = Eigen::VectorXd::Zero(total);

    // Structurals start at the bound of smaller magnitude.
    Eigen::VectorXd residual = b;
    for (int j = 0; j < p; ++j) {
        t.lower(j) = lower(j);
        t.upper(j) = upper(j);
        const bool pick_lower = std::abs(lower(j)) <= std::abs(upper(j));
        t.state[static_cast<std::size_t>(j)] = pick_lower ? VarState::at_lower : VarState::at_upper;
        const double v = pick_lower ? lower(j) : upper(j);
        if (v != 0.0) residual -= a.col(j) * v;
    }

    // One artificial per row absorbs the starting residual.
    const double big = 2.0 * residual.cwiseAbs().maxCoeff() + 1.0;
    for (int i = 0; i < m; ++i) {
        const int j = p + i;
        t.columns(i, j) = residual(i) < 0.0 ? -1.0 : 1.0;
        t.lower(j) = 0.0;
        t.upper(j) = big;
        t.basis.push_back(j);
        t.state[static_cast<std::size_t>(j)] = VarState::basic;
        t.cost(j) = 1.0;  // phase-1 cost
    }

    LpResult result;
    if (!run_phase(t, false, p, max_iterations)) {
        result.status = LpStatus::iteration_limit;
    } else {
        double infeasibility = 0.0;
        for (int i = 0; i < m; ++i) {
            const int j = p + i;
            infeasibility += std::abs(t.x(j));
        }
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (infeasibility > kFeasTol * scale) {
            result.status = LpStatus::infeasible;
        } else {
            // Phase 2: pin artificials to zero and switch to the real cost.
            for (int i = 0; i < m; ++i) {
                const int j = p + i;
                t.upper(j) = 0.0;
                t.cost(j) = 0.0;
                if (t.state[static_cast<std::size_t>(j)] != VarState::basic) {
                    t.state[static_cast<std::size_t>(j)] = VarState::at_lower;
                }
            }
            t.cost.head(p) = c;
            result.status = run_phase(t, false, p, max_iterations) ? LpStatus::optimal
                                                                   : LpStatus::iteration_limit;
        }
    }

    recompute_basics(t);
    result.x = t.x.head(p);
    result.objective = c.dot(result.x);
    result.iterations = t.iterations;
    return result;
}

}  // namespace sparsectrl::detail
