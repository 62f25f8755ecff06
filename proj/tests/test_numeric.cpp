#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparsectrl/analytic.hpp"
#include "sparsectrl/detail/box_simplex.hpp"
#include "sparsectrl/numeric.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace sparsectrl;
using namespace sparsectrl::numeric;

namespace {

SampledSeries sample_signal(const BangBangSignal& signal, int count) {
    std::vector<double> times(static_cast<std::size_t>(count));
    std::vector<double> values(static_cast<std::size_t>(count));
    const double h = signal.duration() / count;
    for (int k = 0; k < count; ++k) {
        times[static_cast<std::size_t>(k)] = h * k;
        values[static_cast<std::size_t>(k)] = signal.value_at(h * (k + 0.5));
    }
    return SampledSeries(std::move(times), std::move(values));
}

}  // namespace

TEST_CASE("box simplex solves small known programs") {
    // min -x - 2y  s.t.  x + y = 1.5,  0 <= x,y <= 1  ->  x = 0.5, y = 1.
    Eigen::MatrixXd a(1, 2);
    a << 1.0, 1.0;
    Eigen::VectorXd b(1);
    b << 1.5;
    Eigen::VectorXd c(2);
    c << -1.0, -2.0;
    const auto result = detail::solve_box_lp(a, b, c, Eigen::VectorXd::Zero(2),
                                             Eigen::VectorXd::Ones(2));
    REQUIRE(result.status == detail::LpStatus::optimal);
    CHECK(result.x(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(result.x(1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(result.objective == doctest::Approx(-2.5).epsilon(1e-9));
}

TEST_CASE("box simplex detects infeasibility") {
    Eigen::MatrixXd a(1, 2);
    a << 1.0, 1.0;
    Eigen::VectorXd b(1);
    b << 5.0;  // unreachable within the unit box
    const auto result = detail::solve_box_lp(a, b, Eigen::VectorXd::Zero(2),
                                             Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
    CHECK(result.status == detail::LpStatus::infeasible);
}

TEST_CASE("box simplex handles negative bounds and equality ties") {
    // min x1  s.t.  x1 + x2 - x3 = 0,  -1 <= all <= 1  ->  x1 = -1.
    Eigen::MatrixXd a(1, 3);
    a << 1.0, 1.0, -1.0;
    Eigen::VectorXd c(3);
    c << 1.0, 0.0, 0.0;
    const auto result =
        detail::solve_box_lp(a, Eigen::VectorXd::Zero(1), c,
                             Eigen::VectorXd::Constant(3, -1.0), Eigen::VectorXd::Ones(3));
    REQUIRE(result.status == detail::LpStatus::optimal);
    CHECK(result.objective == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("discretize: known matrices") {
    SUBCASE("scalar integrator") {
        const DiscreteSystem sys = discretize(IntegratorChain(1), 1.0, 10);
        CHECK(sys.transition(0, 0) == 1.0);
        CHECK(sys.input(0) == doctest::Approx(0.1).epsilon(1e-15));
    }
    SUBCASE("double integrator") {
        const DiscreteSystem sys = discretize(IntegratorChain(2), 2.0, 10);
        CHECK(sys.step_size == doctest::Approx(0.2));
        CHECK(sys.transition(0, 1) == doctest::Approx(0.2));
        CHECK(sys.input(0) == doctest::Approx(0.02).epsilon(1e-12));  // h^2/2
        CHECK(sys.input(1) == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("spec example values") {
        // h = 0.5: Phi = [[1, 0.5], [0, 1]], Gamma = [0.125, 0.5].
        const DiscreteSystem sys = discretize(IntegratorChain(2), 1.0, 6);
        const DiscreteSystem half = discretize(IntegratorChain(2), 3.0, 6);
        CHECK(half.step_size == doctest::Approx(0.5));
        CHECK(half.transition(0, 1) == doctest::Approx(0.5));
        CHECK(half.input(0) == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(half.input(1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(sys.order == 2);
    }
}

TEST_CASE("discretize rejects too few steps") {
    CHECK_THROWS_AS(discretize(IntegratorChain(3), 1.0, 7), ValidationError);
    CHECK_NOTHROW(discretize(IntegratorChain(3), 1.0, 8));
}

TEST_CASE("zero control propagation keeps the rest state") {
    const IntegratorChain chain(4);
    const DiscreteSystem sys = discretize(chain, 2.0, 32);
    const StateVector terminal =
        propagate(sys, chain.rest_state(0.7), Eigen::VectorXd::Zero(32));
    CHECK(terminal(0) == doctest::Approx(0.7).epsilon(1e-15));
    for (int j = 1; j < 4; ++j) {
        CHECK(terminal(j) == 0.0);
    }
}

TEST_CASE("reachability matrix columns match step-by-step propagation") {
    const IntegratorChain chain(3);
    const DiscreteSystem sys = discretize(chain, 1.0, 16);
    const Eigen::MatrixXd reach = reachability_matrix(sys);
    for (int k : {0, 7, 15}) {
        Eigen::VectorXd pulse = Eigen::VectorXd::Zero(16);
        pulse(k) = 1.0;
        const StateVector terminal = propagate(sys, chain.rest_state(0.0), pulse);
        for (int j = 0; j < 3; ++j) {
            CHECK(reach(j, k) == doctest::Approx(terminal(j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("L-infinity solve matches the closed-form amplitude for n = 1..6") {
    const MovementTask task(0.0, 1.0, 1.0);
    for (int n = 1; n <= 6; ++n) {
        const SolveReport report = solve_min_effort_linf(IntegratorChain(n), task, 400);
        REQUIRE(report.status == SolveStatus::ok);
        const double expected = analytic::optimal_amplitude(n, 1.0, 1.0);
        CHECK(std::abs(report.bound - expected) / expected <= 0.01);
        // terminal equality holds to solver precision
        CHECK(report.terminal_state(0) == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("L-infinity solve: n=1 gives the constant D/T control") {
    const SolveReport report =
        solve_min_effort_linf(IntegratorChain(1), MovementTask(0.0, 3.0, 2.0), 50);
    REQUIRE(report.status == SolveStatus::ok);
    for (double u : report.control.values) {
        CHECK(u == doctest::Approx(1.5).epsilon(1e-9));
    }
}

TEST_CASE("L-infinity solve: n=2 sign change lands at the midpoint") {
    const SolveReport report =
        solve_min_effort_linf(IntegratorChain(2), MovementTask(0.0, 1.0, 1.0), 200);
    REQUIRE(report.status == SolveStatus::ok);
    const std::vector<double>& u = report.control.values;
    int flip = -1;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        if (u[k] > 0.0 && u[k + 1] < 0.0) {
            flip = static_cast<int>(k + 1);
            break;
        }
    }
    REQUIRE(flip > 0);
    CHECK(std::abs(report.control.times[static_cast<std::size_t>(flip)] - 0.5) <= 1.0 / 200.0);
}

TEST_CASE("L-infinity solve: negative and zero displacement") {
    const SolveReport backward =
        solve_min_effort_linf(IntegratorChain(3), MovementTask(1.0, 0.0, 1.0), 80);
    REQUIRE(backward.status == SolveStatus::ok);
    CHECK(backward.bound == doctest::Approx(32.0).epsilon(0.02));
    CHECK(backward.control.values.front() < 0.0);

    const SolveReport still =
        solve_min_effort_linf(IntegratorChain(3), MovementTask(0.5, 0.5, 1.0), 80);
    CHECK(still.bound == 0.0);
    for (double u : still.control.values) CHECK(u == 0.0);
}

TEST_CASE("LP solutions are bang-bang with exactly n+1 switches") {
    const MovementTask task(0.0, 1.0, 1.0);
    for (int n = 1; n <= 6; ++n) {
        const SolveReport report = solve_min_effort_linf(IntegratorChain(n), task, 400);
        REQUIRE(report.status == SolveStatus::ok);
        CHECK(count_switches(report.control, report.bound, 0.05) == n + 1);
    }
}

TEST_CASE("count_switches on analytic profiles and edge cases") {
    const BangBangSignal n3 = analytic::sparse_min_effort_signal(MovementTask(0.0, 1.0, 1.0), 3);
    CHECK(count_switches(sample_signal(n3, 400), n3.amplitude(), 0.05) == 4);

    const BangBangSignal n5 = analytic::sparse_min_effort_signal(MovementTask(0.0, 1.0, 1.0), 5);
    CHECK(count_switches(sample_signal(n5, 400), n5.amplitude(), 0.05) == 6);

    // Constant control: entry and exit only.
    SampledSeries constant({0.0, 0.1, 0.2, 0.3}, {2.0, 2.0, 2.0, 2.0});
    CHECK(count_switches(constant, 2.0, 0.05) == 2);

    // A profile that lingers in the dead zone is not bang-bang.
    std::vector<double> times;
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) {
        times.push_back(0.01 * i);
        values.push_back(i < 50 ? 1.0 : 0.1);
    }
    CHECK_THROWS_AS(count_switches(SampledSeries(times, values), 1.0, 0.05),
                    StructureViolationError);
    CHECK_THROWS_AS(count_switches(constant, 0.0, 0.05), ValidationError);
}

TEST_CASE("L2 solve reproduces the quintic at n=3") {
    const IntegratorChain chain(3);
    const MovementTask task(0.0, 1.0, 1.0);
    const SolveReport report = solve_min_effort_l2(chain, task, 400);
    REQUIRE(report.status == SolveStatus::ok);

    const PiecewiseTrajectory quintic = analytic::min_jerk_l2_trajectory(task);
    const DiscreteSystem sys = discretize(chain, task.duration, 400);

    // Roll the discrete control forward and compare positions on the grid.
    StateVector x = chain.rest_state(task.x_start);
    double worst = 0.0;
    for (int k = 0; k < sys.steps; ++k) {
        x = sys.transition * x + sys.input * report.control.values[static_cast<std::size_t>(k)];
        const double t = sys.step_size * (k + 1);
        worst = std::max(worst, std::abs(x(0) - quintic.position(t)));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("L2 solve trivia: n=1 constant, zero displacement") {
    const SolveReport constant =
        solve_min_effort_l2(IntegratorChain(1), MovementTask(0.0, 2.0, 2.0), 40);
    for (double u : constant.control.values) {
        CHECK(u == doctest::Approx(1.0).epsilon(1e-9));
    }
    const SolveReport still =
        solve_min_effort_l2(IntegratorChain(3), MovementTask(0.0, 0.0, 1.0), 40);
    for (double u : still.control.values) {
        CHECK(u == doctest::Approx(0.0));
    }
}

TEST_CASE("L2 peak exceeds its mean while L-infinity plateaus at the bound") {
    const MovementTask task(0.0, 1.0, 1.0);
    for (int n = 2; n <= 4; ++n) {
        const SolveReport l2 = solve_min_effort_l2(IntegratorChain(n), task, 200);
        double mean = 0.0;
        double peak = 0.0;
        for (double u : l2.control.values) {
            mean += std::abs(u);
            peak = std::max(peak, std::abs(u));
        }
        mean /= static_cast<double>(l2.control.size());
        CHECK(peak > 1.2 * mean);  // strictly continuous profile

        const SolveReport linf = solve_min_effort_linf(IntegratorChain(n), task, 200);
        int at_bound = 0;
        for (double u : linf.control.values) {
            if (std::abs(u) >= 0.95 * linf.bound) ++at_bound;
        }
        CHECK(at_bound >= static_cast<int>(linf.control.size()) - (n - 1));
    }
}

TEST_CASE("soft terminal: hard limit at w = 0") {
    const SolveReport report =
        solve_soft_terminal(IntegratorChain(3), 0.0, 1.0, 0.0, 1.0, 400);
    REQUIRE(report.status == SolveStatus::ok);
    CHECK(report.terminal_cost <= 1e-6);
    CHECK(report.bound <= 1.01 * 32.0);
    CHECK(std::abs(report.terminal_state(0) - 1.0) <= 1e-3);
}

TEST_CASE("soft terminal: huge weight kills the control") {
    const SolveReport report =
        solve_soft_terminal(IntegratorChain(3), 0.0, 1.0, 1e9, 1.0, 100);
    CHECK(report.bound <= 1e-6);
    for (double u : report.control.values) {
        CHECK(std::abs(u) <= 1e-6);
    }
    // Terminal error equals the full squared gap when nothing moves.
    CHECK(report.terminal_cost == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("soft terminal: zero displacement short-circuits") {
    const SolveReport report = solve_soft_terminal(IntegratorChain(2), 0.4, 0.4, 3.0, 1.0, 40);
    CHECK(report.bound == 0.0);
    CHECK(report.terminal_cost == 0.0);
}

TEST_CASE("soft terminal: achieved bound shrinks and error grows with w") {
    std::vector<double> weights;
    for (int i = 0; i < 10; ++i) {
        weights.push_back(1e-4 * std::pow(10.0, i * 0.8));
    }
    double previous_bound = std::numeric_limits<double>::infinity();
    double previous_error = -1.0;
    for (double w : weights) {
        const SolveReport report = solve_soft_terminal(IntegratorChain(3), 0.0, 1.0, w, 1.0, 120);
        CHECK(report.bound <= previous_bound + 1e-9 * 32.0);
        CHECK(report.terminal_cost >= previous_error - 1e-12);
        previous_bound = report.bound;
        previous_error = report.terminal_cost;
    }
}

TEST_CASE("soft terminal split: K1 + K2 decomposition is consistent") {
    const double w = 5.0;
    const SolveReport report = solve_soft_terminal(IntegratorChain(2), 0.0, 1.0, w, 1.0, 100);
    CHECK(report.effort_cost == doctest::Approx(w * report.bound).epsilon(1e-6).scale(1.0));
    CHECK(report.terminal_cost >= 0.0);
}

TEST_CASE("inner box least squares cost is convex and non-increasing in K") {
    // phi(K) sampled on a grid: finite second differences stay nonnegative.
    const IntegratorChain chain(3);
    const MovementTask task(0.0, 1.0, 1.0);
    const DiscreteSystem sys = discretize(chain, 1.0, 100);
    const Eigen::MatrixXd reach = reachability_matrix(sys);
    Eigen::VectorXd gap = Eigen::VectorXd::Zero(3);
    gap(0) = 1.0;

    const double k_hard = solve_min_effort_linf(chain, task, 100).bound;
    const Eigen::MatrixXd gram = reach * reach.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double step = 1.0 / eig.eigenvalues().maxCoeff();

    std::vector<double> phi;
    for (int i = 0; i <= 20; ++i) {
        const double bound = k_hard * i / 20.0;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(100);
        Eigen::VectorXd residual = reach * u - gap;
        double f = residual.squaredNorm();
        for (int it = 0; it < 200000; ++it) {
            u = (u - step * (reach.transpose() * residual)).cwiseMax(-bound).cwiseMin(bound);
            residual = reach * u - gap;
            const double f_next = residual.squaredNorm();
            if (std::abs(f - f_next) <= 1e-14 * std::max(f, 1e-300)) break;
            f = f_next;
        }
        phi.push_back(f);
    }
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        CHECK(phi[i + 1] <= phi[i] + 1e-9);
    }
    for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
        CHECK(phi[i + 1] - 2.0 * phi[i] + phi[i - 1] >= -1e-6);
    }
}
