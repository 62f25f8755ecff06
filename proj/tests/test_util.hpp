#pragma once

#include "sparsectrl/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace test_util {

// Independent oracle for integrator-chain trajectories: by the Cauchy
// formula for repeated integration, starting from rest at x0,
//
//   x_j(t) = [j == 0] x0 + integral_0^t u(tau) (t - tau)^(n-1-j) / (n-1-j)! dtau.
//
// Evaluated by composite Simpson quadrature on each constant-control
// interval, which shares nothing with the library's closed-form
// polynomial propagation.
inline double quadrature_state(const sparsectrl::BangBangSignal& signal, int order, double x0,
                               double t, int derivative) {
    const int power = order - 1 - derivative;
    double factorial = 1.0;
    for (int m = 2; m <= power; ++m) factorial *= static_cast<double>(m);
    const auto integrand = [&](double tau) {
        return signal.value_at(tau) * std::pow(t - tau, power) / factorial;
    };

    double total = derivative == 0 ? x0 : 0.0;
    const std::vector<double>& switches = signal.switch_times();
    for (std::size_t i = 0; i + 1 < switches.size(); ++i) {
        const double a = std::min(switches[i], t);
        const double b = std::min(switches[i + 1], t);
        if (b <= a) break;
        const int slices = 2000;  // Simpson: even count
        const double h = (b - a) / slices;
        double sum = integrand(a + 1e-12 * (b - a)) + integrand(b - 1e-12 * (b - a));
        for (int k = 1; k < slices; ++k) {
            sum += integrand(a + h * k) * (k % 2 == 1 ? 4.0 : 2.0);
        }
        total += sum * h / 3.0;
    }
    return total;
}

// Brute-force oracle for the exact two-sided rank-sum p value: enumerate
// every size-n_a subset of ranks {1..N} explicitly. Independent of the
// counting recurrence inside the implementation. Assumes tie-free samples.
inline double enumeration_p_value(const std::vector<double>& a, const std::vector<double>& b) {
    const int n_a = static_cast<int>(a.size());
    const int n_b = static_cast<int>(b.size());
    const int n = n_a + n_b;

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<int> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int lhs, int rhs) { return pooled[lhs] < pooled[rhs]; });
    double rank_sum_a = 0.0;
    for (int position = 0; position < n; ++position) {
        if (order[static_cast<std::size_t>(position)] < n_a) {
            rank_sum_a += position + 1;
        }
    }
    const double u_a = rank_sum_a - 0.5 * n_a * (n_a + 1);
    const double u_min = std::min(u_a, static_cast<double>(n_a) * n_b - u_a);

    std::vector<int> pick(static_cast<std::size_t>(n_a));
    std::iota(pick.begin(), pick.end(), 1);  // first combination 1..n_a
    double favorable = 0.0;
    double total = 0.0;
    while (true) {
        double rank_sum = 0.0;
        for (int rank : pick) rank_sum += rank;
        const double u = rank_sum - 0.5 * n_a * (n_a + 1);
        if (u <= u_min + 1e-12) favorable += 1.0;
        total += 1.0;

        int i = n_a - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - n_a + 1 + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n_a; ++j) {
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return std::min(1.0, 2.0 * favorable / total);
}

}  // namespace test_util
