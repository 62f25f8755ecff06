#pragma once

#include "sparsectrl/core.hpp"

namespace sparsectrl::analytic {

/// Thrown by decode_spike_train when the impulse weights do not reconstruct
/// a valid alternating bang-bang signal.
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Peak amplitude of the minimum-effort bang-bang control for an n-th order
/// integrator moving a displacement D in time T:
///
///   K* = 2^(2(n-1)) (n-1)! |D| / T^n
///
/// The sign of the signal's first interval is carried separately by the
/// caller (first_sign = sign of D).
double optimal_amplitude(int order, double displacement, double duration);

/// Optimal switch times t_i = T sin^2(pi i / 2n), i = 0..n. Built so that
/// t_i + t_{n-i} = T holds exactly (the second half mirrors the first).
std::vector<double> switch_times(int order, double duration);

/// The full minimum-peak-effort control for a rest-to-rest task: optimal
/// amplitude, optimal switch times, first interval signed like the
/// displacement (+1 for zero displacement, where the amplitude is 0).
BangBangSignal sparse_min_effort_signal(const MovementTask& task, int order);

enum class SpikeMode {
    /// Weight K (-1)^i at switch time t_i: the alternating-sign convention.
    paper,
    /// The true jump of the control at each switch time (+-K at the ends,
    /// +-2K at interior switches), so that cumulative summation of the
    /// weights reconstructs the signal exactly.
    derivative,
};

/// Encode a bang-bang signal as a train of weighted impulses at its switch
/// times. A zero signal encodes to an empty train.
SpikeTrain encode_spike_train(const BangBangSignal& signal, SpikeMode mode);

/// Rebuild a bang-bang signal by cumulatively summing impulse weights.
/// Only derivative-mode trains reconstruct: the running value must
/// alternate sign at constant magnitude and return to zero at the final
/// impulse. Anything else throws DecodeError. An empty train decodes to
/// the zero signal.
BangBangSignal decode_spike_train(const SpikeTrain& spikes, double duration);

/// Integrate a piecewise-constant control through an n-th order integrator
/// starting from rest at x_start. Exact: each constant-control segment is a
/// degree-n position polynomial and the state is propagated in closed form,
/// with no numerical stepping.
PiecewiseTrajectory integrate_trajectory(const BangBangSignal& signal, int order, double x_start);

/// Smallest movement time for displacement D under the amplitude bound B:
/// the unique T at which the optimal amplitude equals B,
///
///   T* = (2^(2(n-1)) (n-1)! |D| / B)^(1/n).
///
/// B = 0 is only feasible for D = 0 (T* = 0).
double minimum_time(int order, double displacement, double amplitude_bound);

/// The classical minimum-jerk trajectory for a rest-to-rest task: the
/// single quintic x(t) = x_i + D (10 tau^3 - 15 tau^4 + 6 tau^5) with
/// tau = t/T, which minimizes the L2 norm of jerk.
PiecewiseTrajectory min_jerk_l2_trajectory(const MovementTask& task);

}  // namespace sparsectrl::analytic
