#include "sparsectrl/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sparsectrl::analytic {

namespace {

void require_order(int order) {
    if (order < 1 || order > IntegratorChain::kMaxOrder) {
        std::ostringstream msg;
        msg << "order must be in [1, " << IntegratorChain::kMaxOrder << "], got " << order;
        throw ValidationError(msg.str());
    }
}

void require_duration(double duration) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ValidationError("duration must be strictly positive");
    }
}

// 2^(2(n-1)) (n-1)!, exact in double for n <= 12.
double amplitude_prefactor(int order) {
    double value = 1.0;
    for (int i = 1; i < order; ++i) {
        value *= 4.0 * static_cast<double>(i);
    }
    return value;
}

int sign_of(double x) { return x < 0.0 ? -1 : 1; }

}  // namespace

double optimal_amplitude(int order, double displacement, double duration) {
    require_order(order);
    require_duration(duration);
    if (!std::isfinite(displacement)) {
        throw ValidationError("displacement must be finite");
    }
    return amplitude_prefactor(order) * std::abs(displacement) / std::pow(duration, order);
}

std::vector<double> switch_times(int order, double duration) {
    require_order(order);
    require_duration(duration);
    const std::size_t n = static_cast<std::size_t>(order);
    std::vector<double> times(n + 1);
    times[0] = 0.0;
    times[n] = duration;
    // Fill the first half from the formula and mirror the rest, so the
    // symmetry t_i + t_{n-i} = T holds to the last bit.
    for (std::size_t i = 1; 2 * i < n; ++i) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(i) /
                                  (2.0 * static_cast<double>(n)));
        times[i] = duration * s * s;
        times[n - i] = duration - times[i];
    }
    if (n % 2 == 0 && n >= 2) {
        times[n / 2] = 0.5 * duration;
    }
    return times;
}

BangBangSignal sparse_min_effort_signal(const MovementTask& task, int order) {
    const double displacement = task.displacement();
    const double amplitude = optimal_amplitude(order, displacement, task.duration);
    const int first_sign = displacement == 0.0 ? 1 : sign_of(displacement);
    return BangBangSignal(amplitude, switch_times(order, task.duration), first_sign);
}

SpikeTrain encode_spike_train(const BangBangSignal& signal, SpikeMode mode) {
    std::vector<Impulse> impulses;
    if (signal.is_zero()) {
        return SpikeTrain(std::move(impulses), signal.duration());
    }
    const std::vector<double>& times = signal.switch_times();
    const std::size_t n = times.size() - 1;
    const double k = signal.amplitude();
    const double s = static_cast<double>(signal.first_sign());
    impulses.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double alternating = (i % 2 == 0) ? s : -s;
        double weight = 0.0;
        switch (mode) {
            case SpikeMode::paper:
                // K (-1)^i at every switch time.
                weight = alternating * k;
                break;
            case SpikeMode::derivative:
                // True jump of u: the signal starts/stops with a K-sized
                // step and flips by 2K at interior switches.
                weight = (i == 0 || i == n) ? alternating * k : alternating * 2.0 * k;
                break;
        }
        impulses.push_back({times[i], weight});
    }
    return SpikeTrain(std::move(impulses), signal.duration());
}

BangBangSignal decode_spike_train(const SpikeTrain& spikes, double duration) {
    require_duration(duration);
    if (spikes.impulses.empty()) {
        return BangBangSignal(0.0, {0.0, duration}, 1);
    }
    if (spikes.impulses.front().time != 0.0) {
        throw DecodeError("decode: signal would be zero before the first impulse");
    }
    if (spikes.impulses.back().time != duration) {
        throw DecodeError("decode: final impulse must land at the movement end");
    }

    // Running value after each impulse. A derivative-mode train yields
    // plateaus of constant magnitude and alternating sign, ending at zero.
    std::vector<double> plateau;
    plateau.reserve(spikes.impulses.size());
    double running = 0.0;
    for (const Impulse& impulse : spikes.impulses) {
        running += impulse.weight;
        plateau.push_back(running);
    }

    const double amplitude = std::abs(plateau.front());
    if (amplitude == 0.0) {
        throw DecodeError("decode: first impulse carries no weight");
    }
    const double tol = 1e-9 * amplitude;
    if (std::abs(plateau.back()) > tol) {
        throw DecodeError("decode: reconstruction never returns to zero at the end");
    }
    for (std::size_t i = 0; i + 1 < plateau.size(); ++i) {
        if (std::abs(std::abs(plateau[i]) - amplitude) > tol) {
            throw DecodeError("decode: reconstructed plateaus are not a constant-amplitude wave");
        }
        if (i > 0 && sign_of(plateau[i]) == sign_of(plateau[i - 1])) {
            throw DecodeError("decode: reconstructed plateaus do not alternate in sign");
        }
    }

    std::vector<double> times;
    times.reserve(spikes.impulses.size());
    for (const Impulse& impulse : spikes.impulses) {
        times.push_back(impulse.time);
    }
    return BangBangSignal(amplitude, std::move(times), sign_of(plateau.front()));
}

PiecewiseTrajectory integrate_trajectory(const BangBangSignal& signal, int order, double x_start) {
    require_order(order);
    if (signal.order() != order) {
        throw ValidationError("chain order must match the signal's switch count minus one");
    }
    const std::vector<double>& times = signal.switch_times();
    std::vector<PiecewiseTrajectory::Segment> segments;
    segments.reserve(times.size() - 1);

    Eigen::VectorXd state = Eigen::VectorXd::Zero(order);
    state(0) = x_start;

    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double u = signal.value_at(times[i]);
        const double h = times[i + 1] - times[i];

        // Position over the segment: Taylor polynomial of the current state
        // plus the control term u h^n / n!.
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(order + 1);
        double factorial = 1.0;
        for (int j = 0; j < order; ++j) {
            if (j > 0) factorial *= static_cast<double>(j);
            coeffs(j) = state(j) / factorial;
        }
        factorial *= static_cast<double>(order);
        coeffs(order) = u / factorial;
        segments.push_back({times[i], times[i + 1], coeffs});

        // Propagate the state to the segment end in closed form.
        Eigen::VectorXd next = Eigen::VectorXd::Zero(order);
        for (int j = 0; j < order; ++j) {
            double term = 0.0;
            double h_power = 1.0;
            double k_factorial = 1.0;
            for (int k = 0; j + k < order; ++k) {
                if (k > 0) {
                    h_power *= h;
                    k_factorial *= static_cast<double>(k);
                }
                term += state(j + k) * h_power / k_factorial;
            }
            double tail = 1.0;  // h^(n-j) / (n-j)!
            for (int m = 1; m <= order - j; ++m) {
                tail *= h / static_cast<double>(m);
            }
            next(j) = term + u * tail;
        }
        state = next;
    }
    return PiecewiseTrajectory(order, std::move(segments));
}

double minimum_time(int order, double displacement, double amplitude_bound) {
    require_order(order);
    if (!(amplitude_bound >= 0.0) || !std::isfinite(amplitude_bound)) {
        throw ValidationError("amplitude bound must be finite and nonnegative");
    }
    if (!std::isfinite(displacement)) {
        throw ValidationError("displacement must be finite");
    }
    if (displacement == 0.0) {
        return 0.0;
    }
    if (amplitude_bound == 0.0) {
        throw ValidationError("zero amplitude bound cannot move a nonzero displacement");
    }
    const double scaled = amplitude_prefactor(order) * std::abs(displacement) / amplitude_bound;
    return std::pow(scaled, 1.0 / static_cast<double>(order));
}

PiecewiseTrajectory min_jerk_l2_trajectory(const MovementTask& task) {
    const double d = task.displacement();
    const double t_total = task.duration;
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(6);
    coeffs(0) = task.x_start;
    coeffs(3) = 10.0 * d / std::pow(t_total, 3);
    coeffs(4) = -15.0 * d / std::pow(t_total, 4);
    coeffs(5) = 6.0 * d / std::pow(t_total, 5);
    std::vector<PiecewiseTrajectory::Segment> segments;
    segments.push_back({0.0, t_total, std::move(coeffs)});
    return PiecewiseTrajectory(3, std::move(segments));
}

}  // namespace sparsectrl::analytic
