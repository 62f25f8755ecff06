#include "sparsectrl/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sparsectrl {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// k-th derivative of a polynomial (ascending coefficients) at local time t.
double poly_derivative(const Eigen::VectorXd& c, double t, int k) {
    if (k >= c.size()) {
        return 0.0;
    }
    double value = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= k; --j) {
        double factor = 1.0;
        for (int m = 0; m < k; ++m) factor *= static_cast<double>(j - m);
        value = value * t + factor * c(j);
    }
    return value;
}

// Magnitude of the terms feeding the evaluation above; bounds how much
// cancellation the value can hide.
double poly_derivative_scale(const Eigen::VectorXd& c, double t, int k) {
    if (k >= c.size()) {
        return 0.0;
    }
    double value = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= k; --j) {
        double factor = 1.0;
        for (int m = 0; m < k; ++m) factor *= static_cast<double>(j - m);
        value = value * std::abs(t) + factor * std::abs(c(j));
    }
    return value;
}

}  // namespace

IntegratorChain::IntegratorChain(int order) : order_(order) {
    if (order < 1 || order > kMaxOrder) {
        std::ostringstream msg;
        msg << "chain order must be in [1, " << kMaxOrder << "], got " << order;
        throw ValidationError(msg.str());
    }
}

Eigen::MatrixXd IntegratorChain::system_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(order_, order_);
    for (int j = 0; j + 1 < order_; ++j) {
        a(j, j + 1) = 1.0;
    }
    return a;
}

Eigen::VectorXd IntegratorChain::input_vector() const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(order_);
    b(order_ - 1) = 1.0;
    return b;
}

StateVector IntegratorChain::rest_state(double position) const {
    StateVector x = StateVector::Zero(order_);
    x(0) = position;
    return x;
}

MovementTask::MovementTask(double x_start, double x_end, double duration)
    : x_start(x_start), x_end(x_end), duration(duration) {
    if (!std::isfinite(x_start) || !std::isfinite(x_end)) {
        throw ValidationError("task positions must be finite");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ValidationError("task duration must be strictly positive");
    }
}

BangBangSignal::BangBangSignal(double amplitude, std::vector<double> switch_times, int first_sign)
    : amplitude_(amplitude), switch_times_(std::move(switch_times)), first_sign_(first_sign) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw ValidationError("signal amplitude must be finite and nonnegative");
    }
    if (first_sign != 1 && first_sign != -1) {
        throw ValidationError("first_sign must be +1 or -1");
    }
    if (switch_times_.size() < 2) {
        throw ValidationError("signal needs at least two switch times (start and end)");
    }
    if (!all_finite(switch_times_)) {
        throw ValidationError("switch times must be finite");
    }
    if (switch_times_.front() != 0.0) {
        throw ValidationError("first switch time must be 0");
    }
    const double t_final = switch_times_.back();
    if (!(t_final > 0.0)) {
        throw ValidationError("signal duration must be strictly positive");
    }
    for (std::size_t i = 0; i + 1 < switch_times_.size(); ++i) {
        if (!(switch_times_[i] < switch_times_[i + 1])) {
            throw ValidationError("switch times must be strictly increasing");
        }
    }
    // t_i + t_{n-i} = T: the optimal signal is symmetric about T/2.
    const std::size_t n = switch_times_.size() - 1;
    for (std::size_t i = 0; i <= n; ++i) {
        if (std::abs(switch_times_[i] + switch_times_[n - i] - t_final) > 1e-9 * t_final) {
            throw ValidationError("switch times must be symmetric about the movement midpoint");
        }
    }
}

double BangBangSignal::value_at(double t) const {
    if (t < switch_times_.front() || t >= switch_times_.back() || amplitude_ == 0.0) {
        return 0.0;
    }
    const auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
    const auto interval = static_cast<std::size_t>(it - switch_times_.begin()) - 1;
    const double sign = (interval % 2 == 0) ? first_sign_ : -first_sign_;
    return sign * amplitude_;
}

SpikeTrain::SpikeTrain(std::vector<Impulse> impulses_in, double duration_in)
    : impulses(std::move(impulses_in)), duration(duration_in) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ValidationError("spike train duration must be strictly positive");
    }
    double previous = 0.0;
    for (const Impulse& impulse : impulses) {
        if (!std::isfinite(impulse.time) || !std::isfinite(impulse.weight)) {
            throw ValidationError("impulse entries must be finite");
        }
        if (impulse.time < 0.0 || impulse.time > duration) {
            throw ValidationError("impulse times must lie within [0, duration]");
        }
        if (impulse.time < previous) {
            throw ValidationError("impulse times must be non-decreasing");
        }
        previous = impulse.time;
    }
}

SampledSeries::SampledSeries(std::vector<double> times_in, std::vector<double> values_in)
    : times(std::move(times_in)), values(std::move(values_in)) {
    if (times.size() != values.size()) {
        throw ValidationError("sampled series times and values must have equal length");
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (!(times[i] < times[i + 1])) {
            throw ValidationError("sampled series times must be strictly increasing");
        }
    }
}

PiecewiseTrajectory::PiecewiseTrajectory(int order, std::vector<Segment> segments)
    : order_(order), segments_(std::move(segments)) {
    if (order < 1) {
        throw ValidationError("trajectory order must be at least 1");
    }
    if (segments_.empty()) {
        throw ValidationError("trajectory needs at least one segment");
    }
    const double t_total = segments_.back().t_end;
    for (const Segment& seg : segments_) {
        if (!(seg.t_start < seg.t_end) || seg.coefficients.size() == 0) {
            throw ValidationError("trajectory segment is degenerate");
        }
    }
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
        if (std::abs(segments_[i].t_end - segments_[i + 1].t_start) > 1e-12 * t_total) {
            throw ValidationError("trajectory segments must tile the duration without gaps");
        }
    }
    // Position and the first order-1 derivatives stay continuous across
    // segment boundaries (relative mismatch <= 1e-9).
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
        const double h = segments_[i].t_end - segments_[i].t_start;
        for (int k = 0; k < order_; ++k) {
            const double left = poly_derivative(segments_[i].coefficients, h, k);
            const double right = poly_derivative(segments_[i + 1].coefficients, 0.0, k);
            const double scale = std::max({1.0, std::abs(left), std::abs(right),
                                           poly_derivative_scale(segments_[i].coefficients, h, k)});
            if (std::abs(left - right) > 1e-9 * scale) {
                throw ValidationError("trajectory derivatives are discontinuous across segments");
            }
        }
    }
}

const PiecewiseTrajectory::Segment& PiecewiseTrajectory::segment_at(double t) const {
    // Clamp into [0, duration]; the final time belongs to the last segment.
    if (t <= segments_.front().t_start) {
        return segments_.front();
    }
    if (t >= segments_.back().t_end) {
        return segments_.back();
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double value, const Segment& seg) { return value < seg.t_end; });
    return *it;
}

double PiecewiseTrajectory::derivative(double t, int k) const {
    if (k < 0) {
        throw ValidationError("derivative index must be nonnegative");
    }
    const Segment& seg = segment_at(t);
    const double local = std::clamp(t, seg.t_start, seg.t_end) - seg.t_start;
    return poly_derivative(seg.coefficients, local, k);
}

StateVector PiecewiseTrajectory::state_at(double t) const {
    StateVector state(order_);
    for (int k = 0; k < order_; ++k) {
        state(k) = derivative(t, k);
    }
    return state;
}

SampledSeries PiecewiseTrajectory::sample_derivative(int count, int k) const {
    if (count < 2) {
        throw ValidationError("sampling needs at least two points");
    }
    std::vector<double> times(static_cast<std::size_t>(count));
    std::vector<double> values(static_cast<std::size_t>(count));
    const double t_total = duration();
    for (int i = 0; i < count; ++i) {
        const double t = t_total * static_cast<double>(i) / static_cast<double>(count - 1);
        times[static_cast<std::size_t>(i)] = t;
        values[static_cast<std::size_t>(i)] = derivative(t, k);
    }
    return SampledSeries(std::move(times), std::move(values));
}

SampledSeries PiecewiseTrajectory::sample_positions(int count) const {
    return sample_derivative(count, 0);
}

Trial::Trial(std::string id_in, std::vector<double> times_in, std::vector<double> positions_in,
             std::string subject_in, std::string movement_type_in)
    : id(std::move(id_in)),
      times(std::move(times_in)),
      positions(std::move(positions_in)),
      subject(std::move(subject_in)),
      movement_type(std::move(movement_type_in)) {
    if (times.size() != positions.size()) {
        throw ValidationError("trial times and positions must have equal length");
    }
    if (times.size() < 8) {
        throw ValidationError("trial needs at least 8 samples");
    }
    if (!all_finite(times) || !all_finite(positions)) {
        throw ValidationError("trial samples must be finite");
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (!(times[i] < times[i + 1])) {
            throw ValidationError("trial times must be strictly increasing");
        }
    }
}

}  // namespace sparsectrl
