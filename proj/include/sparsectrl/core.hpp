#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace sparsectrl {

/// Thrown when a domain type is constructed with values that violate its
/// invariants (bad chain order, non-symmetric switch times, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// State of an integrator chain: entry j is the j-th time derivative of
/// position (entry 0 = position). SI units: m, m/s, m/s^2, ...
using StateVector = Eigen::VectorXd;

/// An n-th order integrator: the control signal is the n-th derivative of
/// position. The system matrix has ones on the superdiagonal and the input
/// column a single one in the last entry.
class IntegratorChain {
  public:
    static constexpr int kMaxOrder = 12;

    explicit IntegratorChain(int order);

    int order() const { return order_; }

    Eigen::MatrixXd system_matrix() const;
    Eigen::VectorXd input_vector() const;

    /// State with the given position and all derivatives zero.
    StateVector rest_state(double position) const;

  private:
    int order_;
};

/// Rest-to-rest point reaching task along one movement axis.
struct MovementTask {
    double x_start;   // m
    double x_end;     // m
    double duration;  // s, > 0

    MovementTask(double x_start, double x_end, double duration);

    double displacement() const { return x_end - x_start; }
};

/// Piecewise-constant control that alternates between +amplitude and
/// -amplitude. With switch times t_0 < t_1 < ... < t_n the value on
/// [t_i, t_{i+1}) is first_sign * (-1)^i * amplitude; outside [t_0, t_n]
/// the signal is zero. Invariants: t_0 = 0, t_n = duration, and the switch
/// times are symmetric about duration/2.
class BangBangSignal {
  public:
    BangBangSignal(double amplitude, std::vector<double> switch_times, int first_sign);

    double amplitude() const { return amplitude_; }
    int first_sign() const { return first_sign_; }
    const std::vector<double>& switch_times() const { return switch_times_; }

    /// Chain order n implied by the switch structure (n + 1 switch times).
    int order() const { return static_cast<int>(switch_times_.size()) - 1; }

    double duration() const { return switch_times_.back(); }

    double value_at(double t) const;

    bool is_zero() const { return amplitude_ == 0.0; }

  private:
    double amplitude_;                  // K >= 0
    std::vector<double> switch_times_;  // strictly increasing, spans [0, T]
    int first_sign_;                    // +1 or -1
};

/// One weighted impulse of a spike train.
struct Impulse {
    double time;    // s
    double weight;  // signed amplitude carried by the impulse
};

/// Timed, signed impulse weights encoding the discontinuities of a
/// piecewise-constant control signal.
struct SpikeTrain {
    std::vector<Impulse> impulses;  // times non-decreasing, within [0, duration]
    double duration;

    SpikeTrain(std::vector<Impulse> impulses, double duration);
};

/// Strictly increasing sample times with one value per time.
struct SampledSeries {
    std::vector<double> times;
    std::vector<double> values;

    SampledSeries() = default;
    SampledSeries(std::vector<double> times, std::vector<double> values);

    std::size_t size() const { return times.size(); }
};

/// Exact piecewise-polynomial trajectory of an integrator chain. Each
/// segment stores position as a polynomial in local time (coefficients in
/// ascending degree). Segments tile [0, duration]; position and the first
/// order-1 derivatives are continuous across boundaries.
class PiecewiseTrajectory {
  public:
    struct Segment {
        double t_start;
        double t_end;
        Eigen::VectorXd coefficients;  // position polynomial, local time
    };

    PiecewiseTrajectory(int order, std::vector<Segment> segments);

    int order() const { return order_; }
    double duration() const { return segments_.back().t_end; }
    const std::vector<Segment>& segments() const { return segments_; }

    /// k-th derivative of position at time t (t clamped into [0, duration]).
    double derivative(double t, int k) const;

    double position(double t) const { return derivative(t, 0); }
    double velocity(double t) const { return derivative(t, 1); }

    /// Full state (position and first order-1 derivatives) at time t.
    StateVector state_at(double t) const;

    /// Position sampled at `count` evenly spaced times covering [0, duration].
    SampledSeries sample_positions(int count) const;

    /// k-th derivative sampled at `count` evenly spaced times.
    SampledSeries sample_derivative(int count, int k) const;

  private:
    const Segment& segment_at(double t) const;

    int order_;
    std::vector<Segment> segments_;
};

/// One recorded (or synthetic) reaching movement, positions along the
/// movement axis.
struct Trial {
    std::string id;
    std::vector<double> times;      // s, strictly increasing, >= 8 samples
    std::vector<double> positions;  // m
    std::string subject;
    std::string movement_type;

    Trial(std::string id, std::vector<double> times, std::vector<double> positions,
          std::string subject = "", std::string movement_type = "");

    std::size_t size() const { return times.size(); }
};

/// The fast (ballistic) portion of a trial, between velocity onset and
/// offset, with the rest-to-rest task derived from the clipped samples.
struct BallisticSegment {
    int onset_index;
    int offset_index;
    int peak_index;      // onset_index <= peak_index <= offset_index
    bool onset_clamped;  // detection hit the series start
    bool offset_clamped;
    MovementTask task;
};

}  // namespace sparsectrl
