#include "sparsectrl/movement.hpp"

#include "sparsectrl/analytic.hpp"
#include "sparsectrl/csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sparsectrl::movement {

TrialLoadResult load_trials(const std::filesystem::path& manifest_path) {
    TrialLoadResult result;
    const std::vector<csv::ManifestEntry> entries = csv::read_manifest(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();
    for (const csv::ManifestEntry& entry : entries) {
        const std::filesystem::path file = base / entry.file;
        try {
            Trial trial = csv::read_trial(file, entry.subject, entry.movement_type);
            result.trials.push_back(std::move(trial));
        } catch (const std::exception& error) {
            result.issues.push_back({entry.file, error.what()});
        }
    }
    return result;
}

SampledSeries velocity_profile(const Trial& trial, int smooth_window) {
    const std::size_t count = trial.size();
    if (smooth_window < 1 || smooth_window % 2 == 0 ||
        static_cast<std::size_t>(smooth_window) >= count) {
        throw ValidationError("smooth window must be odd, >= 1 and smaller than the sample count");
    }
    const std::vector<double>& t = trial.times;
    const std::vector<double>& x = trial.positions;

    std::vector<double> velocity(count);
    velocity.front() = (x[1] - x[0]) / (t[1] - t[0]);
    velocity.back() = (x[count - 1] - x[count - 2]) / (t[count - 1] - t[count - 2]);
    for (std::size_t i = 1; i + 1 < count; ++i) {
        velocity[i] = (x[i + 1] - x[i - 1]) / (t[i + 1] - t[i - 1]);
    }

    if (smooth_window > 1) {
        const std::size_t half = static_cast<std::size_t>(smooth_window) / 2;
        std::vector<double> smoothed(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t lo = i >= half ? i - half : 0;
            const std::size_t hi = std::min(count - 1, i + half);
            double sum = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) sum += velocity[j];
            smoothed[i] = sum / static_cast<double>(hi - lo + 1);
        }
        velocity = std::move(smoothed);
    }
    return SampledSeries(trial.times, std::move(velocity));
}

BallisticWindow detect_ballistic(const SampledSeries& velocity, double threshold_frac) {
    if (!(threshold_frac > 0.0) || !(threshold_frac < 1.0)) {
        throw ValidationError("threshold fraction must lie strictly between 0 and 1");
    }
    const std::vector<double>& v = velocity.values;
    if (v.size() < 3) {
        throw ValidationError("velocity series too short for detection");
    }

    // First sample attaining the global maximum of |v| (ties -> earliest).
    std::size_t peak = 0;
    double peak_speed = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > peak_speed) {
            peak_speed = std::abs(v[i]);
            peak = i;
        }
    }
    if (peak_speed == 0.0) {
        throw NoMovementError("velocity is identically zero: no movement to detect");
    }
    const double threshold = threshold_frac * peak_speed;

    BallisticWindow window{};
    window.peak = static_cast<int>(peak);
    window.onset = 0;
    window.onset_clamped = true;
    for (std::size_t i = peak; i-- > 0;) {
        if (std::abs(v[i]) < threshold) {
            window.onset = static_cast<int>(i);
            window.onset_clamped = false;
            break;
        }
    }
    window.offset = static_cast<int>(v.size()) - 1;
    window.offset_clamped = true;
    for (std::size_t i = peak + 1; i < v.size(); ++i) {
        if (std::abs(v[i]) < threshold) {
            window.offset = static_cast<int>(i);
            window.offset_clamped = false;
            break;
        }
    }
    return window;
}

MovementTask task_from_segment(const Trial& trial, int onset, int offset) {
    if (onset < 0 || offset >= static_cast<int>(trial.size()) || onset >= offset) {
        throw ValidationError("segment indices out of range");
    }
    if (offset - onset < 2) {
        throw ValidationError("segment is degenerate: needs at least three samples");
    }
    const auto lo = static_cast<std::size_t>(onset);
    const auto hi = static_cast<std::size_t>(offset);
    return MovementTask(trial.positions[lo], trial.positions[hi], trial.times[hi] - trial.times[lo]);
}

BallisticSegment make_segment(const Trial& trial, const BallisticWindow& window) {
    return BallisticSegment{window.onset,         window.offset,
                            window.peak,          window.onset_clamped,
                            window.offset_clamped, task_from_segment(trial, window.onset, window.offset)};
}

std::string outlier_flag(const Trial& trial, const BallisticWindow& window) {
    if (window.onset_clamped || window.offset_clamped) {
        return "clamped";
    }
    const double duration = trial.times[static_cast<std::size_t>(window.offset)] -
                            trial.times[static_cast<std::size_t>(window.onset)];
    if (duration < 0.05) {
        return "short";
    }
    return "";
}

Trial synthesize_trial(const MovementTask& task, int order, TrialModel model, double noise_std,
                       double rate, double pre_pad, double post_pad, std::mt19937_64& rng,
                       const std::string& id) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ValidationError("sampling rate must be strictly positive");
    }
    if (!(noise_std >= 0.0) || !(pre_pad >= 0.0) || !(post_pad >= 0.0)) {
        throw ValidationError("noise and padding must be nonnegative");
    }

    const PiecewiseTrajectory trajectory =
        model == TrialModel::sparse
            ? analytic::integrate_trajectory(analytic::sparse_min_effort_signal(task, order), order,
                                             task.x_start)
            : analytic::min_jerk_l2_trajectory(task);

    const double step = 1.0 / rate;
    const double total = pre_pad + task.duration + post_pad;
    const auto count = static_cast<std::size_t>(std::floor(total / step)) + 1;

    std::vector<double> times(count);
    std::vector<double> positions(count);
    std::normal_distribution<double> noise(0.0, noise_std);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = step * static_cast<double>(i);
        times[i] = t;
        double position;
        if (t < pre_pad) {
            position = task.x_start;
        } else if (t > pre_pad + task.duration) {
            position = task.x_end;
        } else {
            position = trajectory.position(t - pre_pad);
        }
        if (noise_std > 0.0) {
            position += noise(rng);
        }
        positions[i] = position;
    }
    return Trial(id, std::move(times), std::move(positions));
}

}  // namespace sparsectrl::movement
