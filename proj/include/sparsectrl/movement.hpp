#pragma once

#include "sparsectrl/core.hpp"

#include <filesystem>
#include <random>

namespace sparsectrl::movement {

/// Thrown by detect_ballistic when the velocity profile carries no movement.
struct NoMovementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrialLoadIssue {
    std::string file;
    std::string reason;
};

struct TrialLoadResult {
    std::vector<Trial> trials;
    std::vector<TrialLoadIssue> issues;  // invalid files, reported individually
};

/// Load every trial referenced by a manifest (CSV: file,subject,movement_type).
/// Referenced paths are resolved relative to the manifest's directory. Files
/// that fail to parse or validate are collected as issues; the rest load.
TrialLoadResult load_trials(const std::filesystem::path& manifest_path);

/// Velocity from positions: central finite differences on interior samples,
/// one-sided at the ends, then a centered moving average of the given odd
/// width (truncated near the boundaries). Width 1 skips smoothing.
SampledSeries velocity_profile(const Trial& trial, int smooth_window = 5);

struct BallisticWindow {
    int onset;
    int offset;
    int peak;
    bool onset_clamped;   // scan hit the series start before dropping below threshold
    bool offset_clamped;  // scan hit the series end
};

/// Find the fast portion of a movement: locate the first global maximum of
/// |v|, then scan outward for the nearest samples below threshold_frac of
/// the peak. Scans that reach a boundary clamp there and are flagged.
BallisticWindow detect_ballistic(const SampledSeries& velocity, double threshold_frac = 0.05);

/// Rest-to-rest task spanned by the clipped samples. The segment must keep
/// at least three samples.
MovementTask task_from_segment(const Trial& trial, int onset, int offset);

BallisticSegment make_segment(const Trial& trial, const BallisticWindow& window);

/// Flag string for trials whose detection is unreliable: a clamped scan or
/// a segment shorter than 50 ms. Empty when the segment looks clean.
std::string outlier_flag(const Trial& trial, const BallisticWindow& window);

enum class TrialModel { sparse, quintic };

/// Sample an analytic trajectory for the task at the given rate, pad both
/// ends with rest, and add independent zero-mean position noise from the
/// supplied generator.
Trial synthesize_trial(const MovementTask& task, int order, TrialModel model, double noise_std,
                       double rate, double pre_pad, double post_pad, std::mt19937_64& rng,
                       const std::string& id);

}  // namespace sparsectrl::movement
