#pragma once

#include "sparsectrl/core.hpp"

#include <span>

namespace sparsectrl::eval {

/// Which velocity model a trial segment is scored against.
struct ModelSpec {
    enum class Kind { sparse_linf, quintic_l2 };

    Kind kind;
    int order;  // 3 = jerk, 4 = snap, 5 = crackle, 6 = pop (sparse kind)

    ModelSpec(Kind kind, int order);

    /// "sparse3".."sparse6" or "quintic".
    std::string label() const;

    /// Parse a label; throws ValidationError on unknown tokens.
    static ModelSpec parse(const std::string& token);
};

struct ModelFitResult {
    std::string trial_id;
    ModelSpec model;
    double mse;  // (m/s)^2
    SampledSeries residuals;
    int samples_used;
};

/// Score one trial segment against a model: rebuild the model trajectory
/// from the segment's rest-to-rest task, evaluate its velocity at the
/// segment's own timestamps, and average the squared error against the
/// trial's velocity profile. The first and last segment samples are
/// excluded (their accuracy is forced by the boundary conditions).
ModelFitResult fit_and_score(const BallisticSegment& segment, const Trial& trial,
                             const ModelSpec& model, int smooth_window = 5);

struct AggregateRow {
    std::string subject;
    std::string movement_type;
    std::string model;
    double mean_mse;
    int n_trials;
};

/// Mean MSE per (subject, movement type, model), deterministically ordered.
/// Trials supply the grouping metadata for each result's trial id.
std::vector<AggregateRow> aggregate(const std::vector<ModelFitResult>& results,
                                    const std::vector<Trial>& trials);

struct RankSumResult {
    double u_statistic;  // U of the first sample
    double p_value;      // two-sided
    bool exact;          // exact enumeration vs normal approximation
};

/// Wilcoxon rank-sum (Mann-Whitney U) test with midranks for ties. The
/// null distribution is exact (by counting rank assignments) when the
/// combined size is at most 20 and there are no ties; otherwise a normal
/// approximation with tie-corrected variance and continuity correction.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

struct ModelComparison {
    std::string model_a;
    std::string model_b;
    double u_statistic;
    double p_value;
};

/// Pairwise rank-sum tests between the per-trial MSE samples of every
/// model present in the results.
std::vector<ModelComparison> compare_models(const std::vector<ModelFitResult>& results);

}  // namespace sparsectrl::eval
