#pragma once

#include "sparsectrl/core.hpp"
#include "sparsectrl/eval.hpp"
#include "sparsectrl/numeric.hpp"

#include <filesystem>

namespace sparsectrl::csv {

/// Thrown for missing files and malformed rows (with the offending line
/// number in the message).
struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

// --- trial corpus -----------------------------------------------------

struct ManifestEntry {
    std::string file;
    std::string subject;
    std::string movement_type;
};

/// Manifest format: header `file,subject,movement_type`.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

/// Trial format: header `t,x`, t in seconds, x in meters. The trial id is
/// the filename stem.
Trial read_trial(const std::filesystem::path& path, const std::string& subject = "",
                 const std::string& movement_type = "");
void write_trial(const std::filesystem::path& path, const Trial& trial);

// --- analytic outputs --------------------------------------------------

/// One row per constant interval: `segment,t_start,t_end,u`.
void write_signal(const std::filesystem::path& path, const BangBangSignal& signal);

/// `t,weight` rows, one per impulse.
void write_spike_train(const std::filesystem::path& path, const SpikeTrain& spikes);

/// `t,x,v,a,...` with one column per state derivative, sampled at `count`
/// evenly spaced times.
void write_trajectory(const std::filesystem::path& path, const PiecewiseTrajectory& trajectory,
                      int count);

// --- numeric outputs ---------------------------------------------------

/// `k,t,u` rows followed by a `#` summary line carrying K, K1, K2, status
/// and the iteration count.
void write_solve_report(const std::filesystem::path& path, const numeric::SolveReport& report);

// --- evaluation outputs ------------------------------------------------

/// `subject,movement_type,model,mean_mse,n_trials`.
void write_aggregate(const std::filesystem::path& path, const std::vector<eval::AggregateRow>& rows);

/// `model_a,model_b,U,p`.
void write_comparisons(const std::filesystem::path& path,
                       const std::vector<eval::ModelComparison>& comparisons);

struct TrialScoreRow {
    std::string trial;
    std::string subject;
    std::string movement_type;
    std::string model;
    double mse;
    int samples;
    double segment_duration;
};

/// `trial,subject,movement_type,model,mse,samples,duration` per scored pair.
void write_trial_scores(const std::filesystem::path& path, const std::vector<TrialScoreRow>& rows);
std::vector<TrialScoreRow> read_trial_scores(const std::filesystem::path& path);

struct FlagRow {
    std::string id;
    std::string flag;
    std::string reason;
};

/// `id,flag,reason` for trials dropped or marked as outliers.
void write_flags(const std::filesystem::path& path, const std::vector<FlagRow>& rows);

}  // namespace sparsectrl::csv
