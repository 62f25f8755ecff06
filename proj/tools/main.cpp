#include "sparsectrl/analytic.hpp"
#include "sparsectrl/core.hpp"
#include "sparsectrl/csv.hpp"
#include "sparsectrl/eval.hpp"
#include "sparsectrl/movement.hpp"
#include "sparsectrl/numeric.hpp"
#include "sparsectrl/svg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>

namespace {

namespace fs = std::filesystem;
using namespace sparsectrl;

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitData = 4;

struct GlobalOptions {
    std::string out_dir = "out";
    unsigned long long seed = 42;
    bool svg = false;
};

std::vector<eval::ModelSpec> parse_models(const std::string& list) {
    std::vector<eval::ModelSpec> models;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t comma = list.find(',', start);
        const std::string token = list.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty() && seen.insert(token).second) {
            models.push_back(eval::ModelSpec::parse(token));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (models.empty()) {
        throw ValidationError("no models requested");
    }
    return models;
}

PiecewiseTrajectory build_trajectory(const MovementTask& task, const eval::ModelSpec& model) {
    if (model.kind == eval::ModelSpec::Kind::sparse_linf) {
        return analytic::integrate_trajectory(analytic::sparse_min_effort_signal(task, model.order),
                                              model.order, task.x_start);
    }
    return analytic::min_jerk_l2_trajectory(task);
}

int cmd_generate(const GlobalOptions& global, int order, double displacement, double duration,
                 int samples) {
    const MovementTask task(0.0, displacement, duration);
    const BangBangSignal signal = analytic::sparse_min_effort_signal(task, order);
    const SpikeTrain paper = analytic::encode_spike_train(signal, analytic::SpikeMode::paper);
    const SpikeTrain derivative =
        analytic::encode_spike_train(signal, analytic::SpikeMode::derivative);
    const PiecewiseTrajectory trajectory =
        analytic::integrate_trajectory(signal, order, task.x_start);

    const fs::path out(global.out_dir);
    csv::write_signal(out / "signal.csv", signal);
    csv::write_spike_train(out / "spikes_paper.csv", paper);
    csv::write_spike_train(out / "spikes_derivative.csv", derivative);
    csv::write_trajectory(out / "trajectory.csv", trajectory, samples);
    if (global.svg) {
        svg::write_signal_plot(out / "signal.svg", signal, derivative,
                               "order " + std::to_string(order) + " control");
    }

    std::cout << "K=" << csv::format_double(signal.amplitude()) << " switches=";
    for (std::size_t i = 0; i < signal.switch_times().size(); ++i) {
        std::cout << (i == 0 ? "" : ",") << csv::format_double(signal.switch_times()[i]);
    }
    std::cout << '\n';
    return 0;
}

int cmd_encode(const GlobalOptions& global, int order, double displacement, double duration,
               const std::string& mode) {
    if (mode != "paper" && mode != "derivative") {
        throw ValidationError("mode must be 'paper' or 'derivative'");
    }
    const MovementTask task(0.0, displacement, duration);
    const BangBangSignal signal = analytic::sparse_min_effort_signal(task, order);
    const SpikeTrain spikes = analytic::encode_spike_train(
        signal, mode == "paper" ? analytic::SpikeMode::paper : analytic::SpikeMode::derivative);
    csv::write_spike_train(fs::path(global.out_dir) / "spikes.csv", spikes);
    std::cout << "impulses=" << spikes.impulses.size() << '\n';
    return 0;
}

int cmd_solve(const GlobalOptions& global, int order, double displacement, double duration,
              int steps, bool l2, bool soft, double effort_weight) {
    const IntegratorChain chain(order);
    const MovementTask task(0.0, displacement, duration);

    numeric::SolveReport report;
    if (soft) {
        report = numeric::solve_soft_terminal(chain, task.x_start, task.x_end, effort_weight,
                                              duration, steps);
    } else if (l2) {
        report = numeric::solve_min_effort_l2(chain, task, steps);
    } else {
        report = numeric::solve_min_effort_linf(chain, task, steps);
    }

    csv::write_solve_report(fs::path(global.out_dir) / "solve.csv", report);
    std::cout << "K=" << csv::format_double(report.bound);
    if (soft) {
        std::cout << " K1=" << csv::format_double(report.terminal_cost)
                  << " K2=" << csv::format_double(report.effort_cost);
    }
    std::cout << " status=" << numeric::to_string(report.status) << '\n';
    if (report.status == numeric::SolveStatus::infeasible) {
        return kExitSolver;
    }
    return 0;
}

int cmd_simulate(const GlobalOptions& global, double displacement, double duration,
                 const std::string& model_token, int samples) {
    const eval::ModelSpec model = eval::ModelSpec::parse(model_token);
    const MovementTask task(0.0, displacement, duration);
    const PiecewiseTrajectory trajectory = build_trajectory(task, model);
    const fs::path out(global.out_dir);
    csv::write_trajectory(out / "trajectory.csv", trajectory, samples);
    if (global.svg) {
        std::vector<SampledSeries> series{trajectory.sample_positions(samples),
                                          trajectory.sample_derivative(samples, 1)};
        svg::write_line_plot(out / "trajectory.svg", series, {"x", "v"},
                             model.label() + " trajectory");
    }
    std::cout << "duration=" << csv::format_double(trajectory.duration())
              << " x_end=" << csv::format_double(trajectory.position(trajectory.duration()))
              << '\n';
    return 0;
}

int cmd_synthesize(const GlobalOptions& global, int count, int order, double displacement,
                   double duration, const std::string& model_token, double noise_std, double rate,
                   double pre_pad, double post_pad, const std::string& subject,
                   const std::string& movement_type) {
    movement::TrialModel model;
    if (model_token == "sparse") {
        model = movement::TrialModel::sparse;
    } else if (model_token == "quintic") {
        model = movement::TrialModel::quintic;
    } else {
        throw ValidationError("model must be 'sparse' or 'quintic'");
    }
    const MovementTask task(0.0, displacement, duration);
    std::mt19937_64 rng(global.seed);

    const fs::path out(global.out_dir);
    std::vector<csv::ManifestEntry> entries;
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "trial_%04d", i);
        const Trial trial = movement::synthesize_trial(task, order, model, noise_std, rate,
                                                       pre_pad, post_pad, rng, name);
        csv::write_trial(out / (std::string(name) + ".csv"), trial);
        entries.push_back({std::string(name) + ".csv", subject, movement_type});
    }
    csv::write_manifest(out / "manifest.csv", entries);
    std::cout << "trials=" << count << " manifest=" << (out / "manifest.csv").string() << '\n';
    return 0;
}

int cmd_analyze(const GlobalOptions& global, const std::string& manifest,
                const std::string& model_list, double threshold, int window) {
    const std::vector<eval::ModelSpec> models = parse_models(model_list);
    const movement::TrialLoadResult loaded = movement::load_trials(manifest);

    std::vector<csv::FlagRow> flags;
    for (const movement::TrialLoadIssue& issue : loaded.issues) {
        flags.push_back({issue.file, "load_error", issue.reason});
    }

    std::vector<eval::ModelFitResult> results;
    std::vector<csv::TrialScoreRow> score_rows;
    for (const Trial& trial : loaded.trials) {
        try {
            const SampledSeries velocity = movement::velocity_profile(trial, window);
            const movement::BallisticWindow window_found =
                movement::detect_ballistic(velocity, threshold);
            const std::string flag = movement::outlier_flag(trial, window_found);
            if (!flag.empty()) {
                flags.push_back({trial.id, "outlier", flag});
                continue;
            }
            const BallisticSegment segment = movement::make_segment(trial, window_found);
            for (const eval::ModelSpec& model : models) {
                eval::ModelFitResult result = eval::fit_and_score(segment, trial, model, window);
                score_rows.push_back({trial.id, trial.subject, trial.movement_type, model.label(),
                                      result.mse, result.samples_used, segment.task.duration});
                results.push_back(std::move(result));
            }
        } catch (const std::exception& error) {
            flags.push_back({trial.id, "failed", error.what()});
        }
    }

    const fs::path out(global.out_dir);
    csv::write_flags(out / "flags.csv", flags);
    csv::write_trial_scores(out / "trial_scores.csv", score_rows);

    std::vector<eval::AggregateRow> table;
    std::vector<eval::ModelComparison> comparisons;
    if (!results.empty()) {
        table = eval::aggregate(results, loaded.trials);
        comparisons = eval::compare_models(results);
    } else {
        std::cerr << "warning: no trials scored\n";
    }
    csv::write_aggregate(out / "results.csv", table);
    csv::write_comparisons(out / "comparisons.csv", comparisons);

    if (global.svg && !results.empty()) {
        // Fig-5-style layout: one group per subject, one bar per model.
        std::map<std::string, std::map<std::string, std::pair<double, int>>> by_subject;
        for (const csv::TrialScoreRow& row : score_rows) {
            auto& cell = by_subject[row.subject][row.model];
            cell.first += row.mse;
            cell.second += 1;
        }
        std::vector<std::string> series;
        for (const eval::ModelSpec& model : models) series.push_back(model.label());
        std::vector<svg::BarGroup> groups;
        for (const auto& [subject, per_model] : by_subject) {
            svg::BarGroup group{subject, {}};
            for (const std::string& label : series) {
                const auto it = per_model.find(label);
                group.values.push_back(
                    it == per_model.end() ? 0.0 : it->second.first / it->second.second);
            }
            groups.push_back(std::move(group));
        }
        svg::write_bar_chart(out / "mse_by_subject.svg", series, groups, "mean velocity MSE");
    }

    std::map<std::string, std::pair<double, int>> by_model;
    for (const csv::TrialScoreRow& row : score_rows) {
        auto& cell = by_model[row.model];
        cell.first += row.mse;
        cell.second += 1;
    }
    for (const auto& [label, cell] : by_model) {
        std::cout << label << " mean_mse=" << csv::format_double(cell.first / cell.second)
                  << " trials=" << cell.second << '\n';
    }
    std::cout << "flagged=" << flags.size() << '\n';
    return 0;
}

int cmd_compare(const GlobalOptions& global, const std::string& scores_path) {
    const std::vector<csv::TrialScoreRow> rows = csv::read_trial_scores(scores_path);
    std::map<std::string, std::vector<double>> by_model;
    for (const csv::TrialScoreRow& row : rows) {
        by_model[row.model].push_back(row.mse);
    }
    std::vector<eval::ModelComparison> comparisons;
    for (auto first = by_model.begin(); first != by_model.end(); ++first) {
        for (auto second = std::next(first); second != by_model.end(); ++second) {
            const eval::RankSumResult test =
                eval::wilcoxon_rank_sum(first->second, second->second);
            comparisons.push_back({first->first, second->first, test.u_statistic, test.p_value});
            std::cout << first->first << " vs " << second->first
                      << " U=" << csv::format_double(test.u_statistic)
                      << " p=" << csv::format_double(test.p_value) << '\n';
        }
    }
    csv::write_comparisons(fs::path(global.out_dir) / "comparisons.csv", comparisons);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse minimum-effort control signals for reaching movements"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--out", global.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", global.seed, "random seed")->capture_default_str();
    app.add_flag("--svg", global.svg, "also emit SVG plots");

    int order = 3;
    double displacement = 1.0;
    double duration = 1.0;
    int steps = 400;
    int samples = 1001;
    std::string mode = "derivative";
    std::string model_token = "sparse";
    bool l2 = false;
    bool soft = false;
    double effort_weight = 0.0;
    int count = 50;
    double noise_std = 1e-3;
    double rate = 100.0;
    double pre_pad = 0.2;
    double post_pad = 0.2;
    std::string subject = "s1";
    std::string movement_type = "reach";
    std::string manifest;
    std::string model_list = "sparse3,quintic";
    double threshold = 0.05;
    int window = 5;
    std::string scores_path;

    CLI::App* generate = app.add_subcommand("generate", "closed-form signal, spikes, trajectory");
    generate->add_option("--n", order, "chain order")->capture_default_str();
    generate->add_option("--D", displacement, "displacement (m)")->capture_default_str();
    generate->add_option("--T", duration, "movement duration (s)")->capture_default_str();
    generate->add_option("--samples", samples, "trajectory samples")->capture_default_str();

    CLI::App* encode = app.add_subcommand("encode", "spike-train encoding of the optimal signal");
    encode->add_option("--n", order)->capture_default_str();
    encode->add_option("--D", displacement)->capture_default_str();
    encode->add_option("--T", duration)->capture_default_str();
    encode->add_option("--mode", mode, "paper | derivative")->capture_default_str();

    CLI::App* solve = app.add_subcommand("solve", "discretized optimization solvers");
    solve->add_option("--n", order)->capture_default_str();
    solve->add_option("--D", displacement)->capture_default_str();
    solve->add_option("--T", duration)->capture_default_str();
    solve->add_option("--N", steps, "discretization steps")->capture_default_str();
    solve->add_flag("--l2", l2, "minimum-L2-norm control instead of minimum-peak");
    CLI::Option* soft_option =
        solve->add_option("--soft", effort_weight, "soft terminal constraint with this weight");

    std::string sim_model = "sparse3";
    CLI::App* simulate = app.add_subcommand("simulate", "sample a model trajectory");
    simulate->add_option("--D", displacement)->capture_default_str();
    simulate->add_option("--T", duration)->capture_default_str();
    simulate->add_option("--model", sim_model, "sparse3..sparse6 | quintic")
        ->capture_default_str();
    simulate->add_option("--samples", samples)->capture_default_str();

    CLI::App* synthesize = app.add_subcommand("synthesize", "emit a synthetic trial cohort");
    synthesize->add_option("--count", count, "number of trials")->capture_default_str();
    synthesize->add_option("--n", order)->capture_default_str();
    synthesize->add_option("--D", displacement, "displacement (m)")->default_val(0.1);
    synthesize->add_option("--T", duration, "movement duration (s)")->default_val(0.33);
    synthesize->add_option("--model", model_token, "sparse | quintic")->capture_default_str();
    synthesize->add_option("--noise", noise_std, "position noise std (m)")->capture_default_str();
    synthesize->add_option("--rate", rate, "sampling rate (Hz)")->capture_default_str();
    synthesize->add_option("--pre-pad", pre_pad, "rest before onset (s)")->capture_default_str();
    synthesize->add_option("--post-pad", post_pad, "rest after offset (s)")->capture_default_str();
    synthesize->add_option("--subject", subject)->capture_default_str();
    synthesize->add_option("--movement", movement_type)->capture_default_str();

    CLI::App* analyze = app.add_subcommand("analyze", "detect, fit and score a trial corpus");
    analyze->add_option("--manifest", manifest, "trial manifest CSV")->required();
    analyze->add_option("--models", model_list, "comma-separated model labels")
        ->capture_default_str();
    analyze->add_option("--threshold", threshold, "onset/offset fraction of peak speed")
        ->capture_default_str();
    analyze->add_option("--window", window, "velocity smoothing window (odd)")
        ->capture_default_str();

    CLI::App* compare = app.add_subcommand("compare", "pairwise rank-sum tests on trial scores");
    compare->add_option("--scores", scores_path, "trial_scores.csv from analyze")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(generate)) {
            return cmd_generate(global, order, displacement, duration, samples);
        }
        if (app.got_subcommand(encode)) {
            return cmd_encode(global, order, displacement, duration, mode);
        }
        if (app.got_subcommand(solve)) {
            soft = soft_option->count() > 0;
            return cmd_solve(global, order, displacement, duration, steps, l2, soft,
                             effort_weight);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(global, displacement, duration, sim_model, samples);
        }
        if (app.got_subcommand(synthesize)) {
            return cmd_synthesize(global, count, order, displacement, duration, model_token,
                                  noise_std, rate, pre_pad, post_pad, subject, movement_type);
        }
        if (app.got_subcommand(analyze)) {
            return cmd_analyze(global, manifest, model_list, threshold, window);
        }
        if (app.got_subcommand(compare)) {
            return cmd_compare(global, scores_path);
        }
    } catch (const ValidationError& error) {
        std::cerr << "error: " << error.what() << '\n';
        return kExitUsage;
    } catch (const numeric::SolverError& error) {
        std::cerr << "solver error: " << error.what() << '\n';
        return kExitSolver;
    } catch (const csv::CsvError& error) {
        std::cerr << "data error: " << error.what() << '\n';
        return kExitData;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
