#include "sparsectrl/eval.hpp"

#include "sparsectrl/analytic.hpp"
#include "sparsectrl/movement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sparsectrl::eval {

ModelSpec::ModelSpec(Kind kind_in, int order_in) : kind(kind_in), order(order_in) {
    if (kind == Kind::quintic_l2 && order != 3) {
        throw ValidationError("the quintic model is the order-3 (jerk) baseline");
    }
    if (kind == Kind::sparse_linf && (order < 3 || order > 6)) {
        throw ValidationError("sparse models cover orders 3 (jerk) through 6 (pop)");
    }
}

std::string ModelSpec::label() const {
    if (kind == Kind::quintic_l2) {
        return "quintic";
    }
    return "sparse" + std::to_string(order);
}

ModelSpec ModelSpec::parse(const std::string& token) {
    if (token == "quintic") {
        return ModelSpec(Kind::quintic_l2, 3);
    }
    if (token.rfind("sparse", 0) == 0 && token.size() == 7) {
        const char digit = token[6];
        if (digit >= '3' && digit <= '6') {
            return ModelSpec(Kind::sparse_linf, digit - '0');
        }
    }
    throw ValidationError("unknown model token '" + token + "' (expected quintic or sparse3..sparse6)");
}

ModelFitResult fit_and_score(const BallisticSegment& segment, const Trial& trial,
                             const ModelSpec& model, int smooth_window) {
    if (segment.offset_index - segment.onset_index < 2) {
        throw ValidationError("segment is degenerate: needs at least three samples");
    }
    const MovementTask& task = segment.task;
    const PiecewiseTrajectory trajectory =
        model.kind == ModelSpec::Kind::sparse_linf
            ? analytic::integrate_trajectory(analytic::sparse_min_effort_signal(task, model.order),
                                             model.order, task.x_start)
            : analytic::min_jerk_l2_trajectory(task);

    const SampledSeries velocity = movement::velocity_profile(trial, smooth_window);
    const double t_onset = trial.times[static_cast<std::size_t>(segment.onset_index)];

    std::vector<double> times;
    std::vector<double> residuals;
    double sum_squared = 0.0;
    for (int i = segment.onset_index + 1; i < segment.offset_index; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double predicted = trajectory.velocity(trial.times[idx] - t_onset);
        const double residual = velocity.values[idx] - predicted;
        times.push_back(trial.times[idx]);
        residuals.push_back(residual);
        sum_squared += residual * residual;
    }
    const int used = static_cast<int>(times.size());
    return ModelFitResult{trial.id, model, sum_squared / static_cast<double>(used),
                          SampledSeries(std::move(times), std::move(residuals)), used};
}

std::vector<AggregateRow> aggregate(const std::vector<ModelFitResult>& results,
                                    const std::vector<Trial>& trials) {
    if (results.empty()) {
        throw ValidationError("cannot aggregate an empty result set");
    }
    std::map<std::string, std::pair<std::string, std::string>> metadata;
    for (const Trial& trial : trials) {
        metadata[trial.id] = {trial.subject, trial.movement_type};
    }
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, int>> groups;
    for (const ModelFitResult& result : results) {
        const auto it = metadata.find(result.trial_id);
        if (it == metadata.end()) {
            throw ValidationError("result references unknown trial '" + result.trial_id + "'");
        }
        auto& cell = groups[{it->second.first, it->second.second, result.model.label()}];
        cell.first += result.mse;
        cell.second += 1;
    }
    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, cell] : groups) {
        rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                        cell.first / static_cast<double>(cell.second), cell.second});
    }
    return rows;
}

namespace {

// Midranks of the pooled sample; ties share the average of their ranks.
std::vector<double> midranks(const std::vector<double>& pooled_sorted) {
    const std::size_t count = pooled_sorted.size();
    std::vector<double> ranks(count);
    std::size_t i = 0;
    while (i < count) {
        std::size_t j = i;
        while (j + 1 < count && pooled_sorted[j + 1] == pooled_sorted[i]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[k] = shared;
        i = j + 1;
    }
    return ranks;
}

// Exact null distribution of the rank sum: ways[s] counts size-n_a subsets
// of {1..N} with rank sum s. Counts stay below 2^53 for N <= 20.
std::vector<double> rank_sum_counts(int n_total, int n_a) {
    const int max_sum = n_total * (n_total + 1) / 2;
    std::vector<std::vector<double>> ways(static_cast<std::size_t>(n_a) + 1,
                                          std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (int rank = 1; rank <= n_total; ++rank) {
        for (int chosen = std::min(rank, n_a); chosen >= 1; --chosen) {
            auto& row = ways[static_cast<std::size_t>(chosen)];
            const auto& previous = ways[static_cast<std::size_t>(chosen - 1)];
            for (int s = max_sum; s >= rank; --s) {
                row[static_cast<std::size_t>(s)] += previous[static_cast<std::size_t>(s - rank)];
            }
        }
    }
    return ways[static_cast<std::size_t>(n_a)];
}

double normal_tail_two_sided(double z) {
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("rank-sum test needs non-empty samples");
    }
    const int n_a = static_cast<int>(a.size());
    const int n_b = static_cast<int>(b.size());
    const int n_total = n_a + n_b;

    std::vector<std::pair<double, int>> pooled;  // value, source (0 = a)
    pooled.reserve(static_cast<std::size_t>(n_total));
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });

    std::vector<double> values(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) values[i] = pooled[i].first;
    const std::vector<double> ranks = midranks(values);

    bool has_ties = false;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i] == values[i + 1]) {
            has_ties = true;
            break;
        }
    }

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        if (pooled[i].second == 0) rank_sum_a += ranks[i];
    }
    const double u_a = rank_sum_a - 0.5 * static_cast<double>(n_a) * (n_a + 1);
    const double u_b = static_cast<double>(n_a) * n_b - u_a;

    RankSumResult result{};
    result.u_statistic = u_a;

    if (!has_ties && n_total <= 20) {
        const std::vector<double> counts = rank_sum_counts(n_total, n_a);
        double total = 0.0;
        for (double w : counts) total += w;
        // The null distribution of U is symmetric, so the two-sided p is
        // twice the smaller tail.
        const double u_min = std::min(u_a, u_b);
        const int offset = n_a * (n_a + 1) / 2;
        double tail = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            const double u = static_cast<double>(s) - offset;
            if (u <= u_min + 1e-12) tail += counts[s];
        }
        result.p_value = std::min(1.0, 2.0 * tail / total);
        result.exact = true;
        return result;
    }

    // Normal approximation with tie-corrected variance.
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double mean = 0.5 * static_cast<double>(n_a) * n_b;
    const double variance =
        (static_cast<double>(n_a) * n_b / 12.0) *
        (static_cast<double>(n_total + 1) -
         tie_term / (static_cast<double>(n_total) * (n_total - 1)));
    if (variance <= 0.0) {
        result.p_value = 1.0;  // every pooled value tied
        result.exact = false;
        return result;
    }
    const double z = std::max(0.0, std::abs(u_a - mean) - 0.5) / std::sqrt(variance);
    result.p_value = std::min(1.0, normal_tail_two_sided(z));
    result.exact = false;
    return result;
}

std::vector<ModelComparison> compare_models(const std::vector<ModelFitResult>& results) {
    std::map<std::string, std::vector<double>> by_model;
    for (const ModelFitResult& result : results) {
        by_model[result.model.label()].push_back(result.mse);
    }
    std::vector<ModelComparison> comparisons;
    for (auto first = by_model.begin(); first != by_model.end(); ++first) {
        for (auto second = std::next(first); second != by_model.end(); ++second) {
            const RankSumResult test = wilcoxon_rank_sum(first->second, second->second);
            comparisons.push_back({first->first, second->first, test.u_statistic, test.p_value});
        }
    }
    return comparisons;
}

}  // namespace sparsectrl::eval
