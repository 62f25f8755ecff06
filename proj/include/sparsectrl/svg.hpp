#pragma once

#include "sparsectrl/core.hpp"

#include <filesystem>

namespace sparsectrl::svg {

/// Step plot of a piecewise-constant control signal, with impulse stems for
/// its spike encoding underneath the steps.
void write_signal_plot(const std::filesystem::path& path, const BangBangSignal& signal,
                       const SpikeTrain& spikes, const std::string& title);

/// Line plot of sampled series (equal-length x/y), one polyline per series.
void write_line_plot(const std::filesystem::path& path, const std::vector<SampledSeries>& series,
                     const std::vector<std::string>& labels, const std::string& title);

struct BarGroup {
    std::string label;           // e.g. a subject tag
    std::vector<double> values;  // one bar per series label
};

/// Grouped bar chart: groups on the x axis, one bar per series inside each
/// group, with a legend.
void write_bar_chart(const std::filesystem::path& path, const std::vector<std::string>& series,
                     const std::vector<BarGroup>& groups, const std::string& title);

}  // namespace sparsectrl::svg
