#include "sparsectrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sparsectrl::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};

// Coordinates rounded to 1e-6 keep the output diffable.
std::string num(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

struct Frame {
    double x_min, x_max, y_min, y_max;

    double px(double x) const {
        return kMargin + (x - x_min) / (x_max - x_min) * (kWidth - 2.0 * kMargin);
    }
    double py(double y) const {
        return kHeight - kMargin - (y - y_min) / (y_max - y_min) * (kHeight - 2.0 * kMargin);
    }
};

Frame padded_frame(double x_min, double x_max, double y_min, double y_max) {
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.05 * (y_max - y_min);
    return Frame{x_min, x_max, y_min - pad, y_max + pad};
}

std::ofstream open_document(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream stream(path);
    if (!stream) {
        throw std::runtime_error("cannot write " + path.string());
    }
    stream << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
           << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return stream;
}

void draw_axes(std::ofstream& out, const Frame& frame, const std::string& title) {
    const double left = kMargin;
    const double right = kWidth - kMargin;
    const double top = kMargin;
    const double bottom = kHeight - kMargin;
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right)
        << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
        << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = frame.x_min + (frame.x_max - frame.x_min) * i / 4.0;
        const double fy = frame.y_min + (frame.y_max - frame.y_min) * i / 4.0;
        out << "<text x=\"" << num(frame.px(fx)) << "\" y=\"" << num(bottom + 18.0)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        out << "<text x=\"" << num(left - 6.0) << "\" y=\"" << num(frame.py(fy) + 4.0)
            << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    out << "<text x=\"" << num(kWidth / 2.0) << "\" y=\"" << num(top - 16.0)
        << "\" font-size=\"14\" text-anchor=\"middle\">" << title << "</text>\n";
}

void close_document(std::ofstream& out) { out << "</svg>\n"; }

}  // namespace

void write_signal_plot(const std::filesystem::path& path, const BangBangSignal& signal,
                       const SpikeTrain& spikes, const std::string& title) {
    const std::vector<double>& times = signal.switch_times();
    double peak = signal.amplitude();
    for (const Impulse& impulse : spikes.impulses) {
        peak = std::max(peak, std::abs(impulse.weight));
    }
    if (peak == 0.0) peak = 1.0;
    const Frame frame = padded_frame(0.0, signal.duration(), -peak, peak);

    std::ofstream out = open_document(path);
    draw_axes(out, frame, title);
    out << "<line x1=\"" << num(frame.px(0.0)) << "\" y1=\"" << num(frame.py(0.0)) << "\" x2=\""
        << num(frame.px(signal.duration())) << "\" y2=\"" << num(frame.py(0.0))
        << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";

    // Control signal as steps across its constant intervals.
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[0] << "\" stroke-width=\"2\" points=\"";
    out << num(frame.px(times.front())) << ',' << num(frame.py(0.0)) << ' ';
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double u = signal.value_at(times[i]);
        out << num(frame.px(times[i])) << ',' << num(frame.py(u)) << ' ';
        out << num(frame.px(times[i + 1])) << ',' << num(frame.py(u)) << ' ';
    }
    out << num(frame.px(times.back())) << ',' << num(frame.py(0.0)) << "\"/>\n";

    // Spike stems with markers at the tips.
    for (const Impulse& impulse : spikes.impulses) {
        out << "<line x1=\"" << num(frame.px(impulse.time)) << "\" y1=\"" << num(frame.py(0.0))
            << "\" x2=\"" << num(frame.px(impulse.time)) << "\" y2=\""
            << num(frame.py(impulse.weight)) << "\" stroke=\"" << kPalette[1]
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<circle cx=\"" << num(frame.px(impulse.time)) << "\" cy=\""
            << num(frame.py(impulse.weight)) << "\" r=\"3\" fill=\"" << kPalette[1] << "\"/>\n";
    }
    close_document(out);
}

void write_line_plot(const std::filesystem::path& path, const std::vector<SampledSeries>& series,
                     const std::vector<std::string>& labels, const std::string& title) {
    if (series.empty()) {
        throw std::invalid_argument("line plot needs at least one series");
    }
    double x_min = series[0].times.front();
    double x_max = series[0].times.back();
    double y_min = 0.0;
    double y_max = 0.0;
    for (const SampledSeries& s : series) {
        x_min = std::min(x_min, s.times.front());
        x_max = std::max(x_max, s.times.back());
        for (double v : s.values) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    const Frame frame = padded_frame(x_min, x_max, y_min, y_max);

    std::ofstream out = open_document(path);
    draw_axes(out, frame, title);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].size(); ++i) {
            out << num(frame.px(series[s].times[i])) << ',' << num(frame.py(series[s].values[i]))
                << ' ';
        }
        out << "\"/>\n";
        if (s < labels.size()) {
            const double ly = kMargin + 16.0 * static_cast<double>(s);
            out << "<rect x=\"" << num(kWidth - kMargin - 110.0) << "\" y=\"" << num(ly)
                << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
            out << "<text x=\"" << num(kWidth - kMargin - 96.0) << "\" y=\"" << num(ly + 9.0)
                << "\" font-size=\"11\">" << labels[s] << "</text>\n";
        }
    }
    close_document(out);
}

void write_bar_chart(const std::filesystem::path& path, const std::vector<std::string>& series,
                     const std::vector<BarGroup>& groups, const std::string& title) {
    if (series.empty() || groups.empty()) {
        throw std::invalid_argument("bar chart needs series and groups");
    }
    double y_max = 0.0;
    for (const BarGroup& group : groups) {
        for (double v : group.values) y_max = std::max(y_max, v);
    }
    if (y_max == 0.0) y_max = 1.0;
    const Frame frame = padded_frame(0.0, static_cast<double>(groups.size()), 0.0, y_max);

    std::ofstream out = open_document(path);
    draw_axes(out, frame, title);

    const double group_width = (kWidth - 2.0 * kMargin) / static_cast<double>(groups.size());
    const double bar_width = 0.8 * group_width / static_cast<double>(series.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double group_left = kMargin + group_width * static_cast<double>(g);
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double value = s < groups[g].values.size() ? groups[g].values[s] : 0.0;
            const double x = group_left + 0.1 * group_width + bar_width * static_cast<double>(s);
            const double y = frame.py(value);
            const double base = frame.py(0.0);
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(bar_width)
                << "\" height=\"" << num(std::max(0.0, base - y)) << "\" fill=\""
                << kPalette[s % std::size(kPalette)] << "\"/>\n";
        }
        out << "<text x=\"" << num(group_left + group_width / 2.0) << "\" y=\""
            << num(kHeight - kMargin + 32.0) << "\" font-size=\"11\" text-anchor=\"middle\">"
            << groups[g].label << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double ly = kMargin + 16.0 * static_cast<double>(s);
        const char* color = kPalette[s % std::size(kPalette)];
        out << "<rect x=\"" << num(kWidth - kMargin - 110.0) << "\" y=\"" << num(ly)
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << num(kWidth - kMargin - 96.0) << "\" y=\"" << num(ly + 9.0)
            << "\" font-size=\"11\">" << series[s] << "</text>\n";
    }
    close_document(out);
}

}  // namespace sparsectrl::svg
