#include "sparsectrl/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparsectrl::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

double parse_double(const std::string& field, const std::filesystem::path& path, int line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        std::ostringstream msg;
        msg << path.string() << ":" << line << ": malformed number '" << field << "'";
        throw CsvError(msg.str());
    }
    return value;
}

int parse_int(const std::string& field, const std::filesystem::path& path, int line) {
    int value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        std::ostringstream msg;
        msg << path.string() << ":" << line << ": malformed integer '" << field << "'";
        throw CsvError(msg.str());
    }
    return value;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream stream(path);
    if (!stream) {
        throw CsvError("cannot open " + path.string());
    }
    return stream;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream stream(path);
    if (!stream) {
        throw CsvError("cannot write " + path.string());
    }
    return stream;
}

void expect_header(const std::filesystem::path& path, std::ifstream& stream,
                   const std::string& expected) {
    std::string line;
    if (!std::getline(stream, line)) {
        throw CsvError(path.string() + ":1: missing header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) {
        throw CsvError(path.string() + ":1: expected header '" + expected + "', got '" + line + "'");
    }
}

const char* kDerivativeNames[] = {"x", "v", "a", "j", "s", "c", "p"};

std::string derivative_name(int k) {
    if (k < static_cast<int>(std::size(kDerivativeNames))) {
        return kDerivativeNames[k];
    }
    return "d" + std::to_string(k);
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", value);
        return buffer;
    }
    return std::string(buffer, ptr);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream stream = open_for_read(path);
    expect_header(path, stream, "file,subject,movement_type");
    std::vector<ManifestEntry> entries;
    std::string line;
    int line_number = 1;
    while (std::getline(stream, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != 3) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_number << ": expected 3 fields, got "
                << fields.size();
            throw CsvError(msg.str());
        }
        entries.push_back({fields[0], fields[1], fields[2]});
    }
    return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream stream = open_for_write(path);
    stream << "file,subject,movement_type\n";
    for (const ManifestEntry& entry : entries) {
        stream << entry.file << ',' << entry.subject << ',' << entry.movement_type << '\n';
    }
}

Trial read_trial(const std::filesystem::path& path, const std::string& subject,
                 const std::string& movement_type) {
    std::ifstream stream = open_for_read(path);
    expect_header(path, stream, "t,x");
    std::vector<double> times;
    std::vector<double> positions;
    std::string line;
    int line_number = 1;
    while (std::getline(stream, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != 2) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_number << ": expected 2 fields, got "
                << fields.size();
            throw CsvError(msg.str());
        }
        times.push_back(parse_double(fields[0], path, line_number));
        positions.push_back(parse_double(fields[1], path, line_number));
    }
    return Trial(path.stem().string(), std::move(times), std::move(positions), subject,
                 movement_type);
}

void write_trial(const std::filesystem::path& path, const Trial& trial) {
    std::ofstream stream = open_for_write(path);
    stream << "t,x\n";
    for (std::size_t i = 0; i < trial.size(); ++i) {
        stream << format_double(trial.times[i]) << ',' << format_double(trial.positions[i]) << '\n';
    }
}

void write_signal(const std::filesystem::path& path, const BangBangSignal& signal) {
    std::ofstream stream = open_for_write(path);
    stream << "segment,t_start,t_end,u\n";
    const std::vector<double>& times = signal.switch_times();
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        stream << i << ',' << format_double(times[i]) << ',' << format_double(times[i + 1]) << ','
               << format_double(signal.value_at(times[i])) << '\n';
    }
}

void write_spike_train(const std::filesystem::path& path, const SpikeTrain& spikes) {
    std::ofstream stream = open_for_write(path);
    stream << "t,weight\n";
    for (const Impulse& impulse : spikes.impulses) {
        stream << format_double(impulse.time) << ',' << format_double(impulse.weight) << '\n';
    }
}

void write_trajectory(const std::filesystem::path& path, const PiecewiseTrajectory& trajectory,
                      int count) {
    if (count < 2) {
        throw ValidationError("trajectory export needs at least two samples");
    }
    std::ofstream stream = open_for_write(path);
    stream << 't';
    for (int k = 0; k < trajectory.order(); ++k) {
        stream << ',' << derivative_name(k);
    }
    stream << '\n';
    const double duration = trajectory.duration();
    for (int i = 0; i < count; ++i) {
        const double t = duration * static_cast<double>(i) / static_cast<double>(count - 1);
        stream << format_double(t);
        for (int k = 0; k < trajectory.order(); ++k) {
            stream << ',' << format_double(trajectory.derivative(t, k));
        }
        stream << '\n';
    }
}

void write_solve_report(const std::filesystem::path& path, const numeric::SolveReport& report) {
    std::ofstream stream = open_for_write(path);
    stream << "k,t,u\n";
    for (std::size_t k = 0; k < report.control.size(); ++k) {
        stream << k << ',' << format_double(report.control.times[k]) << ','
               << format_double(report.control.values[k]) << '\n';
    }
    stream << "# K=" << format_double(report.bound) << ",K1=" << format_double(report.terminal_cost)
           << ",K2=" << format_double(report.effort_cost)
           << ",status=" << numeric::to_string(report.status) << ",iterations=" << report.iterations
           << '\n';
}

void write_aggregate(const std::filesystem::path& path,
                     const std::vector<eval::AggregateRow>& rows) {
    std::ofstream stream = open_for_write(path);
    stream << "subject,movement_type,model,mean_mse,n_trials\n";
    for (const eval::AggregateRow& row : rows) {
        stream << row.subject << ',' << row.movement_type << ',' << row.model << ','
               << format_double(row.mean_mse) << ',' << row.n_trials << '\n';
    }
}

void write_comparisons(const std::filesystem::path& path,
                       const std::vector<eval::ModelComparison>& comparisons) {
    std::ofstream stream = open_for_write(path);
    stream << "model_a,model_b,U,p\n";
    for (const eval::ModelComparison& row : comparisons) {
        stream << row.model_a << ',' << row.model_b << ',' << format_double(row.u_statistic) << ','
               << format_double(row.p_value) << '\n';
    }
}

void write_trial_scores(const std::filesystem::path& path,
                        const std::vector<TrialScoreRow>& rows) {
    std::ofstream stream = open_for_write(path);
    stream << "trial,subject,movement_type,model,mse,samples,duration\n";
    for (const TrialScoreRow& row : rows) {
        stream << row.trial << ',' << row.subject << ',' << row.movement_type << ',' << row.model
               << ',' << format_double(row.mse) << ',' << row.samples << ','
               << format_double(row.segment_duration) << '\n';
    }
}

std::vector<TrialScoreRow> read_trial_scores(const std::filesystem::path& path) {
    std::ifstream stream = open_for_read(path);
    expect_header(path, stream, "trial,subject,movement_type,model,mse,samples,duration");
    std::vector<TrialScoreRow> rows;
    std::string line;
    int line_number = 1;
    while (std::getline(stream, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != 7) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_number << ": expected 7 fields, got "
                << fields.size();
            throw CsvError(msg.str());
        }
        rows.push_back({fields[0], fields[1], fields[2], fields[3],
                        parse_double(fields[4], path, line_number),
                        parse_int(fields[5], path, line_number),
                        parse_double(fields[6], path, line_number)});
    }
    return rows;
}

void write_flags(const std::filesystem::path& path, const std::vector<FlagRow>& rows) {
    std::ofstream stream = open_for_write(path);
    stream << "id,flag,reason\n";
    for (const FlagRow& row : rows) {
        std::string reason = row.reason;  // keep the row parseable
        std::replace(reason.begin(), reason.end(), ',', ';');
        stream << row.id << ',' << row.flag << ',' << reason << '\n';
    }
}

}  // namespace sparsectrl::csv
