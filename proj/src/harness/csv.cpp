#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "baddr/harness.hpp"

namespace baddr {

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buffer, end);
}

void write_run_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kRunCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.run_id << ',' << r.episode << ',' << format_double(r.discounted_return) << ',' << r.steps << ','
            << r.wall_millis << ',';
        if (r.belief_probe_mean) out << format_double(*r.belief_probe_mean);
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

template <typename T>
T parse_number(const std::string& text, int line) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size())
        throw std::runtime_error("run CSV line " + std::to_string(line) + ": bad number '" + text + "'");
    return value;
}

}  // namespace

std::vector<RunRecord> read_run_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRunCsvHeader) throw std::runtime_error("run CSV has an unexpected header");
    std::vector<RunRecord> records;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != 6)
            throw std::runtime_error("run CSV line " + std::to_string(number) + ": expected 6 columns");
        RunRecord r;
        r.run_id = parse_number<int>(cells[0], number);
        r.episode = parse_number<int>(cells[1], number);
        r.discounted_return = parse_number<double>(cells[2], number);
        r.steps = parse_number<int>(cells[3], number);
        r.wall_millis = parse_number<std::int64_t>(cells[4], number);
        if (!cells[5].empty()) r.belief_probe_mean = parse_number<double>(cells[5], number);
        records.push_back(r);
    }
    return records;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs, int smoothing) {
    if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
    if (smoothing < 1) throw std::invalid_argument("smoothing window must be >= 1");
    const std::size_t episodes = runs.front().size();
    std::vector<std::vector<double>> series;
    for (const auto& run : runs) {
        if (run.size() != episodes) throw std::invalid_argument("runs have different episode counts");
        std::vector<double> values(episodes);
        for (std::size_t e = 0; e < episodes; ++e) {
            if (run[e].episode != static_cast<int>(e))
                throw std::invalid_argument("run episodes are not contiguous from 0");
            values[e] = run[e].discounted_return;
        }
        if (smoothing > 1) {
            std::vector<double> smoothed(episodes);
            double window = 0.0;
            for (std::size_t e = 0; e < episodes; ++e) {
                window += values[e];
                if (e >= static_cast<std::size_t>(smoothing)) window -= values[e - static_cast<std::size_t>(smoothing)];
                smoothed[e] = window / static_cast<double>(std::min<std::size_t>(e + 1, static_cast<std::size_t>(smoothing)));
            }
            values = std::move(smoothed);
        }
        series.push_back(std::move(values));
    }
    const auto n = static_cast<double>(runs.size());
    std::vector<AggregateRow> rows(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        double mean = 0.0;
        for (const auto& s : series) mean += s[e];
        mean /= n;
        double var = 0.0;
        for (const auto& s : series) var += (s[e] - mean) * (s[e] - mean);
        rows[e].episode = static_cast<int>(e);
        rows[e].mean_return = mean;
        rows[e].stderr_return = runs.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
        rows[e].n_runs = static_cast<int>(runs.size());
    }
    return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << kAggregateCsvHeader << '\n';
    for (const auto& r : rows)
        out << r.episode << ',' << format_double(r.mean_return) << ',' << format_double(r.stderr_return) << ','
            << r.n_runs << '\n';
}

std::vector<AggregateRow> aggregate_directory(const std::string& in_dir, const std::string& out_path, int smoothing) {
    namespace fs = std::filesystem;
    std::map<int, fs::path> files;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("run_", 0) != 0 || entry.path().extension() != ".csv") continue;
        const std::string id = name.substr(4, name.size() - 8);
        int r = 0;
        const auto [end, ec] = std::from_chars(id.data(), id.data() + id.size(), r);
        if (ec != std::errc() || end != id.data() + id.size()) continue;
        files[r] = entry.path();
    }
    if (files.empty()) throw std::runtime_error("no run_<r>.csv files in " + in_dir);
    std::vector<std::vector<RunRecord>> runs;
    for (const auto& [id, path] : files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read " + path.string());
        runs.push_back(read_run_csv(in));
    }
    auto rows = aggregate_runs(runs, smoothing);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_aggregate_csv(out, rows);
    return rows;
}

}  // namespace baddr
