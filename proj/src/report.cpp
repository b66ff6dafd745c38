#include "hm/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hm/errors.hpp"

namespace hm {

namespace {

const char* kHeader = "replication,wave,criterion,output,max_error,median_crps";

}  // namespace

std::vector<MetricRow> load_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw ParseError("metrics schema mismatch in " + path);
    std::vector<MetricRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        MetricRow row;
        std::string cell;
        try {
            std::getline(ss, cell, ',');
            row.replication = std::stoi(cell);
            std::getline(ss, cell, ',');
            row.wave = std::stoi(cell);
            std::getline(ss, row.criterion, ',');
            std::getline(ss, row.output, ',');
            std::getline(ss, cell, ',');
            row.max_error = std::stod(cell);
            std::getline(ss, cell, ',');
            row.median_crps = std::stod(cell);
        } catch (const std::exception&) {
            throw ParseError("bad metrics row in " + path);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void save_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    out << kHeader << "\n";
    for (const auto& r : rows)
        out << r.replication << "," << r.wave << "," << r.criterion << "," << r.output
            << "," << r.max_error << "," << r.median_crps << "\n";
}

Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) throw ConfigError("quartiles of empty sample");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double h = q * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

namespace {

using GroupKey = std::tuple<std::string, std::string, int>;  // criterion, output, wave

std::map<GroupKey, std::vector<const MetricRow*>> group_rows(
    const std::vector<MetricRow>& rows) {
    std::map<GroupKey, std::vector<const MetricRow*>> groups;
    for (const auto& r : rows)
        groups[{r.criterion, r.output, r.wave}].push_back(&r);
    return groups;
}

}  // namespace

std::vector<BoxplotRow> boxplot_table(const std::vector<MetricRow>& rows) {
    std::vector<BoxplotRow> out;
    for (const auto& [key, members] : group_rows(rows)) {
        std::vector<double> err, crps;
        for (const auto* r : members) {
            err.push_back(r->max_error);
            crps.push_back(r->median_crps);
        }
        const auto& [criterion, output, wave] = key;
        out.push_back({criterion, output, wave, "max_error", quartiles(err)});
        out.push_back({criterion, output, wave, "median_crps", quartiles(crps)});
    }
    return out;
}

void save_boxplot_csv(const std::vector<BoxplotRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    out << "criterion,output,wave,metric,min,q1,median,q3,max\n";
    for (const auto& r : rows)
        out << r.criterion << "," << r.output << "," << r.wave << "," << r.metric << ","
            << r.q.min << "," << r.q.q1 << "," << r.q.median << "," << r.q.q3 << ","
            << r.q.max << "\n";
}

std::vector<TrendRow> trend_table(const std::vector<MetricRow>& rows) {
    std::vector<TrendRow> out;
    for (const auto& [key, members] : group_rows(rows)) {
        std::vector<double> err, crps;
        for (const auto* r : members) {
            err.push_back(r->max_error);
            crps.push_back(r->median_crps);
        }
        const auto& [criterion, output, wave] = key;
        out.push_back({criterion, output, wave, quartiles(err).median,
                       quartiles(crps).median});
    }
    return out;
}

void save_trend_csv(const std::vector<TrendRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    out << "criterion,output,wave,median_max_error,median_crps\n";
    for (const auto& r : rows)
        out << r.criterion << "," << r.output << "," << r.wave << ","
            << r.median_max_error << "," << r.median_of_median_crps << "\n";
}

}  // namespace hm
