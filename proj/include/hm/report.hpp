#pragma once

#include <string>
#include <vector>

namespace hm {

/// One row of the metrics CSV
/// (replication,wave,criterion,output,max_error,median_crps).
struct MetricRow {
    int replication = 0;
    int wave = 0;
    std::string criterion;
    std::string output;
    double max_error = 0.0;
    double median_crps = 0.0;
};

std::vector<MetricRow> load_metrics_csv(const std::string& path);
void save_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path);

struct Quartiles {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

Quartiles quartiles(std::vector<double> values);  // type-7 interpolation

/// Per (criterion, output, wave) boxplot row for one metric column.
struct BoxplotRow {
    std::string criterion;
    std::string output;
    int wave = 0;
    std::string metric;  // max_error or median_crps
    Quartiles q;
};

/// Sorted, order-invariant summaries of a metrics table.
std::vector<BoxplotRow> boxplot_table(const std::vector<MetricRow>& rows);
void save_boxplot_csv(const std::vector<BoxplotRow>& rows, const std::string& path);

struct TrendRow {
    std::string criterion;
    std::string output;
    int wave = 0;
    double median_max_error = 0.0;
    double median_of_median_crps = 0.0;
};

std::vector<TrendRow> trend_table(const std::vector<MetricRow>& rows);
void save_trend_csv(const std::vector<TrendRow>& rows, const std::string& path);

}  // namespace hm
