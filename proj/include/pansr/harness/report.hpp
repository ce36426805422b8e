#pragma once

#include "pansr/harness/experiment.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace pansr::harness {

/// Mean with a normal-approximation 95% interval, 1.96 * sd / sqrt(count)
/// using the population standard deviation. Undefined for a single value.
struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double ci_halfwidth = 0.0;
    bool ci_defined = false;
};

Summary summarize(std::vector<double> const& values);

struct ReportRow {
    std::string method;
    std::size_t n = 0;
    double snr = 0.0;
    std::string metric;
    Summary summary;
};

/// One row per (method, n, SNR, metric) for test_r2, solution_rate,
/// complexity, selection/model FPR and FNR, train_seconds. Failed records
/// and missing values are skipped.
std::vector<ReportRow> report(std::vector<ExperimentRecord> const& records);

void write_report_csv(std::filesystem::path const& path, std::vector<ReportRow> const& rows);

} // namespace pansr::harness
