#include "pansr/harness/report.hpp"

#include "pansr/core/csv.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

namespace pansr::harness {

Summary summarize(std::vector<double> const& values)
{
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    auto const n = static_cast<double>(values.size());
    s.mean = sum / n;
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.ci_halfwidth = 1.96 * std::sqrt(ss / n) / std::sqrt(n);
        s.ci_defined = true;
    }
    return s;
}

std::vector<ReportRow> report(std::vector<ExperimentRecord> const& records)
{
    using Extract = std::optional<double> (*)(ExperimentRecord const&);
    static std::vector<std::pair<char const*, Extract>> const metrics {
        { "test_r2", [](ExperimentRecord const& r) { return r.test_r2; } },
        { "solution_rate",
            [](ExperimentRecord const& r) {
                return r.is_solution ? std::optional<double>(*r.is_solution ? 1.0 : 0.0) : std::nullopt;
            } },
        { "complexity",
            [](ExperimentRecord const& r) {
                return r.complexity ? std::optional<double>(static_cast<double>(*r.complexity)) : std::nullopt;
            } },
        { "selection_fpr", [](ExperimentRecord const& r) { return r.selection_fpr; } },
        { "selection_fnr", [](ExperimentRecord const& r) { return r.selection_fnr; } },
        { "model_fpr", [](ExperimentRecord const& r) { return r.model_fpr; } },
        { "model_fnr", [](ExperimentRecord const& r) { return r.model_fnr; } },
        { "train_seconds", [](ExperimentRecord const& r) { return std::optional<double>(r.train_seconds); } },
    };

    // Infinite SNR sorts last.
    std::map<std::tuple<std::string, std::size_t, double>, std::vector<ExperimentRecord const*>> groups;
    for (auto const& r : records) {
        if (r.ok) {
            groups[{ std::string(name_of(r.method)), r.n, r.snr }].push_back(&r);
        }
    }
    std::vector<ReportRow> rows;
    for (auto const& [key, members] : groups) {
        for (auto const& [metric, extract] : metrics) {
            std::vector<double> values;
            for (auto const* r : members) {
                if (auto v = extract(*r)) {
                    values.push_back(*v);
                }
            }
            if (!values.empty()) {
                rows.push_back({ std::get<0>(key), std::get<1>(key), std::get<2>(key), metric, summarize(values) });
            }
        }
    }
    return rows;
}

void write_report_csv(std::filesystem::path const& path, std::vector<ReportRow> const& rows)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.precision(10);
    out << "method,n,snr,metric,count,mean,ci_halfwidth,ci_defined\n";
    for (auto const& r : rows) {
        out << csv::quote_if_needed(r.method) << ',' << r.n << ',';
        if (std::isinf(r.snr)) {
            out << "inf";
        } else {
            out << r.snr;
        }
        out << ',' << r.metric << ',' << r.summary.count << ',' << r.summary.mean << ',';
        if (r.summary.ci_defined) {
            out << r.summary.ci_halfwidth;
        }
        out << ',' << (r.summary.ci_defined ? "true" : "false") << '\n';
    }
}

} // namespace pansr::harness
