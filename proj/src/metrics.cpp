#include "qcs/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "qcs/core.hpp"

namespace qcs {

namespace {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double RunMetrics::overall_min_ratio() const
{
    double m = init_min_ratio > 0.0 ? init_min_ratio
                                    : std::numeric_limits<double>::infinity();
    for (const GateRecord& r : records) m = std::min(m, r.min_ratio);
    return m;
}

RunSummary summarize(const std::vector<GateRecord>& records,
                     const SummaryOptions& options)
{
    if (records.empty()) {
        throw std::invalid_argument("summarize: no gate records");
    }

    RunSummary s;
    s.overall_min_ratio = std::numeric_limits<double>::infinity();
    for (const GateRecord& r : records) {
        s.overall_min_ratio = std::min(s.overall_min_ratio, r.min_ratio);
        s.total_elapsed_ns += r.elapsed_ns;
    }
    if (options.init_min_ratio) {
        s.overall_min_ratio = std::min(s.overall_min_ratio, *options.init_min_ratio);
    }
    s.qubit_gain = s.overall_min_ratio >= 1.0 ? qubit_gain(s.overall_min_ratio) : 0;
    s.threshold_violations = options.threshold_violations;
    s.fidelity = options.fidelity;
    s.reference_elapsed_ns = options.reference_elapsed_ns;
    if (options.reference_elapsed_ns && *options.reference_elapsed_ns > 0) {
        s.overhead_factor = static_cast<double>(s.total_elapsed_ns) /
                            static_cast<double>(*options.reference_elapsed_ns);
    }
    return s;
}

RunSummary summarize_run(const RunMetrics& metrics,
                         std::optional<double> fidelity,
                         std::optional<std::uint64_t> reference_elapsed_ns)
{
    SummaryOptions opts;
    opts.fidelity = fidelity;
    opts.reference_elapsed_ns = reference_elapsed_ns;
    opts.threshold_violations = metrics.threshold_violations;
    opts.init_min_ratio = metrics.init_min_ratio;
    if (metrics.records.empty()) {
        // An empty program still has its initial-state compression to report.
        RunSummary s;
        s.overall_min_ratio = metrics.init_min_ratio;
        s.qubit_gain =
            s.overall_min_ratio >= 1.0 ? qubit_gain(s.overall_min_ratio) : 0;
        s.total_elapsed_ns = metrics.total_elapsed_ns;
        s.threshold_violations = metrics.threshold_violations;
        s.fidelity = fidelity;
        s.reference_elapsed_ns = reference_elapsed_ns;
        if (reference_elapsed_ns && *reference_elapsed_ns > 0) {
            s.overhead_factor = static_cast<double>(s.total_elapsed_ns) /
                                static_cast<double>(*reference_elapsed_ns);
        }
        return s;
    }
    RunSummary s = summarize(metrics.records, opts);
    s.total_elapsed_ns = metrics.total_elapsed_ns;
    if (reference_elapsed_ns && *reference_elapsed_ns > 0) {
        s.overhead_factor = static_cast<double>(s.total_elapsed_ns) /
                            static_cast<double>(*reference_elapsed_ns);
    }
    return s;
}

std::string emit_csv(const std::vector<GateRecord>& records)
{
    std::string out =
        "gate_index,gate_label,stride_count,min_ratio,mean_ratio,"
        "max_chosen_delta,bytes_before,bytes_after,elapsed_ns,norm_after\n";
    for (const GateRecord& r : records) {
        out += std::to_string(r.gate_index);
        out += ',';
        out += r.gate_label;
        out += ',';
        out += std::to_string(r.stride_count);
        out += ',';
        out += format_double(r.min_ratio);
        out += ',';
        out += format_double(r.mean_ratio);
        out += ',';
        out += format_double(r.max_chosen_delta);
        out += ',';
        out += std::to_string(r.bytes_before);
        out += ',';
        out += std::to_string(r.bytes_after);
        out += ',';
        out += std::to_string(r.elapsed_ns);
        out += ',';
        out += format_double(r.norm_after);
        out += '\n';
    }
    return out;
}

std::string emit_summary_json(const RunSummary& summary)
{
    nlohmann::json j;
    j["overall_min_ratio"] = summary.overall_min_ratio;
    j["qubit_gain"] = summary.qubit_gain;
    j["total_elapsed_ns"] = summary.total_elapsed_ns;
    j["threshold_violations"] = summary.threshold_violations;
    if (summary.reference_elapsed_ns) {
        j["reference_elapsed_ns"] = *summary.reference_elapsed_ns;
    }
    if (summary.overhead_factor) {
        j["overhead_factor"] = *summary.overhead_factor;
    }
    if (summary.fidelity) {
        j["fidelity"] = *summary.fidelity;
    }
    return j.dump(2) + "\n";
}

}  // namespace qcs
