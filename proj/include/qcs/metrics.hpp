#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Per-gate compression/timing records and run-level summary figures.
// The CSV and JSON layouts here are the contract for external tooling.

namespace qcs {

struct GateRecord {
    std::uint64_t gate_index = 0;
    std::string gate_label;
    std::uint64_t stride_count = 0;  // strides rewritten by this gate
    double min_ratio = 0.0;
    double mean_ratio = 0.0;
    double max_chosen_delta = 0.0;
    std::uint64_t bytes_before = 0;  // raw bytes of the rewritten strides
    std::uint64_t bytes_after = 0;   // compressed bytes of the rewritten strides
    std::uint64_t elapsed_ns = 0;
    double norm_after = 0.0;
};

/// Everything a compressed run reports: one record per gate plus the
/// initial-state compression figures.
struct RunMetrics {
    std::vector<GateRecord> records;
    double init_min_ratio = 0.0;
    std::uint64_t init_bytes = 0;
    std::uint64_t threshold_violations = 0;  // strides that missed theta
    std::uint64_t total_elapsed_ns = 0;

    /// Minimum stride ratio across the whole run, initial state included.
    double overall_min_ratio() const;
};

struct RunSummary {
    double overall_min_ratio = 0.0;
    int qubit_gain = 0;
    std::uint64_t total_elapsed_ns = 0;
    std::optional<std::uint64_t> reference_elapsed_ns;
    std::optional<double> overhead_factor;
    std::optional<double> fidelity;
    std::uint64_t threshold_violations = 0;
};

struct SummaryOptions {
    std::optional<double> fidelity;
    std::optional<std::uint64_t> reference_elapsed_ns;
    std::uint64_t threshold_violations = 0;
    // Ratio of the initial-state compression, folded into the overall minimum
    // when provided.
    std::optional<double> init_min_ratio;
};

/// Folds gate records into a RunSummary. Throws on an empty record list.
RunSummary summarize(const std::vector<GateRecord>& records,
                     const SummaryOptions& options = {});

RunSummary summarize_run(const RunMetrics& metrics,
                         std::optional<double> fidelity = {},
                         std::optional<std::uint64_t> reference_elapsed_ns = {});

/// CSV with header
/// gate_index,gate_label,stride_count,min_ratio,mean_ratio,max_chosen_delta,
/// bytes_before,bytes_after,elapsed_ns,norm_after
/// and doubles at 17 significant digits, so parsing reproduces them exactly.
std::string emit_csv(const std::vector<GateRecord>& records);

/// JSON object whose keys mirror the RunSummary fields; absent optionals are
/// omitted.
std::string emit_summary_json(const RunSummary& summary);

}  // namespace qcs
