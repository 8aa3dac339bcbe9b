#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcs/circuit.hpp"
#include "qcs/codec.hpp"
#include "qcs/core.hpp"
#include "qcs/gate.hpp"
#include "qcs/metrics.hpp"

// Adaptive lossy-compression engine for the resident state vector.
//
// The state vector lives in memory as compressed stride blocks. Per gate,
// every touched stride (or co-resident stride pair for high-qubit targets) is
// decompressed, normalized, transformed, and recompressed through a ladder of
// error bounds: the first bound whose compression ratio clears the threshold
// wins; if none does, the largest bound is kept and the stride is flagged.
//
// Normalization is global and lazy. Lossy compression drifts the stored norm,
// so each stride carries a pending scale factor that is applied when it is
// next decompressed; skipped strides accumulate factors across gates. After
// every gate the factors are refreshed so that the scaled state has unit
// norm.

namespace qcs {

/// Ordered list of error bounds tried in escalation order. Strictly
/// increasing; a leading 0 makes the first level lossless (the usual setup),
/// but lossy-only ladders are allowed for fixed-bound experiments.
struct ErrorBoundLadder {
    std::vector<double> bounds;

    static ErrorBoundLadder make(std::vector<double> bounds);
    static ErrorBoundLadder lossless_only() { return make({0.0}); }

    /// [0, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3]
    static ErrorBoundLadder default_ladder();

    /// Comma-separated bounds, e.g. "0,1e-7,1e-6".
    static ErrorBoundLadder parse(const std::string& text);

    /// FNV-1a over the bound bytes; stored in checkpoints.
    std::uint64_t fingerprint() const;
};

struct RatioThreshold {
    double theta = 1.0;

    RatioThreshold() = default;
    explicit RatioThreshold(double t) : theta(t)
    {
        if (!(t >= 1.0)) {
            throw std::invalid_argument("ratio threshold must be >= 1");
        }
    }
};

struct StrideCompressReport {
    std::uint64_t stride_index = 0;
    double chosen_delta = 0.0;
    double ratio = 0.0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    bool threshold_met = false;
};

class CheckpointError : public std::runtime_error {
public:
    enum class Kind {
        bad_magic,
        version_mismatch,
        truncated,
        geometry_mismatch,
        io,
    };

    CheckpointError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind)
    {
    }

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct AdaptiveResult {
    CompressedBlock re;
    CompressedBlock im;
    StrideCompressReport report;
};

/// Escalates through the ladder on one stride. The buffer is zero-snapped in
/// place before the first compression attempt.
AdaptiveResult compress_stride_adaptive(StrideBuffer& buf,
                                        const ErrorBoundLadder& ladder,
                                        RatioThreshold theta);

class CompressedState;

/// Result of checkpoint_load: the restored state plus the ladder fingerprint
/// the checkpoint was written under.
struct LoadedState;

class CompressedState {
public:
    struct GateResult {
        std::vector<StrideCompressReport> reports;
        double norm_after = 0.0;
    };

    /// Empty placeholder; every usable state comes from basis_state or load.
    CompressedState() = default;

    /// Computational basis vector e_{basis_index}, stored losslessly.
    static CompressedState basis_state(const StateGeometry& geom,
                                       std::uint64_t basis_index);

    const StateGeometry& geometry() const { return geom_; }

    /// Full decompress-normalize-compute-compress cycle for one gate.
    /// Stride units run in parallel across `workers` threads (0 = hardware
    /// default); results are identical for every worker count. On error the
    /// state is left unmodified.
    GateResult apply_gate(const GateOp& gate, const ErrorBoundLadder& ladder,
                          RatioThreshold theta, int workers = 0);

    /// Stored (unscaled) amplitudes of one stride.
    StrideBuffer stored_stride(std::uint64_t stride_index) const;

    /// Logical amplitudes of one stride (pending scale applied).
    StrideBuffer decompress_stride(std::uint64_t stride_index) const;

    /// Whole logical state; intended for desk-scale verification.
    std::vector<Amplitude> to_amplitudes() const;

    double stride_scale(std::uint64_t stride_index) const;

    /// Sum over strides of scale^2 * stored |amplitude|^2.
    double norm_sq_tracked() const;

    /// Resident size: every block's header + payload, both planes.
    std::uint64_t compressed_bytes() const;

    /// Minimum per-stride ratio of the currently stored blocks.
    double min_stride_ratio() const;

    void save(const std::string& path, std::uint64_t ladder_fingerprint) const;

    /// Restores blocks verbatim; decompressed amplitudes match the saved
    /// state exactly. When `expected` is given, a differing file geometry is
    /// a geometry-mismatch error.
    static LoadedState load(const std::string& path,
                            const std::optional<StateGeometry>& expected = {});

private:
    struct StrideStorage {
        CompressedBlock re;
        CompressedBlock im;
        double scale = 1.0;
        double sum_sq = 0.0;
    };

    void decompress_into(std::uint64_t stride_index, StrideBuffer& buf,
                         bool apply_scale) const;

    StateGeometry geom_;
    std::vector<StrideStorage> strides_;
    NormAccumulator norm_;
};

struct LoadedState {
    CompressedState state;
    std::uint64_t ladder_fingerprint = 0;
};

struct RunOptions {
    std::uint64_t basis = 0;
    int workers = 0;                        // 0 = hardware default
    std::size_t first_gate = 0;             // resume point
    std::optional<std::size_t> stop_after;  // apply gates [first_gate, stop_after)
};

struct RunResult {
    CompressedState state;
    RunMetrics metrics;
};

/// Applies gates [first, last) of the program to an existing state,
/// appending one record per gate.
RunMetrics apply_program_range(CompressedState& state,
                               const CircuitProgram& program, std::size_t first,
                               std::size_t last, const ErrorBoundLadder& ladder,
                               RatioThreshold theta, int workers = 0);

/// End-to-end run from a fresh basis state.
RunResult run_program(const CircuitProgram& program,
                      const ErrorBoundLadder& ladder, RatioThreshold theta,
                      const StateGeometry& geom, const RunOptions& options = {});

/// Resumes a run on a previously built (e.g. checkpointed) state.
RunResult run_program_on(CompressedState state, const CircuitProgram& program,
                         const ErrorBoundLadder& ladder, RatioThreshold theta,
                         const RunOptions& options = {});

}  // namespace qcs
