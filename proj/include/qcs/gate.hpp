#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcs/core.hpp"

// Gate alphabet and strided application kernels.
//
// Single-qubit unitaries and two-qubit controlled unitaries form the
// universal set; two global primitives round it out as simulation plumbing:
// a diagonal phase flip of one basis amplitude (search oracle) and a
// reflection about the mean amplitude (search diffusion).

namespace qcs {

/// 2x2 unitary. Construction verifies U†U = I to 1e-12 elementwise.
struct Unitary2x2 {
    Amplitude u11, u12, u21, u22;

    Unitary2x2(Amplitude a11, Amplitude a12, Amplitude a21, Amplitude a22);

    static Unitary2x2 identity();
    static Unitary2x2 hadamard();
    static Unitary2x2 pauli_x();
    static Unitary2x2 pauli_y();
    static Unitary2x2 pauli_z();
    static Unitary2x2 phase(double theta);  // diag(1, e^{i theta})
    static Unitary2x2 s_gate();
    static Unitary2x2 t_gate();
};

enum class GateKind {
    single,
    controlled,
    diag_phase_flip,
    reflect_mean,
};

struct GateOp {
    GateKind kind = GateKind::single;
    std::optional<Unitary2x2> unitary;  // single / controlled
    int target = 0;
    std::optional<int> control;
    std::uint64_t flip_index = 0;        // diag_phase_flip
    std::optional<double> phase_theta;   // set for cp gates so text output can
                                         // reproduce the exact angle
    std::string label;

    static GateOp single(Unitary2x2 u, int target, std::string label);
    static GateOp controlled(Unitary2x2 u, int control, int target,
                             std::string label);
    static GateOp controlled_phase(double theta, int control, int target,
                                   std::string label);
    static GateOp phase_flip(std::uint64_t flip_index);
    static GateOp reflect_mean();

    /// Throws if qubit/basis indices do not fit the geometry.
    void validate(const StateGeometry& geom) const;
};

// ---- stride kernels ----
// Buffers are taken fully decompressed; the kernels never see compressed
// bytes. Within one call the per-pair arithmetic order is fixed, so results
// do not depend on how calls are scheduled across buffers.

/// Pairs (i0, i1 = i0 + 2^target) inside one stride; requires
/// target < stride_bits.
void apply_single_in_stride(const StateGeometry& geom, StrideBuffer& buf,
                            const Unitary2x2& u, int target);

/// Elementwise pairs (lo_i, hi_i) across two strides; requires
/// target >= stride_bits, hi.stride_index = lo.stride_index +
/// 2^(target - stride_bits), and a zero pair bit in lo.stride_index.
void apply_single_cross_stride(const StateGeometry& geom, StrideBuffer& lo,
                               StrideBuffer& hi, const Unitary2x2& u,
                               int target);

/// Controlled update within one stride; requires control, target < stride_bits.
void apply_controlled_in_stride(const StateGeometry& geom, StrideBuffer& buf,
                                const Unitary2x2& u, int control, int target);

/// Controlled update across a stride pair (target >= stride_bits) with an
/// in-stride control qubit (control < stride_bits).
void apply_controlled_cross_stride(const StateGeometry& geom, StrideBuffer& lo,
                                   StrideBuffer& hi, const Unitary2x2& u,
                                   int control, int target);

/// Negates the amplitude at `offset` within the buffer.
void apply_phase_flip_in_stride(StrideBuffer& buf, std::uint64_t offset);

/// x -> 2*mean - x over the whole buffer.
void apply_reflect_mean_in_stride(StrideBuffer& buf, Amplitude mean);

/// Sum of amplitudes over the buffer, accumulated in index order.
Amplitude stride_amplitude_sum(const StrideBuffer& buf);

// ---- stride plan ----

/// One unit of work for a gate: either a single stride updated in place or a
/// co-resident (lo, hi) pair. Strides not covered by any unit are untouched
/// by the gate and need not be decompressed.
struct StrideUnit {
    enum class Kind { local, pair } kind = Kind::local;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;  // pair only
};

enum class LocalKernel {
    single,            // apply_single_in_stride
    controlled,        // apply_controlled_in_stride
    plain_single,      // high control bit already satisfied by stride index
    phase_flip,        // negate one offset
    reflect,           // x -> 2m - x
};

struct StridePlan {
    std::vector<StrideUnit> units;       // ordered by lo stride index
    LocalKernel local_kernel = LocalKernel::single;
    bool cross_control = false;          // pair kernel filters on control bit
    std::uint64_t flip_offset = 0;       // phase_flip only
    bool needs_mean = false;             // reflect only
};

/// Computes which strides a gate touches and with which kernel.
/// `skip_untouched = false` forces a unit for every stride; the kernels then
/// leave control-bit-0 strides bit-identical, which is what makes skipping
/// sound in the first place.
StridePlan make_stride_plan(const StateGeometry& geom, const GateOp& gate,
                            bool skip_untouched = true);

/// Runs one unit of a plan against decompressed buffers. For pair units both
/// buffers must be present.
void run_plan_unit(const StateGeometry& geom, const StridePlan& plan,
                   const GateOp& gate, StrideBuffer& lo, StrideBuffer* hi,
                   Amplitude mean = {0.0, 0.0});

}  // namespace qcs
