#pragma once

#include <complex>
#include <cstdint>
#include <vector>

// Core state-vector definitions: amplitude storage, stride geometry and
// indexing conventions shared by the gate kernels, the codecs and the
// compressed-state engine.
//
// Convention: qubit k corresponds to bit k of the amplitude index, with
// qubit 0 as the least-significant bit. Low qubits therefore pair adjacent
// amplitudes and high qubits pair amplitudes across strides.

namespace qcs {

using Amplitude = std::complex<double>;

/// Components whose magnitude falls below this are stored as exact zeros
/// before compression. Denormals carry no usable amplitude information and
/// skew ratio measurements.
inline constexpr double kZeroSnapThreshold = 1e-300;

/// Partitioning of a 2^n amplitude vector into 2^(n-s) strides of 2^s
/// amplitudes each.
struct StateGeometry {
    int n_qubits = 0;
    int stride_bits = 0;

    /// Validates 1 <= n_qubits <= 59 and 0 <= stride_bits <= n_qubits.
    static StateGeometry make(int n_qubits, int stride_bits);

    /// stride_bits = min(n_qubits, 20): one buffer tops out at 16 MiB.
    static StateGeometry with_default_stride(int n_qubits);

    std::uint64_t n_amplitudes() const { return std::uint64_t{1} << n_qubits; }
    std::uint64_t stride_len() const { return std::uint64_t{1} << stride_bits; }
    std::uint64_t n_strides() const
    {
        return std::uint64_t{1} << (n_qubits - stride_bits);
    }
    std::uint64_t stride_of(std::uint64_t amp_index) const
    {
        return amp_index >> stride_bits;
    }
    std::uint64_t offset_of(std::uint64_t amp_index) const
    {
        return amp_index & (stride_len() - 1);
    }
};

/// One decompressed stride. Real and imaginary parts live in separate planes;
/// the two planes are also the unit of compression.
/// Entry i holds the amplitude with global index
/// stride_index * stride_len + i.
struct StrideBuffer {
    std::uint64_t stride_index = 0;
    std::vector<double> re;
    std::vector<double> im;

    StrideBuffer() = default;
    StrideBuffer(std::uint64_t index, std::size_t len)
        : stride_index(index), re(len, 0.0), im(len, 0.0)
    {
    }

    std::size_t size() const { return re.size(); }
    Amplitude amp(std::size_t i) const { return {re[i], im[i]}; }
    void set(std::size_t i, Amplitude a)
    {
        re[i] = a.real();
        im[i] = a.imag();
    }

    /// Sum of |amplitude|^2 over the buffer, accumulated in index order.
    double sum_sq() const;

    /// Replaces components below the zero-snap threshold with exact zeros.
    void snap_zeros();
};

/// Accumulates sum of squared magnitudes over one full pass of the state.
struct NormAccumulator {
    double sum_sq = 0.0;

    void add(double re, double im) { sum_sq += re * re + im * im; }
    void reset() { sum_sq = 0.0; }
};

/// Bit `qubit` of `amp_index` (qubit 0 = LSB). Throws on out-of-range input.
int qubit_bit(const StateGeometry& geom, int qubit, std::uint64_t amp_index);

/// Raw state-vector size in bytes: 16 * 2^n_qubits = 2^(n_qubits+4).
/// Valid for 1 <= n_qubits <= 59; larger values overflow a 64-bit count.
std::uint64_t raw_bytes(int n_qubits);

/// floor(log2(min_ratio)): extra qubits simulatable in the same memory.
/// Requires min_ratio >= 1.
int qubit_gain(double min_ratio);

}  // namespace qcs
