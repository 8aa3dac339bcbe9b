#include "qcs/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcs {

StateGeometry StateGeometry::make(int n_qubits, int stride_bits)
{
    if (n_qubits < 1 || n_qubits > 59) {
        throw std::invalid_argument("n_qubits must be in [1, 59], got " +
                                    std::to_string(n_qubits));
    }
    if (stride_bits < 0 || stride_bits > n_qubits) {
        throw std::invalid_argument("stride_bits must be in [0, n_qubits], got " +
                                    std::to_string(stride_bits));
    }
    StateGeometry g;
    g.n_qubits = n_qubits;
    g.stride_bits = stride_bits;
    return g;
}

StateGeometry StateGeometry::with_default_stride(int n_qubits)
{
    return make(n_qubits, n_qubits < 20 ? n_qubits : 20);
}

double StrideBuffer::sum_sq() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) {
        s += re[i] * re[i] + im[i] * im[i];
    }
    return s;
}

void StrideBuffer::snap_zeros()
{
    for (double& x : re) {
        if (std::fabs(x) < kZeroSnapThreshold) x = 0.0;
    }
    for (double& x : im) {
        if (std::fabs(x) < kZeroSnapThreshold) x = 0.0;
    }
}

int qubit_bit(const StateGeometry& geom, int qubit, std::uint64_t amp_index)
{
    if (qubit < 0 || qubit >= geom.n_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " +
                                std::to_string(geom.n_qubits) + " qubits");
    }
    if (amp_index >= geom.n_amplitudes()) {
        throw std::out_of_range("amplitude index " + std::to_string(amp_index) +
                                " out of range");
    }
    return static_cast<int>((amp_index >> qubit) & 1u);
}

std::uint64_t raw_bytes(int n_qubits)
{
    if (n_qubits < 1 || n_qubits > 59) {
        throw std::out_of_range(
            "raw_bytes: n_qubits must be in [1, 59] to fit a 64-bit byte count");
    }
    return std::uint64_t{1} << (n_qubits + 4);
}

int qubit_gain(double min_ratio)
{
    if (!(min_ratio >= 1.0)) {
        throw std::invalid_argument("qubit_gain: ratio must be >= 1");
    }
    int k = static_cast<int>(std::floor(std::log2(min_ratio)));
    // log2/floor can land one off at exact powers of two; settle by comparison.
    while (k > 0 && std::ldexp(1.0, k) > min_ratio) --k;
    while (std::ldexp(1.0, k + 1) <= min_ratio) ++k;
    return k;
}

}  // namespace qcs
