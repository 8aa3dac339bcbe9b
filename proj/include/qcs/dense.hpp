#pragma once

#include <vector>

#include "qcs/circuit.hpp"
#include "qcs/core.hpp"

// Uncompressed reference simulator. Deliberately plain and serial: it is the
// oracle the strided OpenMP engine is tested against, so it shares no kernel
// code with it.

namespace qcs {

inline constexpr int kDenseQubitGuard = 26;

struct DenseState {
    int n_qubits = 0;
    std::vector<Amplitude> amplitudes;

    static DenseState basis_state(int n_qubits, std::uint64_t index);

    double norm_sq() const;
};

/// Applies one gate to the full vector.
void dense_apply(DenseState& state, const GateOp& gate);

/// Runs a program from |basis>. Throws when n_qubits exceeds `max_qubits`
/// (desk-scale guard).
DenseState run_dense(const CircuitProgram& program, std::uint64_t basis = 0,
                     int max_qubits = kDenseQubitGuard);

/// |<a|b>| after renormalizing both sides, so compression-induced norm drift
/// does not masquerade as direction error. Insensitive to global phase.
/// A zero-norm argument yields 0.
double fidelity(const DenseState& a, const DenseState& b);

}  // namespace qcs
