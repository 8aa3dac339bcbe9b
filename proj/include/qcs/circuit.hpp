#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcs/gate.hpp"

// Circuit representation, a line-oriented text format, and the two built-in
// benchmark generators.
//
// Text format, one instruction per line, `#` starts a comment:
//   qubits <n>                      required first instruction
//   h|x|y|z|s|t <q>
//   cx|cz <control> <target>
//   cp <control> <target> <theta-radians>
//   swap <a> <b>                    emitted as three cx gates
//   u <q> <re11> <im11> <re12> <im12> <re21> <im21> <re22> <im22>
//   flip <basis-index>
//   diffuse                         reflection about the mean amplitude

namespace qcs {

struct CircuitProgram {
    int n_qubits = 0;
    std::vector<GateOp> gates;
    std::string name = "circuit";
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg),
          line_(line)
    {
    }

    int line() const { return line_; }

private:
    int line_;
};

/// Parses a circuit document. Reports the offending line on malformed input.
CircuitProgram parse_circuit(const std::string& text,
                             const std::string& name = "circuit");

/// Inverse of parse_circuit over the parseable gate set:
/// parse_circuit(print_circuit(p)) reproduces p gate for gate.
std::string print_circuit(const CircuitProgram& program);

/// Quantum Fourier transform; applied to |x> the dense result equals the
/// DFT matrix row F_xy = exp(2*pi*i*x*y / 2^n) / sqrt(2^n).
/// Realized as the swap network first, then per target qubit (low to high)
/// its controlled-phase ladder and a Hadamard. This mirror of the textbook
/// ordering computes the same operator (every constituent gate is symmetric)
/// while keeping intermediate states contiguous in the low bits.
CircuitProgram build_qft(int n_qubits);

/// Grover search: H on every qubit, then per iteration the phase-flip oracle
/// on `marked` and a reflection about the mean amplitude.
/// iterations < 0 selects the optimal round(pi/4 * sqrt(2^n)).
CircuitProgram build_grover(int n_qubits, std::uint64_t marked,
                            int iterations = -1);

/// Seeded random circuit over the parseable gate alphabet; used by tests and
/// the builtin:random CLI circuit.
CircuitProgram build_random(int n_qubits, int gate_count, std::uint64_t seed);

}  // namespace qcs
