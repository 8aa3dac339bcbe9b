#include "qcs/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace qcs {

DenseState DenseState::basis_state(int n_qubits, std::uint64_t index)
{
    if (n_qubits < 1 || n_qubits > 30) {
        throw std::invalid_argument("dense state supports 1 to 30 qubits");
    }
    if (index >= (std::uint64_t{1} << n_qubits)) {
        throw std::out_of_range("basis index out of range");
    }
    DenseState s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::uint64_t{1} << n_qubits, {0.0, 0.0});
    s.amplitudes[index] = {1.0, 0.0};
    return s;
}

double DenseState::norm_sq() const
{
    double n = 0.0;
    for (const Amplitude& a : amplitudes) n += std::norm(a);
    return n;
}

void dense_apply(DenseState& state, const GateOp& gate)
{
    const std::uint64_t n = state.amplitudes.size();
    Amplitude* a = state.amplitudes.data();

    switch (gate.kind) {
        case GateKind::single: {
            const Unitary2x2& u = *gate.unitary;
            const std::uint64_t half = std::uint64_t{1} << gate.target;
            for (std::uint64_t i = 0; i < n; ++i) {
                if (i & half) continue;
                const Amplitude a0 = a[i];
                const Amplitude a1 = a[i | half];
                a[i] = u.u11 * a0 + u.u12 * a1;
                a[i | half] = u.u21 * a0 + u.u22 * a1;
            }
            break;
        }
        case GateKind::controlled: {
            const Unitary2x2& u = *gate.unitary;
            const std::uint64_t half = std::uint64_t{1} << gate.target;
            const std::uint64_t cbit = std::uint64_t{1} << *gate.control;
            for (std::uint64_t i = 0; i < n; ++i) {
                if ((i & half) || !(i & cbit)) continue;
                const Amplitude a0 = a[i];
                const Amplitude a1 = a[i | half];
                a[i] = u.u11 * a0 + u.u12 * a1;
                a[i | half] = u.u21 * a0 + u.u22 * a1;
            }
            break;
        }
        case GateKind::diag_phase_flip: {
            if (gate.flip_index >= n) {
                throw std::out_of_range("flip index out of range");
            }
            a[gate.flip_index] = -a[gate.flip_index];
            break;
        }
        case GateKind::reflect_mean: {
            Amplitude sum{0.0, 0.0};
            for (std::uint64_t i = 0; i < n; ++i) sum += a[i];
            const Amplitude m2 = 2.0 * (sum / static_cast<double>(n));
            for (std::uint64_t i = 0; i < n; ++i) a[i] = m2 - a[i];
            break;
        }
    }
}

DenseState run_dense(const CircuitProgram& program, std::uint64_t basis,
                     int max_qubits)
{
    if (program.n_qubits > max_qubits) {
        throw std::invalid_argument(
            "dense reference guard exceeded: " + std::to_string(program.n_qubits) +
            " qubits > " + std::to_string(max_qubits));
    }
    const StateGeometry geom = StateGeometry::make(program.n_qubits, 0);
    for (const GateOp& g : program.gates) g.validate(geom);

    DenseState state = DenseState::basis_state(program.n_qubits, basis);
    for (const GateOp& g : program.gates) dense_apply(state, g);
    return state;
}

double fidelity(const DenseState& a, const DenseState& b)
{
    if (a.amplitudes.size() != b.amplitudes.size()) {
        throw std::invalid_argument("fidelity arguments differ in length");
    }
    const double na = std::sqrt(a.norm_sq());
    const double nb = std::sqrt(b.norm_sq());
    if (na < 1e-150 || nb < 1e-150) return 0.0;

    Amplitude overlap{0.0, 0.0};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        overlap += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return std::abs(overlap) / (na * nb);
}

}  // namespace qcs
