#include "qcs/gate.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qcs {

namespace {

constexpr double kUnitaryTol = 1e-12;

void check_unitary(const Amplitude& a11, const Amplitude& a12,
                   const Amplitude& a21, const Amplitude& a22)
{
    // U†U = I elementwise.
    const Amplitude c11 = std::conj(a11) * a11 + std::conj(a21) * a21;
    const Amplitude c12 = std::conj(a11) * a12 + std::conj(a21) * a22;
    const Amplitude c21 = std::conj(a12) * a11 + std::conj(a22) * a21;
    const Amplitude c22 = std::conj(a12) * a12 + std::conj(a22) * a22;
    if (std::abs(c11 - 1.0) > kUnitaryTol || std::abs(c12) > kUnitaryTol ||
        std::abs(c21) > kUnitaryTol || std::abs(c22 - 1.0) > kUnitaryTol) {
        throw std::invalid_argument("matrix is not unitary within 1e-12");
    }
}

}  // namespace

Unitary2x2::Unitary2x2(Amplitude a11, Amplitude a12, Amplitude a21, Amplitude a22)
    : u11(a11), u12(a12), u21(a21), u22(a22)
{
    check_unitary(a11, a12, a21, a22);
}

Unitary2x2 Unitary2x2::identity() { return {{1, 0}, {0, 0}, {0, 0}, {1, 0}}; }

Unitary2x2 Unitary2x2::hadamard()
{
    const double h = 1.0 / std::sqrt(2.0);
    return {{h, 0}, {h, 0}, {h, 0}, {-h, 0}};
}

Unitary2x2 Unitary2x2::pauli_x() { return {{0, 0}, {1, 0}, {1, 0}, {0, 0}}; }

Unitary2x2 Unitary2x2::pauli_y() { return {{0, 0}, {0, -1}, {0, 1}, {0, 0}}; }

Unitary2x2 Unitary2x2::pauli_z() { return {{1, 0}, {0, 0}, {0, 0}, {-1, 0}}; }

Unitary2x2 Unitary2x2::phase(double theta)
{
    return {{1, 0}, {0, 0}, {0, 0}, {std::cos(theta), std::sin(theta)}};
}

Unitary2x2 Unitary2x2::s_gate() { return phase(std::acos(-1.0) / 2.0); }

Unitary2x2 Unitary2x2::t_gate() { return phase(std::acos(-1.0) / 4.0); }

GateOp GateOp::single(Unitary2x2 u, int target, std::string label)
{
    GateOp g;
    g.kind = GateKind::single;
    g.unitary = u;
    g.target = target;
    g.label = std::move(label);
    return g;
}

GateOp GateOp::controlled(Unitary2x2 u, int control, int target,
                          std::string label)
{
    if (control == target) {
        throw std::invalid_argument("control qubit equals target qubit");
    }
    GateOp g;
    g.kind = GateKind::controlled;
    g.unitary = u;
    g.target = target;
    g.control = control;
    g.label = std::move(label);
    return g;
}

GateOp GateOp::controlled_phase(double theta, int control, int target,
                                std::string label)
{
    GateOp g = controlled(Unitary2x2::phase(theta), control, target,
                          std::move(label));
    g.phase_theta = theta;
    return g;
}

GateOp GateOp::phase_flip(std::uint64_t flip_index)
{
    GateOp g;
    g.kind = GateKind::diag_phase_flip;
    g.flip_index = flip_index;
    g.label = "flip " + std::to_string(flip_index);
    return g;
}

GateOp GateOp::reflect_mean()
{
    GateOp g;
    g.kind = GateKind::reflect_mean;
    g.label = "diffuse";
    return g;
}

void GateOp::validate(const StateGeometry& geom) const
{
    switch (kind) {
        case GateKind::single:
        case GateKind::controlled:
            if (target < 0 || target >= geom.n_qubits) {
                throw std::out_of_range("target qubit out of range");
            }
            if (kind == GateKind::controlled) {
                if (!control || *control < 0 || *control >= geom.n_qubits) {
                    throw std::out_of_range("control qubit out of range");
                }
                if (*control == target) {
                    throw std::invalid_argument("control qubit equals target qubit");
                }
            }
            if (!unitary) {
                throw std::invalid_argument("gate is missing its unitary");
            }
            break;
        case GateKind::diag_phase_flip:
            if (flip_index >= geom.n_amplitudes()) {
                throw std::out_of_range("flip index out of range");
            }
            break;
        case GateKind::reflect_mean:
            break;
    }
}

namespace {

struct UnitaryParts {
    double u11r, u11i, u12r, u12i, u21r, u21i, u22r, u22i;

    explicit UnitaryParts(const Unitary2x2& u)
        : u11r(u.u11.real()), u11i(u.u11.imag()),
          u12r(u.u12.real()), u12i(u.u12.imag()),
          u21r(u.u21.real()), u21i(u.u21.imag()),
          u22r(u.u22.real()), u22i(u.u22.imag())
    {
    }
};

inline void apply_pair(double* re, double* im, std::uint64_t i0,
                       std::uint64_t i1, const UnitaryParts& m)
{
    const double t0r = re[i0], t0i = im[i0];
    const double t1r = re[i1], t1i = im[i1];
    re[i0] = m.u11r * t0r - m.u11i * t0i + m.u12r * t1r - m.u12i * t1i;
    im[i0] = m.u11r * t0i + m.u11i * t0r + m.u12r * t1i + m.u12i * t1r;
    re[i1] = m.u21r * t0r - m.u21i * t0i + m.u22r * t1r - m.u22i * t1i;
    im[i1] = m.u21r * t0i + m.u21i * t0r + m.u22r * t1i + m.u22i * t1r;
}

}  // namespace

void apply_single_in_stride(const StateGeometry& geom, StrideBuffer& buf,
                            const Unitary2x2& u, int target)
{
    if (target < 0 || target >= geom.stride_bits) {
        throw std::invalid_argument(
            "target does not pair inside a stride; use the cross-stride path");
    }
    const UnitaryParts m(u);
    const std::uint64_t half = std::uint64_t{1} << target;
    const std::uint64_t lo_mask = half - 1;
    const std::uint64_t n_pairs = geom.stride_len() >> 1;
    double* re = buf.re.data();
    double* im = buf.im.data();

#pragma omp simd
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
        const std::uint64_t i0 = ((i & ~lo_mask) << 1) | (i & lo_mask);
        apply_pair(re, im, i0, i0 | half, m);
    }
}

void apply_single_cross_stride(const StateGeometry& geom, StrideBuffer& lo,
                               StrideBuffer& hi, const Unitary2x2& u,
                               int target)
{
    if (target < geom.stride_bits || target >= geom.n_qubits) {
        throw std::invalid_argument("target does not pair across strides");
    }
    const std::uint64_t pair_bit = std::uint64_t{1}
                                   << (target - geom.stride_bits);
    if ((lo.stride_index & pair_bit) != 0 ||
        hi.stride_index != (lo.stride_index | pair_bit)) {
        throw std::invalid_argument("stride indices do not form a gate pair");
    }
    const UnitaryParts m(u);
    const std::uint64_t len = geom.stride_len();
    double* lre = lo.re.data();
    double* lim = lo.im.data();
    double* hre = hi.re.data();
    double* him = hi.im.data();

#pragma omp simd
    for (std::uint64_t i = 0; i < len; ++i) {
        const double t0r = lre[i], t0i = lim[i];
        const double t1r = hre[i], t1i = him[i];
        lre[i] = m.u11r * t0r - m.u11i * t0i + m.u12r * t1r - m.u12i * t1i;
        lim[i] = m.u11r * t0i + m.u11i * t0r + m.u12r * t1i + m.u12i * t1r;
        hre[i] = m.u21r * t0r - m.u21i * t0i + m.u22r * t1r - m.u22i * t1i;
        him[i] = m.u21r * t0i + m.u21i * t0r + m.u22r * t1i + m.u22i * t1r;
    }
}

void apply_controlled_in_stride(const StateGeometry& geom, StrideBuffer& buf,
                                const Unitary2x2& u, int control, int target)
{
    if (control == target) {
        throw std::invalid_argument("control qubit equals target qubit");
    }
    if (control < 0 || control >= geom.stride_bits || target < 0 ||
        target >= geom.stride_bits) {
        throw std::invalid_argument("controlled pair does not fit in a stride");
    }
    const UnitaryParts m(u);
    const std::uint64_t half = std::uint64_t{1} << target;
    const std::uint64_t lo_mask = half - 1;
    const std::uint64_t control_bit = std::uint64_t{1} << control;
    const std::uint64_t n_pairs = geom.stride_len() >> 1;
    double* re = buf.re.data();
    double* im = buf.im.data();

    for (std::uint64_t i = 0; i < n_pairs; ++i) {
        const std::uint64_t i0 = ((i & ~lo_mask) << 1) | (i & lo_mask);
        if (i0 & control_bit) {
            apply_pair(re, im, i0, i0 | half, m);
        }
    }
}

void apply_controlled_cross_stride(const StateGeometry& geom, StrideBuffer& lo,
                                   StrideBuffer& hi, const Unitary2x2& u,
                                   int control, int target)
{
    if (control < 0 || control >= geom.stride_bits) {
        throw std::invalid_argument("control qubit is not in-stride");
    }
    if (target < geom.stride_bits || target >= geom.n_qubits) {
        throw std::invalid_argument("target does not pair across strides");
    }
    const std::uint64_t pair_bit = std::uint64_t{1}
                                   << (target - geom.stride_bits);
    if ((lo.stride_index & pair_bit) != 0 ||
        hi.stride_index != (lo.stride_index | pair_bit)) {
        throw std::invalid_argument("stride indices do not form a gate pair");
    }
    const UnitaryParts m(u);
    const std::uint64_t control_bit = std::uint64_t{1} << control;
    const std::uint64_t len = geom.stride_len();
    double* lre = lo.re.data();
    double* lim = lo.im.data();
    double* hre = hi.re.data();
    double* him = hi.im.data();

    for (std::uint64_t i = 0; i < len; ++i) {
        if ((i & control_bit) == 0) continue;
        const double t0r = lre[i], t0i = lim[i];
        const double t1r = hre[i], t1i = him[i];
        lre[i] = m.u11r * t0r - m.u11i * t0i + m.u12r * t1r - m.u12i * t1i;
        lim[i] = m.u11r * t0i + m.u11i * t0r + m.u12r * t1i + m.u12i * t1r;
        hre[i] = m.u21r * t0r - m.u21i * t0i + m.u22r * t1r - m.u22i * t1i;
        him[i] = m.u21r * t0i + m.u21i * t0r + m.u22r * t1i + m.u22i * t1r;
    }
}

void apply_phase_flip_in_stride(StrideBuffer& buf, std::uint64_t offset)
{
    if (offset >= buf.size()) {
        throw std::out_of_range("flip offset out of range");
    }
    buf.re[offset] = -buf.re[offset];
    buf.im[offset] = -buf.im[offset];
}

void apply_reflect_mean_in_stride(StrideBuffer& buf, Amplitude mean)
{
    const double mr2 = 2.0 * mean.real();
    const double mi2 = 2.0 * mean.imag();
    double* re = buf.re.data();
    double* im = buf.im.data();
    const std::size_t n = buf.size();

#pragma omp simd
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = mr2 - re[i];
        im[i] = mi2 - im[i];
    }
}

Amplitude stride_amplitude_sum(const StrideBuffer& buf)
{
    double sr = 0.0, si = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        sr += buf.re[i];
        si += buf.im[i];
    }
    return {sr, si};
}

StridePlan make_stride_plan(const StateGeometry& geom, const GateOp& gate,
                            bool skip_untouched)
{
    gate.validate(geom);

    StridePlan plan;
    const std::uint64_t n_strides = geom.n_strides();
    const int s = geom.stride_bits;

    auto all_local = [&](LocalKernel kernel) {
        plan.local_kernel = kernel;
        plan.units.reserve(n_strides);
        for (std::uint64_t j = 0; j < n_strides; ++j) {
            plan.units.push_back({StrideUnit::Kind::local, j, 0});
        }
    };

    switch (gate.kind) {
        case GateKind::single: {
            if (gate.target < s) {
                all_local(LocalKernel::single);
            } else {
                const std::uint64_t pair_bit = std::uint64_t{1}
                                               << (gate.target - s);
                for (std::uint64_t j = 0; j < n_strides; ++j) {
                    if ((j & pair_bit) == 0) {
                        plan.units.push_back(
                            {StrideUnit::Kind::pair, j, j | pair_bit});
                    }
                }
            }
            break;
        }
        case GateKind::controlled: {
            const int c = *gate.control;
            const int t = gate.target;
            if (c < s && t < s) {
                all_local(LocalKernel::controlled);
            } else if (c >= s && t < s) {
                // Strides with the control bit clear are untouched; the
                // remaining ones see a plain single-qubit update.
                plan.local_kernel = LocalKernel::plain_single;
                const std::uint64_t control_bit = std::uint64_t{1} << (c - s);
                for (std::uint64_t j = 0; j < n_strides; ++j) {
                    if (!skip_untouched || (j & control_bit) != 0) {
                        plan.units.push_back({StrideUnit::Kind::local, j, 0});
                    }
                }
            } else if (c < s && t >= s) {
                plan.cross_control = true;
                const std::uint64_t pair_bit = std::uint64_t{1} << (t - s);
                for (std::uint64_t j = 0; j < n_strides; ++j) {
                    if ((j & pair_bit) == 0) {
                        plan.units.push_back(
                            {StrideUnit::Kind::pair, j, j | pair_bit});
                    }
                }
            } else {
                const std::uint64_t pair_bit = std::uint64_t{1} << (t - s);
                const std::uint64_t control_bit = std::uint64_t{1} << (c - s);
                for (std::uint64_t j = 0; j < n_strides; ++j) {
                    if ((j & pair_bit) != 0) continue;
                    if (!skip_untouched || (j & control_bit) != 0) {
                        plan.units.push_back(
                            {StrideUnit::Kind::pair, j, j | pair_bit});
                    }
                }
            }
            break;
        }
        case GateKind::diag_phase_flip: {
            plan.local_kernel = LocalKernel::phase_flip;
            plan.flip_offset = geom.offset_of(gate.flip_index);
            const std::uint64_t j = geom.stride_of(gate.flip_index);
            if (skip_untouched) {
                plan.units.push_back({StrideUnit::Kind::local, j, 0});
            } else {
                for (std::uint64_t k = 0; k < n_strides; ++k) {
                    plan.units.push_back({StrideUnit::Kind::local, k, 0});
                }
            }
            break;
        }
        case GateKind::reflect_mean: {
            all_local(LocalKernel::reflect);
            plan.needs_mean = true;
            break;
        }
    }
    return plan;
}

void run_plan_unit(const StateGeometry& geom, const StridePlan& plan,
                   const GateOp& gate, StrideBuffer& lo, StrideBuffer* hi,
                   Amplitude mean)
{
    if (plan.units.empty()) return;

    if (hi == nullptr) {
        switch (plan.local_kernel) {
            case LocalKernel::single:
                apply_single_in_stride(geom, lo, *gate.unitary, gate.target);
                break;
            case LocalKernel::controlled:
                apply_controlled_in_stride(geom, lo, *gate.unitary,
                                           *gate.control, gate.target);
                break;
            case LocalKernel::plain_single: {
                // High control bit: fire only if this stride satisfies it.
                const std::uint64_t control_bit =
                    std::uint64_t{1} << (*gate.control - geom.stride_bits);
                if (lo.stride_index & control_bit) {
                    apply_single_in_stride(geom, lo, *gate.unitary, gate.target);
                }
                break;
            }
            case LocalKernel::phase_flip:
                if (lo.stride_index == geom.stride_of(gate.flip_index)) {
                    apply_phase_flip_in_stride(lo, plan.flip_offset);
                }
                break;
            case LocalKernel::reflect:
                apply_reflect_mean_in_stride(lo, mean);
                break;
        }
        return;
    }

    if (plan.cross_control) {
        apply_controlled_cross_stride(geom, lo, *hi, *gate.unitary,
                                      *gate.control, gate.target);
    } else if (gate.kind == GateKind::controlled) {
        // High control bit: either both strides fire or neither does.
        const std::uint64_t control_bit =
            std::uint64_t{1} << (*gate.control - geom.stride_bits);
        if (lo.stride_index & control_bit) {
            apply_single_cross_stride(geom, lo, *hi, *gate.unitary, gate.target);
        }
    } else {
        apply_single_cross_stride(geom, lo, *hi, *gate.unitary, gate.target);
    }
}

}  // namespace qcs
