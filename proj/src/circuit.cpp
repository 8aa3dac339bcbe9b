#include "qcs/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace qcs {

namespace {

const double kPi = std::acos(-1.0);

std::vector<std::string> split_tokens(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

int parse_qubit(const std::string& tok, int n_qubits, int line,
                const char* role)
{
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, std::string("malformed ") + role + " '" + tok + "'");
    }
    if (used != tok.size()) {
        throw ParseError(line, std::string("malformed ") + role + " '" + tok + "'");
    }
    if (v < 0 || v >= n_qubits) {
        throw ParseError(line, std::string(role) + " " + tok +
                                   " out of range for " +
                                   std::to_string(n_qubits) + " qubits");
    }
    return static_cast<int>(v);
}

double parse_real(const std::string& tok, int line)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "malformed number '" + tok + "'");
    }
    if (used != tok.size()) {
        throw ParseError(line, "malformed number '" + tok + "'");
    }
    return v;
}

void require_arity(const std::vector<std::string>& toks, std::size_t args,
                   int line)
{
    if (toks.size() != args + 1) {
        throw ParseError(line, "'" + toks[0] + "' expects " +
                                   std::to_string(args) + " argument(s), got " +
                                   std::to_string(toks.size() - 1));
    }
}

std::string join_label(const std::vector<std::string>& toks, std::size_t count)
{
    std::string label = toks[0];
    for (std::size_t i = 1; i <= count && i < toks.size(); ++i) {
        label += ' ';
        label += toks[i];
    }
    return label;
}

void append_swap(CircuitProgram& program, int a, int b)
{
    program.gates.push_back(GateOp::controlled(
        Unitary2x2::pauli_x(), a, b, "cx " + std::to_string(a) + " " + std::to_string(b)));
    program.gates.push_back(GateOp::controlled(
        Unitary2x2::pauli_x(), b, a, "cx " + std::to_string(b) + " " + std::to_string(a)));
    program.gates.push_back(GateOp::controlled(
        Unitary2x2::pauli_x(), a, b, "cx " + std::to_string(a) + " " + std::to_string(b)));
}

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

CircuitProgram parse_circuit(const std::string& text, const std::string& name)
{
    CircuitProgram program;
    program.name = name;
    bool have_header = false;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_tokens(line);
        if (toks.empty()) continue;
        const std::string& op = toks[0];

        if (!have_header) {
            if (op != "qubits") {
                throw ParseError(line_no,
                                 "expected 'qubits <n>' before any instruction");
            }
            require_arity(toks, 1, line_no);
            const double v = parse_real(toks[1], line_no);
            if (v < 1 || v > 59 || v != std::floor(v)) {
                throw ParseError(line_no, "qubit count must be an integer in [1, 59]");
            }
            program.n_qubits = static_cast<int>(v);
            have_header = true;
            continue;
        }
        if (op == "qubits") {
            throw ParseError(line_no, "duplicate 'qubits' directive");
        }

        if (op == "h" || op == "x" || op == "y" || op == "z" || op == "s" ||
            op == "t") {
            require_arity(toks, 1, line_no);
            const int q = parse_qubit(toks[1], program.n_qubits, line_no, "qubit");
            Unitary2x2 u = Unitary2x2::identity();
            if (op == "h") u = Unitary2x2::hadamard();
            if (op == "x") u = Unitary2x2::pauli_x();
            if (op == "y") u = Unitary2x2::pauli_y();
            if (op == "z") u = Unitary2x2::pauli_z();
            if (op == "s") u = Unitary2x2::s_gate();
            if (op == "t") u = Unitary2x2::t_gate();
            program.gates.push_back(GateOp::single(u, q, join_label(toks, 1)));
        } else if (op == "cx" || op == "cz") {
            require_arity(toks, 2, line_no);
            const int c = parse_qubit(toks[1], program.n_qubits, line_no, "control");
            const int t = parse_qubit(toks[2], program.n_qubits, line_no, "target");
            if (c == t) {
                throw ParseError(line_no, "control equals target");
            }
            const Unitary2x2 u =
                op == "cx" ? Unitary2x2::pauli_x() : Unitary2x2::pauli_z();
            program.gates.push_back(
                GateOp::controlled(u, c, t, join_label(toks, 2)));
        } else if (op == "cp") {
            require_arity(toks, 3, line_no);
            const int c = parse_qubit(toks[1], program.n_qubits, line_no, "control");
            const int t = parse_qubit(toks[2], program.n_qubits, line_no, "target");
            if (c == t) {
                throw ParseError(line_no, "control equals target");
            }
            const double theta = parse_real(toks[3], line_no);
            program.gates.push_back(GateOp::controlled_phase(
                theta, c, t, join_label(toks, 2)));
        } else if (op == "swap") {
            require_arity(toks, 2, line_no);
            const int a = parse_qubit(toks[1], program.n_qubits, line_no, "qubit");
            const int b = parse_qubit(toks[2], program.n_qubits, line_no, "qubit");
            if (a == b) {
                throw ParseError(line_no, "swap qubits must differ");
            }
            append_swap(program, a, b);
        } else if (op == "u") {
            require_arity(toks, 9, line_no);
            const int q = parse_qubit(toks[1], program.n_qubits, line_no, "qubit");
            double v[8];
            for (int i = 0; i < 8; ++i) {
                v[i] = parse_real(toks[2 + i], line_no);
            }
            try {
                Unitary2x2 u({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]});
                program.gates.push_back(
                    GateOp::single(u, q, "u " + std::to_string(q)));
            } catch (const std::invalid_argument& e) {
                throw ParseError(line_no, e.what());
            }
        } else if (op == "flip") {
            require_arity(toks, 1, line_no);
            const double v = parse_real(toks[1], line_no);
            const double max_index =
                std::ldexp(1.0, program.n_qubits);
            if (v < 0 || v >= max_index || v != std::floor(v)) {
                throw ParseError(line_no, "basis index out of range");
            }
            program.gates.push_back(
                GateOp::phase_flip(static_cast<std::uint64_t>(v)));
        } else if (op == "diffuse") {
            require_arity(toks, 0, line_no);
            program.gates.push_back(GateOp::reflect_mean());
        } else {
            throw ParseError(line_no, "unknown instruction '" + op + "'");
        }
    }

    if (!have_header) {
        throw ParseError(line_no == 0 ? 1 : line_no, "missing 'qubits' header");
    }
    return program;
}

std::string print_circuit(const CircuitProgram& program)
{
    std::ostringstream out;
    out << "qubits " << program.n_qubits << "\n";
    for (const GateOp& g : program.gates) {
        switch (g.kind) {
            case GateKind::single: {
                // Named gates carry their own mnemonic in the label.
                if (!g.label.empty() && g.label[0] != 'u') {
                    out << g.label << "\n";
                } else {
                    const Unitary2x2& u = *g.unitary;
                    out << "u " << g.target;
                    for (const Amplitude& a : {u.u11, u.u12, u.u21, u.u22}) {
                        out << ' ' << format_real(a.real()) << ' '
                            << format_real(a.imag());
                    }
                    out << "\n";
                }
                break;
            }
            case GateKind::controlled: {
                const Unitary2x2& u = *g.unitary;
                const bool is_x = std::abs(u.u11) < 1e-15 &&
                                  std::abs(u.u12 - 1.0) < 1e-15 &&
                                  std::abs(u.u21 - 1.0) < 1e-15 &&
                                  std::abs(u.u22) < 1e-15;
                const bool is_z = std::abs(u.u12) == 0.0 &&
                                  std::abs(u.u21) == 0.0 &&
                                  std::abs(u.u11 - 1.0) == 0.0 &&
                                  u.u22 == Amplitude{-1.0, 0.0};
                const bool is_diag = std::abs(u.u12) == 0.0 &&
                                     std::abs(u.u21) == 0.0 &&
                                     std::abs(u.u11 - 1.0) == 0.0;
                if (is_x) {
                    out << "cx " << *g.control << ' ' << g.target << "\n";
                } else if (is_z && !g.phase_theta) {
                    out << "cz " << *g.control << ' ' << g.target << "\n";
                } else if (g.phase_theta) {
                    out << "cp " << *g.control << ' ' << g.target << ' '
                        << format_real(*g.phase_theta) << "\n";
                } else if (is_diag) {
                    out << "cp " << *g.control << ' ' << g.target << ' '
                        << format_real(std::arg(u.u22)) << "\n";
                } else {
                    throw std::invalid_argument(
                        "controlled gate has no text form: " + g.label);
                }
                break;
            }
            case GateKind::diag_phase_flip:
                out << "flip " << g.flip_index << "\n";
                break;
            case GateKind::reflect_mean:
                out << "diffuse\n";
                break;
        }
    }
    return out.str();
}

CircuitProgram build_qft(int n_qubits)
{
    if (n_qubits < 1) {
        throw std::invalid_argument("qft needs at least one qubit");
    }
    CircuitProgram program;
    program.n_qubits = n_qubits;
    program.name = "qft-" + std::to_string(n_qubits);

    for (int i = 0; i < n_qubits / 2; ++i) {
        append_swap(program, i, n_qubits - 1 - i);
    }
    for (int j = 0; j < n_qubits; ++j) {
        for (int k = 0; k < j; ++k) {
            const double theta = kPi / std::ldexp(1.0, j - k);
            program.gates.push_back(GateOp::controlled_phase(
                theta, k, j,
                "cp " + std::to_string(k) + " " + std::to_string(j)));
        }
        program.gates.push_back(GateOp::single(Unitary2x2::hadamard(), j,
                                               "h " + std::to_string(j)));
    }
    return program;
}

CircuitProgram build_grover(int n_qubits, std::uint64_t marked, int iterations)
{
    if (n_qubits < 1 || n_qubits > 59) {
        throw std::invalid_argument("grover needs 1 to 59 qubits");
    }
    if (marked >= (std::uint64_t{1} << n_qubits)) {
        throw std::out_of_range("marked index out of range");
    }
    if (iterations < 0) {
        iterations = static_cast<int>(
            std::llround(kPi / 4.0 * std::sqrt(std::ldexp(1.0, n_qubits))));
    }

    CircuitProgram program;
    program.n_qubits = n_qubits;
    program.name = "grover-" + std::to_string(n_qubits);

    for (int q = 0; q < n_qubits; ++q) {
        program.gates.push_back(GateOp::single(Unitary2x2::hadamard(), q,
                                               "h " + std::to_string(q)));
    }
    for (int it = 0; it < iterations; ++it) {
        program.gates.push_back(GateOp::phase_flip(marked));
        program.gates.push_back(GateOp::reflect_mean());
    }
    return program;
}

CircuitProgram build_random(int n_qubits, int gate_count, std::uint64_t seed)
{
    if (n_qubits < 1) {
        throw std::invalid_argument("random circuit needs at least one qubit");
    }
    if (gate_count < 0) {
        throw std::invalid_argument("gate count must be non-negative");
    }

    CircuitProgram program;
    program.n_qubits = n_qubits;
    program.name = "random-" + std::to_string(n_qubits);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_int_distribution<int> qubit(0, n_qubits - 1);
    std::uniform_int_distribution<int> pick(0, 9);

    auto random_unitary = [&]() {
        // Rotation mixed with two phases; columns stay orthonormal.
        const double th = angle(rng) / 2.0;
        const double p1 = angle(rng);
        const double p2 = angle(rng);
        const double c = std::cos(th), s = std::sin(th);
        return Unitary2x2({c * std::cos(p1), c * std::sin(p1)},
                          {s * std::cos(p2), s * std::sin(p2)},
                          {-s * std::cos(-p2), -s * std::sin(-p2)},
                          {c * std::cos(-p1), c * std::sin(-p1)});
    };

    for (int i = 0; i < gate_count; ++i) {
        const int kind = pick(rng);
        if (kind < 4) {
            program.gates.push_back(GateOp::single(
                random_unitary(), qubit(rng), "u " + std::to_string(i)));
        } else if (kind < 6 && n_qubits >= 2) {
            int c = qubit(rng);
            int t = qubit(rng);
            while (t == c) t = qubit(rng);
            program.gates.push_back(GateOp::controlled(
                Unitary2x2::pauli_x(), c, t,
                "cx " + std::to_string(c) + " " + std::to_string(t)));
        } else if (kind < 8 && n_qubits >= 2) {
            int c = qubit(rng);
            int t = qubit(rng);
            while (t == c) t = qubit(rng);
            program.gates.push_back(GateOp::controlled_phase(
                angle(rng), c, t,
                "cp " + std::to_string(c) + " " + std::to_string(t)));
        } else if (kind == 8) {
            std::uniform_int_distribution<std::uint64_t> basis(
                0, (std::uint64_t{1} << n_qubits) - 1);
            program.gates.push_back(GateOp::phase_flip(basis(rng)));
        } else {
            const int q = qubit(rng);
            program.gates.push_back(GateOp::single(Unitary2x2::hadamard(), q,
                                                   "h " + std::to_string(q)));
        }
    }
    return program;
}

}  // namespace qcs
