#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <set>

#include "qcs/circuit.hpp"
#include "qcs/dense.hpp"

using namespace qcs;

namespace {

const double kPi = std::acos(-1.0);

// Independent DFT oracle: F_xy = exp(2 pi i x y / N) / sqrt(N).
std::vector<Amplitude> dft_row(int n_qubits, std::uint64_t x)
{
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    std::vector<Amplitude> out(dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::uint64_t y = 0; y < dim; ++y) {
        const double phase = 2.0 * kPi * static_cast<double>(x) *
                             static_cast<double>(y) /
                             static_cast<double>(dim);
        out[y] = std::polar(norm, phase);
    }
    return out;
}

double max_diff(const std::vector<Amplitude>& a, const std::vector<Amplitude>& b)
{
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

// Distinct values modulo a tolerance, counted on magnitudes.
std::size_t distinct_magnitudes(const std::vector<Amplitude>& v, double tol)
{
    std::vector<double> mags;
    for (const auto& a : v) mags.push_back(std::abs(a));
    std::sort(mags.begin(), mags.end());
    std::size_t count = mags.empty() ? 0 : 1;
    for (std::size_t i = 1; i < mags.size(); ++i) {
        if (mags[i] - mags[i - 1] > tol) ++count;
    }
    return count;
}

bool gates_equal(const GateOp& a, const GateOp& b)
{
    if (a.kind != b.kind || a.target != b.target || a.control != b.control ||
        a.flip_index != b.flip_index) {
        return false;
    }
    if (a.unitary.has_value() != b.unitary.has_value()) return false;
    if (a.unitary) {
        const Unitary2x2& x = *a.unitary;
        const Unitary2x2& y = *b.unitary;
        if (x.u11 != y.u11 || x.u12 != y.u12 || x.u21 != y.u21 || x.u22 != y.u22) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("minimal programs parse")
{
    const CircuitProgram one = parse_circuit("qubits 1\nh 0\n");
    CHECK(one.n_qubits == 1);
    REQUIRE(one.gates.size() == 1);
    CHECK(one.gates[0].kind == GateKind::single);
    CHECK(one.gates[0].label == "h 0");

    const CircuitProgram bell = parse_circuit("qubits 2\nh 0\ncx 0 1\n");
    CHECK(bell.gates.size() == 2);
    CHECK(bell.gates[1].kind == GateKind::controlled);

    const CircuitProgram comments = parse_circuit(
        "# a comment\n"
        "qubits 2   # trailing comment\n"
        "\n"
        "x 1\n");
    CHECK(comments.gates.size() == 1);
}

TEST_CASE("parse errors carry line numbers")
{
    auto line_of = [](const std::string& text) {
        try {
            parse_circuit(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };

    CHECK(line_of("qubits 2\ncp 0 0 1.0\n") == 2);      // control = target
    CHECK(line_of("qubits 2\nfoo 1\n") == 2);           // unknown mnemonic
    CHECK(line_of("qubits 2\nh 0 1\n") == 2);           // arity
    CHECK(line_of("qubits 2\nh 5\n") == 2);             // out of range
    CHECK(line_of("h 0\n") == 1);                       // missing header
    CHECK(line_of("qubits 2\nqubits 3\n") == 2);        // duplicate header
    CHECK(line_of("qubits 2\ncx 1 1\n") == 2);
    CHECK(line_of("qubits 2\nflip 4\n") == 2);
    CHECK(line_of("qubits 1\nu 0 1 0 1 0 0 0 1 0\n") == 2);  // not unitary
    CHECK_THROWS_AS(parse_circuit(""), ParseError);
}

TEST_CASE("swap expands to three CX gates")
{
    const CircuitProgram p = parse_circuit("qubits 3\nswap 0 2\n");
    REQUIRE(p.gates.size() == 3);
    for (const GateOp& g : p.gates) {
        CHECK(g.kind == GateKind::controlled);
    }
    CHECK(p.gates[0].control == 0);
    CHECK(p.gates[0].target == 2);
    CHECK(p.gates[1].control == 2);
    CHECK(p.gates[1].target == 0);
}

TEST_CASE("print/parse round-trips gate for gate")
{
    const char* source =
        "qubits 4\n"
        "h 0\n"
        "x 1\n"
        "y 2\n"
        "z 3\n"
        "s 0\n"
        "t 1\n"
        "cx 0 3\n"
        "cz 1 2\n"
        "cp 0 1 0.78539816339744828\n"
        "swap 1 3\n"
        "u 2 0.70710678118654757 0 0.70710678118654757 0 "
        "0.70710678118654757 0 -0.70710678118654757 0\n"
        "flip 11\n"
        "diffuse\n";
    const CircuitProgram p = parse_circuit(source);
    const CircuitProgram q = parse_circuit(print_circuit(p));
    REQUIRE(p.gates.size() == q.gates.size());
    CHECK(p.n_qubits == q.n_qubits);
    for (std::size_t i = 0; i < p.gates.size(); ++i) {
        CHECK(gates_equal(p.gates[i], q.gates[i]));
    }

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const CircuitProgram r = build_random(5, 60, seed);
        const CircuitProgram r2 = parse_circuit(print_circuit(r));
        REQUIRE(r.gates.size() == r2.gates.size());
        for (std::size_t i = 0; i < r.gates.size(); ++i) {
            CHECK(gates_equal(r.gates[i], r2.gates[i]));
        }
    }
}

TEST_CASE("qft on one qubit is a single hadamard")
{
    const CircuitProgram p = build_qft(1);
    REQUIRE(p.gates.size() == 1);
    CHECK(p.gates[0].kind == GateKind::single);

    const DenseState out = run_dense(p, 0);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amplitudes[0] - Amplitude{h, 0}) < 1e-15);
    CHECK(std::abs(out.amplitudes[1] - Amplitude{h, 0}) < 1e-15);
}

TEST_CASE("qft-2 on |1> gives the 4-point DFT row")
{
    const DenseState out = run_dense(build_qft(2), 1);
    // (1/2)[1, i, -1, -i]
    CHECK(std::abs(out.amplitudes[0] - Amplitude{0.5, 0.0}) < 1e-15);
    CHECK(std::abs(out.amplitudes[1] - Amplitude{0.0, 0.5}) < 1e-15);
    CHECK(std::abs(out.amplitudes[2] - Amplitude{-0.5, 0.0}) < 1e-15);
    CHECK(std::abs(out.amplitudes[3] - Amplitude{0.0, -0.5}) < 1e-15);
}

TEST_CASE("qft on |0...0> yields the uniform superposition")
{
    for (int n : {1, 3, 6}) {
        const DenseState out = run_dense(build_qft(n), 0);
        const double expect = 1.0 / std::sqrt(std::ldexp(1.0, n));
        for (const Amplitude& a : out.amplitudes) {
            CHECK(std::abs(a - Amplitude{expect, 0.0}) < 1e-12);
        }
    }
}

TEST_CASE("qft equals the DFT matrix for every basis input up to 8 qubits")
{
    for (int n = 1; n <= 8; ++n) {
        const CircuitProgram p = build_qft(n);
        const std::uint64_t dim = std::uint64_t{1} << n;
        for (std::uint64_t x = 0; x < dim; ++x) {
            const DenseState out = run_dense(p, x);
            CHECK(max_diff(out.amplitudes, dft_row(n, x)) < 1e-10);
        }
    }
}

TEST_CASE("qft rejects zero qubits")
{
    CHECK_THROWS_AS(build_qft(0), std::invalid_argument);
}

TEST_CASE("grover with one iteration amplifies the marked state")
{
    // Closed-form reflection: x -> 2m - x on the post-oracle state.
    const double u = 1.0 / std::sqrt(8.0);
    const CircuitProgram p = build_grover(3, 5, 1);
    const DenseState out = run_dense(p, 0);

    CHECK(std::abs(std::abs(out.amplitudes[5]) - 2.5 * u) < 1e-12);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i != 5) CHECK(std::abs(std::abs(out.amplitudes[i]) - 0.5 * u) < 1e-12);
    }
}

TEST_CASE("grover with zero iterations is the uniform state")
{
    const DenseState out = run_dense(build_grover(3, 5, 0), 0);
    const double u = 1.0 / std::sqrt(8.0);
    for (const Amplitude& a : out.amplitudes) {
        CHECK(std::abs(a - Amplitude{u, 0.0}) < 1e-14);
    }
}

TEST_CASE("grover with two iterations reaches probability 0.9453 on the mark")
{
    const DenseState out = run_dense(build_grover(3, 5, 2), 0);
    CHECK(std::norm(out.amplitudes[5]) == doctest::Approx(0.9453).epsilon(1e-3));
}

TEST_CASE("grover default iterations are round(pi/4 sqrt(N))")
{
    const CircuitProgram p = build_grover(10, 0);
    // 10 H gates + 2 gates per iteration; optimal count is round(25.13) = 25.
    CHECK(p.gates.size() == 10 + 2 * 25);
    CHECK_THROWS_AS(build_grover(3, 8, 1), std::out_of_range);
}

TEST_CASE("grover states stay within three amplitude magnitudes at every gate")
{
    for (int n : {3, 4, 6}) {
        const std::uint64_t marked = (std::uint64_t{1} << n) - 3;
        const CircuitProgram p = build_grover(n, marked, 4);
        DenseState state = DenseState::basis_state(n, 0);

        std::size_t h_layer = 0;
        for (std::size_t g = 0; g < p.gates.size(); ++g) {
            dense_apply(state, p.gates[g]);
            const std::size_t k = distinct_magnitudes(state.amplitudes, 1e-12);
            CHECK(k <= 3);
            if (g >= static_cast<std::size_t>(n)) {
                // After the opening H layer the state is uniform plus a spike.
                CHECK(k <= 2);
            }
            (void)h_layer;
        }
    }
}
