#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qcs/core.hpp"

using namespace qcs;

TEST_CASE("qubit bit extraction follows the LSB-0 convention")
{
    const StateGeometry geom = StateGeometry::make(3, 1);
    CHECK(qubit_bit(geom, 0, 1) == 1);
    CHECK(qubit_bit(geom, 1, 1) == 0);
    CHECK(qubit_bit(geom, 2, 6) == 1);  // 6 = 0b110

    CHECK_THROWS_AS(qubit_bit(geom, 3, 0), std::out_of_range);
    CHECK_THROWS_AS(qubit_bit(geom, -1, 0), std::out_of_range);
    CHECK_THROWS_AS(qubit_bit(geom, 0, 8), std::out_of_range);
}

TEST_CASE("raw state size is 2^(n+4) bytes")
{
    CHECK(raw_bytes(1) == 32);
    CHECK(raw_bytes(26) == (std::uint64_t{1} << 30));  // 1 GiB
    // 45 qubits need half a petabyte.
    CHECK(raw_bytes(45) == (std::uint64_t{1} << 49));
    CHECK(raw_bytes(45) == 562949953421312ull);

    CHECK_THROWS_AS(raw_bytes(0), std::out_of_range);
    CHECK_THROWS_AS(raw_bytes(60), std::out_of_range);

    for (int n = 1; n <= 59; ++n) {
        CHECK(raw_bytes(n) == 16 * (std::uint64_t{1} << n));
    }
}

TEST_CASE("qubit gain is floor(log2(ratio))")
{
    CHECK(qubit_gain(445144.0) == 18);
    CHECK(qubit_gain(1.0) == 0);
    CHECK(qubit_gain(16.0) == 4);
    CHECK(qubit_gain(15.9999) == 3);
    CHECK(qubit_gain(1.02) == 0);
    CHECK(qubit_gain(5.7) == 2);

    // Exact powers of two stay exact.
    for (int k = 0; k < 50; ++k) {
        CHECK(qubit_gain(std::ldexp(1.0, k)) == k);
    }

    CHECK_THROWS_AS(qubit_gain(0.5), std::invalid_argument);
}

TEST_CASE("geometry validation and derived counts")
{
    const StateGeometry geom = StateGeometry::make(10, 4);
    CHECK(geom.n_amplitudes() == 1024);
    CHECK(geom.stride_len() == 16);
    CHECK(geom.n_strides() == 64);
    CHECK(geom.stride_of(1023) == 63);
    CHECK(geom.offset_of(1023) == 15);

    CHECK(StateGeometry::with_default_stride(12).stride_bits == 12);
    CHECK(StateGeometry::with_default_stride(26).stride_bits == 20);

    CHECK_THROWS_AS(StateGeometry::make(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(StateGeometry::make(4, 5), std::invalid_argument);
    CHECK_THROWS_AS(StateGeometry::make(4, -1), std::invalid_argument);
}

TEST_CASE("stride partitioning concatenates back to the full vector")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    for (int s = 0; s <= 8; ++s) {
        const StateGeometry geom = StateGeometry::make(8, s);
        std::vector<double> full_re(geom.n_amplitudes());
        std::vector<double> full_im(geom.n_amplitudes());
        for (auto& x : full_re) x = dist(rng);
        for (auto& x : full_im) x = dist(rng);

        std::vector<StrideBuffer> strides;
        for (std::uint64_t j = 0; j < geom.n_strides(); ++j) {
            StrideBuffer buf(j, geom.stride_len());
            for (std::uint64_t i = 0; i < geom.stride_len(); ++i) {
                buf.re[i] = full_re[j * geom.stride_len() + i];
                buf.im[i] = full_im[j * geom.stride_len() + i];
            }
            strides.push_back(std::move(buf));
        }

        for (std::uint64_t g = 0; g < geom.n_amplitudes(); ++g) {
            const StrideBuffer& buf = strides[geom.stride_of(g)];
            CHECK(buf.re[geom.offset_of(g)] == full_re[g]);
            CHECK(buf.im[geom.offset_of(g)] == full_im[g]);
        }
    }
}

TEST_CASE("zero snapping clears sub-1e-300 components only")
{
    StrideBuffer buf(0, 4);
    buf.re = {1e-301, -1e-305, 1e-299, 0.5};
    buf.im = {-0.0, 5e-324, -1.0, 1e-300};
    buf.snap_zeros();

    CHECK(buf.re[0] == 0.0);
    CHECK(buf.re[1] == 0.0);
    CHECK(buf.re[2] == 1e-299);
    CHECK(buf.re[3] == 0.5);
    CHECK(buf.im[0] == 0.0);
    CHECK(std::signbit(buf.im[0]) == false);
    CHECK(buf.im[1] == 0.0);
    CHECK(buf.im[2] == -1.0);
    CHECK(buf.im[3] == 1e-300);
}

TEST_CASE("norm accumulator sums squared magnitudes")
{
    NormAccumulator acc;
    acc.add(3.0, 4.0);
    CHECK(acc.sum_sq == doctest::Approx(25.0));
    acc.add(1.0, 0.0);
    CHECK(acc.sum_sq == doctest::Approx(26.0));
    acc.reset();
    CHECK(acc.sum_sq == 0.0);
}
