#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "qcs/codec.hpp"

using namespace qcs;

namespace {

double max_abs_error(const std::vector<double>& a, const std::vector<double>& b)
{
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) !=
            std::bit_cast<std::uint64_t>(b[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("lossless: a single spike in a megaword of zeros")
{
    std::vector<double> data(1 << 20, 0.0);
    data[123456] = 1.0;

    const CompressedBlock block = compress_lossless(data);
    CHECK(block.total_bytes() <= 64);
    CHECK(block.ratio() >= 131072.0);  // 2^17
    CHECK(bit_identical(decompress(block), data));
}

TEST_CASE("lossless: random doubles expand by at most 5 percent")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    std::vector<double> data(4096);
    for (auto& x : data) x = dist(rng);

    const CompressedBlock block = compress_lossless(data);
    CHECK(block.ratio() >= 0.95);
    CHECK(bit_identical(decompress(block), data));
}

TEST_CASE("lossless: empty input round-trips to empty")
{
    const CompressedBlock block = compress_lossless(std::vector<double>{});
    CHECK(block.scalar_count == 0);
    CHECK(block.payload.empty());
    CHECK(block.total_bytes() == kBlockHeaderBytes);
    CHECK(decompress(block).empty());
}

TEST_CASE("lossless: arbitrary bit patterns survive, including -0.0 and denormals")
{
    std::mt19937_64 rng(13);
    std::vector<double> data;
    data.push_back(-0.0);
    data.push_back(0.0);
    data.push_back(5e-324);             // smallest denormal
    data.push_back(-5e-324);
    data.push_back(1e-310);
    data.push_back(std::numeric_limits<double>::max());
    data.push_back(-std::numeric_limits<double>::min());
    for (int i = 0; i < 4000; ++i) {
        // Random bit patterns, rejecting NaN/Inf which the codec refuses.
        const std::uint64_t w = rng();
        const double x = std::bit_cast<double>(w);
        data.push_back(std::isfinite(x) ? x : 0.0);
        if (i % 5 == 0) data.push_back(0.0);
    }

    const CompressedBlock block = compress_lossless(data);
    CHECK(bit_identical(decompress(block), data));
}

TEST_CASE("lossless rejects NaN and Inf")
{
    CHECK_THROWS_AS(
        compress_lossless(std::vector<double>{1.0, std::nan("")}), CodecError);
    CHECK_THROWS_AS(
        compress_lossless(std::vector<double>{
            std::numeric_limits<double>::infinity()}),
        CodecError);
}

TEST_CASE("lossy: constant plane collapses to a short code stream")
{
    std::vector<double> data(1000, 0.25);
    const CompressedBlock block = compress_lossy(data, ErrorBound(1e-4));
    const std::vector<double> restored = decompress(block);

    CHECK(max_abs_error(data, restored) <= 1e-4);
    CHECK(static_cast<double>(data.size() * 8) /
              static_cast<double>(block.total_bytes()) >=
          100.0);
}

TEST_CASE("lossy: the per-scalar bound holds across distributions and deltas")
{
    std::mt19937_64 rng(17);
    const double deltas[] = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};

    for (double delta : deltas) {
        std::vector<double> data;
        data.reserve(30000);
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        std::normal_distribution<double> tight(0.0, delta);
        std::normal_distribution<double> wide(0.0, 1e8);
        for (int i = 0; i < 10000; ++i) data.push_back(uniform(rng));
        for (int i = 0; i < 10000; ++i) data.push_back(tight(rng));
        for (int i = 0; i < 10000; ++i) data.push_back(wide(rng));
        data.push_back(0.0);
        data.push_back(-0.0);
        data.push_back(1e300);   // forces the escape path
        data.push_back(-1e300);

        const CompressedBlock block = compress_lossy(data, ErrorBound(delta));
        const std::vector<double> restored = decompress(block);
        CHECK(max_abs_error(data, restored) <= delta);
    }
}

TEST_CASE("lossy: escapes store huge and tiny scalars exactly")
{
    std::vector<double> data = {1e308, -1e308, 0.0, 1e-12, 2.0, 2.0 + 1e-13};
    const CompressedBlock block = compress_lossy(data, ErrorBound(1e-7));
    const std::vector<double> restored = decompress(block);
    CHECK(max_abs_error(data, restored) <= 1e-7);
    CHECK(restored[0] == 1e308);
    CHECK(restored[1] == -1e308);
}

TEST_CASE("lossy: recompressing the reconstruction is stable")
{
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> data(5000);
    for (auto& x : data) x = dist(rng);

    for (double delta : {1e-6, 1e-3}) {
        const CompressedBlock c1 = compress_lossy(data, ErrorBound(delta));
        const std::vector<double> r1 = decompress(c1);
        const CompressedBlock c2 = compress_lossy(r1, ErrorBound(delta));
        const std::vector<double> r2 = decompress(c2);
        CHECK(bit_identical(r1, r2));
    }
}

TEST_CASE("lossy: a uniform amplitude plane compresses like sparse zeros")
{
    // One repeated value, the shape a search-style state settles into.
    std::vector<double> data(1 << 20, 1.0 / std::sqrt(1 << 20));
    const CompressedBlock block = compress_lossy(data, ErrorBound(1e-7));
    CHECK(block.ratio() >= 100000.0);
    CHECK(max_abs_error(data, decompress(block)) <= 1e-7);
}

TEST_CASE("lossy rejects non-positive delta and non-finite input")
{
    std::vector<double> data = {1.0};
    CHECK_THROWS_AS(compress_lossy(data, ErrorBound(0.0)), CodecError);
    CHECK_THROWS_AS(compress_lossy(std::vector<double>{std::nan("")},
                                   ErrorBound(1e-4)),
                    CodecError);
    CHECK_THROWS_AS(ErrorBound(-1.0), std::invalid_argument);
}

TEST_CASE("decompression is deterministic")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> data(3000);
    for (auto& x : data) x = dist(rng);

    const CompressedBlock block = compress_lossy(data, ErrorBound(1e-5));
    const std::vector<double> a = decompress(block);
    const std::vector<double> b = decompress(block);
    CHECK(bit_identical(a, b));
}

TEST_CASE("block serialization round-trips and rejects corruption")
{
    std::vector<double> data = {1.5, 0.0, -2.25, 1e-9};
    const CompressedBlock block = compress_lossy(data, ErrorBound(1e-6));
    std::vector<std::uint8_t> bytes = serialize_block(block);

    SUBCASE("round trip")
    {
        std::size_t offset = 0;
        const CompressedBlock back = parse_block(bytes, offset);
        CHECK(offset == bytes.size());
        CHECK(back.codec_id == block.codec_id);
        CHECK(back.delta == block.delta);
        CHECK(back.scalar_count == block.scalar_count);
        CHECK(back.payload == block.payload);
        CHECK(bit_identical(decompress(back), decompress(block)));
    }

    SUBCASE("bad magic")
    {
        bytes[0] = 'X';
        std::size_t offset = 0;
        try {
            parse_block(bytes, offset);
            FAIL("expected CodecError");
        } catch (const CodecError& e) {
            CHECK(e.kind() == CodecError::Kind::bad_magic);
        }
    }

    SUBCASE("truncated payload")
    {
        bytes.pop_back();
        std::size_t offset = 0;
        try {
            parse_block(bytes, offset);
            FAIL("expected CodecError");
        } catch (const CodecError& e) {
            CHECK(e.kind() == CodecError::Kind::truncated);
        }
    }

    SUBCASE("unknown codec id")
    {
        bytes[4] = 9;
        std::size_t offset = 0;
        try {
            parse_block(bytes, offset);
            FAIL("expected CodecError");
        } catch (const CodecError& e) {
            CHECK(e.kind() == CodecError::Kind::unknown_codec);
        }
    }

    SUBCASE("unknown codec id on a decode")
    {
        CompressedBlock bad = block;
        bad.codec_id = 7;
        try {
            decompress(bad);
            FAIL("expected CodecError");
        } catch (const CodecError& e) {
            CHECK(e.kind() == CodecError::Kind::unknown_codec);
        }
    }

    SUBCASE("truncated in-memory payload")
    {
        CompressedBlock bad = block;
        bad.payload.pop_back();
        CHECK_THROWS_AS(decompress(bad), CodecError);
    }
}

TEST_CASE("dispatching compress() on the bound picks the right codec")
{
    std::vector<double> data(64, 0.125);
    CHECK(compress(data, ErrorBound(0.0)).codec_id == kCodecLossless);
    CHECK(compress(data, ErrorBound(1e-5)).codec_id == kCodecLossy);
}
