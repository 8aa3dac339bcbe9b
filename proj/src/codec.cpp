#include "qcs/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace qcs {

namespace {

constexpr std::int64_t kQuantRadius = 32768;  // 2^15 code bins per sign

// Lossless payload tokens, one varint each:
//   v = run_len << 1 | 0   run of zero words
//   v = run_len << 1 | 1   run of literal words, followed by run_len * 8 bytes
//
// Lossy payload tokens, low two bits select the kind:
//   v = run_len << 2 | 0   run of zero quantization codes (recon = predictor)
//   v = zigzag(q) << 2 | 1 one nonzero code q
//   v = run_len << 2 | 2   run of escaped scalars, followed by raw 8B each

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& pos)
{
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
        if (pos >= in.size()) {
            throw CodecError(CodecError::Kind::truncated,
                             "payload ends inside a varint");
        }
        std::uint8_t b = in[pos++];
        if (shift >= 63 && (b & 0x7e) != 0) {
            throw CodecError(CodecError::Kind::bad_value, "varint overflows 64 bits");
        }
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if ((b & 0x80) == 0) return v;
        shift += 7;
    }
}

std::uint64_t zigzag(std::int64_t q)
{
    return (static_cast<std::uint64_t>(q) << 1) ^
           static_cast<std::uint64_t>(q >> 63);
}

std::int64_t unzigzag(std::uint64_t z)
{
    return static_cast<std::int64_t>(z >> 1) ^
           -static_cast<std::int64_t>(z & 1);
}

void put_word(std::vector<std::uint8_t>& out, std::uint64_t w)
{
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
    }
}

std::uint64_t get_word(std::span<const std::uint8_t> in, std::size_t& pos)
{
    if (pos + 8 > in.size()) {
        throw CodecError(CodecError::Kind::truncated,
                         "payload ends inside a raw word");
    }
    std::uint64_t w = 0;
    for (int i = 0; i < 8; ++i) {
        w |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
    }
    pos += 8;
    return w;
}

void require_finite(std::span<const double> scalars)
{
    for (double x : scalars) {
        if (!std::isfinite(x)) {
            throw CodecError(CodecError::Kind::bad_value,
                             "NaN/Inf cannot be compressed");
        }
    }
}

void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint64_t read_u64_le(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    }
    return v;
}

}  // namespace

ErrorBound::ErrorBound(double d) : delta(d)
{
    if (!(d >= 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument("error bound must be finite and >= 0");
    }
}

CompressedBlock compress_lossless(std::span<const double> scalars)
{
    require_finite(scalars);

    CompressedBlock block;
    block.codec_id = kCodecLossless;
    block.delta = 0.0;
    block.scalar_count = scalars.size();

    std::size_t i = 0;
    const std::size_t n = scalars.size();
    while (i < n) {
        if (std::bit_cast<std::uint64_t>(scalars[i]) == 0) {
            std::size_t j = i;
            while (j < n && std::bit_cast<std::uint64_t>(scalars[j]) == 0) ++j;
            put_varint(block.payload, (static_cast<std::uint64_t>(j - i) << 1));
            i = j;
        } else {
            std::size_t j = i;
            while (j < n && std::bit_cast<std::uint64_t>(scalars[j]) != 0) ++j;
            put_varint(block.payload,
                       (static_cast<std::uint64_t>(j - i) << 1) | 1u);
            for (std::size_t k = i; k < j; ++k) {
                put_word(block.payload, std::bit_cast<std::uint64_t>(scalars[k]));
            }
            i = j;
        }
    }
    return block;
}

namespace {

// Shared by the encoder's token emitter: flushes pending zero-code runs and
// escape runs so tokens always cover maximal runs.
struct LossyEmitter {
    std::vector<std::uint8_t>& out;
    std::uint64_t zero_run = 0;
    std::vector<std::uint64_t> escape_words;

    explicit LossyEmitter(std::vector<std::uint8_t>& o) : out(o) {}

    void flush_zeros()
    {
        if (zero_run > 0) {
            put_varint(out, zero_run << 2);
            zero_run = 0;
        }
    }

    void flush_escapes()
    {
        if (!escape_words.empty()) {
            put_varint(out,
                       (static_cast<std::uint64_t>(escape_words.size()) << 2) | 2u);
            for (std::uint64_t w : escape_words) put_word(out, w);
            escape_words.clear();
        }
    }

    void zero_code()
    {
        flush_escapes();
        ++zero_run;
    }

    void code(std::int64_t q)
    {
        flush_escapes();
        flush_zeros();
        put_varint(out, (zigzag(q) << 2) | 1u);
    }

    void escape(double x)
    {
        flush_zeros();
        escape_words.push_back(std::bit_cast<std::uint64_t>(x));
    }

    void finish()
    {
        flush_escapes();
        flush_zeros();
    }
};

}  // namespace

CompressedBlock compress_lossy(std::span<const double> scalars, ErrorBound bound)
{
    if (!(bound.delta > 0.0)) {
        throw CodecError(CodecError::Kind::bad_value,
                         "lossy compression requires delta > 0");
    }
    require_finite(scalars);

    CompressedBlock block;
    block.codec_id = kCodecLossy;
    block.delta = bound.delta;
    block.scalar_count = scalars.size();

    const double two_delta = 2.0 * bound.delta;
    const double escape_limit = two_delta * static_cast<double>(kQuantRadius);

    LossyEmitter emit(block.payload);
    double pred = 0.0;
    for (double x : scalars) {
        const double diff = x - pred;
        bool coded = false;
        if (std::fabs(diff) < escape_limit) {
            const std::int64_t q = std::llround(diff / two_delta);
            if (q > -kQuantRadius && q < kQuantRadius) {
                const double recon = pred + two_delta * static_cast<double>(q);
                // The bound must hold after rounding, not just algebraically.
                if (std::fabs(x - recon) <= bound.delta) {
                    if (q == 0) {
                        emit.zero_code();
                    } else {
                        emit.code(q);
                    }
                    pred = recon;
                    coded = true;
                }
            }
        }
        if (!coded) {
            emit.escape(x);
            pred = x;
        }
    }
    emit.finish();
    return block;
}

CompressedBlock compress(std::span<const double> scalars, ErrorBound bound)
{
    return bound.lossless() ? compress_lossless(scalars)
                            : compress_lossy(scalars, bound);
}

namespace {

void decompress_lossless_into(const CompressedBlock& block, std::span<double> out)
{
    std::span<const std::uint8_t> in(block.payload);
    std::size_t pos = 0;
    std::size_t produced = 0;
    const std::size_t n = block.scalar_count;

    while (produced < n) {
        const std::uint64_t v = get_varint(in, pos);
        const std::uint64_t run = v >> 1;
        if (run == 0 || run > n - produced) {
            throw CodecError(CodecError::Kind::bad_value,
                             "run length inconsistent with scalar count");
        }
        if ((v & 1u) == 0) {
            for (std::uint64_t k = 0; k < run; ++k) out[produced++] = 0.0;
        } else {
            for (std::uint64_t k = 0; k < run; ++k) {
                out[produced++] = std::bit_cast<double>(get_word(in, pos));
            }
        }
    }
    if (pos != in.size()) {
        throw CodecError(CodecError::Kind::bad_value,
                         "trailing bytes after final token");
    }
}

void decompress_lossy_into(const CompressedBlock& block, std::span<double> out)
{
    std::span<const std::uint8_t> in(block.payload);
    std::size_t pos = 0;
    std::size_t produced = 0;
    const std::size_t n = block.scalar_count;
    const double two_delta = 2.0 * block.delta;

    double pred = 0.0;
    while (produced < n) {
        const std::uint64_t v = get_varint(in, pos);
        const unsigned tag = static_cast<unsigned>(v & 3u);
        const std::uint64_t arg = v >> 2;
        switch (tag) {
            case 0: {  // zero-code run: value repeats the predictor
                if (arg == 0 || arg > n - produced) {
                    throw CodecError(CodecError::Kind::bad_value,
                                     "zero-run length inconsistent");
                }
                for (std::uint64_t k = 0; k < arg; ++k) out[produced++] = pred;
                break;
            }
            case 1: {  // one nonzero code
                const std::int64_t q = unzigzag(arg);
                if (q == 0 || q <= -kQuantRadius || q >= kQuantRadius) {
                    throw CodecError(CodecError::Kind::bad_value,
                                     "quantization code out of range");
                }
                pred = pred + two_delta * static_cast<double>(q);
                out[produced++] = pred;
                break;
            }
            case 2: {  // escaped raw scalars
                if (arg == 0 || arg > n - produced) {
                    throw CodecError(CodecError::Kind::bad_value,
                                     "escape-run length inconsistent");
                }
                for (std::uint64_t k = 0; k < arg; ++k) {
                    pred = std::bit_cast<double>(get_word(in, pos));
                    out[produced++] = pred;
                }
                break;
            }
            default:
                throw CodecError(CodecError::Kind::bad_value,
                                 "unknown payload token");
        }
    }
    if (pos != in.size()) {
        throw CodecError(CodecError::Kind::bad_value,
                         "trailing bytes after final token");
    }
}

}  // namespace

void decompress_into(const CompressedBlock& block, std::span<double> out)
{
    if (out.size() != block.scalar_count) {
        throw std::invalid_argument("output span does not match scalar count");
    }
    switch (block.codec_id) {
        case kCodecLossless:
            decompress_lossless_into(block, out);
            break;
        case kCodecLossy:
            decompress_lossy_into(block, out);
            break;
        default:
            throw CodecError(CodecError::Kind::unknown_codec,
                             "unknown codec id " + std::to_string(block.codec_id));
    }
}

std::vector<double> decompress(const CompressedBlock& block)
{
    std::vector<double> out(block.scalar_count);
    decompress_into(block, out);
    return out;
}

void serialize_block_append(const CompressedBlock& block,
                            std::vector<std::uint8_t>& out)
{
    out.push_back('Q');
    out.push_back('C');
    out.push_back('S');
    out.push_back('1');
    out.push_back(block.codec_id);
    put_u64_le(out, std::bit_cast<std::uint64_t>(block.delta));
    put_u64_le(out, block.scalar_count);
    put_u64_le(out, block.payload.size());
    out.insert(out.end(), block.payload.begin(), block.payload.end());
}

std::vector<std::uint8_t> serialize_block(const CompressedBlock& block)
{
    std::vector<std::uint8_t> out;
    out.reserve(block.total_bytes());
    serialize_block_append(block, out);
    return out;
}

CompressedBlock parse_block(std::span<const std::uint8_t> bytes,
                            std::size_t& offset)
{
    if (offset + kBlockHeaderBytes > bytes.size()) {
        throw CodecError(CodecError::Kind::truncated,
                         "block header extends past end of data");
    }
    const std::uint8_t* p = bytes.data() + offset;
    if (p[0] != 'Q' || p[1] != 'C' || p[2] != 'S' || p[3] != '1') {
        throw CodecError(CodecError::Kind::bad_magic, "bad block magic");
    }
    CompressedBlock block;
    block.codec_id = p[4];
    if (block.codec_id != kCodecLossless && block.codec_id != kCodecLossy) {
        throw CodecError(CodecError::Kind::unknown_codec,
                         "unknown codec id " + std::to_string(block.codec_id));
    }
    block.delta = std::bit_cast<double>(read_u64_le(p + 5));
    block.scalar_count = read_u64_le(p + 13);
    const std::uint64_t payload_len = read_u64_le(p + 21);
    offset += kBlockHeaderBytes;
    if (offset + payload_len > bytes.size()) {
        throw CodecError(CodecError::Kind::truncated,
                         "block payload extends past end of data");
    }
    block.payload.assign(bytes.begin() + offset,
                         bytes.begin() + offset + payload_len);
    offset += payload_len;
    return block;
}

}  // namespace qcs
