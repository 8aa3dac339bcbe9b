#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Compression backends for stride planes.
//
// Two codecs sit behind one self-describing block container:
//   id 0  lossless zero-run coding over 8-byte words, bit-exact round trip
//   id 1  error-bounded predictive quantization: each scalar is predicted by
//         the previous *decompressed* scalar, the residual is quantized to
//         2*delta bins and stored as a zigzag varint with zero-run collapsing;
//         residuals that do not fit a 15-bit code (or fail the bound check in
//         floating point) escape to the raw 8-byte scalar.
//
// Block layout (little-endian):
//   magic "QCS1" | codec_id u8 | delta f64 | scalar_count u64 | payload_len u64
// followed by payload_len payload bytes. Header is 29 bytes.

namespace qcs {

struct ErrorBound {
    double delta = 0.0;  // absolute per-scalar bound; 0 means lossless

    ErrorBound() = default;
    explicit ErrorBound(double d);

    bool lossless() const { return delta == 0.0; }
};

class CodecError : public std::runtime_error {
public:
    enum class Kind {
        bad_magic,
        truncated,
        unknown_codec,
        bad_value,
    };

    CodecError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind)
    {
    }

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::size_t kBlockHeaderBytes = 29;
inline constexpr std::uint8_t kCodecLossless = 0;
inline constexpr std::uint8_t kCodecLossy = 1;

struct CompressedBlock {
    std::uint8_t codec_id = kCodecLossless;
    double delta = 0.0;
    std::uint64_t scalar_count = 0;
    std::vector<std::uint8_t> payload;

    std::uint64_t total_bytes() const
    {
        return kBlockHeaderBytes + payload.size();
    }

    /// Uncompressed bytes over stored bytes for this block alone.
    double ratio() const
    {
        return static_cast<double>(scalar_count * 8) /
               static_cast<double>(total_bytes());
    }
};

/// Zero-run coding over the 8-byte word stream. Round trip is bit-exact for
/// every input pattern, including signed zeros and denormals. Rejects
/// NaN/Inf.
CompressedBlock compress_lossless(std::span<const double> scalars);

/// Predictive quantization under an absolute error bound. Requires
/// bound.delta > 0 and finite input. Every reconstructed scalar differs from
/// its source by at most delta.
CompressedBlock compress_lossy(std::span<const double> scalars,
                               ErrorBound bound);

/// Dispatches on bound: delta == 0 -> lossless, else lossy.
CompressedBlock compress(std::span<const double> scalars, ErrorBound bound);

/// Decodes a block back to exactly scalar_count scalars. Deterministic.
std::vector<double> decompress(const CompressedBlock& block);

/// Decompress into a preallocated buffer of length block.scalar_count.
void decompress_into(const CompressedBlock& block, std::span<double> out);

/// Canonical byte image of a block (header + payload).
std::vector<std::uint8_t> serialize_block(const CompressedBlock& block);
void serialize_block_append(const CompressedBlock& block,
                            std::vector<std::uint8_t>& out);

/// Parses one block starting at `offset`; advances `offset` past it.
/// Throws CodecError on bad magic, unknown codec id or truncation.
CompressedBlock parse_block(std::span<const std::uint8_t> bytes,
                            std::size_t& offset);

}  // namespace qcs
