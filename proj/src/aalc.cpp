#include "qcs/aalc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qcs {

namespace {

int resolve_workers(int workers)
{
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

std::uint64_t now_ns()
{
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

double block_pair_ratio(std::uint64_t bytes_in, const CompressedBlock& re,
                        const CompressedBlock& im)
{
    return static_cast<double>(bytes_in) /
           static_cast<double>(re.total_bytes() + im.total_bytes());
}

// Norm accounting reads back what was actually stored. The working buffer is
// reused as the target, keeping residency at the two live stride buffers.
double stored_sum_sq(const CompressedBlock& re, const CompressedBlock& im,
                     StrideBuffer& buf)
{
    qcs::decompress_into(re, buf.re);
    qcs::decompress_into(im, buf.im);
    return buf.sum_sq();
}

}  // namespace

ErrorBoundLadder ErrorBoundLadder::make(std::vector<double> bounds)
{
    if (bounds.empty()) {
        throw std::invalid_argument("error-bound ladder must not be empty");
    }
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (!(bounds[i] >= 0.0) || !std::isfinite(bounds[i])) {
            throw std::invalid_argument("error bounds must be finite and >= 0");
        }
        if (i > 0 && !(bounds[i] > bounds[i - 1])) {
            throw std::invalid_argument("error bounds must be strictly increasing");
        }
    }
    ErrorBoundLadder ladder;
    ladder.bounds = std::move(bounds);
    return ladder;
}

ErrorBoundLadder ErrorBoundLadder::default_ladder()
{
    return make({0.0, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3});
}

ErrorBoundLadder ErrorBoundLadder::parse(const std::string& text)
{
    std::vector<double> bounds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed error bound '" + item + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) {
            ++used;
        }
        if (used != item.size()) {
            throw std::invalid_argument("malformed error bound '" + item + "'");
        }
        bounds.push_back(v);
    }
    return make(std::move(bounds));
}

std::uint64_t ErrorBoundLadder::fingerprint() const
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double b : bounds) {
        std::uint64_t w;
        std::memcpy(&w, &b, sizeof(w));
        for (int i = 0; i < 8; ++i) {
            h ^= (w >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

AdaptiveResult compress_stride_adaptive(StrideBuffer& buf,
                                        const ErrorBoundLadder& ladder,
                                        RatioThreshold theta)
{
    buf.snap_zeros();

    const std::uint64_t bytes_in = buf.size() * 16;
    AdaptiveResult result;
    for (std::size_t k = 0; k < ladder.bounds.size(); ++k) {
        const ErrorBound bound(ladder.bounds[k]);
        result.re = compress(buf.re, bound);
        result.im = compress(buf.im, bound);
        result.report.chosen_delta = bound.delta;
        result.report.ratio = block_pair_ratio(bytes_in, result.re, result.im);
        if (result.report.ratio >= theta.theta) break;
    }
    result.report.stride_index = buf.stride_index;
    result.report.bytes_in = bytes_in;
    result.report.bytes_out = result.re.total_bytes() + result.im.total_bytes();
    result.report.threshold_met = result.report.ratio >= theta.theta;
    return result;
}

CompressedState CompressedState::basis_state(const StateGeometry& geom,
                                             std::uint64_t basis_index)
{
    if (basis_index >= geom.n_amplitudes()) {
        throw std::out_of_range("basis index out of range");
    }

    CompressedState state;
    state.geom_ = geom;
    state.strides_.resize(geom.n_strides());

    // Every stride except the one holding the 1 is identical: compress the
    // all-zero plane once and share the block.
    StrideBuffer zero(0, geom.stride_len());
    const CompressedBlock zero_block = compress_lossless(zero.re);

    const std::uint64_t hot = geom.stride_of(basis_index);
    for (std::uint64_t j = 0; j < geom.n_strides(); ++j) {
        StrideStorage& st = state.strides_[j];
        if (j == hot) {
            StrideBuffer buf(j, geom.stride_len());
            buf.re[geom.offset_of(basis_index)] = 1.0;
            st.re = compress_lossless(buf.re);
            st.im = compress_lossless(buf.im);
            st.sum_sq = 1.0;
        } else {
            st.re = zero_block;
            st.im = zero_block;
            st.sum_sq = 0.0;
        }
        st.scale = 1.0;
    }
    state.norm_.sum_sq = 1.0;
    return state;
}

void CompressedState::decompress_into(std::uint64_t stride_index,
                                      StrideBuffer& buf, bool apply_scale) const
{
    const StrideStorage& st = strides_[stride_index];
    buf.stride_index = stride_index;
    buf.re.resize(geom_.stride_len());
    buf.im.resize(geom_.stride_len());
    qcs::decompress_into(st.re, buf.re);
    qcs::decompress_into(st.im, buf.im);
    if (apply_scale && st.scale != 1.0) {
        for (double& x : buf.re) x *= st.scale;
        for (double& x : buf.im) x *= st.scale;
    }
}

StrideBuffer CompressedState::stored_stride(std::uint64_t stride_index) const
{
    if (stride_index >= strides_.size()) {
        throw std::out_of_range("stride index out of range");
    }
    StrideBuffer buf;
    decompress_into(stride_index, buf, false);
    return buf;
}

StrideBuffer CompressedState::decompress_stride(std::uint64_t stride_index) const
{
    if (stride_index >= strides_.size()) {
        throw std::out_of_range("stride index out of range");
    }
    StrideBuffer buf;
    decompress_into(stride_index, buf, true);
    return buf;
}

std::vector<Amplitude> CompressedState::to_amplitudes() const
{
    std::vector<Amplitude> out(geom_.n_amplitudes());
    StrideBuffer buf;
    for (std::uint64_t j = 0; j < geom_.n_strides(); ++j) {
        decompress_into(j, buf, true);
        const std::uint64_t base = j * geom_.stride_len();
        for (std::uint64_t i = 0; i < geom_.stride_len(); ++i) {
            out[base + i] = buf.amp(i);
        }
    }
    return out;
}

double CompressedState::stride_scale(std::uint64_t stride_index) const
{
    if (stride_index >= strides_.size()) {
        throw std::out_of_range("stride index out of range");
    }
    return strides_[stride_index].scale;
}

double CompressedState::norm_sq_tracked() const
{
    double total = 0.0;
    for (const StrideStorage& st : strides_) {
        total += st.scale * st.scale * st.sum_sq;
    }
    return total;
}

std::uint64_t CompressedState::compressed_bytes() const
{
    std::uint64_t total = 0;
    for (const StrideStorage& st : strides_) {
        total += st.re.total_bytes() + st.im.total_bytes();
    }
    return total;
}

double CompressedState::min_stride_ratio() const
{
    const std::uint64_t bytes_in = geom_.stride_len() * 16;
    double m = std::numeric_limits<double>::infinity();
    for (const StrideStorage& st : strides_) {
        m = std::min(m, block_pair_ratio(bytes_in, st.re, st.im));
    }
    return m;
}

CompressedState::GateResult CompressedState::apply_gate(
    const GateOp& gate, const ErrorBoundLadder& ladder, RatioThreshold theta,
    int workers)
{
    gate.validate(geom_);
    const StridePlan plan = make_stride_plan(geom_, gate);
    const int n_workers = resolve_workers(workers);
    const std::int64_t n_units = static_cast<std::int64_t>(plan.units.size());

    // Reflection needs the global mean first; read-only pass over all strides.
    Amplitude mean{0.0, 0.0};
    if (plan.needs_mean) {
        const std::int64_t n_strides = static_cast<std::int64_t>(strides_.size());
        std::vector<Amplitude> partial(strides_.size());
        std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_workers)
#endif
        for (std::int64_t j = 0; j < n_strides; ++j) {
            try {
                StrideBuffer buf;
                decompress_into(static_cast<std::uint64_t>(j), buf, true);
                partial[j] = stride_amplitude_sum(buf);
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
        Amplitude sum{0.0, 0.0};
        for (const Amplitude& p : partial) sum += p;
        mean = sum / static_cast<double>(geom_.n_amplitudes());
    }

    struct Staged {
        std::uint64_t stride_index = 0;
        CompressedBlock re;
        CompressedBlock im;
        double sum_sq = 0.0;
    };
    struct UnitOutcome {
        std::vector<Staged> staged;
        std::vector<StrideCompressReport> reports;
    };
    std::vector<UnitOutcome> outcomes(plan.units.size());

    std::exception_ptr error;
    std::int64_t error_unit = std::numeric_limits<std::int64_t>::max();

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_workers)
#endif
    for (std::int64_t u = 0; u < n_units; ++u) {
        try {
            const StrideUnit& unit = plan.units[u];
            UnitOutcome& out = outcomes[u];

            StrideBuffer lo;
            decompress_into(unit.lo, lo, true);

            if (unit.kind == StrideUnit::Kind::local) {
                run_plan_unit(geom_, plan, gate, lo, nullptr, mean);
                AdaptiveResult r = compress_stride_adaptive(lo, ladder, theta);
                Staged staged;
                staged.stride_index = unit.lo;
                staged.sum_sq = stored_sum_sq(r.re, r.im, lo);
                staged.re = std::move(r.re);
                staged.im = std::move(r.im);
                out.staged.push_back(std::move(staged));
                out.reports.push_back(r.report);
            } else {
                StrideBuffer hi;
                decompress_into(unit.hi, hi, true);
                run_plan_unit(geom_, plan, gate, lo, &hi, mean);
                lo.snap_zeros();
                hi.snap_zeros();

                // Joint escalation: one bound for the pair, each stride still
                // compressed (and reported) on its own.
                const std::uint64_t bytes_in = geom_.stride_len() * 16;
                CompressedBlock lo_re, lo_im, hi_re, hi_im;
                double chosen_delta = 0.0;
                double ratio_lo = 0.0, ratio_hi = 0.0;
                for (std::size_t k = 0; k < ladder.bounds.size(); ++k) {
                    const ErrorBound bound(ladder.bounds[k]);
                    lo_re = compress(lo.re, bound);
                    lo_im = compress(lo.im, bound);
                    hi_re = compress(hi.re, bound);
                    hi_im = compress(hi.im, bound);
                    chosen_delta = bound.delta;
                    ratio_lo = block_pair_ratio(bytes_in, lo_re, lo_im);
                    ratio_hi = block_pair_ratio(bytes_in, hi_re, hi_im);
                    if (std::min(ratio_lo, ratio_hi) >= theta.theta) break;
                }

                Staged staged_lo;
                staged_lo.stride_index = unit.lo;
                staged_lo.sum_sq = stored_sum_sq(lo_re, lo_im, lo);
                StrideCompressReport rep_lo{
                    unit.lo, chosen_delta, ratio_lo, bytes_in,
                    lo_re.total_bytes() + lo_im.total_bytes(),
                    ratio_lo >= theta.theta};
                staged_lo.re = std::move(lo_re);
                staged_lo.im = std::move(lo_im);

                Staged staged_hi;
                staged_hi.stride_index = unit.hi;
                staged_hi.sum_sq = stored_sum_sq(hi_re, hi_im, hi);
                StrideCompressReport rep_hi{
                    unit.hi, chosen_delta, ratio_hi, bytes_in,
                    hi_re.total_bytes() + hi_im.total_bytes(),
                    ratio_hi >= theta.theta};
                staged_hi.re = std::move(hi_re);
                staged_hi.im = std::move(hi_im);

                out.staged.push_back(std::move(staged_lo));
                out.staged.push_back(std::move(staged_hi));
                out.reports.push_back(rep_lo);
                out.reports.push_back(rep_hi);
            }
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (u < error_unit) {
                error_unit = u;
                error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);

    // Commit: replace touched strides, then refresh the lazy scales so the
    // scaled state is normalized again.
    GateResult result;
    for (UnitOutcome& out : outcomes) {
        for (Staged& staged : out.staged) {
            StrideStorage& st = strides_[staged.stride_index];
            st.re = std::move(staged.re);
            st.im = std::move(staged.im);
            st.sum_sq = staged.sum_sq;
            st.scale = 1.0;
        }
        result.reports.insert(result.reports.end(), out.reports.begin(),
                              out.reports.end());
    }

    const double total = norm_sq_tracked();
    if (total > 0.0) {
        const double f = 1.0 / std::sqrt(total);
        for (StrideStorage& st : strides_) st.scale *= f;
    }
    // Re-measure rather than assume: this closes the accounting between the
    // stored blocks, the per-stride sums and the scales.
    norm_.sum_sq = norm_sq_tracked();
    result.norm_after = std::sqrt(norm_.sum_sq);
    return result;
}

namespace {

constexpr char kCheckpointMagic[4] = {'Q', 'C', 'K', 'P'};
constexpr std::uint8_t kCheckpointVersion = 1;

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_f64_le(std::vector<std::uint8_t>& out, double v)
{
    std::uint64_t w;
    std::memcpy(&w, &v, sizeof(w));
    append_u64_le(out, w);
}

std::uint32_t read_u32_le(const std::uint8_t* p)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64_le(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

constexpr std::size_t kCheckpointHeaderBytes = 4 + 1 + 4 + 4 + 8 + 8;

}  // namespace

void CompressedState::save(const std::string& path,
                           std::uint64_t ladder_fingerprint) const
{
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kCheckpointMagic, kCheckpointMagic + 4);
    out.push_back(kCheckpointVersion);
    append_u32_le(out, static_cast<std::uint32_t>(geom_.n_qubits));
    append_u32_le(out, static_cast<std::uint32_t>(geom_.stride_bits));
    append_u64_le(out, ladder_fingerprint);
    append_u64_le(out, geom_.n_strides());
    for (const StrideStorage& st : strides_) {
        append_f64_le(out, st.scale);
        append_f64_le(out, st.sum_sq);
        serialize_block_append(st.re, out);
        serialize_block_append(st.im, out);
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw CheckpointError(CheckpointError::Kind::io,
                              "cannot open '" + path + "' for writing");
    }
    file.write(reinterpret_cast<const char*>(out.data()),
               static_cast<std::streamsize>(out.size()));
    if (!file) {
        throw CheckpointError(CheckpointError::Kind::io,
                              "write to '" + path + "' failed");
    }
}

LoadedState CompressedState::load(
    const std::string& path, const std::optional<StateGeometry>& expected)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw CheckpointError(CheckpointError::Kind::io,
                              "cannot open '" + path + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 4 ||
        std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
        throw CheckpointError(CheckpointError::Kind::bad_magic,
                              "not a checkpoint file");
    }
    if (bytes.size() < kCheckpointHeaderBytes) {
        throw CheckpointError(CheckpointError::Kind::truncated,
                              "checkpoint shorter than its header");
    }
    if (bytes[4] != kCheckpointVersion) {
        throw CheckpointError(CheckpointError::Kind::version_mismatch,
                              "unsupported checkpoint version " +
                                  std::to_string(bytes[4]));
    }
    const std::uint32_t n_qubits = read_u32_le(bytes.data() + 5);
    const std::uint32_t stride_bits = read_u32_le(bytes.data() + 9);
    const std::uint64_t fingerprint = read_u64_le(bytes.data() + 13);
    const std::uint64_t n_strides = read_u64_le(bytes.data() + 21);

    StateGeometry geom;
    try {
        geom = StateGeometry::make(static_cast<int>(n_qubits),
                                   static_cast<int>(stride_bits));
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(CheckpointError::Kind::geometry_mismatch, e.what());
    }
    if (n_strides != geom.n_strides()) {
        throw CheckpointError(CheckpointError::Kind::geometry_mismatch,
                              "stride count disagrees with geometry");
    }
    if (expected && (expected->n_qubits != geom.n_qubits ||
                     expected->stride_bits != geom.stride_bits)) {
        throw CheckpointError(
            CheckpointError::Kind::geometry_mismatch,
            "checkpoint holds " + std::to_string(geom.n_qubits) + " qubits at " +
                std::to_string(geom.stride_bits) + " stride bits, expected " +
                std::to_string(expected->n_qubits) + "/" +
                std::to_string(expected->stride_bits));
    }

    CompressedState state;
    state.geom_ = geom;
    state.strides_.resize(geom.n_strides());

    std::size_t offset = kCheckpointHeaderBytes;
    const std::span<const std::uint8_t> view(bytes);
    try {
        for (std::uint64_t j = 0; j < n_strides; ++j) {
            if (offset + 16 > bytes.size()) {
                throw CheckpointError(CheckpointError::Kind::truncated,
                                      "checkpoint ends inside stride header");
            }
            StrideStorage& st = state.strides_[j];
            const std::uint64_t scale_w = read_u64_le(bytes.data() + offset);
            const std::uint64_t sum_w = read_u64_le(bytes.data() + offset + 8);
            std::memcpy(&st.scale, &scale_w, sizeof(double));
            std::memcpy(&st.sum_sq, &sum_w, sizeof(double));
            offset += 16;
            st.re = parse_block(view, offset);
            st.im = parse_block(view, offset);
            if (st.re.scalar_count != geom.stride_len() ||
                st.im.scalar_count != geom.stride_len()) {
                throw CheckpointError(CheckpointError::Kind::geometry_mismatch,
                                      "block length disagrees with geometry");
            }
        }
    } catch (const CodecError& e) {
        const auto kind = e.kind() == CodecError::Kind::truncated
                              ? CheckpointError::Kind::truncated
                              : CheckpointError::Kind::bad_magic;
        throw CheckpointError(kind, std::string("corrupt checkpoint: ") + e.what());
    }
    if (offset != bytes.size()) {
        throw CheckpointError(CheckpointError::Kind::truncated,
                              "trailing bytes after final stride");
    }

    state.norm_.sum_sq = state.norm_sq_tracked();
    return LoadedState{std::move(state), fingerprint};
}

RunMetrics apply_program_range(CompressedState& state,
                               const CircuitProgram& program, std::size_t first,
                               std::size_t last, const ErrorBoundLadder& ladder,
                               RatioThreshold theta, int workers)
{
    if (last > program.gates.size() || first > last) {
        throw std::out_of_range("gate range outside program");
    }

    RunMetrics metrics;
    metrics.records.reserve(last - first);

    for (std::size_t i = first; i < last; ++i) {
        const GateOp& gate = program.gates[i];
        const std::uint64_t t0 = now_ns();
        CompressedState::GateResult res;
        try {
            res = state.apply_gate(gate, ladder, theta, workers);
        } catch (const std::exception& e) {
            throw std::runtime_error("gate " + std::to_string(i) + " (" +
                                     gate.label + ") failed: " + e.what());
        }
        const std::uint64_t t1 = now_ns();

        GateRecord r;
        r.gate_index = i;
        r.gate_label = gate.label;
        r.stride_count = res.reports.size();
        r.min_ratio = std::numeric_limits<double>::infinity();
        double ratio_sum = 0.0;
        for (const StrideCompressReport& rep : res.reports) {
            r.min_ratio = std::min(r.min_ratio, rep.ratio);
            ratio_sum += rep.ratio;
            r.max_chosen_delta = std::max(r.max_chosen_delta, rep.chosen_delta);
            r.bytes_before += rep.bytes_in;
            r.bytes_after += rep.bytes_out;
            if (!rep.threshold_met) ++metrics.threshold_violations;
        }
        r.mean_ratio =
            res.reports.empty() ? 0.0 : ratio_sum / res.reports.size();
        r.elapsed_ns = t1 - t0;
        r.norm_after = res.norm_after;
        metrics.records.push_back(std::move(r));
        metrics.total_elapsed_ns += t1 - t0;
    }
    return metrics;
}

RunResult run_program(const CircuitProgram& program,
                      const ErrorBoundLadder& ladder, RatioThreshold theta,
                      const StateGeometry& geom, const RunOptions& options)
{
    if (program.n_qubits != geom.n_qubits) {
        throw std::invalid_argument("program and geometry disagree on qubits");
    }
    const std::uint64_t t0 = now_ns();
    CompressedState state = CompressedState::basis_state(geom, options.basis);
    const std::uint64_t init_ns = now_ns() - t0;

    RunResult result = run_program_on(std::move(state), program, ladder, theta,
                                      options);
    result.metrics.total_elapsed_ns += init_ns;
    return result;
}

RunResult run_program_on(CompressedState state, const CircuitProgram& program,
                         const ErrorBoundLadder& ladder, RatioThreshold theta,
                         const RunOptions& options)
{
    if (program.n_qubits != state.geometry().n_qubits) {
        throw std::invalid_argument("program and state disagree on qubits");
    }
    const std::size_t last =
        options.stop_after ? std::min(*options.stop_after, program.gates.size())
                           : program.gates.size();

    RunResult result;
    result.metrics.init_min_ratio = state.min_stride_ratio();
    result.metrics.init_bytes = state.compressed_bytes();

    RunMetrics gate_metrics =
        apply_program_range(state, program, options.first_gate, last, ladder,
                            theta, options.workers);
    result.metrics.records = std::move(gate_metrics.records);
    result.metrics.threshold_violations = gate_metrics.threshold_violations;
    result.metrics.total_elapsed_ns += gate_metrics.total_elapsed_ns;
    result.state = std::move(state);
    return result;
}

}  // namespace qcs
