// Command-line front end: builds or loads a circuit, drives the compressed
// simulation, and emits the metrics artifacts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcs/aalc.hpp"
#include "qcs/circuit.hpp"
#include "qcs/core.hpp"
#include "qcs/dense.hpp"
#include "qcs/metrics.hpp"

namespace {

struct CircuitOptions {
    std::string circuit;
    int qubits = 0;
    std::uint64_t basis = 0;
    std::uint64_t marked = 0;
    int iterations = -1;
    int gates = 100;
    std::uint64_t seed = 1;
};

struct PipelineOptions {
    double theta = 16.0;
    std::string ladder = "0,1e-7,1e-6,1e-5,1e-4,1e-3";
    int stride_bits = -1;
    int workers = 0;
    std::string out_csv;
    std::string out_json;
};

void add_circuit_flags(CLI::App* cmd, CircuitOptions& opt)
{
    cmd->add_option("--circuit", opt.circuit,
                    "circuit file path, or builtin:qft | builtin:grover | "
                    "builtin:random")
        ->required();
    cmd->add_option("--qubits", opt.qubits, "qubit count for builtin circuits");
    cmd->add_option("--basis", opt.basis, "initial computational basis index");
    cmd->add_option("--marked", opt.marked, "marked basis index (grover)");
    cmd->add_option("--iterations", opt.iterations,
                    "grover iterations, -1 = optimal");
    cmd->add_option("--gates", opt.gates, "gate count (random builtin)");
    cmd->add_option("--seed", opt.seed,
                    "seed for builtin:random; qft/grover ignore it");
}

void add_pipeline_flags(CLI::App* cmd, PipelineOptions& opt)
{
    cmd->add_option("--theta", opt.theta, "compression ratio threshold");
    cmd->add_option("--ladder", opt.ladder,
                    "comma-separated error bounds, 0 = lossless level");
    cmd->add_option("--stride-bits", opt.stride_bits,
                    "log2 amplitudes per stride, -1 = min(qubits, 20)");
    cmd->add_option("--workers", opt.workers,
                    "stride worker threads, 0 = hardware");
    cmd->add_option("--out-csv", opt.out_csv, "write per-gate records here");
    cmd->add_option("--out-json", opt.out_json, "write the run summary here");
}

qcs::CircuitProgram build_circuit(const CircuitOptions& opt)
{
    if (opt.circuit == "builtin:qft") {
        if (opt.qubits < 1) {
            throw std::invalid_argument("builtin:qft needs --qubits");
        }
        return qcs::build_qft(opt.qubits);
    }
    if (opt.circuit == "builtin:grover") {
        if (opt.qubits < 1) {
            throw std::invalid_argument("builtin:grover needs --qubits");
        }
        return qcs::build_grover(opt.qubits, opt.marked, opt.iterations);
    }
    if (opt.circuit == "builtin:random") {
        if (opt.qubits < 1) {
            throw std::invalid_argument("builtin:random needs --qubits");
        }
        return qcs::build_random(opt.qubits, opt.gates, opt.seed);
    }
    if (opt.circuit.rfind("builtin:", 0) == 0) {
        throw std::invalid_argument("unknown builtin circuit '" + opt.circuit +
                                    "'");
    }

    std::ifstream file(opt.circuit);
    if (!file) {
        throw std::invalid_argument("cannot open circuit file '" + opt.circuit +
                                    "'");
    }
    std::stringstream text;
    text << file.rdbuf();
    std::string name = opt.circuit;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
        name = name.substr(slash + 1);
    }
    qcs::CircuitProgram program = qcs::parse_circuit(text.str(), name);
    if (opt.qubits > 0 && opt.qubits != program.n_qubits) {
        throw std::invalid_argument("--qubits disagrees with circuit file (" +
                                    std::to_string(program.n_qubits) + ")");
    }
    return program;
}

qcs::StateGeometry make_geometry(const qcs::CircuitProgram& program,
                                 const PipelineOptions& opt)
{
    if (opt.stride_bits < 0) {
        return qcs::StateGeometry::with_default_stride(program.n_qubits);
    }
    return qcs::StateGeometry::make(program.n_qubits, opt.stride_bits);
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream file(path, std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    file << content;
    if (!file) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

void print_summary(const qcs::CircuitProgram& program,
                   const qcs::StateGeometry& geom, double theta,
                   const qcs::RunSummary& summary,
                   std::uint64_t final_compressed_bytes)
{
    std::printf("circuit:              %s (%zu gates, %d qubits)\n",
                program.name.c_str(), program.gates.size(), program.n_qubits);
    std::printf("raw state bytes:      %llu\n",
                static_cast<unsigned long long>(qcs::raw_bytes(geom.n_qubits)));
    std::printf("strides:              %llu x %llu amplitudes\n",
                static_cast<unsigned long long>(geom.n_strides()),
                static_cast<unsigned long long>(geom.stride_len()));
    std::printf("theta:                %g\n", theta);
    std::printf("overall min ratio:    %.6g\n", summary.overall_min_ratio);
    std::printf("qubit gain:           %d\n", summary.qubit_gain);
    std::printf("threshold violations: %llu\n",
                static_cast<unsigned long long>(summary.threshold_violations));
    std::printf("final state bytes:    %llu\n",
                static_cast<unsigned long long>(final_compressed_bytes));
    std::printf("total time:           %.3f s\n",
                static_cast<double>(summary.total_elapsed_ns) * 1e-9);
    if (summary.fidelity) {
        std::printf("fidelity:             %.8f\n", *summary.fidelity);
    }
    if (summary.overhead_factor) {
        std::printf("overhead factor:      %.2fx\n", *summary.overhead_factor);
    }
}

struct SimulateConfig {
    CircuitOptions circuit;
    PipelineOptions pipeline;
    std::string load_state;
    std::string save_state;
    std::int64_t stop_after = -1;
    std::int64_t start_gate = 0;
};

int run_simulate(const SimulateConfig& cfg)
{
    qcs::CircuitProgram program = build_circuit(cfg.circuit);
    const qcs::StateGeometry geom = make_geometry(program, cfg.pipeline);
    const qcs::ErrorBoundLadder ladder =
        qcs::ErrorBoundLadder::parse(cfg.pipeline.ladder);
    const qcs::RatioThreshold theta(cfg.pipeline.theta);

    qcs::RunOptions options;
    options.basis = cfg.circuit.basis;
    options.workers = cfg.pipeline.workers;
    options.first_gate = static_cast<std::size_t>(cfg.start_gate);
    if (cfg.stop_after >= 0) {
        options.stop_after = static_cast<std::size_t>(cfg.stop_after);
    }

    qcs::RunResult result;
    if (!cfg.load_state.empty()) {
        auto loaded = qcs::CompressedState::load(cfg.load_state, geom);
        if (loaded.ladder_fingerprint != ladder.fingerprint()) {
            std::fprintf(stderr,
                         "warning: checkpoint was written with a different "
                         "error-bound ladder\n");
        }
        result = qcs::run_program_on(std::move(loaded.state), program, ladder,
                                     theta, options);
    } else {
        result = qcs::run_program(program, ladder, theta, geom, options);
    }

    if (!cfg.save_state.empty()) {
        result.state.save(cfg.save_state, ladder.fingerprint());
    }

    const qcs::RunSummary summary = qcs::summarize_run(result.metrics);
    if (!cfg.pipeline.out_csv.empty()) {
        write_text_file(cfg.pipeline.out_csv, qcs::emit_csv(result.metrics.records));
    }
    if (!cfg.pipeline.out_json.empty()) {
        write_text_file(cfg.pipeline.out_json, qcs::emit_summary_json(summary));
    }
    print_summary(program, geom, theta.theta, summary,
                  result.state.compressed_bytes());
    return 0;
}

struct CompareConfig {
    CircuitOptions circuit;
    PipelineOptions pipeline;
    int max_dense = qcs::kDenseQubitGuard;
};

int run_compare(const CompareConfig& cfg)
{
    qcs::CircuitProgram program = build_circuit(cfg.circuit);
    if (program.n_qubits > cfg.max_dense) {
        throw std::invalid_argument(
            "dense reference guard exceeded: " +
            std::to_string(program.n_qubits) + " qubits > " +
            std::to_string(cfg.max_dense) + " (raise --max-dense)");
    }
    const qcs::StateGeometry geom = make_geometry(program, cfg.pipeline);
    const qcs::ErrorBoundLadder ladder =
        qcs::ErrorBoundLadder::parse(cfg.pipeline.ladder);
    const qcs::RatioThreshold theta(cfg.pipeline.theta);

    const auto t0 = std::chrono::steady_clock::now();
    const qcs::DenseState reference =
        qcs::run_dense(program, cfg.circuit.basis, cfg.max_dense);
    const auto t1 = std::chrono::steady_clock::now();
    const std::uint64_t reference_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());

    qcs::RunOptions options;
    options.basis = cfg.circuit.basis;
    options.workers = cfg.pipeline.workers;
    qcs::RunResult result = qcs::run_program(program, ladder, theta, geom, options);

    qcs::DenseState compressed;
    compressed.n_qubits = program.n_qubits;
    compressed.amplitudes = result.state.to_amplitudes();

    const double fid = qcs::fidelity(reference, compressed);
    const qcs::RunSummary summary =
        qcs::summarize_run(result.metrics, fid, reference_ns);

    if (!cfg.pipeline.out_csv.empty()) {
        write_text_file(cfg.pipeline.out_csv, qcs::emit_csv(result.metrics.records));
    }
    if (!cfg.pipeline.out_json.empty()) {
        write_text_file(cfg.pipeline.out_json, qcs::emit_summary_json(summary));
    }

    print_summary(program, geom, theta.theta, summary,
                  result.state.compressed_bytes());
    std::printf("reference time:       %.3f s\n",
                static_cast<double>(reference_ns) * 1e-9);
    std::printf("reference norm:       %.12f\n",
                std::sqrt(reference.norm_sq()));
    std::printf("compressed norm:      %.12f\n",
                std::sqrt(compressed.norm_sq()));
    return 0;
}

struct BenchConfig {
    CircuitOptions circuit;
    PipelineOptions pipeline;
    std::string thetas;
    int max_dense = qcs::kDenseQubitGuard;
};

int run_bench(const BenchConfig& cfg)
{
    std::vector<double> thetas;
    {
        std::stringstream in(cfg.thetas);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (!item.empty()) thetas.push_back(std::stod(item));
        }
    }
    if (thetas.empty()) {
        throw std::invalid_argument("--thetas must list at least one threshold");
    }

    qcs::CircuitProgram program = build_circuit(cfg.circuit);
    if (program.n_qubits > cfg.max_dense) {
        throw std::invalid_argument("dense reference guard exceeded");
    }
    const qcs::StateGeometry geom = make_geometry(program, cfg.pipeline);
    const qcs::ErrorBoundLadder ladder =
        qcs::ErrorBoundLadder::parse(cfg.pipeline.ladder);

    const qcs::DenseState reference =
        qcs::run_dense(program, cfg.circuit.basis, cfg.max_dense);

    std::string csv = "theta,min_ratio,fidelity,time_ns\n";
    std::printf("%10s %14s %12s %12s\n", "theta", "min_ratio", "fidelity",
                "time_s");
    for (double theta : thetas) {
        qcs::RunOptions options;
        options.basis = cfg.circuit.basis;
        options.workers = cfg.pipeline.workers;
        qcs::RunResult result = qcs::run_program(
            program, ladder, qcs::RatioThreshold(theta), geom, options);

        qcs::DenseState compressed;
        compressed.n_qubits = program.n_qubits;
        compressed.amplitudes = result.state.to_amplitudes();
        const double fid = qcs::fidelity(reference, compressed);
        const double min_ratio = result.metrics.overall_min_ratio();

        char row[160];
        std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g,%llu\n", theta,
                      min_ratio, fid,
                      static_cast<unsigned long long>(
                          result.metrics.total_elapsed_ns));
        csv += row;
        std::printf("%10g %14.5g %12.8f %12.3f\n", theta, min_ratio, fid,
                    static_cast<double>(result.metrics.total_elapsed_ns) * 1e-9);
    }
    if (!cfg.pipeline.out_csv.empty()) {
        write_text_file(cfg.pipeline.out_csv, csv);
    }
    return 0;
}

struct CodecConfig {
    std::string input;
    std::string output;
    double delta = 0.0;
};

int run_codec(const CodecConfig& cfg)
{
    std::ifstream file(cfg.input, std::ios::binary);
    if (!file) {
        throw std::invalid_argument("cannot open input file '" + cfg.input + "'");
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>());
    if (raw.size() % sizeof(double) != 0) {
        throw std::invalid_argument(
            "input length is not a multiple of 8 bytes");
    }
    std::vector<double> scalars(raw.size() / sizeof(double));
    std::memcpy(scalars.data(), raw.data(), raw.size());

    const qcs::CompressedBlock block =
        qcs::compress(scalars, qcs::ErrorBound(cfg.delta));
    const std::vector<double> restored = qcs::decompress(block);

    double max_err = 0.0;
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        max_err = std::max(max_err, std::fabs(restored[i] - scalars[i]));
    }

    std::printf("scalars:          %zu\n", scalars.size());
    std::printf("input bytes:      %zu\n", raw.size());
    std::printf("compressed bytes: %llu\n",
                static_cast<unsigned long long>(block.total_bytes()));
    std::printf("ratio:            %.6g\n",
                static_cast<double>(raw.size()) /
                    static_cast<double>(block.total_bytes()));
    std::printf("max error:        %.17g\n", max_err);

    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + cfg.output +
                                     "' for writing");
        }
        out.write(reinterpret_cast<const char*>(restored.data()),
                  static_cast<std::streamsize>(restored.size() * sizeof(double)));
    }
    return 0;
}

bool is_config_error(const std::exception& e)
{
    return dynamic_cast<const std::invalid_argument*>(&e) != nullptr ||
           dynamic_cast<const std::out_of_range*>(&e) != nullptr ||
           dynamic_cast<const qcs::ParseError*>(&e) != nullptr;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qcsim - state-vector quantum circuit simulation on a "
                 "compressed amplitude vector"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qcsim 0.1.0");

    SimulateConfig sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "run the adaptive-compression pipeline");
    add_circuit_flags(simulate, sim.circuit);
    add_pipeline_flags(simulate, sim.pipeline);
    simulate->add_option("--load-state", sim.load_state,
                         "resume from a saved state");
    simulate->add_option("--save-state", sim.save_state,
                         "save the final state here");
    simulate->add_option("--stop-after", sim.stop_after,
                         "apply only the first N gates");
    simulate->add_option("--start-gate", sim.start_gate,
                         "skip gates before this index (resume)");

    CompareConfig cmp;
    CLI::App* compare = app.add_subcommand(
        "compare", "run compressed and dense pipelines, report fidelity");
    add_circuit_flags(compare, cmp.circuit);
    add_pipeline_flags(compare, cmp.pipeline);
    compare->add_option("--max-dense", cmp.max_dense,
                        "dense reference qubit guard");

    BenchConfig bench;
    CLI::App* bench_cmd = app.add_subcommand(
        "bench", "sweep ratio thresholds, one CSV row per theta");
    add_circuit_flags(bench_cmd, bench.circuit);
    add_pipeline_flags(bench_cmd, bench.pipeline);
    bench_cmd->add_option("--thetas", bench.thetas, "comma-separated thresholds")
        ->required();
    bench_cmd->add_option("--max-dense", bench.max_dense,
                          "dense reference qubit guard");

    CodecConfig codec;
    CLI::App* codec_cmd = app.add_subcommand(
        "codec", "round-trip a raw little-endian double file");
    codec_cmd->add_option("--input", codec.input, "raw double file")->required();
    codec_cmd->add_option("--output", codec.output,
                          "write round-tripped doubles here");
    codec_cmd->add_option("--delta", codec.delta, "error bound, 0 = lossless");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (compare->parsed()) return run_compare(cmp);
        if (bench_cmd->parsed()) return run_bench(bench);
        if (codec_cmd->parsed()) return run_codec(codec);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return is_config_error(e) ? 2 : 1;
    }
    return 0;
}
