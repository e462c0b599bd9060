#include "refrain/audit.hpp"
#include "refrain/errors.hpp"
#include "refrain/heatmap.hpp"
#include "refrain/infer.hpp"
#include "refrain/synthetic.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

namespace {

using namespace refrain;

void write_output(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write output: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw IoError("failed while writing output: " + path);
}

Kernel parse_kernel(const std::string& name) {
    static const std::map<std::string, Kernel> table = {
        {"auto", Kernel::Auto},
        {"scalar", Kernel::Scalar},
        {"avx2", Kernel::Avx2},
        {"neon", Kernel::Neon},
    };
    const auto it = table.find(name);
    if (it == table.end())
        throw ValidationError("unknown kernel '" + name + "'");
    if (!kernel_available(it->second))
        throw ValidationError("kernel '" + name + "' not available on this machine");
    return it->second;
}

int run(int argc, char** argv) {
    CLI::App app{"refrain: infer the repeat structure a MIDI performance realizes"};
    app.require_subcommand(1);

    InferConfig config;
    std::string kernel_arg = "auto";
    std::string score_path, performance_path, manifest_path, output_path;
    std::string heatmap_path, heatmap_overlay_path;
    std::string version_structure;
    NoiseSpec noise;
    std::uint64_t seed = 0;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--bound", config.bound, "gain upper bound")->capture_default_str();
        cmd->add_option("--lambda", config.lambda, "per-segment gain penalty")
            ->capture_default_str();
        cmd->add_option("--max-versions", config.max_versions,
                        "cap on enumerated structural versions")
            ->capture_default_str();
        cmd->add_option("--kernel", kernel_arg, "alignment kernel: auto|scalar|avx2|neon")
            ->capture_default_str();
    };

    CLI::App* infer = app.add_subcommand("infer", "infer one performance's repeat structure");
    infer->add_option("--score", score_path, "score JSON file")->required();
    infer->add_option("--performance", performance_path, "performance MIDI or JSON file")
        ->required();
    infer->add_option("--output", output_path, "result JSON path (default: stdout)");
    infer->add_option("--heatmap", heatmap_path, "write the gain matrix as PGM");
    infer->add_option("--heatmap-overlay", heatmap_overlay_path,
                      "write the PGM with the selected version's paths superimposed");
    add_config(infer);

    CLI::App* audit = app.add_subcommand("audit", "check a corpus manifest against annotations");
    audit->add_option("--manifest", manifest_path, "manifest JSON file")->required();
    audit->add_option("--output", output_path, "audit report path (default: stdout)");
    add_config(audit);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic performance");
    synth->add_option("--score", score_path, "score JSON file")->required();
    synth->add_option("--version", version_structure, "structure string, e.g. ABB")
        ->required();
    synth->add_option("--output", output_path, "performance JSON path (default: stdout)");
    synth->add_option("--seed", seed, "random seed")->capture_default_str();
    synth->add_option("--substitution-rate", noise.substitution_rate, "per-note rate in [0,1)")
        ->capture_default_str();
    synth->add_option("--deletion-rate", noise.deletion_rate, "per-note rate in [0,1)")
        ->capture_default_str();
    synth->add_option("--insertion-rate", noise.insertion_rate, "per-note rate in [0,1)")
        ->capture_default_str();

    CLI::App* kernels = app.add_subcommand("kernels", "list alignment kernels");

    CLI11_PARSE(app, argc, argv);

    if (infer->parsed()) {
        config.kernel = parse_kernel(kernel_arg);
        const Score score = load_score_file(score_path);
        const Performance performance = load_performance_file(performance_path);
        const Inference inf = infer_structure(score, performance, config);
        if (!heatmap_path.empty())
            emit_heatmap(inf.matrix, nullptr, heatmap_path);
        if (!heatmap_overlay_path.empty())
            emit_heatmap(inf.matrix, &inf.best.alignments, heatmap_overlay_path);
        write_output(result_to_json(inf, score, performance), output_path);
    } else if (audit->parsed()) {
        config.kernel = parse_kernel(kernel_arg);
        const AuditReport report = run_audit(load_manifest(manifest_path), config);
        write_output(audit_to_json(report), output_path);
    } else if (synth->parsed()) {
        const Score score = load_score_file(score_path);
        const std::vector<Segment> segments = segment_score(score);
        StructuralVersion version;
        version.segment_refs = parse_structure(segments, version_structure);
        version.structure = version_structure;
        const Performance performance =
            generate_synthetic(score, version, noise, seed,
                               score.name + ":" + version_structure);
        write_output(performance_to_json(performance), output_path);
    } else if (kernels->parsed()) {
        for (Kernel k : {Kernel::Scalar, Kernel::Avx2, Kernel::Neon})
            std::cout << kernel_name(k) << " "
                      << (kernel_available(k) ? "available" : "unavailable") << "\n";
        std::cout << "auto -> " << kernel_name(detect_kernel()) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
