#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scmapolar/harness.hpp"

namespace {

using scmapolar::harness::SimConfig;

struct CliOverrides {
    std::string config;
    std::vector<std::pair<std::string, std::string>> kv;
};

void add_passthrough(CLI::App* cmd, CliOverrides& ov, const std::string& flag,
                     const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.kv.emplace_back(key, v); }, help);
}

void add_common_options(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config, "key=value config file applied before flag overrides");
    add_passthrough(cmd, ov, "--scheme", "scheme", "bipcm|mlpc");
    add_passthrough(cmd, ov, "--decoder", "decoder", "sc|scl");
    add_passthrough(cmd, ov, "--list-size", "list_size", "SCL list size");
    add_passthrough(cmd, ov, "--crc-len", "crc_len", "CRC length in bits (0, 8 or 16)");
    add_passthrough(cmd, ov, "--n-code", "n_code", "code bits per user per frame");
    add_passthrough(cmd, ov, "--rate", "rate", "overall code rate, e.g. 2/3");
    add_passthrough(cmd, ov, "--codebook", "codebook", "codebook file path");
    add_passthrough(cmd, ov, "--frozen-set", "frozen_set",
                    "frozen-set file path(s), comma separated for MLPC levels");
    add_passthrough(cmd, ov, "--channel", "channel", "fast|block");
    add_passthrough(cmd, ov, "--block-len", "block_len", "block fading length in channel uses");
    add_passthrough(cmd, ov, "--mpa-iters", "mpa_iters", "MPA iteration count");
    add_passthrough(cmd, ov, "--snr", "snr_db", "Emb/N0 grid in dB, comma separated ascending");
    add_passthrough(cmd, ov, "--seed", "master_seed", "master seed");
    add_passthrough(cmd, ov, "--min-frame-errors", "min_frame_errors", "stop after this many");
    add_passthrough(cmd, ov, "--max-frames", "max_frames", "hard frame cap per SNR point");
    add_passthrough(cmd, ov, "--threads", "threads", "worker threads (0 = hardware)");
    add_passthrough(cmd, ov, "--out", "out", "output CSV path");
    add_passthrough(cmd, ov, "--interleaver", "interleaver", "per_frame|fixed|identity");
    add_passthrough(cmd, ov, "--design-snr", "design_snr_db", "construction SNR in dB");
    add_passthrough(cmd, ov, "--design-frames", "design_frames",
                    "construction frames (0 = adaptive)");
    add_passthrough(cmd, ov, "--design-max-frames", "design_max_frames",
                    "cap for the adaptive construction budget");
}

SimConfig build_config(const CliOverrides& ov) {
    SimConfig cfg;
    if (!ov.config.empty()) cfg = scmapolar::harness::parse_config_file(ov.config);
    for (const auto& [key, value] : ov.kv) scmapolar::harness::apply_kv(cfg, key, value);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level simulator for polar-coded SCMA uplinks"};
    app.require_subcommand(1);

    CliOverrides ov_design, ov_sim, ov_validate;
    auto* design = app.add_subcommand("design", "Monte-Carlo code construction; writes frozen sets");
    add_common_options(design, ov_design);
    auto* simulate = app.add_subcommand("simulate", "FER sweep over the SNR grid; writes CSV");
    add_common_options(simulate, ov_sim);
    auto* validate = app.add_subcommand("validate", "run built-in oracle and property checks");
    bool quick = false;
    std::string validate_codebook = "data/codebook_k6n4m4.txt";
    validate->add_flag("--quick", quick, "reduced trial counts");
    validate->add_option("--codebook", validate_codebook, "codebook file to check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) {
            const SimConfig cfg = build_config(ov_design);
            scmapolar::harness::run_design(cfg);
            for (const auto& p : cfg.frozen_set_paths) std::printf("wrote %s\n", p.c_str());
            return 0;
        }
        if (simulate->parsed()) {
            const SimConfig cfg = build_config(ov_sim);
            auto result = scmapolar::harness::run_fer_experiment(cfg);
            for (const auto& p : result.points)
                std::printf("snr=%g dB  frames=%llu  errors=%llu  fer=%.6g  (%.1fs)\n", p.snr_db,
                            static_cast<unsigned long long>(p.frames),
                            static_cast<unsigned long long>(p.frame_errors), p.fer, p.wall_s);
            for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            if (!cfg.out_path.empty()) {
                scmapolar::harness::emit_results(result.points, cfg, cfg.out_path);
                std::printf("wrote %s\n", cfg.out_path.c_str());
            }
            return 0;
        }
        if (validate->parsed()) {
            const bool ok = scmapolar::harness::run_validate(quick, validate_codebook, std::cout);
            std::printf("validate: %s\n", ok ? "all checks passed" : "FAILURES");
            return ok ? 0 : 1;
        }
    } catch (const scmapolar::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
