#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scmapolar/channel.hpp"
#include "scmapolar/common.hpp"

namespace scmapolar::harness {

/// Full experiment description; mirrors the key=value config file one to one.
struct SimConfig {
    Scheme scheme = Scheme::bipcm;
    DecoderKind decoder = DecoderKind::sc;
    int list_size = 32;
    int crc_len = 0;
    int n_code = 2048;
    Rational rate{2, 3};
    std::string codebook_path;
    std::vector<std::string> frozen_set_paths;  // one (bipcm) or one per level (mlpc)
    channel::FadingModel channel_model = channel::FadingModel::fast;
    int block_len = 18;
    int mpa_iters = 6;
    std::vector<double> snr_db;
    std::uint64_t master_seed = 1;
    std::uint64_t min_frame_errors = 100;
    std::uint64_t max_frames = 1000000;
    int threads = 0;
    std::string out_path;
    InterleaverMode interleaver = InterleaverMode::per_frame;
    bool crc_in_rate = false;  // alternate reading: CRC bits counted inside R

    double design_snr_db = 8.0;
    std::uint64_t design_frames = 0;  // 0 -> adaptive budget
    std::uint64_t design_max_frames = 200000;

    /// Message bits per user per frame (CRC excluded); bits_per_symbol comes
    /// from the loaded codebook.
    int payload_len(int bits_per_symbol) const;
    /// Information positions to select during construction (CRC included;
    /// MLPC carries one CRC per constituent level).
    int k_info(int bits_per_symbol) const;
    void validate() const;
};

SimConfig parse_config_file(const std::string& path);
/// Applies one key=value pair; shared by the file parser and CLI overrides.
void apply_kv(SimConfig& cfg, const std::string& key, const std::string& value);

struct FerPoint {
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    double fer = 0.0;
    std::vector<std::uint64_t> per_user_errors;
    double wall_s = 0.0;
    bool non_monotone_flag = false;
};

struct FerResult {
    std::vector<FerPoint> points;
    std::vector<std::string> warnings;
};

/// Frame-parallel FER sweep over the configured SNR grid.  Per-frame results
/// depend only on (config, master_seed, frame index); batching makes the set
/// of simulated frames, and therefore every count, independent of the thread
/// schedule.
FerResult run_fer_experiment(const SimConfig& cfg);

void emit_results(const std::vector<FerPoint>& points, const SimConfig& cfg,
                  const std::string& path);
std::vector<FerPoint> parse_results_csv(const std::string& path);

/// Flags FER increases between adjacent SNR points (informational only).
void flag_non_monotone(std::vector<FerPoint>& points, std::vector<std::string>& warnings);

/// Runs the Monte-Carlo construction for cfg and writes the frozen-set
/// file(s) named in cfg.frozen_set_paths.
void run_design(const SimConfig& cfg);

/// Built-in oracle/property checks; returns true when everything passes.
bool run_validate(bool quick, const std::string& codebook_path, std::ostream& log);

}  // namespace scmapolar::harness
