// Paper-scale smoke: one SNR point of the length-2048, rate-2/3 fast-fading
// configuration run end to end (construction -> frozen sets -> FER), with the
// list-32 CRC-16 system required to beat plain successive cancellation.
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance_framework.hpp"
#include "scmapolar/design.hpp"
#include "scmapolar/harness.hpp"
#include "scmapolar/polar.hpp"

using namespace scmapolar;

namespace {

const std::string kCodebookPath = std::string(SCMAPOLAR_DATA_DIR) + "/codebook_k6n4m4.txt";

constexpr int kNCode = 2048;
constexpr double kDesignSnrDb = 8.0;
constexpr double kEvalSnrDb = 8.0;
constexpr std::uint64_t kDesignFrames = 3000;
constexpr std::uint64_t kMinErrors = 20;
constexpr std::uint64_t kMaxFrames = 8000;

bool criterion_paper_scale(std::string& detail) {
    const auto cb = scma::load_codebook(kCodebookPath);
    const Rational rate{2, 3};

    design::DesignConfig dc;
    dc.scheme = Scheme::bipcm;
    dc.chain = design::DesignChain::scma;
    dc.n_code = kNCode;
    dc.rate = rate;
    dc.design_snr_db = kDesignSnrDb;
    dc.codebook = &cb;
    dc.master_seed = 0xf00d;
    const auto hist = design::simulate_first_errors(dc, kDesignFrames);

    const int payload = 1365;  // floor(2/3 * 2048)
    polar::FrozenSetMeta meta;
    meta.design_snr_db = kDesignSnrDb;
    meta.scheme = "bipcm";
    {
        const auto specs = design::select_info_set(hist, payload, Scheme::bipcm, 2);
        polar::save_frozen_set("acc9_sc.fs", specs[0], meta);
    }
    {
        const auto specs = design::select_info_set(hist, payload + 16, Scheme::bipcm, 2);
        polar::save_frozen_set("acc9_scl.fs", design::with_crc(specs[0], 16), meta);
    }

    harness::SimConfig cfg;
    cfg.scheme = Scheme::bipcm;
    cfg.n_code = kNCode;
    cfg.rate = rate;
    cfg.codebook_path = kCodebookPath;
    cfg.snr_db = {kEvalSnrDb};
    cfg.master_seed = 0xf00d + 1;
    cfg.min_frame_errors = kMinErrors;
    cfg.max_frames = kMaxFrames;

    cfg.decoder = DecoderKind::scl;
    cfg.list_size = 32;
    cfg.crc_len = 16;
    cfg.frozen_set_paths = {"acc9_scl.fs"};
    const auto scl = harness::run_fer_experiment(cfg).points.at(0);

    cfg.decoder = DecoderKind::sc;
    cfg.crc_len = 0;
    cfg.frozen_set_paths = {"acc9_sc.fs"};
    const auto sc = harness::run_fer_experiment(cfg).points.at(0);

    std::remove("acc9_sc.fs");
    std::remove("acc9_scl.fs");

    std::ostringstream os;
    os << "scl-32/crc-16: fer=" << scl.fer << " (" << scl.frame_errors << "/" << scl.frames
       << "), sc: fer=" << sc.fer << " (" << sc.frame_errors << "/" << sc.frames << ") at "
       << kEvalSnrDb << " dB";
    detail = os.str();

    if (scl.frame_errors < kMinErrors || sc.frame_errors < kMinErrors) return false;
    return scl.fer < sc.fer;
}

}  // namespace

std::vector<Criterion> acceptance_criteria() {
    return {
        {"9 paper-scale smoke: Nc=2048 R=2/3 scl-32/crc-16 end to end, fer below sc",
         criterion_paper_scale},
    };
}
