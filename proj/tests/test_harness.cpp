#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "scmapolar/harness.hpp"
#include "scmapolar/polar.hpp"
#include "scmapolar/rng.hpp"

using namespace scmapolar;
using harness::SimConfig;

namespace {

const std::string kDefaultCodebook = std::string(SCMAPOLAR_DATA_DIR) + "/codebook_k6n4m4.txt";

// write a hand-made frozen set usable by tiny FER runs
std::string write_frozen(const std::string& name, int n_code, int first_info, int crc_len,
                         const char* scheme) {
    polar::PolarCodeSpec spec;
    spec.n_code = n_code;
    for (int i = first_info; i < n_code; ++i) spec.info_set.push_back(i);
    spec.crc_len = crc_len;
    spec.payload_len = static_cast<int>(spec.info_set.size()) - crc_len;
    polar::FrozenSetMeta meta;
    meta.design_snr_db = 8.0;
    meta.scheme = scheme;
    polar::save_frozen_set(name, spec, meta);
    return name;
}

SimConfig tiny_config() {
    SimConfig cfg;
    cfg.scheme = Scheme::bipcm;
    cfg.decoder = DecoderKind::sc;
    cfg.crc_len = 0;
    cfg.n_code = 32;
    cfg.rate = Rational{1, 2};
    cfg.codebook_path = kDefaultCodebook;
    cfg.frozen_set_paths = {write_frozen("tiny_bipcm.fs", 32, 16, 0, "bipcm")};
    cfg.snr_db = {8.0};
    cfg.master_seed = 71;
    cfg.min_frame_errors = 1000000;  // run to the frame cap
    cfg.max_frames = 48;
    return cfg;
}

}  // namespace

TEST_CASE("config files parse with overrides and reject junk") {
    const std::string path = "test_config.cfg";
    std::ofstream(path) << "# comment\n"
                        << "scheme=mlpc\n"
                        << "decoder=scl\n"
                        << "list_size=8\n"
                        << "crc_len=16\n"
                        << "n_code=2048\n"
                        << "rate=2/3\n"
                        << "snr_db=6,8,10\n"
                        << "channel=block\n"
                        << "master_seed=42\n";
    auto cfg = harness::parse_config_file(path);
    CHECK(cfg.scheme == Scheme::mlpc);
    CHECK(cfg.decoder == DecoderKind::scl);
    CHECK(cfg.list_size == 8);
    CHECK(cfg.n_code == 2048);
    CHECK(cfg.rate.num == 2);
    CHECK(cfg.rate.den == 3);
    CHECK(cfg.snr_db == std::vector<double>{6.0, 8.0, 10.0});
    CHECK(cfg.channel_model == channel::FadingModel::block);

    harness::apply_kv(cfg, "scheme", "bipcm");
    CHECK(cfg.scheme == Scheme::bipcm);
    CHECK_THROWS_AS(harness::apply_kv(cfg, "scheme", "ldpc"), ConfigError);
    CHECK_THROWS_AS(harness::apply_kv(cfg, "no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(harness::apply_kv(cfg, "list_size", "many"), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("payload and information sizes follow the rate convention") {
    SimConfig cfg;
    cfg.n_code = 2048;
    cfg.rate = Rational{2, 3};
    cfg.crc_len = 16;
    cfg.scheme = Scheme::bipcm;
    CHECK(cfg.payload_len(2) == 1365);  // floor(2/3 * 2048)
    CHECK(cfg.k_info(2) == 1365 + 16);

    cfg.scheme = Scheme::mlpc;  // one CRC per level
    CHECK(cfg.k_info(2) == 1365 + 32);

    cfg.crc_in_rate = true;
    CHECK(cfg.payload_len(2) == 1365 - 32);
    CHECK(cfg.k_info(2) == 1365);
}

TEST_CASE("config validation flags bad grids and sizes") {
    SimConfig cfg = tiny_config();
    cfg.snr_db = {};
    CHECK_THROWS_AS(harness::run_fer_experiment(cfg), ConfigError);
    cfg.snr_db = {8.0, 6.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.snr_db = {8.0};
    cfg.n_code = 33;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("fer runs are deterministic and schedule independent") {
    SimConfig cfg = tiny_config();
    cfg.threads = 1;
    const auto a = harness::run_fer_experiment(cfg);
    const auto b = harness::run_fer_experiment(cfg);
    REQUIRE(a.points.size() == 1);
    CHECK(a.points[0].frames == b.points[0].frames);
    CHECK(a.points[0].frame_errors == b.points[0].frame_errors);
    CHECK(a.points[0].per_user_errors == b.points[0].per_user_errors);

    cfg.threads = 2;
    const auto c = harness::run_fer_experiment(cfg);
    CHECK(a.points[0].frame_errors == c.points[0].frame_errors);
    CHECK(a.points[0].per_user_errors == c.points[0].per_user_errors);
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("error-free regime yields zero fer") {
    SimConfig cfg = tiny_config();
    cfg.snr_db = {60.0};
    cfg.max_frames = 32;
    const auto res = harness::run_fer_experiment(cfg);
    CHECK(res.points[0].frame_errors == 0);
    CHECK(res.points[0].fer == 0.0);
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("missing inputs raise configuration errors") {
    SimConfig cfg = tiny_config();
    cfg.codebook_path = "/no/such/codebook.txt";
    CHECK_THROWS(harness::run_fer_experiment(cfg));
    cfg = tiny_config();
    cfg.frozen_set_paths = {"/no/such/frozen.fs"};
    CHECK_THROWS(harness::run_fer_experiment(cfg));
    cfg = tiny_config();
    cfg.frozen_set_paths.clear();
    CHECK_THROWS_AS(harness::run_fer_experiment(cfg), ConfigError);
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("csv emission round-trips and keeps small fer values") {
    SimConfig cfg = tiny_config();
    std::vector<harness::FerPoint> points(1);
    points[0].snr_db = 9.25;
    points[0].frames = 1000000;
    points[0].frame_errors = 10;
    points[0].fer = 1e-5;
    points[0].per_user_errors = {1, 2, 3, 1, 2, 1};
    points[0].wall_s = 1.25;
    const std::string path = "test_results.csv";
    harness::emit_results(points, cfg, path);

    {
        std::ifstream in(path);
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        CHECK(header ==
              "snr_db,frames,errors,fer,scheme,decoder,list,n_code,rate,channel,seed,user_errors,"
              "wall_s");
        CHECK(row.find("1e-05") != std::string::npos);
    }

    const auto reread = harness::parse_results_csv(path);
    REQUIRE(reread.size() == 1);
    CHECK(reread[0].snr_db == points[0].snr_db);
    CHECK(reread[0].frames == points[0].frames);
    CHECK(reread[0].frame_errors == points[0].frame_errors);
    CHECK(reread[0].fer == points[0].fer);
    CHECK(reread[0].per_user_errors == points[0].per_user_errors);

    // two-line file for a single point
    std::ifstream in(path);
    int lines = 0;
    std::string tmp;
    while (std::getline(in, tmp)) ++lines;
    CHECK(lines == 2);
    std::remove(path.c_str());
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("run_design writes loadable frozen sets sized by the rate") {
    SimConfig cfg = tiny_config();
    cfg.design_frames = 60;
    cfg.design_snr_db = 8.0;
    cfg.frozen_set_paths = {"test_designed.fs"};
    harness::run_design(cfg);
    const auto [spec, meta] = polar::load_frozen_set("test_designed.fs");
    CHECK(spec.n_code == 32);
    CHECK(spec.payload_len == 16);
    CHECK(spec.crc_len == 0);
    CHECK(meta.design_snr_db == 8.0);
    CHECK(meta.scheme == "bipcm");

    // the designed code must work end to end
    cfg.snr_db = {30.0};
    cfg.max_frames = 16;
    const auto res = harness::run_fer_experiment(cfg);
    CHECK(res.points[0].frame_errors == 0);
    std::remove("test_designed.fs");
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("emitting to an unwritable path raises an i/o error") {
    SimConfig cfg = tiny_config();
    std::vector<harness::FerPoint> points(1);
    points[0].per_user_errors = {0};
    CHECK_THROWS_AS(harness::emit_results(points, cfg, "/nonexistent_dir/x.csv"),
                    std::runtime_error);
    CHECK_THROWS_AS(harness::emit_results({}, cfg, "x.csv"), std::invalid_argument);
    std::remove("tiny_bipcm.fs");
}

TEST_CASE("non-monotone fer points get flagged, not failed") {
    std::vector<harness::FerPoint> points(3);
    points[0].snr_db = 6;
    points[0].frames = 10000;
    points[0].frame_errors = 900;
    points[0].fer = 0.09;
    points[1].snr_db = 7;
    points[1].frames = 10000;
    points[1].frame_errors = 1500;
    points[1].fer = 0.15;  // goes up
    points[2].snr_db = 8;
    points[2].frames = 10000;
    points[2].frame_errors = 300;
    points[2].fer = 0.03;
    std::vector<std::string> warnings;
    harness::flag_non_monotone(points, warnings);
    CHECK(points[0].non_monotone_flag == false);
    CHECK(points[1].non_monotone_flag == true);
    CHECK(points[2].non_monotone_flag == false);
    CHECK(warnings.size() == 1);
}

TEST_CASE("payload bits are i.i.d. uniform across frames") {
    // quick moment check on the derived payload streams
    std::uint64_t ones = 0, total = 0;
    for (std::uint64_t f = 0; f < 200; ++f) {
        for (int user = 0; user < 6; ++user) {
            auto gen = rng::derive_stream(123, f, rng::StreamKind::payload,
                                          static_cast<std::uint64_t>(user));
            for (int i = 0; i < 64; ++i) {
                ones += gen.next() & 1;
                ++total;
            }
        }
    }
    const double mean = static_cast<double>(ones) / static_cast<double>(total);
    CHECK(std::fabs(mean - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(total)));
}
