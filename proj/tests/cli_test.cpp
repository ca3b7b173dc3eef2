#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "json.hpp"
#include "synthrf/channel_io.hpp"
#include "synthrf/iq_file.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using synthrf::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("synthrf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const json& j) const {
        std::ofstream(path(name)) << j.dump(2);
        return path(name);
    }

    static json channel_spec(double duration_s) {
        return {{"seed", 5},
                {"duration_s", duration_s},
                {"sources",
                 {{{"source_id", "PRN01"},
                   {"kind", "satellite"},
                   {"paths", {{{"initial_delay_s", 0.0672}, {"power_db", 0}, {"doppler_hz", -1000}}}}},
                  {{"source_id", "PRN14"},
                   {"kind", "satellite"},
                   {"paths", {{{"initial_delay_s", 0.067205}, {"power_db", 0}, {"doppler_hz", 2500}}}}},
                  {{"source_id", "PRN07"},
                   {"kind", "satellite"},
                   {"los", false},
                   {"paths", {{{"initial_delay_s", 0.067207}, {"power_db", -30}, {"doppler_hz", 1200}}}}}}}};
    }

    static json cdma_config(double duration_s) {
        return {{"seed", 5},
                {"duration_s", duration_s},
                {"cn0_dbhz", 45},
                {"sources",
                 {{{"source_id", "PRN01"}, {"prn", 1}},
                  {{"source_id", "PRN14"}, {"prn", 14}},
                  {{"source_id", "PRN07"}, {"prn", 7}}}}};
    }

    // Channel file plus synthesized CDMA recording; returns the I/Q path.
    std::string cdma_recording(double duration_s) {
        const auto spec = write("spec.json", channel_spec(duration_s));
        EXPECT_EQ(invoke({"gen-channel", "--config", spec, "--out", path("sat.chan")}).code, 0);
        const auto cfg = write("cdma.json", cdma_config(duration_s));
        const auto r = invoke({"synthesize", "cdma", "--config", cfg, "--channel", path("sat.chan"), "--out", path("rx.iq")});
        EXPECT_EQ(r.code, 0) << r.err;
        return path("rx.iq");
    }

    fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_F(CliTest, HelpAndUsageErrors) {
    EXPECT_EQ(invoke({"--help"}).code, 0);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"synthesize", "fm", "--channel", "x"}).code, 2);
    EXPECT_EQ(invoke({"acquire", "--iq", "x", "--prn", "40"}).code, 2);
    const auto r = invoke({"gen-channel", "--out", path("x.chan")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--config"), std::string::npos);
}

TEST_F(CliTest, GenChannelWritesLoadableFile) {
    const auto spec = write("spec.json", channel_spec(0.01));
    const auto r = invoke({"gen-channel", "--config", spec, "--out", path("a.chan")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("PRN14"), std::string::npos);
    const auto set = synthrf::channel::load_channel(path("a.chan"));
    EXPECT_EQ(set.sources.size(), 3u);
    EXPECT_EQ(set.snapshot_count(), 400u);
}

TEST_F(CliTest, GenChannelMissingFieldNamesIt) {
    auto spec = channel_spec(0.01);
    spec["sources"][1]["paths"][0].erase("power_db");
    const auto r = invoke({"gen-channel", "--config", write("spec.json", spec), "--out", path("a.chan")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("sources[1].paths[0].power_db"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("a.chan")));

    auto no_seed = channel_spec(0.01);
    no_seed.erase("seed");
    const auto r2 = invoke({"gen-channel", "--config", write("s2.json", no_seed), "--out", path("b.chan")});
    EXPECT_EQ(r2.code, 2);
    EXPECT_NE(r2.err.find("seed"), std::string::npos);
    EXPECT_EQ(invoke({"--seed", "3", "gen-channel", "--config", path("s2.json"), "--out", path("b.chan")}).code, 0);
}

TEST_F(CliTest, GenChannelIsByteIdentical) {
    const auto spec = write("spec.json", channel_spec(0.02));
    for (const char* name : {"one.chan", "two.chan", "one.bin", "two.bin"}) {
        ASSERT_EQ(invoke({"gen-channel", "--config", spec, "--out", path(name)}).code, 0);
    }
    const auto slurp = [&](const std::string& n) {
        std::ifstream in(path(n), std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    EXPECT_EQ(slurp("one.chan"), slurp("two.chan"));
    EXPECT_EQ(slurp("one.bin"), slurp("two.bin"));
    ASSERT_EQ(invoke({"--seed", "6", "gen-channel", "--config", spec, "--out", path("three.chan")}).code, 0);
    EXPECT_EQ(slurp("one.chan").substr(0, 200), slurp("three.chan").substr(0, 200));
    EXPECT_NE(slurp("one.chan"), slurp("three.chan"));
}

TEST_F(CliTest, SynthesizeCdmaTwentyMilliseconds) {
    const auto iq = cdma_recording(0.02);
    const auto meta = synthrf::io::read_json_file(synthrf::io::sidecar_path(iq));
    EXPECT_EQ(meta.at("sample_count"), 763840);
    EXPECT_EQ(meta.at("sample_rate_hz"), 38.192e6);
    EXPECT_EQ(meta.at("kind"), "cdma");
    EXPECT_EQ(fs::file_size(iq), 763840u * 8u);
    const auto& truth = meta.at("ground_truth").at("sources");
    ASSERT_EQ(truth.size(), 3u);
    for (const auto& s : truth) {
        if (s.at("prn") == 14) {
            EXPECT_EQ(s.at("expected_code_phase_samples"), 191);
        }
        if (s.at("prn") == 1) {
            EXPECT_NEAR(s.at("doppler_hz").get<double>(), -1000.0, 1e-6);
        }
    }
}

TEST_F(CliTest, SynthesizeInt16AndReal) {
    const auto spec = write("spec.json", channel_spec(0.002));
    ASSERT_EQ(invoke({"gen-channel", "--config", spec, "--out", path("c.chan")}).code, 0);
    const auto cfg = write("cdma.json", cdma_config(0.002));
    const auto r = invoke({"--format", "i16", "synthesize", "cdma", "--real", "--config", cfg, "--channel",
                           path("c.chan"), "--out", path("q.iq")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(fs::file_size(path("q.iq")), 76384u * 2u);
    const auto meta = synthrf::io::read_json_file(path("q.json"));
    EXPECT_EQ(meta.at("format"), "i16");
    EXPECT_EQ(meta.at("real"), true);
}

TEST_F(CliTest, SynthesizePrsFrame) {
    const json spec = {{"seed", 1},
                       {"duration_s", 0.01},
                       {"sources",
                        {{{"source_id", "g0"}, {"kind", "gnb"}, {"paths", {{{"initial_delay_s", 1e-5}, {"power_db", 0}}}}},
                         {{"source_id", "g1"}, {"kind", "gnb"}, {"paths", {{{"initial_delay_s", 2e-5}, {"power_db", -3}}}}}}}};
    ASSERT_EQ(invoke({"gen-channel", "--config", write("spec.json", spec), "--out", path("g.chan")}).code, 0);
    const json cfg = {{"seed", 1},
                      {"duration_s", 0.01},
                      {"gnbs",
                       {{{"source_id", "g0"}, {"prs", {{"comb_offset", 0}}}},
                        {{"source_id", "g1"}, {"prs", {{"comb_offset", 1}}}}}}};
    const auto r = invoke({"synthesize", "prs", "--config", write("prs.json", cfg), "--channel", path("g.chan"), "--out",
                           path("prs.iq")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto side = synthrf::io::read_json_file(synthrf::io::sidecar_path(path("prs.iq")));
    EXPECT_EQ(side.at("sample_count"), 153600);
    EXPECT_EQ(side.at("sample_rate_hz"), 15.36e6);
    EXPECT_EQ(side.at("gnbs").size(), 2u);
    EXPECT_EQ(side.at("gnbs")[1].at("n_prs_id"), 1);

    // A PRS recording is not something the CDMA receiver accepts.
    EXPECT_EQ(invoke({"acquire", "--iq", path("prs.iq")}).code, 2);
}

TEST_F(CliTest, SynthesizeConfigChannelMismatch) {
    const auto spec = write("spec.json", channel_spec(0.002));
    ASSERT_EQ(invoke({"gen-channel", "--config", spec, "--out", path("c.chan")}).code, 0);
    auto cfg = cdma_config(0.002);
    cfg["sources"][0]["source_id"] = "PRN99";
    const auto r = invoke({"synthesize", "cdma", "--config", write("cdma.json", cfg), "--channel", path("c.chan"),
                           "--out", path("x.iq")});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("PRN99"), std::string::npos) << r.err;

    auto longer = cdma_config(0.01);
    const auto r2 = invoke({"synthesize", "cdma", "--config", write("long.json", longer), "--channel", path("c.chan"),
                            "--out", path("y.iq")});
    EXPECT_NE(r2.code, 0);
}

TEST_F(CliTest, SpectrumPeaks) {
    json spec = {{"seed", 1},
                 {"duration_s", 0.05},
                 {"sources",
                  {{{"source_id", "still"}, {"kind", "haps"}, {"paths", {{{"initial_delay_s", 1e-5}, {"power_db", 0}}}}},
                   {{"source_id", "moving"},
                    {"kind", "satellite"},
                    {"paths", {{{"initial_delay_s", 2e-5}, {"power_db", 0}, {"doppler_hz", 2500}}}}}}}};
    ASSERT_EQ(invoke({"gen-channel", "--config", write("spec.json", spec), "--out", path("s.chan")}).code, 0);
    for (const auto& [id, want] : std::vector<std::pair<std::string, double>>{{"still", 0.0}, {"moving", 2500.0}}) {
        const auto r = invoke({"spectrum", "--channel", path("s.chan"), "--source", id});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto rows = csv_rows(r.out);
        ASSERT_EQ(rows.size(), 1025u);
        EXPECT_EQ(rows[0][0], "frequency_hz");
        double best_f = 0.0, best_p = -1e300;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double p = std::stod(rows[i][1]);
            if (p > best_p) {
                best_p = p;
                best_f = std::stod(rows[i][0]);
            }
        }
        EXPECT_NEAR(best_f, want, 40000.0 / 1024.0) << id;
    }
    EXPECT_EQ(invoke({"spectrum", "--channel", path("s.chan"), "--source", "nobody"}).code, 2);
    EXPECT_EQ(invoke({"spectrum", "--channel", path("s.chan"), "--source", "still", "--nfft", "4096"}).code, 2);
}

TEST_F(CliTest, AcquireWithGroundTruth) {
    const auto iq = cdma_recording(0.012);
    const auto r = invoke({"acquire", "--iq", iq});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].size(), 10u);
    EXPECT_EQ(rows[0][7], "code_phase_error_samples");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int prn = std::stoi(rows[i][0]);
        if (prn == 7) {
            EXPECT_EQ(rows[i][1], "0") << "NLOS source acquired";
        } else {
            EXPECT_EQ(rows[i][1], "1") << prn;
            EXPECT_LE(std::abs(std::stol(rows[i][7])), 19) << prn;
            EXPECT_LE(std::abs(std::stod(rows[i][9])), 25.0) << prn;
        }
    }
}

TEST_F(CliTest, AcquireWithoutGroundTruthOmitsErrorColumns) {
    const auto iq = cdma_recording(0.003);
    auto meta = synthrf::io::read_json_file(synthrf::io::sidecar_path(iq));
    meta.erase("ground_truth");
    synthrf::io::write_json_file(synthrf::io::sidecar_path(iq), meta);
    const auto r = invoke({"acquire", "--iq", iq, "--prn", "1,14"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].size(), 6u);
    EXPECT_EQ(rows[1].size(), 6u);
}

TEST_F(CliTest, AcquireThresholdOverrideAndOutputs) {
    const auto iq = cdma_recording(0.003);
    const auto r = invoke({"acquire", "--iq", iq, "--prn", "1", "--snr-threshold", "200", "--out", path("acq.csv"),
                           "--surface", path("surf.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path("acq.csv"));
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    const auto rows = csv_rows(text);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][1], "0");
    EXPECT_NE(r.out.find("not acquired"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("surf.csv")));

    const auto cfg = write("acq.json", {{"acquisition", {{"snr_threshold_db", 10}, {"coherent_ms", 1}}}});
    const auto r2 = invoke({"acquire", "--iq", iq, "--prn", "7", "--config", cfg});
    ASSERT_EQ(r2.code, 0) << r2.err;
    const auto bad = write("bad.json", {{"acquisition", {{"freq_step_hz", -5}}}});
    EXPECT_EQ(invoke({"acquire", "--iq", iq, "--config", bad}).code, 2);
}

TEST_F(CliTest, TrackWritesTrace) {
    const auto iq = cdma_recording(0.05);
    const auto r = invoke({"track", "--iq", iq, "--prn", "1,7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_GT(rows.size(), 40u);
    EXPECT_EQ(rows[0].size(), 10u);
    EXPECT_EQ(rows[0][8], "code_delay_error_samples");
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][0], "1");
    EXPECT_NE(r.err.find("PRN 7: not acquired"), std::string::npos);
    // 50 ms is short next to the DLL time constant: the delay error only has to shrink.
    EXPECT_LT(std::abs(std::stod(rows.back()[8])), std::abs(std::stod(rows[1][8])));
    EXPECT_LE(std::abs(std::stod(rows.back()[8])), 0.15 * 37.33);
    EXPECT_LE(std::abs(std::stod(rows.back()[9])), 10.0);
}

TEST_F(CliTest, MissingFilesFail) {
    EXPECT_EQ(invoke({"acquire", "--iq", path("absent.iq")}).code, 1);
    EXPECT_EQ(invoke({"spectrum", "--channel", path("absent.chan"), "--source", "x"}).code, 1);
    const auto spec = write("spec.json", channel_spec(0.01));
    EXPECT_EQ(invoke({"gen-channel", "--config", spec, "--out", path("no/such/dir/x.chan")}).code, 1);
}

TEST_F(CliTest, ShippedConfigsParse) {
    const fs::path configs = SYNTHRF_CONFIG_DIR;
    for (const char* spec : {"satellite_channel.json", "haps_channel.json", "prs_channel.json"}) {
        const auto r = invoke({"gen-channel", "--config", (configs / spec).string(), "--out", path(std::string(spec) + ".chan")});
        EXPECT_EQ(r.code, 0) << spec << ": " << r.err;
    }
    const auto r = invoke({"synthesize", "prs", "--config", (configs / "prs.json").string(), "--channel",
                           path("prs_channel.json.chan"), "--out", path("prs.iq")});
    EXPECT_EQ(r.code, 0) << r.err;
}
