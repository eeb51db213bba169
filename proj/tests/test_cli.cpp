#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "superrad_app.hpp"

using namespace superrad;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("superrad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    app::RunConfig config(const std::string& command) const {
        app::RunConfig c;
        c.command = command;
        c.out = dir_.string();
        return c;
    }

    io::ParsedCsv csv(const std::string& name) const { return io::parse_csv(io::read_file(dir_ / name)); }

    static double max_of(const std::vector<double>& v) {
        double m = -1e300;
        for (double x : v) m = std::max(m, x);
        return m;
    }

    int run_binary(const std::string& args) const {
        const std::string cmd = std::string(SUPERRAD_CLI_PATH) + " " + args + " --out " + dir_.string() + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, FigureTwoDefaultPeak) {
    auto c = config("figure");
    c.figure = 2;
    const auto res = app::run(c);
    ASSERT_EQ(res.files.size(), 2u);
    const auto low = csv(res.files[0]);
    const auto high = csv(res.files[1]);
    EXPECT_EQ(low.header, (std::vector<std::string>{"t", "amplitude", "intensity"}));
    EXPECT_NEAR(max_of(low.column("intensity")), 5.76, 0.02);
    EXPECT_LT(max_of(high.column("intensity")), max_of(low.column("intensity")));
    EXPECT_TRUE(fs::exists(dir_ / "figure2.manifest.json"));
}

TEST_F(CliTest, FigureOneProfileNormalized) {
    auto c = config("figure");
    c.figure = 1;
    const auto res = app::run(c);
    const auto prof = csv("figure1_profile.csv");
    EXPECT_EQ(prof.header, (std::vector<std::string>{"depth_bt", "field", "im_coherence"}));
    EXPECT_NEAR(max_of(prof.column("field")), 1.0, 1e-9);
    EXPECT_NEAR(max_of(prof.column("im_coherence")), 1.0, 1e-5);
    const auto dom = csv("figure1_domains.csv");
    ASSERT_EQ(dom.rows.size(), 3u);
    EXPECT_NEAR(dom.rows[0][1], 3.6705, 1e-3);
    EXPECT_NEAR(dom.rows[1][1], 12.3046, 1e-3);
    EXPECT_NEAR(dom.rows[2][1], 25.875, 1e-3);
}

TEST_F(CliTest, FigureFourPeakAtSwitch) {
    auto c = config("figure");
    c.figure = 4;
    c.gamma = {1e-4};
    auto res = app::run(c);
    const auto curve = csv(res.files[0]);
    EXPECT_NEAR(max_of(curve.column("intensity")), 13.36, 0.05);

    c.gamma = {0.01};
    res = app::run(c);
    const double expected = std::pow(peak_amplitude_at_tp(SliceStack::from_bt({3.67, 8.63, 13.57}, 3.67, 0.01)), 2);
    EXPECT_NEAR(max_of(csv(res.files[0]).column("intensity")), expected, 1e-8);
}

TEST_F(CliTest, FigureNumberValidated) {
    auto c = config("figure");
    c.figure = 5;
    EXPECT_THROW(app::run(c), app::UsageError);
}

TEST_F(CliTest, PeakTableRows) {
    const auto res = app::run(config("peak-table"));
    const auto t = csv("peak_table.csv");
    ASSERT_EQ(t.rows.size(), 9u);
    const auto gain = t.column("intensity_gain");
    EXPECT_NEAR(gain[0], 5.76, 0.02);
    EXPECT_NEAR(gain[3], 9.65, 0.03);
    EXPECT_NEAR(gain[6], 13.36, 0.05);
    for (int n = 0; n < 3; ++n) {
        EXPECT_GT(gain[3 * n], gain[3 * n + 1]);
        EXPECT_GT(gain[3 * n + 1], gain[3 * n + 2]);
    }
    EXPECT_TRUE(std::isnan(t.rows[0][3]));
}

TEST_F(CliTest, DomainsList) {
    auto c = config("domains");
    app::run(c);
    const auto d = csv("domains.csv");
    const auto z = d.column("boundary_bt");
    ASSERT_EQ(z.size(), 3u);
    EXPECT_NEAR(z[0], 3.67, 0.005);
    EXPECT_NEAR(z[1], 12.30, 0.005);
    EXPECT_NEAR(z[2], 25.88, 0.01);
}

TEST_F(CliTest, CascadeWithoutFlipsEqualsSingleAbsorber) {
    auto c = config("cascade");
    c.flips = false;
    app::run(c);
    const auto cascade = csv("cascade.csv");

    auto s = config("step");
    s.b = (3.67 + 8.63 + 13.57) / 3.67;
    s.gamma = {0.01};
    s.tp = 3.67;
    s.tmax = 2 * 3.67;
    s.samples = 128;
    app::run(s);
    const auto single = csv("step.csv");
    ASSERT_EQ(cascade.rows.size(), single.rows.size());
    const auto a = cascade.column("amplitude"), b = single.column("amplitude");
    const auto ta = cascade.column("t"), tb = single.column("t");
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(ta[i], tb[i], 1e-11);
        EXPECT_NEAR(a[i], b[i], 1e-6);
    }
}

TEST_F(CliTest, ComposeCheckResidual) {
    const auto res = app::run(config("compose-check"));
    EXPECT_LT(res.manifest["results"]["max_residual"].get<double>(), 1e-6);
    const auto t = csv("compose_check.csv");
    EXPECT_EQ(t.header.size(), 4u);
}

TEST_F(CliTest, StepMethodsAgree) {
    std::vector<std::vector<double>> curves;
    for (std::string m : {"series", "quadrature", "spectral", "mb"}) {
        auto c = config("step");
        c.method = m;
        c.tmax = 10.0;
        c.samples = 64;
        app::run(c);
        curves.push_back(csv("step.csv").column("amplitude"));
    }
    for (std::size_t i = 0; i < curves[0].size(); ++i) {
        EXPECT_NEAR(curves[1][i], curves[0][i], 1e-9);
        EXPECT_NEAR(curves[2][i], curves[0][i], 1e-8);
        EXPECT_NEAR(curves[3][i], curves[0][i], 1e-3);
    }
}

TEST_F(CliTest, OutputIsDeterministic) {
    auto c = config("cascade");
    c.slices = {3.67, 8.63};
    app::run(c);
    const std::string first = io::read_file(dir_ / "cascade.csv");
    const std::string manifest = io::read_file(dir_ / "cascade.manifest.json");
    app::run(c);
    EXPECT_EQ(first, io::read_file(dir_ / "cascade.csv"));
    EXPECT_EQ(manifest, io::read_file(dir_ / "cascade.manifest.json"));
}

TEST_F(CliTest, CsvRoundTripsAtPrintedPrecision) {
    auto c = config("cascade");
    c.slices = {3.67};
    c.gamma = {0.003};
    app::run(c);
    const auto t = csv("cascade.csv");
    const auto setup_grid = grid_through(3.67, 7.34, 128.0);
    const auto w = one_slice_output(1.0, 0.003, 3.67, setup_grid);
    const auto amp = t.column("amplitude");
    ASSERT_EQ(amp.size(), w.amplitude.size());
    for (std::size_t i = 0; i < amp.size(); ++i) EXPECT_NEAR(amp[i], w.amplitude[i], 1e-11 * std::max(1.0, std::abs(amp[i])));
}

TEST_F(CliTest, JsonFormat) {
    auto c = config("cascade");
    c.format = "json";
    c.slices = {3.67};
    const auto res = app::run(c);
    ASSERT_EQ(res.files.front(), "cascade.json");
    const auto j = app::json::parse(io::read_file(dir_ / "cascade.json"));
    EXPECT_EQ(j["t"].size(), j["amplitude"].size());
    const auto m = app::json::parse(io::read_file(dir_ / "cascade.manifest.json"));
    EXPECT_EQ(m["command"], "cascade");
    EXPECT_EQ(m["version"], kVersion);
    EXPECT_EQ(m["files"][0], "cascade.json");
}

TEST_F(CliTest, ReferenceRateTotalRescalesTime) {
    auto c = config("cascade");
    c.slices = {3.67, 8.63};
    c.reference_rate = "total";
    const auto res = app::run(c);
    EXPECT_NEAR(res.manifest["parameters"]["stack"]["t_p"].get<double>(), 12.3, 1e-12);
    const auto b = res.manifest["parameters"]["stack"]["slice_b"].get<std::vector<double>>();
    EXPECT_NEAR(b[0] + b[1], 1.0, 1e-12);
}

TEST_F(CliTest, OptimizeWritesResult) {
    auto c = config("optimize");
    c.n_slices = 1;
    c.budget = 50;
    const auto res = app::run(c);
    const auto& r = res.manifest["results"];
    EXPECT_GE(r["best_metrics"]["peak_intensity_gain"].get<double>(), r["baseline_gain"].get<double>());
    EXPECT_LE(r["evaluations"].get<int>(), 50);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_binary("domains"), 0);
    EXPECT_EQ(run_binary("figure 9"), 2);
    EXPECT_EQ(run_binary("cascade --bogus 1"), 2);
    EXPECT_EQ(run_binary("cascade --gamma -1"), 2);
    EXPECT_EQ(run_binary("cascade --method series --slices 1,2,3,4"), 2);
    EXPECT_EQ(run_binary("cascade --samples 8"), 3);
    EXPECT_EQ(run_binary("step --method mb --samples 4"), 3);
    EXPECT_EQ(run_binary("step --b 1000 --gamma 1 --tmax 1000 --samples 1"), 3);
}
