// SPDX-License-Identifier: Apache-2.0
#include "gs2d/cli.hpp"

#include "gs2d/gaussian.hpp"
#include "gs2d/image.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

int run_cli(std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "gsplat2d");
    argv.reserve(args.size());
    for (auto& a : args)
        argv.push_back(a.data());
    return gs2d::cli_main(static_cast<int>(argv.size()), argv.data());
}

struct CliFixture : ::testing::Test {
    fs::path dir;

    void SetUp() override {
        dir = fs::temp_directory_path() / "gs2d_cli_test";
        fs::create_directories(dir);
        gs2d::save_png(gs2d::testing::make_scene_image(64, 64, 60), (dir / "img.png").string());
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_F(CliFixture, FitInitOnlyWritesValidModel) {
    int rc = run_cli({"fit", path("img.png"), "--init", "random", "--num-gaussians", "2000",
                      "--iters", "0", "--out", path("m.g2d")});
    EXPECT_EQ(rc, 0);
    gs2d::GaussianSet set = gs2d::load_g2di(path("m.g2d"));
    EXPECT_EQ(set.size(), 2000u);
    EXPECT_EQ(set.width, 64);
}

TEST_F(CliFixture, StructuredKernelControlsCount) {
    ASSERT_EQ(run_cli({"fit", path("img.png"), "--init", "structured", "--kernel", "3", "--iters",
                       "0", "--out", path("k3.g2d")}),
              0);
    ASSERT_EQ(run_cli({"fit", path("img.png"), "--init", "structured", "--kernel", "4", "--iters",
                       "0", "--out", path("k4.g2d")}),
              0);
    EXPECT_LT(gs2d::load_g2di(path("k4.g2d")).size(), gs2d::load_g2di(path("k3.g2d")).size());
}

TEST_F(CliFixture, MissingInputExitsTwoWithoutOutput) {
    int rc = run_cli({"fit", path("absent.png"), "--init", "random", "--num-gaussians", "10",
                      "--iters", "0", "--out", path("never.g2d")});
    EXPECT_EQ(rc, 2);
    EXPECT_FALSE(fs::exists(path("never.g2d")));
}

TEST_F(CliFixture, BadArgsExitOne) {
    EXPECT_EQ(run_cli({"fit", path("img.png"), "--init", "random", "--iters", "0"}), 1);
    EXPECT_EQ(run_cli({"fit", path("img.png"), "--bogus-flag"}), 1);
    EXPECT_EQ(run_cli({"noexist-command"}), 1);
}

TEST_F(CliFixture, RenderAndEvalRoundTrip) {
    ASSERT_EQ(run_cli({"fit", path("img.png"), "--init", "structured", "--iters", "25", "--out",
                       path("m.g2d"), "--log", path("log.csv")}),
              0);
    ASSERT_EQ(run_cli({"render", path("m.g2d"), "--out", path("render.png")}), 0);
    EXPECT_TRUE(fs::exists(path("render.png")));

    // Rendering the model and evaluating it against its own render is exact.
    ASSERT_EQ(run_cli({"eval", path("render.png"), path("m.g2d")}), 0);

    std::ifstream log(path("log.csv"));
    std::string header;
    std::getline(log, header);
    EXPECT_EQ(header, "iteration,elapsed_s,psnr,ms_ssim,loss,n_gaussians");
}

TEST_F(CliFixture, RenderRejectsCorruptModel) {
    {
        std::ofstream f(path("bad.g2d"), std::ios::binary);
        f << "JUNKJUNKJUNK";
    }
    EXPECT_EQ(run_cli({"render", path("bad.g2d"), "--out", path("x.png")}), 2);

    gs2d::GaussianSet set = gs2d::random_init(5, 16, 16, 1);
    gs2d::save_g2di(set, path("trunc.g2d"));
    fs::resize_file(path("trunc.g2d"), 20 + 3 * 32 + 7);
    EXPECT_EQ(run_cli({"render", path("trunc.g2d"), "--out", path("x.png")}), 2);
}

TEST_F(CliFixture, EvalDimensionMismatchExitsOne) {
    gs2d::save_png(gs2d::testing::make_fbm_image(32, 32, 3), path("small.png"));
    ASSERT_EQ(run_cli({"fit", path("img.png"), "--init", "random", "--num-gaussians", "10",
                       "--iters", "0", "--out", path("m64.g2d")}),
              0);
    EXPECT_EQ(run_cli({"eval", path("small.png"), path("m64.g2d")}), 1);
}

TEST_F(CliFixture, PpmGradientAndPseudoModes) {
    EXPECT_EQ(run_cli({"ppm", path("img.png"), "--mode", "gradient", "--out", path("g.ppmf"),
                       "--profile-row", "32"}),
              0);
    EXPECT_TRUE(fs::exists(path("g.ppmf")));
    EXPECT_TRUE(fs::exists(path("g.ppmf.png")));

    ASSERT_EQ(run_cli({"fit", path("img.png"), "--init", "quadtree", "--iters", "0", "--out",
                       path("ref.g2d")}),
              0);
    EXPECT_EQ(run_cli({"ppm", path("img.png"), "--mode", "pseudo", "--model", path("ref.g2d"),
                       "--out", path("p.ppmf")}),
              0);
    EXPECT_EQ(run_cli({"ppm", path("img.png"), "--mode", "pseudo"}), 1); // missing --model
}

TEST_F(CliFixture, BenchEmitsCsvAndCurves) {
    int rc = run_cli({"bench", path("img.png"), "--iters", "30", "--log-every", "10", "--at",
                      "0,60", "--out", path("bench.csv"), "--curves", path("curves.dat")});
    EXPECT_EQ(rc, 0);

    std::ifstream csv(path("bench.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "strategy,checkpoint_s,iteration,elapsed_s,psnr,ms_ssim,n_gaussians");
    int structured_rows = 0, random_rows = 0;
    while (std::getline(csv, line)) {
        if (line.rfind("structured,", 0) == 0)
            ++structured_rows;
        if (line.rfind("random,", 0) == 0)
            ++random_rows;
    }
    EXPECT_EQ(structured_rows, 2); // one row per checkpoint
    EXPECT_EQ(random_rows, 2);
    EXPECT_TRUE(fs::exists(path("curves.dat")));
}

TEST_F(CliFixture, SourceImageNeverMutated) {
    auto before = fs::last_write_time(path("img.png"));
    auto size_before = fs::file_size(path("img.png"));
    run_cli({"ppm", path("img.png"), "--mode", "gradient", "--out", path("g2.ppmf")});
    run_cli({"fit", path("img.png"), "--init", "random", "--num-gaussians", "10", "--iters", "0",
             "--out", path("m2.g2d")});
    EXPECT_EQ(fs::last_write_time(path("img.png")), before);
    EXPECT_EQ(fs::file_size(path("img.png")), size_before);
}
