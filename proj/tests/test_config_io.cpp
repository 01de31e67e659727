#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "affplan/config.hpp"
#include "affplan/image_io.hpp"

using namespace affplan;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("affplan_io_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

Config load(const TempDir& d, const std::string& text) {
  Config c;
  load_config_file(c, d.file("a.conf", text));
  return c;
}

std::string config_error(const TempDir& d, const std::string& text) {
  try {
    load(d, text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

}  // namespace

TEST(Config, Defaults) {
  const Config c;
  EXPECT_EQ(c.scene.iou_min, 0.5);
  EXPECT_EQ(c.scene.min_pixels, 25u);
  EXPECT_EQ(c.loss.lambda1, 1.0);
  EXPECT_EQ(c.loss.lambda2, 1.0);
  EXPECT_EQ(c.metric.beta, 1.0);
  EXPECT_EQ(c.metric.sigma, 5.0);
  EXPECT_NEAR(c.metric.alpha, std::log(0.5) / 5.0, 1e-15);
  EXPECT_EQ(c.planner, pddl::PlannerMode::fast);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesEveryKey) {
  TempDir d;
  const auto c = load(d,
                      "# comment\n"
                      "iou_min = 0.6\n"
                      "\n"
                      "min_pixels=10   # trailing\n"
                      "lambda1 = 2\n"
                      "lambda2 = 0.5\n"
                      "metric_beta = 0.3\n"
                      "metric_sigma = 2.5\n"
                      "metric_alpha = -0.2\n"
                      "planner = \"optimal\"\n");
  EXPECT_EQ(c.scene.iou_min, 0.6);
  EXPECT_EQ(c.scene.min_pixels, 10u);
  EXPECT_EQ(c.loss.lambda1, 2.0);
  EXPECT_EQ(c.loss.lambda2, 0.5);
  EXPECT_EQ(c.metric.beta, 0.3);
  EXPECT_EQ(c.metric.sigma, 2.5);
  EXPECT_EQ(c.metric.alpha, -0.2);
  EXPECT_EQ(c.planner, pddl::PlannerMode::optimal);
}

TEST(Config, ErrorsNameTheLine) {
  TempDir d;
  EXPECT_NE(config_error(d, "iou_min = 0.5\nbogus = 1\n").find("a.conf:2: unknown key 'bogus'"), std::string::npos);
  EXPECT_NE(config_error(d, "lambda1 = fast\n").find(":1: expected a number"), std::string::npos);
  EXPECT_NE(config_error(d, "lambda1 = 1.0x\n").find("expected a number"), std::string::npos);
  EXPECT_NE(config_error(d, "\n\njust words\n").find(":3: expected key = value"), std::string::npos);
  EXPECT_NE(config_error(d, "min_pixels = 2.5\n").find("nonnegative integer"), std::string::npos);
  EXPECT_NE(config_error(d, "min_pixels = -1\n").find("nonnegative integer"), std::string::npos);
  EXPECT_NE(config_error(d, "planner = psychic\n").find(":1:"), std::string::npos);
}

TEST(Config, ValidationRejectsOutOfRange) {
  TempDir d;
  for (const char* bad : {"iou_min = 0\n", "iou_min = 1.5\n", "lambda1 = -1\n", "lambda2 = -0.1\n",
                          "metric_beta = 0\n", "metric_sigma = -2\n", "metric_alpha = 0.1\n"}) {
    config_error(d, bad);
  }
  EXPECT_NO_THROW(load(d, "iou_min = 1\nlambda1 = 0\n"));
}

TEST(Config, MissingFileThrows) {
  Config c;
  EXPECT_THROW(load_config_file(c, "/nonexistent/affplan.conf"), ConfigError);
}

TEST(Config, PathPrefersFlagOverEnvironment) {
  ::unsetenv("AFFPLAN_CONFIG");
  EXPECT_EQ(config_path(""), "");
  ::setenv("AFFPLAN_CONFIG", "/from/env.conf", 1);
  EXPECT_EQ(config_path(""), "/from/env.conf");
  EXPECT_EQ(config_path("/from/flag.conf"), "/from/flag.conf");
  ::unsetenv("AFFPLAN_CONFIG");
}

TEST(Pgm, WriteThenReadRoundTrips) {
  TempDir d;
  Grid<std::uint8_t> g(3, 4);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<std::uint8_t>(i * 21);
  io::write_pgm(d.path("x.pgm"), g);
  const auto img = io::read_pgm(d.path("x.pgm"));
  EXPECT_EQ(img.maxval, 255u);
  ASSERT_EQ(img.pixels.height(), 3u);
  ASSERT_EQ(img.pixels.width(), 4u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(img.pixels[i], g[i]);
}

TEST(Pgm, AsciiWithCommentsAndMaxval) {
  TempDir d;
  const auto p = d.file("a.pgm", "P2\n# made by hand\n3 2\n# max\n4\n0 1 2\n3 4 2\n");
  const auto img = io::read_pgm(p);
  EXPECT_EQ(img.maxval, 4u);
  EXPECT_EQ(img.pixels(1, 1), 4u);
  const auto pred = io::load_prediction(p);
  EXPECT_DOUBLE_EQ(pred(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(pred(1, 1), 1.0);
  // foreground at >= (maxval + 1) / 2
  const auto mask = io::load_mask(p);
  EXPECT_EQ(std::vector<std::uint8_t>(mask.values().begin(), mask.values().end()),
            (std::vector<std::uint8_t>{0, 0, 1, 1, 1, 1}));
}

TEST(Pgm, MaskThresholdAt128) {
  TempDir d;
  Grid<std::uint8_t> g(1, 4);
  g[0] = 0;
  g[1] = 127;
  g[2] = 128;
  g[3] = 255;
  io::write_pgm(d.path("m.pgm"), g);
  const auto m = io::load_mask(d.path("m.pgm"));
  EXPECT_EQ(m[0], 0);
  EXPECT_EQ(m[1], 0);
  EXPECT_EQ(m[2], 1);
  EXPECT_EQ(m[3], 1);
}

TEST(Pgm, SixteenBitBinary) {
  TempDir d;
  std::string body = "P5 2 1 1000\n";
  body += std::string{char(0x03), char(0xE8), char(0x01), char(0xF4)};
  const auto img = io::read_pgm(d.file("w.pgm", body));
  EXPECT_EQ(img.pixels[0], 1000u);
  EXPECT_EQ(img.pixels[1], 500u);
  EXPECT_DOUBLE_EQ(io::load_prediction(d.path("w.pgm"))[1], 0.5);
}

TEST(Pgm, RejectsMalformedFiles) {
  TempDir d;
  for (const std::string& bad : {std::string("P6\n1 1\n255\n\x01"), std::string("P2\n0 3\n255\n"),
                                 std::string("P2\n2 2\n255\n1 2 3\n"), std::string("P2\n1 1\n0\n0\n"),
                                 std::string("P2\n1 1\n7\n9\n"), std::string("P5\n2 2\n255\nab"),
                                 std::string("P2\nx 1\n255\n0\n")}) {
    EXPECT_THROW(io::read_pgm(d.file("bad.pgm", bad)), io::ImageError) << bad;
  }
  EXPECT_THROW(io::read_pgm(d.path("missing.pgm")), io::ImageError);
}
